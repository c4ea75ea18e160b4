#pragma once

#include <vector>

#include <json.hpp>

#include "mobilium/determinants.hpp"
#include "mobilium/laurent.hpp"
#include "mobilium/numeric.hpp"
#include "mobilium/report.hpp"
#include "mobilium/spectral_curve.hpp"

namespace mobilium {

template <class Real>
struct BAFunctions {
    using C = Cx<Real>;
    int N = 0;
    int n_max = 0;
    std::vector<Laurent<C>> psi;  // psi[n] ~ z^{n+N+1} at infinity
    std::vector<Laurent<C>> phi;  // phi[n] = psi_{-2-n-N}
    std::vector<C> rho;
    // largest coefficient of z^{N+1} seen during interpolation (should vanish)
    Real interpolation_error = 0;
};

// psi_m for any m outside -N..-1
template <class Real>
Laurent<Cx<Real>> build_psi(const DoublePointSet<Real>& d, int m, Real* interp_err = nullptr);

template <class Real>
BAFunctions<Real> build_psi_phi(const DoublePointSet<Real>& d, int n_max);

enum class ResidueAt { infinity, zero };

// -Res_{z=inf} f g z^{N-1} / (Delta DeltaBar) dz; the residue at 0 agrees for
// f in the phi space and g in the psi space
template <class Real>
Cx<Real> scalar_product(const Laurent<Cx<Real>>& f, const Laurent<Cx<Real>>& g, const DoublePointSet<Real>& d,
                        ResidueAt at = ResidueAt::infinity);

template <class Real>
struct Operators {
    CMat<Real> Q, P;  // dense M x M, rows n = 0..M-1
    int interior = 0;  // rows 0..interior-1 are asserted on
};

// Q_{n,m} = <phi_m, X psi_n>, P_{n,m} = <phi_m, Y psi_n>; ba must hold M functions
template <class Real>
Operators<Real> reconstruct_operators(const BAFunctions<Real>& ba, const CurveData<Real>& c,
                                      const DoublePointSet<Real>& d, int n_max);
// window size needed so that rows 0..n_max are exact
int operator_window(int p, int q, int n_max);

template <class Real>
CheckReport check_orthonormality(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, int n_max = 8,
                                 double tol = 1e-10);
template <class Real>
CheckReport check_constant_orthogonality(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, int n_max = 8,
                                         double tol = 1e-10);
template <class Real>
CheckReport check_asymptotics(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, double tol = 1e-10);
// error is measured against the term magnitudes of the two evaluations, since
// psi_n(wbar_a) is a cancellation of terms of size |wbar_a|^{n+N+1}
template <class Real>
CheckReport check_doublepoint_values(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d,
                                     double tol = 1e-8);
template <class Real>
CheckReport check_Delta0(const DoublePointSet<Real>& d, int n_max = 8, double tol = 1e-8);
template <class Real>
CheckReport check_Q_band(const Operators<Real>& ops, int q, double tol = 1e-10);
template <class Real>
CheckReport check_P_band(const Operators<Real>& ops, int p, const DoublePointSet<Real>& d, Cx<Real> R,
                         double tol = 1e-10);
template <class Real>
CheckReport check_T_bands(const Operators<Real>& ops, const CurveData<Real>& c, double tol = 1e-8);
template <class Real>
CheckReport check_commutator_numeric(const Operators<Real>& ops, double tol = 1e-8);

template <class Real>
nlohmann::json ba_to_json(const BAFunctions<Real>& ba);

}  // namespace mobilium
