#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mobilium/coupling.hpp"
#include "mobilium/numeric.hpp"
#include "mobilium/report.hpp"
#include "mobilium/spectral_curve.hpp"

namespace mobilium {

// xi_n = (wbar_a^n - w_a^n)_a
template <class Real>
CVec<Real> xi_vector(const DoublePointSet<Real>& d, int n);

// (wbar_a^k - w_a^k) / c_a^{k0} with c_a = wbar_a for k0 >= 0, w_a otherwise
template <class Real>
Cx<Real> xi_scaled(const DoublePointSet<Real>& d, int a, int k, int k0);

// det(xi_{n+1}, ..., xi_{n+N}); 1 when N = 0
template <class Real>
Cx<Real> h_n(const DoublePointSet<Real>& d, int n);

// same determinant with row a divided by c_a^{n+1} as in xi_scaled; ratios
// with balanced row powers equal the unscaled ratios
template <class Real>
Cx<Real> h_n_scaled(const DoublePointSet<Real>& d, int n);

// det(delta_ab - rho_a X_a^{n+1} / (w_a - wbar_b)), rho_a = DeltaBar(w_a) / DeltaBar'(wbar_a)
template <class Real>
Cx<Real> hbar_n(const DoublePointSet<Real>& d, int n);
// the equivalent form with the roles of w and wbar exchanged and X_a^{n+N}
template <class Real>
Cx<Real> hbar_n_bis(const DoublePointSet<Real>& d, int n);
template <class Real>
std::vector<Cx<Real>> rho(const DoublePointSet<Real>& d);

// R h_{n-1} h_{n+1} / h_n^2, evaluated through hbar (bounded entries)
template <class Real>
Cx<Real> R_n_det(const DoublePointSet<Real>& d, Cx<Real> R, int n);
// same ratio straight from h_n; used as a cross-check at small n
template <class Real>
Cx<Real> R_n_det_direct(const DoublePointSet<Real>& d, Cx<Real> R, int n);

// h_n = prod_{a<b}(wbar_b - wbar_a) prod_a wbar_a^{n+1} hbar_n, and hbar = hbar_bis
template <class Real>
CheckReport check_hbar_identity(const DoublePointSet<Real>& d, int n_max = 10, double tol = 1e-8);

// ---- lattice paths ----

// exact polynomial in R (any sign of exponent) and S: (R-exp, S-exp) -> count
using PathPoly = std::map<std::pair<int, int>, long long>;

enum class PathKind {
    three_step,           // up 1, level S, down R
    three_step_positive,  // same steps, height never below 0
    p_step,               // up p-1, down R
};

// weighted paths of n steps from height 0 to height m
PathPoly path_gf(PathKind kind, int n, int m, int p = 3);

PathPoly path_add(const PathPoly& a, const PathPoly& b);
PathPoly path_mul(const PathPoly& a, const PathPoly& b);
PathPoly path_scale_R(const PathPoly& a, int e);
std::string path_str(const PathPoly& a);

template <class Real>
Cx<Real> path_eval(const PathPoly& a, Cx<Real> R, Cx<Real> S = Cx<Real>(0));

// sum_{s=|n|}^{k-2} pi_0(k-s-2) pi_|n|(s) = sum_m pi_{-2m-|n|-1}(k-1) R^{-m-|n|-1}
CheckReport check_pathident(int k_max = 8, int n_max = 3);
// pi_0(r) = sum_m pi+_{2m}(r) R^m
CheckReport check_pathidreduced(int r_max = 8);
// pi_m(n) = R^{-m} pi_{-m}(n)
CheckReport check_height_reversal(int n_max = 8);

// ---- general maps: gt_k = delta_{k,2} ----

template <class Real>
struct GeneralMapData {
    using C = Cx<Real>;
    int q = 0;
    C R, S;
    std::vector<C> B_eq, B_cf;  // B_n for n = -(q-2)..(q-2)
    std::vector<C> x;           // the q-2 roots with |x| < 1
    Real B_form_gap = 0;        // max |B_eq - B_cf|
    Real rs_residual = 0;

    // R h~_{i-1} h~_{i+1} / h~_i^2 with h~_i = det(x_a^{-(i+b)} - x_a^{i+b})
    C R_i(int i) const;
    C htilde(int i) const;
};

// q-angulation-type spec: p = 2, gt_2 = 1, g_k numeric
CouplingSpec general_map_spec(int q, const std::vector<std::pair<int, Rational>>& g);

template <class Real>
GeneralMapData<Real> general_map_char(const CouplingSpec& spec, double unit_circle_tol = 1e-8);

// ---- p-constellations: gt_k = delta_{k,p}, g_{pm} = ghat_m ----

template <class Real>
struct ConstellationData {
    using C = Cx<Real>;
    int p = 0, ell = 0, N0 = 0;
    std::vector<C> ghat;  // ghat[m], index 0 unused
    C R;
    CurveData<Real> curve;
    DoublePointSet<Real> full;
    std::vector<int> reps;    // indices into full, one per Omega-orbit
    std::vector<C> w, wbar, X, xi, chi;
    Real orbit_error = 0;

    enum class Route { u_w, u_x, v_x, v_w };
    // the N0 x N0 determinant u_i / v_i in one of its four forms
    C block(Route r, int i) const;
    // subset-sum expansion with tau (tilde = false) or tau~ (tilde = true)
    C subset_sum(bool tilde, int i) const;
    C R_i(Route r, int i) const;
    // hbar_i of the full double-point set
    C hbar(int i) const;
};

// gt_p = 1, g_{pm} = ghat[m-1] for m = 1..ell
CouplingSpec constellation_spec(int p, int ell, const std::vector<Rational>& ghat);

// rotate = s picks the orbit member Omega^s times the canonical representative
template <class Real>
ConstellationData<Real> constellation_factor(const CouplingSpec& spec, int rotate = 0);

template <class Real>
CheckReport check_constellation(const ConstellationData<Real>& cd, int i_max = 6, double tol = 1e-8);
// p-angulation form (ell = 1) and the general form of the characteristic equation at each X_a
template <class Real>
CheckReport check_constellation_char(const ConstellationData<Real>& cd, double tol = 1e-8);

// CSV rows n,R_n_det,R_n_series_eval,abs_diff
std::string R_table_csv(const std::vector<std::array<double, 3>>& rows);

}  // namespace mobilium
