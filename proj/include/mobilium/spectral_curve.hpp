#pragma once

#include <complex>
#include <vector>

#include <json.hpp>

#include "mobilium/coupling.hpp"
#include "mobilium/laurent.hpp"
#include "mobilium/mobile_solver.hpp"
#include "mobilium/numeric.hpp"
#include "mobilium/report.hpp"
#include "mobilium/series.hpp"

namespace mobilium {

class DegenerateCurve : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GenericityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// alpha_j, beta_j and R as exact truncated series
struct SeriesCurve {
    CouplingSpec spec;
    int order = 0;
    SpacePtr space;
    std::vector<Series> alpha;  // alpha_0 .. alpha_{q-1}
    std::vector<Series> beta;   // beta_0 .. beta_{p-1}
    Series R;
    int sweeps = 0;
};

// value of a series at the numeric couplings of spec (t = 1, sqrtg = sqrt(g))
template <class Real>
Cx<Real> eval_at_couplings(const Series& s, const CouplingSpec& spec);

SeriesCurve solve_limit_system(const CouplingSpec& spec, int order);
// residuals of the three defining equations, exact
CheckReport check_limit_system(const SeriesCurve& c);
CheckReport compare_with_limits(const SeriesCurve& c, const Limits& lim);

template <class Real>
struct CurveData {
    using C = Cx<Real>;
    int p = 2, q = 2;
    std::vector<C> g, gt;  // g[k], gt[k] with index 0 unused
    std::vector<C> alpha, beta;
    C R = C(1);
    CMat<Real> E;  // (p+1) x (q+1), filled by curve_polynomial
    Real residual = 0;
    int newton_steps = 0;

    int N() const { return (p - 1) * (q - 1) - 1; }
    Laurent<C> X() const;
    Laurent<C> Y() const;
    C X_at(C z) const;
    C Y_at(C z) const;
    C dX_at(C z) const;
    C E_at(C x, C y) const;
    C E_x(C x, C y) const;
    C E_y(C x, C y) const;
    // sum |E_ij| |x|^i |y|^j, the natural scale of E(x, y)
    Real E_scale(C x, C y) const;
};

// residuals of the limit system at numeric (alpha, beta, R)
template <class Real>
std::vector<Cx<Real>> limit_residual(const CurveData<Real>& c);

struct RefineOptions {
    int seed_order = 6;
    int max_steps = 60;
    double tol = 1e-12;
};

// Newton-polished numeric solution seeded by the series solution at order
// seed_order. When that seed fails, the branch is followed from zero
// couplings; NumericError when the continuation stalls.
template <class Real>
CurveData<Real> refine_numeric(const CouplingSpec& spec, const RefineOptions& opts = {});

// E(x, y) as the Sylvester determinant over alpha_{q-1}, interpolated on a grid
template <class Real>
void curve_polynomial(CurveData<Real>& c);

template <class Real>
struct DoublePointSet {
    using C = Cx<Real>;
    int N = 0;
    std::vector<C> w, wbar, Xa;
    std::vector<C> branch_points;
    Real max_pair_error = 0;   // worst X/Y disagreement over pairs after polishing
    Real min_modulus_gap = 0;  // min_a (|wbar_a| - |w_a|) / |wbar_a|

    // monic products over w_a (Delta) and wbar_a (DeltaBar), ascending coefficients
    std::vector<C> Delta, DeltaBar;
    C Delta_at(C z) const { return poly_eval(Delta, z); }
    C DeltaBar_at(C z) const { return poly_eval(DeltaBar, z); }
    C dDelta_at(C z) const { return poly_deriv_eval(Delta, z); }
    C dDeltaBar_at(C z) const { return poly_deriv_eval(DeltaBar, z); }

    // rebuilds Delta, DeltaBar and Xa from w, wbar
    void finish();
};

struct DoublePointOptions {
    double branch_tol = 1e-6;
    // raw roots lose accuracy when |w| and |wbar| are far apart; pairs are
    // matched loosely, then polished and verified against verify_tol
    double pair_threshold = 1e-3;
    // any other candidate partner must be this many times worse
    double ambiguity_ratio = 1e3;
    double verify_tol = 1e-10;
    double genericity = 1e-6;
};

// pair agreement metric: |F(w) - F(wbar)| / max(1, |F(w)|) for F = X, Y
template <class Real>
Real pair_error(const CurveData<Real>& c, Cx<Real> w, Cx<Real> wbar);

// z^{N+q-1} E_y(X(z), Y(z)) as ascending polynomial coefficients
template <class Real>
std::vector<Cx<Real>> composed_Ey(const CurveData<Real>& c);

template <class Real>
DoublePointSet<Real> double_points(const CurveData<Real>& c, const DoublePointOptions& opts = {});

template <class Real>
struct LeadingSeeds {
    std::vector<Cx<Real>> eta, xi;
    std::vector<Cx<Real>> composed;  // ascending coefficients before removing eta = 0
};

// Nontrivial solutions of sum lambda_{j+1} eta^j = xi, sum lambdat_{j+1} xi^j = eta
template <class Real>
LeadingSeeds<Real> leading_order_seeds(const CouplingSpec& spec);

template <class Real>
CheckReport check_residue_identity(const DoublePointSet<Real>& d, double tol = 1e-8);
template <class Real>
CheckReport check_pairs(const CurveData<Real>& c, const DoublePointSet<Real>& d, double tol = 1e-10);
template <class Real>
CheckReport check_Ey_factorization(const CurveData<Real>& c, const DoublePointSet<Real>& d, double tol = 1e-8);
template <class Real>
CheckReport check_curve_residual(const CurveData<Real>& c, int samples = 20, double tol = 1e-10);
// coefficients outside the interior block against -(V~'(x) - y)(V'(y) - x)/g_q
template <class Real>
CheckReport check_curve_boundary(const CurveData<Real>& c, double tol = 1e-10);

template <class Real>
nlohmann::json curve_to_json(const CurveData<Real>& c, const DoublePointSet<Real>* d);

}  // namespace mobilium
