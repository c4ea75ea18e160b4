#include "mobilium/spectral_curve.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace mobilium {

namespace {

// X, Y as Laurent polynomials over any coefficient ring
template <class T>
Laurent<T> make_X(const std::vector<T>& alpha, const T& one, const T& zero) {
    Laurent<T> X = Laurent<T>::monomial(1, one, zero);
    for (std::size_t j = 0; j < alpha.size(); ++j) X.add(-static_cast<int>(j), alpha[j]);
    return X;
}

template <class T>
Laurent<T> make_Y(const std::vector<T>& beta, const T& R, const T& zero) {
    Laurent<T> Y = Laurent<T>::monomial(-1, R, zero);
    for (std::size_t j = 0; j < beta.size(); ++j) Y.add(static_cast<int>(j), beta[j]);
    return Y;
}

template <class T>
T times_int(const T& x, int j) {
    T r = x;
    for (int k = 1; k < j; ++k) r += x;
    return r;
}

// one sweep of the limit system; returns the new (alpha, beta, R)
template <class T>
void limit_sweep(int p, int q, const std::vector<T>& g, const std::vector<T>& gt, std::vector<T>& alpha,
                 std::vector<T>& beta, T& R, const T& one, const T& zero) {
    Laurent<T> Y = make_Y(beta, R, zero);
    Laurent<T> Yk = Laurent<T>::monomial(0, one, zero);
    std::vector<T> na(q, zero);
    for (int k = 1; k <= q; ++k) {
        for (int j = 0; j < k && j < q; ++j) na[j] += g[k] * Yk.coeff(-j);
        if (k < q) Yk = Yk * Y;
    }
    alpha = na;
    Laurent<T> X = make_X(alpha, one, zero);
    Laurent<T> Xk = Laurent<T>::monomial(0, one, zero);
    std::vector<T> nb(p, zero);
    for (int k = 1; k <= p; ++k) {
        for (int j = 0; j < k && j < p; ++j) nb[j] += gt[k] * Xk.coeff(j);
        if (k < p) Xk = Xk * X;
    }
    beta = nb;
    T r = one;
    for (int j = 1; j < std::min(p, q); ++j) r += times_int(alpha[j] * beta[j], j);
    R = r;
}

}  // namespace

template <class Real>
Cx<Real> eval_at_couplings(const Series& s, const CouplingSpec& spec) {
    if constexpr (std::is_same_v<Real, double>) {
        std::map<std::string, std::complex<double>> at;
        for (auto& v : s.space()->vars()) {
            if (v == kGradingVar) at[v] = 1.0;
            else if (v == kSqrtGVar) at[v] = std::sqrt(rational_to<double>(spec.g));
            else throw std::invalid_argument("series has free variable " + v);
        }
        return s.eval(at);
    } else {
        std::map<std::string, std::complex<long double>> at;
        for (auto& v : s.space()->vars()) {
            if (v == kGradingVar) at[v] = 1.0L;
            else if (v == kSqrtGVar) at[v] = std::sqrt(rational_to<long double>(spec.g));
            else throw std::invalid_argument("series has free variable " + v);
        }
        return s.eval_extended(at);
    }
}

SeriesCurve solve_limit_system(const CouplingSpec& spec, int order) {
    spec.validate();
    if (order < 0) throw std::invalid_argument("order must be non-negative");
    SeriesCurve c;
    c.spec = spec;
    c.order = order;
    c.space = spec.space(order);
    Series zero(c.space), one = Series::constant(c.space, 1);
    auto g = spec.white_series(c.space);
    auto gt = spec.black_series(c.space);
    c.alpha.assign(spec.q, zero);
    c.beta.assign(spec.p, zero);
    c.R = one;
    // every sweep fixes at least one more degree
    for (int sweep = 1; sweep <= order + 3; ++sweep) {
        auto a = c.alpha;
        auto b = c.beta;
        Series r = c.R;
        limit_sweep(spec.p, spec.q, g, gt, a, b, r, one, zero);
        bool same = r == c.R && a == c.alpha && b == c.beta;
        c.alpha = std::move(a);
        c.beta = std::move(b);
        c.R = std::move(r);
        c.sweeps = sweep;
        if (same) return c;
    }
    throw SolverError("limit system did not stabilize within order + 3 sweeps");
}

CheckReport check_limit_system(const SeriesCurve& c) {
    CheckReport rep("limit_system");
    Series zero(c.space), one = Series::constant(c.space, 1);
    auto g = c.spec.white_series(c.space);
    auto gt = c.spec.black_series(c.space);
    auto a = c.alpha;
    auto b = c.beta;
    Series r = c.R;
    limit_sweep(c.spec.p, c.spec.q, g, gt, a, b, r, one, zero);
    for (int j = 0; j < c.spec.q; ++j) {
        ++rep.checked;
        if (a[j] != c.alpha[j]) rep.fail(j, -1, "alpha_" + std::to_string(j) + " is not a fixed point");
    }
    for (int j = 0; j < c.spec.p; ++j) {
        ++rep.checked;
        if (b[j] != c.beta[j]) rep.fail(j, -1, "beta_" + std::to_string(j) + " is not a fixed point");
    }
    ++rep.checked;
    if (r != c.R) rep.fail(-1, -1, "sum j alpha_j beta_j != R - 1");
    return rep;
}

CheckReport compare_with_limits(const SeriesCurve& c, const Limits& lim) {
    CheckReport rep("limits_agree");
    auto cmp = [&](const Series& x, const Series& y, int j, const std::string& what) {
        ++rep.checked;
        int ord = std::min(x.order(), y.order());
        if (x.truncated(ord) != y.truncated(ord)) rep.fail(j, -1, what + " differs");
    };
    for (int j = 0; j < c.spec.q && j < static_cast<int>(lim.alpha.size()); ++j)
        cmp(c.alpha[j], lim.alpha[j], j, "alpha_" + std::to_string(j));
    for (int j = 0; j < c.spec.p && j < static_cast<int>(lim.beta.size()); ++j)
        cmp(c.beta[j], lim.beta[j], j, "beta_" + std::to_string(j));
    cmp(c.R, lim.R, -1, "R");
    return rep;
}

template <class Real>
Laurent<Cx<Real>> CurveData<Real>::X() const {
    return make_X(alpha, C(1), C(0));
}

template <class Real>
Laurent<Cx<Real>> CurveData<Real>::Y() const {
    return make_Y(beta, R, C(0));
}

template <class Real>
Cx<Real> CurveData<Real>::X_at(C z) const {
    C acc(0);
    for (std::size_t j = alpha.size(); j-- > 0;) acc = acc / z + alpha[j];
    return z + acc;
}

template <class Real>
Cx<Real> CurveData<Real>::Y_at(C z) const {
    return R / z + poly_eval(beta, z);
}

template <class Real>
Cx<Real> CurveData<Real>::dX_at(C z) const {
    C acc(1);
    for (std::size_t j = 1; j < alpha.size(); ++j) acc -= Real(j) * alpha[j] * Laurent<C>::pow_int(z, -static_cast<int>(j) - 1);
    return acc;
}

template <class Real>
Cx<Real> CurveData<Real>::E_at(C x, C y) const {
    C acc(0);
    for (int i = static_cast<int>(E.rows()); i-- > 0;) {
        C row(0);
        for (int j = static_cast<int>(E.cols()); j-- > 0;) row = row * y + E(i, j);
        acc = acc * x + row;
    }
    return acc;
}

template <class Real>
Cx<Real> CurveData<Real>::E_x(C x, C y) const {
    C acc(0);
    for (int i = static_cast<int>(E.rows()); i-- > 1;) {
        C row(0);
        for (int j = static_cast<int>(E.cols()); j-- > 0;) row = row * y + E(i, j);
        acc = acc * x + row * Real(i);
    }
    return acc;
}

template <class Real>
Cx<Real> CurveData<Real>::E_y(C x, C y) const {
    C acc(0);
    for (int i = static_cast<int>(E.rows()); i-- > 0;) {
        C row(0);
        for (int j = static_cast<int>(E.cols()); j-- > 1;) row = row * y + E(i, j) * Real(j);
        acc = acc * x + row;
    }
    return acc;
}

template <class Real>
Real CurveData<Real>::E_scale(C x, C y) const {
    Real s = 0;
    for (int i = 0; i < E.rows(); ++i)
        for (int j = 0; j < E.cols(); ++j)
            s += std::abs(E(i, j)) * rpow(Real(std::abs(x)), Real(i)) * rpow(Real(std::abs(y)), Real(j));
    return s;
}

template <class Real>
std::vector<Cx<Real>> limit_residual(const CurveData<Real>& c) {
    using C = Cx<Real>;
    auto a = c.alpha;
    auto b = c.beta;
    C r = c.R;
    limit_sweep(c.p, c.q, c.g, c.gt, a, b, r, C(1), C(0));
    std::vector<C> res;
    for (int j = 0; j < c.q; ++j) res.push_back(c.alpha[j] - a[j]);
    for (int j = 0; j < c.p; ++j) res.push_back(c.beta[j] - b[j]);
    res.push_back(c.R - r);
    return res;
}

namespace {

// Newton on the limit system with a finite-difference Jacobian; weights are
// the ones stored in c. Returns the final residual.
template <class Real>
Real newton_limit(CurveData<Real>& c, const RefineOptions& opts, int& steps) {
    using C = Cx<Real>;
    const int n = c.q + c.p + 1;
    auto pack = [&](const CurveData<Real>& d) {
        CVec<Real> u(n);
        for (int j = 0; j < d.q; ++j) u(j) = d.alpha[j];
        for (int j = 0; j < d.p; ++j) u(d.q + j) = d.beta[j];
        u(n - 1) = d.R;
        return u;
    };
    auto unpack = [&](const CVec<Real>& u, CurveData<Real>& d) {
        for (int j = 0; j < d.q; ++j) d.alpha[j] = u(j);
        for (int j = 0; j < d.p; ++j) d.beta[j] = u(d.q + j);
        d.R = u(n - 1);
    };
    auto F = [&](const CVec<Real>& u) {
        CurveData<Real> d = c;
        unpack(u, d);
        auto r = limit_residual(d);
        CVec<Real> v(n);
        for (int k = 0; k < n; ++k) v(k) = r[k];
        return v;
    };
    auto norm = [](const CVec<Real>& v) {
        Real m = 0;
        for (int k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v(k)));
        return m;
    };
    CVec<Real> u = pack(c);
    CVec<Real> f = F(u);
    Real res = norm(f);
    const Real floor_tol = std::max(Real(opts.tol) * Real(1e-3), 64 * std::numeric_limits<Real>::epsilon());
    const Real h_rel = rsqrt<Real>(std::numeric_limits<Real>::epsilon());
    steps = 0;
    for (; steps < opts.max_steps && res > floor_tol; ++steps) {
        CMat<Real> J(n, n);
        for (int k = 0; k < n; ++k) {
            CVec<Real> up = u;
            Real h = h_rel * std::max(Real(1), std::abs(u(k)));
            up(k) += h;
            J.col(k) = (F(up) - f) / C(h);
        }
        CVec<Real> next = u - J.partialPivLu().solve(f);
        CVec<Real> fn = F(next);
        Real rn = norm(fn);
        if (!(rn < res)) break;
        u = next;
        f = fn;
        res = rn;
    }
    unpack(u, c);
    return res;
}

}  // namespace

template <class Real>
CurveData<Real> refine_numeric(const CouplingSpec& spec, const RefineOptions& opts) {
    using C = Cx<Real>;
    spec.validate();
    if (!spec.fully_numeric()) throw std::invalid_argument("numeric curve needs numeric couplings");
    CurveData<Real> c;
    c.p = spec.p;
    c.q = spec.q;
    c.g = spec.white_values<Real>();
    c.gt = spec.black_values<Real>();
    c.alpha.assign(c.q, C(0));
    c.beta.assign(c.p, C(0));
    c.R = 1;
    if (spec.all_zero()) return c;

    SeriesCurve seed = solve_limit_system(spec, opts.seed_order);
    CurveData<Real> s = c;
    for (int j = 0; j < c.q; ++j) s.alpha[j] = eval_at_couplings<Real>(seed.alpha[j], spec);
    for (int j = 0; j < c.p; ++j) s.beta[j] = eval_at_couplings<Real>(seed.beta[j], spec);
    s.R = eval_at_couplings<Real>(seed.R, spec);
    const C Rs = s.R;
    int steps = 0;
    Real res = newton_limit(s, opts, steps);
    if (res < Real(opts.tol) && std::abs(s.R - Rs) <= Real(0.1) * std::max(Real(1), std::abs(Rs))) {
        s.residual = res;
        s.newton_steps = steps;
        return s;
    }

    // far from the series regime: follow the branch from zero couplings
    Real t = 0, dt = Real(0.125);
    int total = 0;
    while (t < 1) {
        Real tn = std::min(Real(1), t + dt);
        CurveData<Real> d = c;
        for (std::size_t k = 0; k < d.g.size(); ++k) d.g[k] = c.g[k] * tn;
        for (std::size_t k = 0; k < d.gt.size(); ++k) d.gt[k] = c.gt[k] * tn;
        int st = 0;
        Real r = newton_limit(d, opts, st);
        total += st;
        if (r < Real(opts.tol) && std::abs(d.R - c.R) <= Real(0.25) * std::abs(c.R)) {
            d.g = c.g;
            d.gt = c.gt;
            c.alpha = d.alpha;
            c.beta = d.beta;
            c.R = d.R;
            c.residual = r;
            t = tn;
            dt = std::min(Real(0.25), dt * 2);
        } else {
            dt /= 2;
            if (dt < Real(1e-6))
                throw NumericError("continuation from zero couplings stalled at t = " + std::to_string(static_cast<double>(t)) +
                                   "; couplings outside the convergent region");
        }
    }
    c.newton_steps = total;
    return c;
}

template <class Real>
void curve_polynomial(CurveData<Real>& c) {
    using C = Cx<Real>;
    const int p = c.p, q = c.q, n = p + q;
    if (c.alpha.at(q - 1) == C(0)) throw DegenerateCurve("alpha_{q-1} vanishes: degenerate top coefficient");
    auto sylvester = [&](C x, C y) {
        CMat<Real> M = CMat<Real>::Zero(n, n);
        for (int r = 0; r < p; ++r) {
            M(r, r) = 1;
            M(r, r + 1) = c.alpha[0] - x;
            for (int j = 1; j < q; ++j) M(r, r + 1 + j) = c.alpha[j];
        }
        for (int r = 0; r < q; ++r) {
            for (int k = 0; k < p - 1; ++k) M(p + r, r + k) = c.beta[p - 1 - k];
            M(p + r, r + p - 1) = c.beta[0] - y;
            M(p + r, r + p) = c.R;
        }
        return determinant<Real>(M) / c.alpha[q - 1];
    };
    const Real pi = pi_v<Real>();
    const int nx = p + 1, ny = q + 1;
    CMat<Real> V(nx, ny);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < ny; ++b)
            V(a, b) = sylvester(std::polar(Real(1), 2 * pi * a / nx), std::polar(Real(1), 2 * pi * b / ny));
    c.E = CMat<Real>::Zero(nx, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            C s(0);
            for (int a = 0; a < nx; ++a)
                for (int b = 0; b < ny; ++b)
                    s += V(a, b) * std::polar(Real(1), -2 * pi * (Real(a * i) / nx + Real(b * j) / ny));
            c.E(i, j) = s / Real(nx * ny);
        }
}

template <class Real>
void DoublePointSet<Real>::finish() {
    N = static_cast<int>(w.size());
    Delta.assign(1, C(1));
    DeltaBar.assign(1, C(1));
    auto mul_root = [](std::vector<C>& poly, C r) {
        std::vector<C> out(poly.size() + 1, C(0));
        for (std::size_t k = 0; k < poly.size(); ++k) {
            out[k + 1] += poly[k];
            out[k] -= r * poly[k];
        }
        poly = std::move(out);
    };
    Xa.clear();
    for (int a = 0; a < N; ++a) {
        mul_root(Delta, w[a]);
        mul_root(DeltaBar, wbar[a]);
        Xa.push_back(w[a] / wbar[a]);
    }
}

template <class Real>
Real pair_error(const CurveData<Real>& c, Cx<Real> w, Cx<Real> wbar) {
    auto X1 = c.X_at(w), X2 = c.X_at(wbar), Y1 = c.Y_at(w), Y2 = c.Y_at(wbar);
    return std::max(std::abs(X1 - X2) / std::max(Real(1), std::abs(X1)),
                    std::abs(Y1 - Y2) / std::max(Real(1), std::abs(Y1)));
}

template <class Real>
std::vector<Cx<Real>> composed_Ey(const CurveData<Real>& c) {
    using C = Cx<Real>;
    if (c.E.size() == 0) throw std::logic_error("curve_polynomial must run before composed_Ey");
    const int p = c.p, q = c.q, N = c.N();
    auto X = c.X(), Y = c.Y();
    std::vector<Laurent<C>> Xp{Laurent<C>::monomial(0, C(1), C(0))}, Yp{Laurent<C>::monomial(0, C(1), C(0))};
    for (int i = 1; i <= p; ++i) Xp.push_back(Xp.back() * X);
    for (int j = 1; j < q; ++j) Yp.push_back(Yp.back() * Y);
    Laurent<C> Ey(C(0));
    for (int i = 0; i <= p; ++i)
        for (int j = 1; j <= q; ++j)
            if (c.E(i, j) != C(0)) Ey += (Xp[i] * Yp[j - 1]).scaled(c.E(i, j) * Real(j));
    Ey = Ey.shifted(N + q - 1);
    std::vector<C> out(2 * N + q + 1, C(0));
    Real scale = 0;
    for (auto& v : Ey.coeffs()) scale = std::max(scale, std::abs(v));
    for (int e = Ey.low(); e <= Ey.high(); ++e) {
        if (e >= 0 && e <= 2 * N + q) out[e] = Ey.coeff(e);
        else if (std::abs(Ey.coeff(e)) > Real(1e-8) * scale)
            throw NumericError("z^{N+q-1} E_y(X, Y) has terms outside degrees 0.." + std::to_string(2 * N + q));
    }
    return out;
}

namespace {

// divided differences of X and Y across a candidate pair
template <class Real>
std::array<Cx<Real>, 2> pair_equations(const CurveData<Real>& c, Cx<Real> w, Cx<Real> v) {
    using C = Cx<Real>;
    // complete homogeneous sums h_k(w, v) = sum_{i=0}^k w^i v^{k-i}
    auto hsum = [&](int k) {
        C s(0), wi(1);
        for (int i = 0; i <= k; ++i) {
            s += wi * Laurent<C>::pow_int(v, k - i);
            wi *= w;
        }
        return s;
    };
    C fx(1), fy = -c.R / (w * v);
    C wv = w * v;
    for (int j = 1; j < c.q; ++j) fx -= c.alpha[j] * hsum(j - 1) / Laurent<C>::pow_int(wv, j);
    for (int j = 1; j < c.p; ++j) fy += c.beta[j] * hsum(j - 1);
    return {fx, fy};
}

template <class Real>
void polish_pair(const CurveData<Real>& c, Cx<Real>& w, Cx<Real>& v) {
    using C = Cx<Real>;
    auto size = [](const std::array<C, 2>& f) { return std::max(std::abs(f[0]), std::abs(f[1])); };
    auto f = pair_equations(c, w, v);
    Real res = size(f);
    const Real h_rel = rsqrt<Real>(std::numeric_limits<Real>::epsilon());
    for (int it = 0; it < 20; ++it) {
        C hw = h_rel * std::max(Real(1e-300), std::abs(w)), hv = h_rel * std::max(Real(1e-300), std::abs(v));
        auto fw = pair_equations(c, w + hw, v), fv = pair_equations(c, w, v + hv);
        C a = (fw[0] - f[0]) / hw, b = (fv[0] - f[0]) / hv, cc = (fw[1] - f[1]) / hw, d = (fv[1] - f[1]) / hv;
        C det = a * d - b * cc;
        if (det == C(0)) return;
        C dw = (d * f[0] - b * f[1]) / det, dv = (a * f[1] - cc * f[0]) / det;
        C nw = w - dw, nv = v - dv;
        auto nf = pair_equations(c, nw, nv);
        if (!(size(nf) < res)) return;
        w = nw;
        v = nv;
        f = nf;
        res = size(nf);
    }
}

}  // namespace

template <class Real>
DoublePointSet<Real> double_points(const CurveData<Real>& c, const DoublePointOptions& opts) {
    using C = Cx<Real>;
    const int q = c.q, N = c.N();
    if (N < 0) throw std::invalid_argument("double points need p, q >= 2");
    DoublePointSet<Real> d;
    // branch points: roots of z^q X'(z) = z^q - sum_j j alpha_j z^{q-1-j}
    std::vector<C> bp(q + 1, C(0));
    bp[q] = 1;
    for (int j = 1; j < q; ++j) bp[q - 1 - j] -= Real(j) * c.alpha[j];
    d.branch_points = poly_roots(bp);
    if (N == 0) {
        d.finish();
        return d;
    }
    auto comp = composed_Ey(c);
    auto roots = poly_roots(comp);
    if (static_cast<int>(roots.size()) != 2 * N + q)
        throw NumericError("composed E_y has " + std::to_string(roots.size()) + " roots, expected " +
                           std::to_string(2 * N + q));
    std::vector<bool> used(roots.size(), false);
    for (auto& b : d.branch_points) {
        int best = -1;
        Real bd = 0;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            if (used[k]) continue;
            Real dist = std::abs(roots[k] - b) / std::max(Real(1), std::abs(b));
            if (best < 0 || dist < bd) {
                best = static_cast<int>(k);
                bd = dist;
            }
        }
        if (best < 0 || bd > Real(opts.branch_tol))
            throw GenericityError("branch point not found among the E_y roots (non-simple branch point?)");
        used[best] = true;
    }
    std::vector<C> rest;
    for (std::size_t k = 0; k < roots.size(); ++k)
        if (!used[k]) rest.push_back(roots[k]);

    // greedy matching on the X/Y value metric
    struct Cand {
        Real m;
        int i, j;
    };
    std::vector<Cand> cands;
    const int m = static_cast<int>(rest.size());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) cands.push_back({pair_error(c, rest[i], rest[j]), i, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.m < b.m; });
    std::vector<int> partner(m, -1);
    for (auto& cd : cands) {
        if (cd.m > Real(opts.pair_threshold)) break;
        if (partner[cd.i] >= 0 || partner[cd.j] >= 0) continue;
        partner[cd.i] = cd.j;
        partner[cd.j] = cd.i;
    }
    for (int i = 0; i < m; ++i) {
        if (partner[i] < 0) throw GenericityError("unpairable root of E_y (non-generic couplings)");
        Real own = pair_error(c, rest[i], rest[partner[i]]);
        for (int j = 0; j < m; ++j)
            if (j != i && j != partner[i] && pair_error(c, rest[i], rest[j]) <= Real(opts.ambiguity_ratio) * own)
                throw GenericityError("ambiguous double-point matching");
    }
    for (int i = 0; i < m; ++i) {
        int j = partner[i];
        if (j < i) continue;
        C a = rest[i], b = rest[j];
        polish_pair(c, a, b);
        if (std::abs(a) > std::abs(b)) std::swap(a, b);
        d.w.push_back(a);
        d.wbar.push_back(b);
    }
    // deterministic order: by |w|, then argument
    std::vector<int> idx(d.w.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto key = [&](int k) {
        Real ang = std::arg(d.w[k]);
        if (ang < 0) ang += 2 * pi_v<Real>();
        return std::make_pair(std::abs(d.w[k]), ang);
    };
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        auto ka = key(a), kb = key(b);
        if (rabs<Real>(ka.first - kb.first) > Real(1e-9) * std::max(ka.first, kb.first)) return ka.first < kb.first;
        return ka.second < kb.second;
    });
    std::vector<C> w, wb;
    for (int k : idx) {
        w.push_back(d.w[k]);
        wb.push_back(d.wbar[k]);
    }
    d.w = w;
    d.wbar = wb;
    d.finish();
    d.max_pair_error = 0;
    d.min_modulus_gap = std::numeric_limits<Real>::infinity();
    for (int a = 0; a < N; ++a) {
        d.max_pair_error = std::max(d.max_pair_error, pair_error(c, d.w[a], d.wbar[a]));
        d.min_modulus_gap = std::min(d.min_modulus_gap, (std::abs(d.wbar[a]) - std::abs(d.w[a])) / std::abs(d.wbar[a]));
    }
    if (d.min_modulus_gap < Real(opts.genericity))
        throw GenericityError("|w_a| and |wbar_a| coincide within tolerance (non-generic couplings)");
    if (d.max_pair_error > Real(opts.verify_tol))
        throw GenericityError("double-point pair fails X/Y agreement after polishing");
    return d;
}

template <class Real>
LeadingSeeds<Real> leading_order_seeds(const CouplingSpec& spec) {
    using C = Cx<Real>;
    if (spec.mode != ScalingMode::sqrt_g) throw std::invalid_argument("leading-order seeds need sqrt_g mode");
    const int p = spec.p, q = spec.q;
    std::vector<C> lam(q + 1, C(0)), lamt(p + 1, C(0));
    for (int k = 2; k <= q; ++k) {
        const Weight& wgt = spec.g_at(k);
        if (wgt.kind == Weight::Kind::symbolic) throw std::invalid_argument("leading-order seeds need numeric lambdas");
        if (wgt.kind == Weight::Kind::numeric) lam[k] = rational_to<Real>(wgt.value);
    }
    for (int k = 2; k <= p; ++k) {
        const Weight& wgt = spec.gt_at(k);
        if (wgt.kind == Weight::Kind::symbolic) throw std::invalid_argument("leading-order seeds need numeric lambdas");
        if (wgt.kind == Weight::Kind::numeric) lamt[k] = rational_to<Real>(wgt.value);
    }
    if (lam[q] == C(0) || lamt[p] == C(0)) throw DegenerateCurve("lambda_q and lambdat_p must be nonzero");
    // f(eta) = sum_{j=1}^{q-1} lambda_{j+1} eta^j; G(eta) = sum_j lambdat_{j+1} f^j - eta
    std::vector<C> f(q, C(0));
    for (int j = 1; j < q; ++j) f[j] = lam[j + 1];
    auto mul = [](const std::vector<C>& a, const std::vector<C>& b) {
        std::vector<C> r(a.size() + b.size() - 1, C(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    std::vector<C> G(1, C(0)), fj{C(1)};
    for (int j = 1; j < p; ++j) {
        fj = mul(fj, f);
        if (G.size() < fj.size()) G.resize(fj.size(), C(0));
        for (std::size_t k = 0; k < fj.size(); ++k) G[k] += lamt[j + 1] * fj[k];
    }
    if (G.size() < 2) G.resize(2, C(0));
    G[1] -= 1;
    LeadingSeeds<Real> out;
    out.composed = G;
    const int N = spec.N();
    if (static_cast<int>(G.size()) - 1 != N + 1) throw DegenerateCurve("composed seed polynomial has the wrong degree");
    if (std::abs(G[1]) == 0) throw DegenerateCurve("eta = 0 is not a simple root (lambda_2 lambdat_2 = 1)");
    std::vector<C> reduced(G.begin() + 1, G.end());
    for (auto eta : poly_roots(reduced)) {
        out.eta.push_back(eta);
        out.xi.push_back(poly_eval(f, eta));
    }
    return out;
}

template <class Real>
CheckReport check_residue_identity(const DoublePointSet<Real>& d, double tol) {
    CheckReport rep("residue_identity");
    for (int a = 0; a < d.N; ++a) {
        auto w = d.w[a], v = d.wbar[a];
        auto lhs = Laurent<Cx<Real>>::pow_int(w, d.N - 1) / (d.dDelta_at(w) * d.DeltaBar_at(w));
        auto rhs = -Laurent<Cx<Real>>::pow_int(v, d.N - 1) / (d.Delta_at(v) * d.dDeltaBar_at(v));
        rep.expect_small(static_cast<double>(rel_diff(lhs, rhs)), tol, a, -1, "residue identity");
    }
    return rep;
}

template <class Real>
CheckReport check_pairs(const CurveData<Real>& c, const DoublePointSet<Real>& d, double tol) {
    CheckReport rep("double_point_pairs");
    ++rep.checked;
    if (d.N != c.N()) rep.fail(-1, -1, "found " + std::to_string(d.N) + " pairs, expected " + std::to_string(c.N()));
    for (int a = 0; a < d.N; ++a) {
        rep.expect_small(static_cast<double>(pair_error(c, d.w[a], d.wbar[a])), tol, a, -1, "X/Y agreement");
        ++rep.checked;
        if (!(std::abs(d.Xa[a]) < 1)) rep.fail(a, -1, "|X_a| >= 1");
        // both partial derivatives of E vanish at a double point
        for (auto z : {d.w[a], d.wbar[a]}) {
            auto x = c.X_at(z), y = c.Y_at(z);
            Real s = c.E_scale(x, y) / std::max(Real(1), std::max(std::abs(x), std::abs(y)));
            rep.expect_small(static_cast<double>(std::abs(c.E_x(x, y)) / s), 1e-8, a, -1, "E_x at double point");
            rep.expect_small(static_cast<double>(std::abs(c.E_y(x, y)) / s), 1e-8, a, -1, "E_y at double point");
        }
    }
    return rep;
}

template <class Real>
CheckReport check_Ey_factorization(const CurveData<Real>& c, const DoublePointSet<Real>& d, double tol) {
    using C = Cx<Real>;
    CheckReport rep("Ey_factorization");
    const int N = c.N(), q = c.q, samples = 2 * N + q + 2;
    C lead = Laurent<C>::pow_int(c.gt[c.p], q - 1);
    for (int k = 0; k < samples; ++k) {
        // points on two circles away from the roots
        Real r = k % 2 ? Real(0.6) : Real(1.7);
        C z = std::polar(r, Real(0.37) + Real(2.0) * pi_v<Real>() * k / samples);
        C x = c.X_at(z), y = c.Y_at(z);
        C lhs = Laurent<C>::pow_int(z, N - 1) * c.E_y(x, y);
        C rhs = lead * d.Delta_at(z) * d.DeltaBar_at(z) * c.dX_at(z);
        rep.expect_small(static_cast<double>(rel_diff(lhs, rhs)), tol, k, -1, "E_y factorization");
    }
    return rep;
}

template <class Real>
CheckReport check_curve_residual(const CurveData<Real>& c, int samples, double tol) {
    CheckReport rep("curve_residual");
    std::mt19937 rng(20240611u);
    std::uniform_real_distribution<double> rad(0.5, 2.0), ang(0, 6.283185307179586);
    for (int k = 0; k < samples; ++k) {
        Cx<Real> z = std::polar(Real(rad(rng)), Real(ang(rng)));
        auto x = c.X_at(z), y = c.Y_at(z);
        rep.expect_small(static_cast<double>(std::abs(c.E_at(x, y)) / c.E_scale(x, y)), tol, k, -1, "E(X(z), Y(z))");
    }
    return rep;
}

template <class Real>
CheckReport check_curve_boundary(const CurveData<Real>& c, double tol) {
    using C = Cx<Real>;
    CheckReport rep("curve_boundary");
    const int p = c.p, q = c.q;
    // F = (V~'(x) - y)(V'(y) - x)
    CMat<Real> F = CMat<Real>::Zero(p + 1, q + 1);
    for (int a = 1; a <= p; ++a)
        for (int b = 1; b <= q; ++b) F(a - 1, b - 1) += c.gt[a] * c.g[b];
    for (int a = 1; a <= p; ++a) F(a, 0) -= c.gt[a];
    for (int b = 1; b <= q; ++b) F(0, b) -= c.g[b];
    F(1, 1) += 1;
    C gq = c.g[q];
    Real scale = std::max(Real(1), c.E.cwiseAbs().maxCoeff());
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= q; ++j) {
            C expect = -F(i, j) / gq;
            bool interior = i <= p - 2 && j <= q - 2;
            if (interior && !(i == p - 2 && j == q - 2)) continue;
            // the corner carries the extra C_{p-2,q-2} = -g_q gt_p
            if (interior) expect -= c.gt[p];
            rep.expect_small(static_cast<double>(std::abs(c.E(i, j) - expect) / scale), tol, i, j, "E coefficient");
        }
    return rep;
}

namespace {
template <class Real>
nlohmann::json cx(Cx<Real> z) {
    return nlohmann::json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())});
}
}  // namespace

template <class Real>
nlohmann::json curve_to_json(const CurveData<Real>& c, const DoublePointSet<Real>* d) {
    nlohmann::json j;
    j["p"] = c.p;
    j["q"] = c.q;
    for (auto& a : c.alpha) j["alphas"].push_back(cx(a));
    for (auto& b : c.beta) j["betas"].push_back(cx(b));
    j["R"] = cx(c.R);
    j["residual"] = static_cast<double>(c.residual);
    if (c.E.size()) {
        for (int i = 0; i < c.E.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < c.E.cols(); ++k) row.push_back(cx(Cx<Real>(c.E(i, k))));
            j["E_coeffs"].push_back(row);
        }
    }
    if (d) {
        j["pairs"] = nlohmann::json::array();
        for (int a = 0; a < d->N; ++a)
            j["pairs"].push_back({{"w", cx(d->w[a])}, {"wbar", cx(d->wbar[a])}, {"X_a", cx(d->Xa[a])}});
        j["branch_points"] = nlohmann::json::array();
        for (auto& b : d->branch_points) j["branch_points"].push_back(cx(b));
    }
    return j;
}

#define MOBILIUM_INSTANTIATE(Real)                                                                         \
    template Cx<Real> eval_at_couplings<Real>(const Series&, const CouplingSpec&);                         \
    template struct CurveData<Real>;                                                                       \
    template struct DoublePointSet<Real>;                                                                  \
    template std::vector<Cx<Real>> limit_residual<Real>(const CurveData<Real>&);                           \
    template CurveData<Real> refine_numeric<Real>(const CouplingSpec&, const RefineOptions&);              \
    template void curve_polynomial<Real>(CurveData<Real>&);                                                \
    template Real pair_error<Real>(const CurveData<Real>&, Cx<Real>, Cx<Real>);                            \
    template std::vector<Cx<Real>> composed_Ey<Real>(const CurveData<Real>&);                              \
    template DoublePointSet<Real> double_points<Real>(const CurveData<Real>&, const DoublePointOptions&);  \
    template LeadingSeeds<Real> leading_order_seeds<Real>(const CouplingSpec&);                            \
    template CheckReport check_residue_identity<Real>(const DoublePointSet<Real>&, double);                \
    template CheckReport check_pairs<Real>(const CurveData<Real>&, const DoublePointSet<Real>&, double);   \
    template CheckReport check_Ey_factorization<Real>(const CurveData<Real>&, const DoublePointSet<Real>&, \
                                                      double);                                             \
    template CheckReport check_curve_residual<Real>(const CurveData<Real>&, int, double);                  \
    template CheckReport check_curve_boundary<Real>(const CurveData<Real>&, double);                       \
    template nlohmann::json curve_to_json<Real>(const CurveData<Real>&, const DoublePointSet<Real>*);

MOBILIUM_INSTANTIATE(double)
MOBILIUM_INSTANTIATE(long double)
MOBILIUM_INSTANTIATE(Quad)

}  // namespace mobilium
