#include "mobilium/determinants.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mobilium {

template <class Real>
CVec<Real> xi_vector(const DoublePointSet<Real>& d, int n) {
    CVec<Real> v(d.N);
    for (int a = 0; a < d.N; ++a)
        v(a) = Laurent<Cx<Real>>::pow_int(d.wbar[a], n) - Laurent<Cx<Real>>::pow_int(d.w[a], n);
    return v;
}

template <class Real>
Cx<Real> h_n(const DoublePointSet<Real>& d, int n) {
    CMat<Real> M(d.N, d.N);
    for (int b = 1; b <= d.N; ++b) M.col(b - 1) = xi_vector(d, n + b);
    return determinant<Real>(M);
}

template <class Real>
Cx<Real> xi_scaled(const DoublePointSet<Real>& d, int a, int k, int k0) {
    using L = Laurent<Cx<Real>>;
    const int s = k - k0;
    if (k0 >= 0) return L::pow_int(d.wbar[a], s) - L::pow_int(d.Xa[a], k0) * L::pow_int(d.w[a], s);
    return L::pow_int(d.Xa[a], -k0) * L::pow_int(d.wbar[a], s) - L::pow_int(d.w[a], s);
}

template <class Real>
Cx<Real> h_n_scaled(const DoublePointSet<Real>& d, int n) {
    CMat<Real> M(d.N, d.N);
    for (int a = 0; a < d.N; ++a)
        for (int b = 1; b <= d.N; ++b) M(a, b - 1) = xi_scaled(d, a, n + b, n + 1);
    return determinant<Real>(M);
}

template <class Real>
std::vector<Cx<Real>> rho(const DoublePointSet<Real>& d) {
    std::vector<Cx<Real>> r(d.N);
    for (int a = 0; a < d.N; ++a) r[a] = d.DeltaBar_at(d.w[a]) / d.dDeltaBar_at(d.wbar[a]);
    return r;
}

template <class Real>
Cx<Real> hbar_n(const DoublePointSet<Real>& d, int n) {
    using C = Cx<Real>;
    CMat<Real> M(d.N, d.N);
    for (int a = 0; a < d.N; ++a) {
        C den(1);
        for (int c = 0; c < d.N; ++c)
            if (c != a) den *= d.wbar[a] - d.wbar[c];
        C xa = Laurent<C>::pow_int(d.Xa[a], n + 1);
        for (int b = 0; b < d.N; ++b) {
            C num(1);
            for (int c = 0; c < d.N; ++c)
                if (c != b) num *= d.w[a] - d.wbar[c];
            M(a, b) = C(a == b ? 1 : 0) - num / den * xa;
        }
    }
    return determinant<Real>(M);
}

template <class Real>
Cx<Real> hbar_n_bis(const DoublePointSet<Real>& d, int n) {
    using C = Cx<Real>;
    CMat<Real> M(d.N, d.N);
    for (int a = 0; a < d.N; ++a) {
        C den(1);
        for (int c = 0; c < d.N; ++c)
            if (c != a) den *= d.w[a] - d.w[c];
        C xa = Laurent<C>::pow_int(d.Xa[a], n + d.N);
        for (int b = 0; b < d.N; ++b) {
            C num(1);
            for (int c = 0; c < d.N; ++c)
                if (c != b) num *= d.wbar[a] - d.w[c];
            M(a, b) = C(a == b ? 1 : 0) - num / den * xa;
        }
    }
    return determinant<Real>(M);
}

template <class Real>
Cx<Real> R_n_det(const DoublePointSet<Real>& d, Cx<Real> R, int n) {
    if (n < 1) throw std::invalid_argument("R_n needs n >= 1");
    Cx<Real> hn = hbar_n(d, n);
    if (hn == Cx<Real>(0)) throw NumericError("h_n vanishes (non-generic couplings)");
    return R * hbar_n(d, n - 1) * hbar_n(d, n + 1) / (hn * hn);
}

template <class Real>
Cx<Real> R_n_det_direct(const DoublePointSet<Real>& d, Cx<Real> R, int n) {
    if (n < 1) throw std::invalid_argument("R_n needs n >= 1");
    Cx<Real> hn = h_n_scaled(d, n);
    if (hn == Cx<Real>(0)) throw NumericError("h_n vanishes (non-generic couplings)");
    return R * h_n_scaled(d, n - 1) * h_n_scaled(d, n + 1) / (hn * hn);
}

template <class Real>
CheckReport check_hbar_identity(const DoublePointSet<Real>& d, int n_max, double tol) {
    using C = Cx<Real>;
    CheckReport rep("hbar_identity");
    C vdm(1);
    for (int a = 0; a < d.N; ++a)
        for (int b = a + 1; b < d.N; ++b) vdm *= d.wbar[b] - d.wbar[a];
    for (int n = 0; n <= n_max; ++n) {
        C pref = vdm;
        for (int a = 0; a < d.N; ++a) pref *= Laurent<C>::pow_int(d.wbar[a], n + 1);
        C hb = hbar_n(d, n);
        rep.expect_small(static_cast<double>(rel_diff(h_n(d, n), pref * hb)), tol, n, -1, "h_n vs prefactor * hbar_n");
        rep.expect_small(static_cast<double>(rel_diff(hb, hbar_n_bis(d, n))), tol, n, -1, "hbar_n two forms");
    }
    return rep;
}

// ---- lattice paths ----

PathPoly path_add(const PathPoly& a, const PathPoly& b) {
    PathPoly r = a;
    for (auto& [k, v] : b)
        if ((r[k] += v) == 0) r.erase(k);
    return r;
}

PathPoly path_mul(const PathPoly& a, const PathPoly& b) {
    PathPoly r;
    for (auto& [ka, va] : a)
        for (auto& [kb, vb] : b) {
            std::pair<int, int> k{ka.first + kb.first, ka.second + kb.second};
            if ((r[k] += va * vb) == 0) r.erase(k);
        }
    return r;
}

PathPoly path_scale_R(const PathPoly& a, int e) {
    PathPoly r;
    for (auto& [k, v] : a) r[{k.first + e, k.second}] = v;
    return r;
}

std::string path_str(const PathPoly& a) {
    if (a.empty()) return "0";
    std::string out;
    for (auto& [k, v] : a) {
        if (!out.empty()) out += v < 0 ? " - " : " + ";
        else if (v < 0) out += "-";
        out += std::to_string(v < 0 ? -v : v);
        if (k.first) out += "*R^" + std::to_string(k.first);
        if (k.second) out += "*S^" + std::to_string(k.second);
    }
    return out;
}

PathPoly path_gf(PathKind kind, int n, int m, int p) {
    if (n < 0) throw std::invalid_argument("path length must be non-negative");
    if (kind == PathKind::p_step && p < 2) throw std::invalid_argument("p-step paths need p >= 2");
    // height -> weight polynomial after each step
    std::map<int, PathPoly> cur{{0, PathPoly{{{0, 0}, 1}}}};
    for (int step = 0; step < n; ++step) {
        std::map<int, PathPoly> next;
        auto push = [&](int h, const PathPoly& w, int re, int se) {
            if (kind == PathKind::three_step_positive && h < 0) return;
            PathPoly moved;
            for (auto& [k, v] : w) moved[{k.first + re, k.second + se}] = v;
            next[h] = path_add(next[h], moved);
        };
        for (auto& [h, w] : cur) {
            if (kind == PathKind::p_step) {
                push(h + p - 1, w, 0, 0);
                push(h - 1, w, 1, 0);
            } else {
                push(h + 1, w, 0, 0);
                push(h, w, 0, 1);
                push(h - 1, w, 1, 0);
            }
        }
        cur = std::move(next);
    }
    auto it = cur.find(m);
    return it == cur.end() ? PathPoly{} : it->second;
}

template <class Real>
Cx<Real> path_eval(const PathPoly& a, Cx<Real> R, Cx<Real> S) {
    Cx<Real> acc(0);
    for (auto& [k, v] : a)
        acc += Real(v) * Laurent<Cx<Real>>::pow_int(R, k.first) * Laurent<Cx<Real>>::pow_int(S, k.second);
    return acc;
}

CheckReport check_pathident(int k_max, int n_max) {
    CheckReport rep("pathident");
    for (int k = 2; k <= k_max; ++k)
        for (int a = 0; a <= n_max; ++a) {
            PathPoly lhs, rhs;
            for (int s = a; s <= k - 2; ++s)
                lhs = path_add(lhs, path_mul(path_gf(PathKind::three_step, k - s - 2, 0),
                                             path_gf(PathKind::three_step, s, a)));
            for (int m = 0; 2 * m + a + 1 <= k - 1; ++m)
                rhs = path_add(rhs, path_scale_R(path_gf(PathKind::three_step, k - 1, -2 * m - a - 1), -m - a - 1));
            ++rep.checked;
            if (lhs != rhs)
                rep.fail(k, a, "lhs " + path_str(lhs) + " != rhs " + path_str(rhs));
        }
    return rep;
}

CheckReport check_pathidreduced(int r_max) {
    CheckReport rep("pathidreduced");
    for (int r = 0; r <= r_max; ++r) {
        PathPoly rhs;
        for (int m = 0; 2 * m <= r; ++m) rhs = path_add(rhs, path_scale_R(path_gf(PathKind::three_step_positive, r, 2 * m), m));
        PathPoly lhs = path_gf(PathKind::three_step, r, 0);
        ++rep.checked;
        if (lhs != rhs) rep.fail(r, -1, "pi_0 " + path_str(lhs) + " != " + path_str(rhs));
    }
    return rep;
}

CheckReport check_height_reversal(int n_max) {
    CheckReport rep("height_reversal");
    for (int n = 0; n <= n_max; ++n)
        for (int m = -n; m <= n; ++m) {
            ++rep.checked;
            if (path_gf(PathKind::three_step, n, m) != path_scale_R(path_gf(PathKind::three_step, n, -m), -m))
                rep.fail(n, m, "pi_m != R^{-m} pi_{-m}");
        }
    return rep;
}

// ---- general maps ----

CouplingSpec general_map_spec(int q, const std::vector<std::pair<int, Rational>>& g) {
    auto spec = CouplingSpec::make(2, q);
    spec.gt_at(2) = Weight::number(1);
    for (auto& [k, v] : g) spec.g_at(k) = Weight::number(v);
    return spec;
}

template <class Real>
Cx<Real> GeneralMapData<Real>::htilde(int i) const {
    const int n = static_cast<int>(x.size());
    CMat<Real> M(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 1; b <= n; ++b)
            M(a, b - 1) = Laurent<C>::pow_int(x[a], -(i + b)) - Laurent<C>::pow_int(x[a], i + b);
    return determinant<Real>(M);
}

template <class Real>
Cx<Real> GeneralMapData<Real>::R_i(int i) const {
    C hi = htilde(i);
    if (hi == C(0)) throw NumericError("htilde_i vanishes");
    return R * htilde(i - 1) * htilde(i + 1) / (hi * hi);
}

template <class Real>
GeneralMapData<Real> general_map_char(const CouplingSpec& spec, double unit_circle_tol) {
    using C = Cx<Real>;
    spec.validate();
    if (spec.p != 2 || spec.q < 3) throw std::invalid_argument("general maps need p = 2 and q >= 3");
    if (spec.gt_at(1).kind != Weight::Kind::zero || spec.gt_at(2).kind != Weight::Kind::numeric ||
        spec.gt_at(2).value != 1)
        throw std::invalid_argument("general maps need gt_k = delta_{k,2}");
    if (spec.mode != ScalingMode::plain) throw std::invalid_argument("general maps use plain couplings");
    const int q = spec.q;
    auto g = spec.white_values<Real>();
    auto seed = refine_numeric<Real>(spec);
    GeneralMapData<Real> out;
    out.q = q;
    C R = seed.R, S = seed.beta[0];

    std::vector<PathPoly> pi0(q), pi1(q);
    for (int k = 1; k <= q; ++k) {
        pi0[k - 1] = path_gf(PathKind::three_step, k - 1, 0);
        pi1[k - 1] = path_gf(PathKind::three_step, k - 1, 1);
    }
    auto F = [&](C r, C s) {
        C a(0), b(0);
        for (int k = 1; k <= q; ++k) {
            a += g[k] * path_eval<Real>(pi1[k - 1], r, s);
            b += g[k] * path_eval<Real>(pi0[k - 1], r, s);
        }
        return std::array<C, 2>{r * (Real(1) - a) - Real(1), s - b};
    };
    const Real h = rsqrt<Real>(std::numeric_limits<Real>::epsilon());
    auto f = F(R, S);
    for (int it = 0; it < 50; ++it) {
        Real res = std::max(std::abs(f[0]), std::abs(f[1]));
        if (res < 64 * std::numeric_limits<Real>::epsilon()) break;
        auto fr = F(R + h, S), fs = F(R, S + h);
        C a = (fr[0] - f[0]) / h, b = (fs[0] - f[0]) / h, c = (fr[1] - f[1]) / h, d = (fs[1] - f[1]) / h;
        C det = a * d - b * c;
        C nR = R - (d * f[0] - b * f[1]) / det, nS = S - (a * f[1] - c * f[0]) / det;
        auto nf = F(nR, nS);
        if (!(std::max(std::abs(nf[0]), std::abs(nf[1])) < res)) break;
        R = nR;
        S = nS;
        f = nf;
    }
    out.R = R;
    out.S = S;
    out.rs_residual = std::max(std::abs(f[0]), std::abs(f[1]));

    const C sR = std::sqrt(R);
    for (int n = -(q - 2); n <= q - 2; ++n) {
        const int a = std::abs(n);
        C beq = n == 0 ? R : C(0), bcf = beq;
        for (int k = 2 + a; k <= q; ++k) {
            if (g[k] == C(0)) continue;
            C s1(0), s2(0);
            for (int m = 0; 2 * m + a + 1 <= k - 1; ++m)
                s1 += path_eval<Real>(path_gf(PathKind::three_step, k - 1, -2 * m - a - 1), R, S) *
                      Laurent<C>::pow_int(R, -m) / Laurent<C>::pow_int(sR, a);
            for (int s = a; s <= k - 2; ++s)
                s2 += path_eval<Real>(path_gf(PathKind::three_step, k - s - 2, 0), R, S) *
                      path_eval<Real>(path_gf(PathKind::three_step, s, a), R, S);
            beq -= g[k] * s1;
            bcf -= g[k] * s2 * R * Laurent<C>::pow_int(sR, a);
        }
        out.B_eq.push_back(beq);
        out.B_cf.push_back(bcf);
        out.B_form_gap = std::max(out.B_form_gap, std::abs(beq - bcf));
    }
    for (auto r : poly_roots(out.B_eq)) {
        Real m = std::abs(r);
        if (rabs<Real>(m - 1) < Real(unit_circle_tol)) throw NumericError("characteristic root on the unit circle");
        if (m < 1) out.x.push_back(r);
    }
    std::sort(out.x.begin(), out.x.end(), [](C a, C b) { return std::abs(a) < std::abs(b); });
    return out;
}

// ---- constellations ----

CouplingSpec constellation_spec(int p, int ell, const std::vector<Rational>& ghat) {
    if (p < 2 || ell < 1) throw std::invalid_argument("constellations need p >= 2, ell >= 1");
    if (static_cast<int>(ghat.size()) != ell) throw std::invalid_argument("need ell weights ghat_1..ghat_ell");
    auto spec = CouplingSpec::make(p, p * ell);
    spec.gt_at(p) = Weight::number(1);
    for (int m = 1; m <= ell; ++m) spec.g_at(p * m) = Weight::number(ghat[m - 1]);
    return spec;
}

namespace {

template <class Real>
Cx<Real> cauchy_block(const std::vector<Cx<Real>>& top, const std::vector<Cx<Real>>& bottom,
                      const std::vector<Cx<Real>>& X, int power_shift, int i) {
    // det(delta - prod_{c != b}(top_a - bottom_c) / prod_{c != a}(bottom_a - bottom_c) X_a^{i + shift})
    using C = Cx<Real>;
    const int n = static_cast<int>(X.size());
    CMat<Real> M(n, n);
    for (int a = 0; a < n; ++a) {
        C den(1);
        for (int c = 0; c < n; ++c)
            if (c != a) den *= bottom[a] - bottom[c];
        C xa = Laurent<C>::pow_int(X[a], i + power_shift);
        for (int b = 0; b < n; ++b) {
            C num(1);
            for (int c = 0; c < n; ++c)
                if (c != b) num *= top[a] - bottom[c];
            M(a, b) = C(a == b ? 1 : 0) - num / den * xa;
        }
    }
    return determinant<Real>(M);
}

}  // namespace

template <class Real>
Cx<Real> ConstellationData<Real>::block(Route r, int i) const {
    std::vector<C> wp(N0), wbp(N0);
    for (int a = 0; a < N0; ++a) {
        wp[a] = Laurent<C>::pow_int(w[a], p);
        wbp[a] = Laurent<C>::pow_int(wbar[a], p);
    }
    const int shift = p * (N0 - 1);
    switch (r) {
        case Route::u_w: return cauchy_block<Real>(wbp, wp, X, shift, i);
        case Route::u_x: return cauchy_block<Real>(xi, chi, X, 0, i);
        case Route::v_x: return cauchy_block<Real>(chi, xi, X, shift, i);
        case Route::v_w: return cauchy_block<Real>(wp, wbp, X, 0, i);
    }
    return C(0);
}

template <class Real>
Cx<Real> ConstellationData<Real>::subset_sum(bool tilde, int i) const {
    std::vector<C> t(N0);
    for (int a = 0; a < N0; ++a) {
        C num(1), den(1);
        const auto& top = tilde ? chi : xi;
        const auto& bot = tilde ? xi : chi;
        for (int c = 0; c < N0; ++c) {
            num *= top[a] - bot[c];
            if (c != a) den *= bot[a] - bot[c];
        }
        C sigma = num / den;
        if (tilde) sigma *= Laurent<C>::pow_int(X[a], p * (N0 - 1));
        t[a] = sigma / (top[a] - bot[a]);
    }
    C total(0);
    for (unsigned mask = 0; mask < (1u << N0); ++mask) {
        C term(1);
        for (int a = 0; a < N0; ++a) {
            if (!(mask >> a & 1u)) continue;
            term *= -t[a] * Laurent<C>::pow_int(X[a], i);
            for (int b = a + 1; b < N0; ++b)
                if (mask >> b & 1u)
                    term *= (xi[a] - xi[b]) * (chi[a] - chi[b]) / ((xi[a] - chi[b]) * (chi[a] - xi[b]));
        }
        total += term;
    }
    return total;
}

template <class Real>
Cx<Real> ConstellationData<Real>::R_i(Route r, int i) const {
    C d = block(r, i + 1) * block(r, i + p);
    if (d == C(0)) throw NumericError("vanishing u/v determinant");
    return R * block(r, i) * block(r, i + p + 1) / d;
}

template <class Real>
Cx<Real> ConstellationData<Real>::hbar(int i) const {
    return hbar_n(full, i);
}

template <class Real>
ConstellationData<Real> constellation_factor(const CouplingSpec& spec, int rotate) {
    using C = Cx<Real>;
    spec.validate();
    const int p = spec.p;
    if (spec.q % p) throw std::invalid_argument("constellations need p | q");
    for (int k = 1; k <= p; ++k) {
        const auto& w = spec.gt_at(k);
        bool ok = k == p ? (w.kind == Weight::Kind::numeric && w.value == 1) : w.kind == Weight::Kind::zero;
        if (!ok) throw std::invalid_argument("constellations need gt_k = delta_{k,p}");
    }
    for (int k = 1; k <= spec.q; ++k)
        if (k % p && spec.g_at(k).kind != Weight::Kind::zero)
            throw std::invalid_argument("constellations need g_k = 0 unless p | k");
    ConstellationData<Real> cd;
    cd.p = p;
    cd.ell = spec.q / p;
    cd.N0 = p * cd.ell - cd.ell - 1;
    auto g = spec.white_values<Real>();
    cd.ghat.assign(cd.ell + 1, C(0));
    for (int m = 1; m <= cd.ell; ++m) cd.ghat[m] = g[p * m];
    cd.curve = refine_numeric<Real>(spec);
    curve_polynomial(cd.curve);
    cd.full = double_points(cd.curve);
    cd.R = cd.curve.R;
    const int N = cd.full.N;
    if (N != p * cd.N0) throw NumericError("double-point count is not p * N0");

    const Real two_pi = 2 * pi_v<Real>();
    const C Om = std::polar(Real(1), two_pi / p);
    auto nearest = [&](C z, const std::vector<int>& pool) {
        int best = pool.front();
        for (int j : pool)
            if (std::abs(cd.full.w[j] - z) < std::abs(cd.full.w[best] - z)) best = j;
        return best;
    };
    std::vector<int> all(N);
    std::iota(all.begin(), all.end(), 0);
    for (int a = 0; a < N; ++a) {
        int b = nearest(cd.full.w[a] * Om, all);
        Real e = std::max(std::abs(cd.full.w[b] - cd.full.w[a] * Om) / std::abs(cd.full.w[a]),
                          std::abs(cd.full.wbar[b] - cd.full.wbar[a] * Om) / std::abs(cd.full.wbar[a]));
        cd.orbit_error = std::max(cd.orbit_error, e);
    }
    if (cd.orbit_error > Real(1e-6)) throw NumericError("double points are not closed under rotation by Omega");

    auto angle = [&](C z) {
        Real t = std::arg(z);
        if (t < 0) t += two_pi;
        if (t > two_pi - Real(1e-9)) t = 0;
        return t;
    };
    std::vector<int> left = all;
    while (!left.empty()) {
        std::vector<int> orbit;
        C base = cd.full.w[left.front()];
        for (int s = 0; s < p; ++s) orbit.push_back(nearest(base * Laurent<C>::pow_int(Om, s), left));
        std::sort(orbit.begin(), orbit.end());
        if (std::unique(orbit.begin(), orbit.end()) != orbit.end()) throw NumericError("orbit identification failed");
        int rep = *std::min_element(orbit.begin(), orbit.end(),
                                    [&](int a, int b) { return angle(cd.full.w[a]) < angle(cd.full.w[b]); });
        if (rotate) rep = nearest(cd.full.w[rep] * Laurent<C>::pow_int(Om, rotate), orbit);
        cd.reps.push_back(rep);
        left.erase(std::remove_if(left.begin(), left.end(),
                                  [&](int j) { return std::find(orbit.begin(), orbit.end(), j) != orbit.end(); }),
                   left.end());
    }
    for (int r : cd.reps) {
        C w = cd.full.w[r], wb = cd.full.wbar[r];
        C x = w / wb, xs(0), cs(0);
        for (int k = 1; k < p; ++k) {
            xs += Laurent<C>::pow_int(x, k);
            cs += Laurent<C>::pow_int(x, -k);
        }
        cd.w.push_back(w);
        cd.wbar.push_back(wb);
        cd.X.push_back(x);
        cd.xi.push_back(xs);
        cd.chi.push_back(cs);
    }
    return cd;
}

template <class Real>
CheckReport check_constellation(const ConstellationData<Real>& cd, int i_max, double tol) {
    using C = Cx<Real>;
    using Route = typename ConstellationData<Real>::Route;
    CheckReport rep("constellation");
    rep.expect_small(static_cast<double>(cd.orbit_error), tol, -1, -1, "orbit closure under Omega");
    for (int a = 0; a < cd.N0; ++a) {
        rep.expect_small(static_cast<double>(rel_diff(Laurent<C>::pow_int(cd.w[a], cd.p), cd.R / cd.chi[a])), tol, a, -1,
                         "w_a^p = R / chi_a");
        rep.expect_small(static_cast<double>(rel_diff(Laurent<C>::pow_int(cd.wbar[a], cd.p), cd.R / cd.xi[a])), tol, a,
                         -1, "wbar_a^p = R / xi_a");
    }
    const Route routes[] = {Route::u_w, Route::u_x, Route::v_x, Route::v_w};
    const char* names[] = {"u_w", "u_x", "v_x", "v_w"};
    for (int i = 1; i <= i_max; ++i) {
        C hb = cd.hbar(i);
        C Rh = R_n_det(cd.full, cd.R, i);
        for (int r = 0; r < 4; ++r) {
            C prod(1);
            for (int s = 1; s <= cd.p; ++s) prod *= cd.block(routes[r], i + s);
            rep.expect_small(static_cast<double>(rel_diff(prod, hb)), tol, i, r,
                             std::string("hbar_i = prod ") + names[r]);
            rep.expect_small(static_cast<double>(rel_diff(cd.R_i(routes[r], i), Rh)), tol, i, r,
                             std::string("R_i via ") + names[r]);
        }
        rep.expect_small(static_cast<double>(rel_diff(cd.block(Route::u_x, i), cd.subset_sum(false, i))), tol, i, -1,
                         "u_i subset sum");
        rep.expect_small(static_cast<double>(rel_diff(cd.block(Route::v_x, i), cd.subset_sum(true, i))), tol, i, -1,
                         "v_i subset sum");
    }
    return rep;
}

template <class Real>
CheckReport check_constellation_char(const ConstellationData<Real>& cd, double tol) {
    using C = Cx<Real>;
    CheckReport rep("constellation_char");
    const int p = cd.p, ell = cd.ell, N0 = cd.N0;
    const C R = cd.R;
    if (ell == 1) {
        C g1 = cd.ghat[1];
        C target = Real(1) / (g1 * Laurent<C>::pow_int(R, p - 1));
        for (int a = 0; a < N0; ++a) {
            C lhs(0);
            for (int n = 1; n <= p - 2; ++n)
                lhs += Real(p - 1 - n) * (Laurent<C>::pow_int(cd.X[a], n) + Laurent<C>::pow_int(cd.X[a], -n));
            rep.expect_small(static_cast<double>(rel_diff(lhs, target)), tol, a, -1, "p-angulation characteristic equation");
        }
        rep.expect_small(static_cast<double>(rel_diff(R, Real(1) / (Real(1) - g1 * Real(p - 1) * Laurent<C>::pow_int(R, p - 2)))),
                         tol, -1, -1, "p-angulation R equation");
    }
    // general form, any ell
    std::vector<C> coef(ell + 1, C(0));
    for (int j = 1; j <= ell; ++j)
        for (int m = j; m <= ell; ++m)
            coef[j] += cd.ghat[m] * path_eval<Real>(path_gf(PathKind::p_step, p * m - 1, -p * j + 1, p), R);
    for (int a = 0; a < N0; ++a) {
        C x = cd.X[a], rhs(0), geo(0);
        for (int k = 0; k <= p - 2; ++k) geo += Laurent<C>::pow_int(x, k);
        for (int j = 1; j <= ell; ++j) {
            C sum(0);
            for (int n = 1; n <= p * j - 1; ++n) sum += Laurent<C>::pow_int(x, N0 + j - n);
            rhs += Laurent<C>::pow_int(R, -j) * Laurent<C>::pow_int(geo, j) * sum * coef[j];
        }
        rep.expect_small(static_cast<double>(rel_diff(Laurent<C>::pow_int(x, N0), rhs)), tol, a, -1,
                         "constellation characteristic equation");
    }
    return rep;
}

std::string R_table_csv(const std::vector<std::array<double, 3>>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "n,R_n_det,R_n_series_eval,abs_diff\n";
    for (std::size_t k = 0; k < rows.size(); ++k)
        os << static_cast<int>(rows[k][0]) << ',' << rows[k][1] << ',' << rows[k][2] << ','
           << std::abs(rows[k][1] - rows[k][2]) << '\n';
    return os.str();
}

#define MOBILIUM_INSTANTIATE(Real)                                                              \
    template CVec<Real> xi_vector<Real>(const DoublePointSet<Real>&, int);                      \
    template Cx<Real> xi_scaled<Real>(const DoublePointSet<Real>&, int, int, int);             \
    template Cx<Real> h_n<Real>(const DoublePointSet<Real>&, int);                              \
    template Cx<Real> h_n_scaled<Real>(const DoublePointSet<Real>&, int);                       \
    template Cx<Real> hbar_n<Real>(const DoublePointSet<Real>&, int);                           \
    template Cx<Real> hbar_n_bis<Real>(const DoublePointSet<Real>&, int);                       \
    template std::vector<Cx<Real>> rho<Real>(const DoublePointSet<Real>&);                      \
    template Cx<Real> R_n_det<Real>(const DoublePointSet<Real>&, Cx<Real>, int);                \
    template Cx<Real> R_n_det_direct<Real>(const DoublePointSet<Real>&, Cx<Real>, int);         \
    template CheckReport check_hbar_identity<Real>(const DoublePointSet<Real>&, int, double);                   \
    template Cx<Real> path_eval<Real>(const PathPoly&, Cx<Real>, Cx<Real>);                                    \
    template struct GeneralMapData<Real>;                                                                       \
    template GeneralMapData<Real> general_map_char<Real>(const CouplingSpec&, double);                         \
    template struct ConstellationData<Real>;                                                                    \
    template ConstellationData<Real> constellation_factor<Real>(const CouplingSpec&, int);                     \
    template CheckReport check_constellation<Real>(const ConstellationData<Real>&, int, double);               \
    template CheckReport check_constellation_char<Real>(const ConstellationData<Real>&, double);

MOBILIUM_INSTANTIATE(double)
MOBILIUM_INSTANTIATE(long double)
MOBILIUM_INSTANTIATE(Quad)

}  // namespace mobilium
