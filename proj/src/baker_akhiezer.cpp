#include "mobilium/baker_akhiezer.hpp"

#include <algorithm>
#include <cmath>

namespace mobilium {

namespace {

template <class Real>
std::vector<Cx<Real>> poly_mul(const std::vector<Cx<Real>>& a, const std::vector<Cx<Real>>& b) {
    std::vector<Cx<Real>> r(a.size() + b.size() - 1, Cx<Real>(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// first n terms of 1 / sum_i s_i x^i
template <class Real>
std::vector<Cx<Real>> series_inverse(const std::vector<Cx<Real>>& s, int n) {
    std::vector<Cx<Real>> inv(std::max(n, 0), Cx<Real>(0));
    if (n <= 0) return inv;
    if (s.at(0) == Cx<Real>(0)) throw NumericError("series inverse of a series without constant term");
    inv[0] = Cx<Real>(1) / s[0];
    for (int k = 1; k < n; ++k) {
        Cx<Real> acc(0);
        for (int i = 1; i <= k && i < static_cast<int>(s.size()); ++i) acc += s[i] * inv[k - i];
        inv[k] = -acc / s[0];
    }
    return inv;
}

template <class Real>
Laurent<Cx<Real>> constant_one() {
    return Laurent<Cx<Real>>::monomial(0, Cx<Real>(1), Cx<Real>(0));
}

}  // namespace

template <class Real>
Laurent<Cx<Real>> build_psi(const DoublePointSet<Real>& d, int m, Real* interp_err) {
    using C = Cx<Real>;
    const int N = d.N;
    if (N >= 1 && m >= -N && m <= -1) throw std::invalid_argument("psi_m is undefined for m = -N..-1");
    if (N == 0) return Laurent<C>::monomial(m + 1, C(1), C(0));
    const int k0 = m + 1;
    CMat<Real> A(N, N), B(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 1; b <= N; ++b) {
            A(a, b - 1) = xi_scaled(d, a, m + b, k0);
            B(a, b - 1) = xi_scaled(d, a, m + b + 1, k0);
        }
    C hm = determinant<Real>(A);
    if (std::abs(hm) == 0) throw NumericError("h_" + std::to_string(m) + " vanishes (non-generic couplings)");
    C d0 = determinant<Real>(CMat<Real>(-B)) / hm;
    // sample on the circle through the geometric mean of the roots
    Real r = std::abs(d0) > 0 ? rpow<Real>(std::abs(d0), Real(1) / N) : Real(1);
    const int S = N + 2;
    const Real pi = pi_v<Real>();
    std::vector<C> vals(S);
    for (int j = 0; j < S; ++j) {
        C z = std::polar(r, 2 * pi * j / S);
        vals[j] = determinant<Real>(CMat<Real>(z * A - B)) / hm;
    }
    std::vector<C> coef(S);
    for (int k = 0; k < S; ++k) {
        C s(0);
        for (int j = 0; j < S; ++j) s += vals[j] * std::polar(Real(1), -2 * pi * Real(j * k % S) / S);
        coef[k] = s / (Real(S) * rpow<Real>(r, Real(k)));
    }
    if (interp_err) *interp_err = std::max(*interp_err, std::abs(coef[N + 1]));
    coef.resize(N + 1);
    return Laurent<C>::from_coeffs(m + 1, coef, C(0));
}

template <class Real>
BAFunctions<Real> build_psi_phi(const DoublePointSet<Real>& d, int n_max) {
    if (d.N < 1) throw std::invalid_argument("Baker-Akhiezer functions need N >= 1");
    BAFunctions<Real> ba;
    ba.N = d.N;
    ba.n_max = n_max;
    ba.psi.resize(n_max + 1);
    ba.phi.resize(n_max + 1);
    ba.rho = rho(d);
    std::vector<Real> err(n_max + 1, 0);
#pragma omp parallel for schedule(dynamic)
    for (int n = 0; n <= n_max; ++n) {
        ba.psi[n] = build_psi(d, n, &err[n]);
        ba.phi[n] = build_psi(d, -2 - n - d.N, &err[n]);
    }
    for (auto e : err) ba.interpolation_error = std::max(ba.interpolation_error, e);
    return ba;
}

template <class Real>
Cx<Real> scalar_product(const Laurent<Cx<Real>>& f, const Laurent<Cx<Real>>& g, const DoublePointSet<Real>& d,
                        ResidueAt at) {
    using C = Cx<Real>;
    Laurent<C> fg = f * g;
    if (fg.empty()) return C(0);
    const int N = d.N;
    auto s = poly_mul(d.Delta, d.DeltaBar);  // degree 2N, monic
    C acc(0);
    if (at == ResidueAt::infinity) {
        // 1/(Delta DeltaBar) = z^{-2N} sum_i dinv_i z^{-i}
        std::vector<C> t(s.rbegin(), s.rend());
        int need = fg.high() - N + 1;
        auto dinv = series_inverse(t, need);
        for (int e = std::max(fg.low(), N); e <= fg.high(); ++e) acc += fg.coeff(e) * dinv[e - N];
    } else {
        // 1/(Delta DeltaBar) = sum_i c_i z^i near 0
        int need = -fg.low() - N + 1;
        auto c = series_inverse(s, need);
        for (int e = fg.low(); e <= std::min(fg.high(), -N); ++e) acc += fg.coeff(e) * c[-e - N];
    }
    return acc;
}

int operator_window(int p, int q, int n_max) { return n_max + (q - 1) * (p - 1) + p + q + 2; }

template <class Real>
Operators<Real> reconstruct_operators(const BAFunctions<Real>& ba, const CurveData<Real>& c,
                                      const DoublePointSet<Real>& d, int n_max) {
    const int M = operator_window(c.p, c.q, n_max);
    if (ba.n_max + 1 < M)
        throw std::invalid_argument("reconstruction needs Baker-Akhiezer functions up to n = " + std::to_string(M - 1));
    Operators<Real> ops;
    ops.interior = n_max + 1;
    ops.Q = CMat<Real>::Zero(M, M);
    ops.P = CMat<Real>::Zero(M, M);
    auto X = c.X(), Y = c.Y();
#pragma omp parallel for schedule(dynamic)
    for (int n = 0; n < M; ++n) {
        auto Xp = X * ba.psi[n], Yp = Y * ba.psi[n];
        for (int m = 0; m < M; ++m) {
            ops.Q(n, m) = scalar_product(ba.phi[m], Xp, d);
            ops.P(n, m) = scalar_product(ba.phi[m], Yp, d);
        }
    }
    return ops;
}

template <class Real>
CheckReport check_orthonormality(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, int n_max, double tol) {
    CheckReport rep("orthonormality");
    n_max = std::min(n_max, ba.n_max);
    for (int m = 0; m <= n_max; ++m)
        for (int n = 0; n <= n_max; ++n)
            for (auto at : {ResidueAt::infinity, ResidueAt::zero}) {
                auto v = scalar_product(ba.phi[m], ba.psi[n], d, at);
                double err = static_cast<double>(std::abs(v - Cx<Real>(m == n ? 1 : 0)));
                rep.expect_small(err, tol, m, n, at == ResidueAt::infinity ? "<phi_m, psi_n> at infinity"
                                                                           : "<phi_m, psi_n> at zero");
            }
    return rep;
}

template <class Real>
CheckReport check_constant_orthogonality(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, int n_max,
                                         double tol) {
    CheckReport rep("constant_orthogonality");
    auto one = constant_one<Real>();
    for (int m = 0; m <= std::min(n_max, ba.n_max); ++m) {
        rep.expect_small(static_cast<double>(std::abs(scalar_product(ba.phi[m], one, d))), tol, m, -1, "<phi_m, 1>");
        rep.expect_small(static_cast<double>(std::abs(scalar_product(one, ba.psi[m], d))), tol, m, -1, "<1, psi_m>");
    }
    return rep;
}

template <class Real>
CheckReport check_asymptotics(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, double tol) {
    using C = Cx<Real>;
    CheckReport rep("asymptotics");
    const int N = d.N;
    for (int n = 0; n <= ba.n_max; ++n) {
        const auto& ps = ba.psi[n];
        ++rep.checked;
        if (ps.low() != n + 1 || ps.high() != n + N + 1) rep.fail(n, -1, "psi_n has the wrong degree range");
        rep.expect_small(static_cast<double>(std::abs(ps.coeff(n + N + 1) - C(1))), tol, n, -1, "psi_n monic");
        C expect = (N % 2 ? C(-1) : C(1)) * h_n(d, n + 1) / h_n(d, n);
        rep.expect_small(static_cast<double>(rel_diff(ps.coeff(n + 1), expect)), tol, n, -1, "psi_n at zero");
        const auto& ph = ba.phi[n];
        ++rep.checked;
        if (ph.high() != -n - 1) rep.fail(n, -1, "phi_n has the wrong top degree");
        rep.expect_small(static_cast<double>(std::abs(ph.coeff(-n - 1) - C(1))), tol, n, -1, "phi_n ~ z^{-n-1}");
    }
    return rep;
}

namespace {

// |f(u) - f(v)| relative to the size of the terms summed in either evaluation
template <class Real>
Real agreement(const Laurent<Cx<Real>>& f, Cx<Real> u, Cx<Real> v) {
    Real scale = 0;
    for (auto z : {u, v}) {
        Real s = 0;
        for (int e = f.low(); e <= f.high(); ++e)
            s += std::abs(f.coeff(e)) * rpow<Real>(std::abs(z), Real(e));
        scale = std::max(scale, s);
    }
    return scale == 0 ? Real(0) : std::abs(f.eval(u) - f.eval(v)) / scale;
}

}  // namespace

template <class Real>
CheckReport check_doublepoint_values(const BAFunctions<Real>& ba, const DoublePointSet<Real>& d, double tol) {
    CheckReport rep("doublepoint_values");
    for (int n = 0; n <= ba.n_max; ++n)
        for (int a = 0; a < d.N; ++a) {
            rep.expect_small(static_cast<double>(agreement(ba.psi[n], d.w[a], d.wbar[a])), tol, n, a,
                             "psi_n(w_a) = psi_n(wbar_a)");
            rep.expect_small(static_cast<double>(agreement(ba.phi[n], d.w[a], d.wbar[a])), tol, n, a,
                             "phi_n(w_a) = phi_n(wbar_a)");
        }
    return rep;
}

template <class Real>
CheckReport check_Delta0(const DoublePointSet<Real>& d, int n_max, double tol) {
    CheckReport rep("Delta0_identity");
    auto lhs = d.Delta_at(Cx<Real>(0)) * d.DeltaBar_at(Cx<Real>(0));
    const int N = d.N;
    for (int n = 0; n <= n_max; ++n) {
        auto rhs = h_n(d, n + 1) * h_n(d, -n - N - 1) / (h_n(d, n) * h_n(d, -n - N - 2));
        rep.expect_small(static_cast<double>(rel_diff(lhs, rhs)), tol, n, -1, "Delta(0) DeltaBar(0)");
    }
    return rep;
}

template <class Real>
CheckReport check_Q_band(const Operators<Real>& ops, int q, double tol) {
    CheckReport rep("Q_band");
    const int M = ops.Q.rows();
    for (int n = 0; n < ops.interior; ++n)
        for (int m = 0; m < M; ++m) {
            if (m == n + 1) rep.expect_small(static_cast<double>(std::abs(ops.Q(n, m) - Real(1))), tol, n, m, "Q_{n,n+1} = 1");
            else if (m > n + 1 || m < n - q + 1)
                rep.expect_small(static_cast<double>(std::abs(ops.Q(n, m))), tol, n, m, "Q outside its band");
        }
    return rep;
}

template <class Real>
CheckReport check_P_band(const Operators<Real>& ops, int p, const DoublePointSet<Real>& d, Cx<Real> R, double tol) {
    CheckReport rep("P_band");
    const int M = ops.P.rows();
    for (int n = 0; n < ops.interior; ++n)
        for (int m = 0; m < M; ++m) {
            if (m == n - 1)
                rep.expect_small(static_cast<double>(rel_diff(ops.P(n, m), R_n_det_direct(d, R, n))), tol, n, m,
                                 "P_{n,n-1} = R h_{n-1} h_{n+1} / h_n^2");
            else if (m < n - 1 || m > n + p - 1)
                rep.expect_small(static_cast<double>(std::abs(ops.P(n, m))), tol, n, m, "P outside its band");
        }
    return rep;
}

namespace {

template <class Real>
CMat<Real> matrix_poly_derivative(const std::vector<Cx<Real>>& w, const CMat<Real>& A) {
    // sum_k w_k A^{k-1}
    const int M = A.rows();
    CMat<Real> acc = CMat<Real>::Zero(M, M), pw = CMat<Real>::Identity(M, M);
    for (std::size_t k = 1; k < w.size(); ++k) {
        if (w[k] != Cx<Real>(0)) acc += w[k] * pw;
        if (k + 1 < w.size()) pw = pw * A;
    }
    return acc;
}

}  // namespace

template <class Real>
CheckReport check_T_bands(const Operators<Real>& ops, const CurveData<Real>& c, double tol) {
    CheckReport rep("T_bands");
    CMat<Real> Vp = matrix_poly_derivative(c.g, ops.P);
    CMat<Real> Vtp = matrix_poly_derivative(c.gt, ops.Q);
    CMat<Real> T = ops.Q - Vp, Tt = ops.P - Vtp;
    const int I = ops.interior;
    for (int n = 0; n < I; ++n)
        for (int m = 0; m < I; ++m) {
            Real s1 = std::max(Real(1), std::abs(ops.Q(n, m)) + std::abs(Vp(n, m)));
            Real s2 = std::max(Real(1), std::abs(ops.P(n, m)) + std::abs(Vtp(n, m)));
            if (m <= n) rep.expect_small(static_cast<double>(std::abs(T(n, m)) / s1), tol, n, m, "T strictly upper");
            if (m == n + 1)
                rep.expect_small(static_cast<double>(std::abs(T(n, m) * ops.P(n + 1, n) - Real(1))), tol, n, m,
                                 "T_{n,n+1} R_{n+1} = 1");
            if (m >= n) rep.expect_small(static_cast<double>(std::abs(Tt(n, m)) / s2), tol, n, m, "T~ strictly lower");
            if (m == n - 1)
                rep.expect_small(static_cast<double>(std::abs(Tt(n, m) - Real(1))), tol, n, m, "T~_{n,n-1} = 1");
        }
    return rep;
}

template <class Real>
CheckReport check_commutator_numeric(const Operators<Real>& ops, double tol) {
    CheckReport rep("commutator_numeric");
    CMat<Real> PQ = ops.P * ops.Q, QP = ops.Q * ops.P;
    for (int n = 0; n < ops.interior; ++n)
        for (int m = 0; m < ops.interior; ++m) {
            Real scale = 1;
            for (int k = 0; k < ops.P.cols(); ++k)
                scale = std::max(scale, std::abs(ops.P(n, k) * ops.Q(k, m)) + std::abs(ops.Q(n, k) * ops.P(k, m)));
            Cx<Real> expect = n == 0 && m == 0 ? Cx<Real>(-1) : Cx<Real>(0);
            rep.expect_small(static_cast<double>(std::abs(PQ(n, m) - QP(n, m) - expect) / scale), tol, n, m, "[P,Q]");
        }
    return rep;
}

template <class Real>
nlohmann::json ba_to_json(const BAFunctions<Real>& ba) {
    auto dump = [](const Laurent<Cx<Real>>& l) {
        nlohmann::json j;
        j["low"] = l.low();
        j["coeffs"] = nlohmann::json::array();
        for (auto& c : l.coeffs())
            j["coeffs"].push_back({static_cast<double>(c.real()), static_cast<double>(c.imag())});
        return j;
    };
    nlohmann::json j;
    j["N"] = ba.N;
    for (auto& l : ba.psi) j["psi"].push_back(dump(l));
    for (auto& l : ba.phi) j["phi"].push_back(dump(l));
    return j;
}

#define MOBILIUM_INSTANTIATE(Real)                                                                                   \
    template Laurent<Cx<Real>> build_psi<Real>(const DoublePointSet<Real>&, int, Real*);                              \
    template BAFunctions<Real> build_psi_phi<Real>(const DoublePointSet<Real>&, int);                                 \
    template Cx<Real> scalar_product<Real>(const Laurent<Cx<Real>>&, const Laurent<Cx<Real>>&,                       \
                                           const DoublePointSet<Real>&, ResidueAt);                                   \
    template Operators<Real> reconstruct_operators<Real>(const BAFunctions<Real>&, const CurveData<Real>&,           \
                                                         const DoublePointSet<Real>&, int);                           \
    template CheckReport check_orthonormality<Real>(const BAFunctions<Real>&, const DoublePointSet<Real>&, int,      \
                                                    double);                                                          \
    template CheckReport check_constant_orthogonality<Real>(const BAFunctions<Real>&, const DoublePointSet<Real>&,   \
                                                            int, double);                                             \
    template CheckReport check_asymptotics<Real>(const BAFunctions<Real>&, const DoublePointSet<Real>&, double);     \
    template CheckReport check_doublepoint_values<Real>(const BAFunctions<Real>&, const DoublePointSet<Real>&,       \
                                                        double);                                                      \
    template CheckReport check_Delta0<Real>(const DoublePointSet<Real>&, int, double);                               \
    template CheckReport check_Q_band<Real>(const Operators<Real>&, int, double);                                    \
    template CheckReport check_P_band<Real>(const Operators<Real>&, int, const DoublePointSet<Real>&, Cx<Real>,      \
                                            double);                                                                  \
    template CheckReport check_T_bands<Real>(const Operators<Real>&, const CurveData<Real>&, double);                \
    template CheckReport check_commutator_numeric<Real>(const Operators<Real>&, double);                             \
    template nlohmann::json ba_to_json<Real>(const BAFunctions<Real>&);

MOBILIUM_INSTANTIATE(double)
MOBILIUM_INSTANTIATE(long double)
MOBILIUM_INSTANTIATE(Quad)

}  // namespace mobilium
