// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "mobilium/baker_akhiezer.hpp"
#include "mobilium/determinants.hpp"
#include "mobilium/mobile_solver.hpp"
#include "mobilium/oracle.hpp"
#include "mobilium/spectral_curve.hpp"

using namespace mobilium;

namespace {

// pinned tolerances
constexpr double kPairTol = 1e-10;
constexpr double kResidueTol = 1e-8;
constexpr double kEyTol = 1e-8;
constexpr double kOrthoTol = 1e-10;
constexpr double kQTol = 1e-8;
constexpr double kPTol = 1e-10;
constexpr double kTTol = 1e-8;
constexpr double kHbarTol = 1e-8;
constexpr double kConstellationTol = 1e-8;
constexpr double kBFormTol = 1e-10;
constexpr double kGeneralRTol = 1e-8;
constexpr double kCriterion1Seconds = 60;
constexpr double kCriterion3Seconds = 600;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void run(int k, const std::string& title, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s; %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", k, title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

CouplingSpec criterion4_spec() {
    auto spec = CouplingSpec::make(4, 2);
    apply_couplings(spec, "g2=1/10,gt2=1/10,gt4=1/20");
    return spec;
}

// Taylor expansion of (1 - a - sqrt((1 - a)^2 - 12 b)) / (6 b), a = gt2 g2, b = g2^2 gt4,
// written as sum_k c_k 12^k b^{k-1} / (6 (1 - a)^{2k-1}) with sqrt(1 - x) = 1 - sum c_k x^k
Series closed_form_series(const SpacePtr& sp) {
    Series g2 = Series::variable(sp, "g2"), gt2 = Series::variable(sp, "gt2"), gt4 = Series::variable(sp, "gt4");
    Series a = gt2 * g2, b = g2 * g2 * gt4;
    Series one = Series::constant(sp, 1);
    Series inv = (one - a).inverse();
    Series inv2 = inv * inv;
    Series out(sp), bpow = one, ipow = inv;  // b^{k-1}, (1-a)^{-(2k-1)}
    Rational c = Rational(1, 2), twelve = 1;  // c_1 = 1/2
    for (int k = 1; k <= sp->order(); ++k) {
        twelve *= 12;
        out += bpow * ipow * Rational(c * twelve / 6);
        // c_{k+1} = c_k (2k - 1) / (2k + 2)
        c = c * Rational(2 * k - 1) / Rational(2 * k + 2);
        bpow = bpow * b;
        ipow = ipow * inv2;
    }
    return out;
}

}  // namespace

int main() {
    run(1, "quadrangulation series at D = 6", [] {
        auto spec = CouplingSpec::make(4, 2);
        spec.g_at(2) = Weight::symbol();
        spec.gt_at(2) = Weight::symbol();
        spec.gt_at(4) = Weight::symbol();
        auto t0 = std::chrono::steady_clock::now();
        auto sol = solve(spec, 6, 14);
        auto lim = limits(sol);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        Series R = lim.R;
        bool ok = R.constant_term() == 1 && R.coeff(Monomial::parse("g2*gt2")) == 1 &&
                  R.coeff(Monomial::parse("g2^2*gt2^2")) == 1 && R.coeff(Monomial::parse("g2^2*gt4")) == 3;
        for (auto& [idx, c] : R.terms()) ok = ok && c.get_den() == 1;
        bool taylor = R == closed_form_series(R.space());
        return Outcome{ok && taylor && secs < kCriterion1Seconds,
                       std::string("leading terms ") + (ok ? "match" : "differ") + ", closed-form Taylor through degree 6 " +
                           (taylor ? "equal" : "differs") + ", solve " + fmt(secs) + " s"};
    });

    run(2, "exact structural identities at D = 4", [] {
        std::ostringstream bad;
        int checks = 0;
        for (auto [p, q] : {std::pair{4, 2}, std::pair{3, 3}, std::pair{2, 5}}) {
            auto sol = solve(CouplingSpec::all_symbolic(p, q), 4, 8);
            auto lim = limits(sol);
            for (auto rep : {check_commutator(sol), check_dual_R(sol), check_HK(sol), check_sum_rule(sol, lim)}) {
                ++checks;
                if (!rep.pass()) bad << " " << rep.check << "(" << p << "," << q << ")";
            }
            auto sq = solve(CouplingSpec::all_symbolic(p, q, ScalingMode::sqrt_g), 4, 8);
            auto par = check_parity(sq);
            ++checks;
            if (!par.pass()) bad << " parity(" << p << "," << q << ")";
        }
        return Outcome{bad.str().empty(), std::to_string(checks) + " exact checks" +
                                              (bad.str().empty() ? std::string(" all hold") : ", failing:" + bad.str())};
    });

    run(3, "oracle agreement through degree 3", [] {
        const OracleRoot roots[] = {{RootKind::corner_at_label, 1, 0},
                                    {RootKind::corner_at_label, 2, 0},
                                    {RootKind::white_half, 2, 1},
                                    {RootKind::black_half, 1, 2}};
        auto t0 = std::chrono::steady_clock::now();
        int monomials = 0;
        std::ostringstream bad;
        for (auto [p, q] : {std::pair{4, 2}, std::pair{3, 3}}) {
            auto sol = solve(CouplingSpec::all_symbolic(p, q), 3, 10);
            for (auto& root : roots) {
                OracleRequest req;
                req.p = p;
                req.q = q;
                req.max_weighted = 3;
                req.root = root;
                auto oc = enumerate(req);
                auto rep = cross_check(sol, oc, 3);
                monomials += rep.checked;
                if (oc.inconclusive || !rep.pass()) bad << " " << root.name() << "(" << p << "," << q << ")";
            }
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Outcome{bad.str().empty() && secs < kCriterion3Seconds,
                       std::to_string(monomials) + " monomials compared" +
                           (bad.str().empty() ? std::string(", all equal") : ", mismatch:" + bad.str())};
    });

    run(4, "double points of the quadrangulation g2 = gt2 = 0.1, gt4 = 0.05", [] {
        auto c = refine_numeric<double>(criterion4_spec());
        curve_polynomial(c);
        auto d = double_points(c);
        auto pairs = check_pairs(c, d, kPairTol);
        auto res = check_residue_identity(d, kResidueTol);
        auto ey = check_Ey_factorization(c, d, kEyTol);
        bool ok = d.N == 2 && pairs.pass() && res.pass() && ey.pass();
        return Outcome{ok, "N = " + std::to_string(d.N) + ", pair error " + fmt(d.max_pair_error) + ", residue " +
                               fmt(res.max_error) + ", E_y identity " + fmt(ey.max_error)};
    });

    run(5, "determinant R_n versus truncated series, D = 4, 6, 8", [] {
        auto spec = criterion4_spec();
        auto c = refine_numeric<double>(spec);
        curve_polynomial(c);
        auto d = double_points(c);
        const double bound = 10 * std::pow(0.1, 9);
        std::vector<std::vector<double>> gap;
        for (int D : {4, 6, 8}) {
            auto sol = solve(spec, D, 6);
            std::vector<double> row;
            for (int n = 1; n <= 6; ++n)
                row.push_back(std::abs(R_n_det(d, c.R, n) - eval_at_couplings<double>(sol.R_at(n), spec)));
            gap.push_back(row);
        }
        bool mono = true, small = true;
        double worst8 = 0;
        for (int n = 0; n < 6; ++n) {
            mono = mono && gap[1][n] < gap[0][n] && gap[2][n] < gap[1][n];
            worst8 = std::max(worst8, gap[2][n]);
        }
        small = worst8 < bound;
        return Outcome{mono && small, std::string("monotone ") + (mono ? "yes" : "no") + ", max gap D=4 " +
                                          fmt(*std::max_element(gap[0].begin(), gap[0].end())) + ", D=6 " +
                                          fmt(*std::max_element(gap[1].begin(), gap[1].end())) + ", D=8 " +
                                          fmt(worst8) + " vs bound " + fmt(bound)};
    });

    run(6, "Baker-Akhiezer suite (quad precision, criterion 4 couplings)", [] {
        auto c = refine_numeric<Quad>(criterion4_spec());
        curve_polynomial(c);
        auto d = double_points(c);
        const int n_max = 8;
        auto ba = build_psi_phi(d, operator_window(c.p, c.q, n_max) - 1);
        auto ortho = check_orthonormality(ba, d, 8, kOrthoTol);
        auto ops = reconstruct_operators(ba, c, d, n_max);
        auto qb = check_Q_band(ops, c.q, kQTol);
        auto pb = check_P_band(ops, c.p, d, c.R, kPTol);
        auto tb = check_T_bands(ops, c, kTTol);
        bool ok = ortho.pass() && qb.pass() && pb.pass() && tb.pass();
        return Outcome{ok, "orthonormality " + fmt(ortho.max_error) + ", Q band " + fmt(qb.max_error) + ", P band " +
                               fmt(pb.max_error) + ", T bands " + fmt(tb.max_error)};
    });

    run(7, "determinant, lattice path and leading-order identities", [] {
        auto c = refine_numeric<double>(criterion4_spec());
        curve_polynomial(c);
        auto d = double_points(c);
        auto hb = check_hbar_identity(d, 10, kHbarTol);
        auto pid = check_pathident(8, 3);

        auto sp = CouplingSpec::make(3, 3, ScalingMode::sqrt_g);
        apply_couplings(sp, "lambda2=0.3,lambda3=1,lambdat2=0.2,lambdat3=1.5");
        sp.g = Rational(1, 10000);
        const double sg = 0.01;
        auto seeds = leading_order_seeds<double>(sp);
        auto cs = refine_numeric<double>(sp);
        curve_polynomial(cs);
        auto ds = double_points(cs);
        double worst = 0;
        for (std::size_t k = 0; k < seeds.eta.size(); ++k) {
            auto w0 = sg * cs.R / seeds.eta[k], wb0 = seeds.xi[k] / sg;
            double best = 1e300;
            for (int a = 0; a < ds.N; ++a)
                best = std::min(best, std::max(std::abs(ds.w[a] - w0) / std::abs(w0),
                                               std::abs(ds.wbar[a] - wb0) / std::abs(wb0)));
            worst = std::max(worst, best);
        }
        bool seeds_ok = static_cast<int>(seeds.eta.size()) == ds.N && worst <= 10 * sg;
        return Outcome{hb.pass() && pid.pass() && seeds_ok,
                       "hbar identity " + fmt(hb.max_error) + ", path identity " + std::to_string(pid.checked) +
                           " cases " + (pid.pass() ? "exact" : "FAIL") + ", leading-order seeds rel. error " +
                           fmt(worst) + " at g = 1e-4 (bound 10 sqrt(g))"};
    });

    run(8, "constellations p = 3, ell = 2 and p = 4, ell = 1", [] {
        std::ostringstream os;
        bool ok = true;
        for (auto [p, ell, ghat] : {std::tuple{3, 2, std::vector<Rational>{Rational(1, 50), Rational(1, 200)}},
                                    std::tuple{4, 1, std::vector<Rational>{Rational(1, 25)}}}) {
            auto cd = constellation_factor<double>(constellation_spec(p, ell, ghat));
            auto rep = check_constellation(cd, 6, kConstellationTol);
            auto ch = check_constellation_char(cd, kConstellationTol);
            ok = ok && rep.pass() && ch.pass();
            os << " (" << p << "," << ell << "): orbit " << fmt(static_cast<double>(cd.orbit_error)) << ", routes "
               << fmt(rep.max_error) << ", characteristic " << fmt(ch.max_error) << ";";
        }
        return Outcome{ok, os.str()};
    });

    run(9, "general maps q = 4", [] {
        auto spec = general_map_spec(4, {{3, Rational(1, 20)}, {4, Rational(3, 100)}});
        auto gm = general_map_char<double>(spec);
        auto c = refine_numeric<double>(spec);
        curve_polynomial(c);
        auto d = double_points(c);
        double worst = 0;
        for (int i = 1; i <= 6; ++i) worst = std::max(worst, rel_diff(gm.R_i(i), R_n_det(d, c.R, i)));
        bool ok = gm.B_form_gap < kBFormTol && gm.x.size() == 2 && worst < kGeneralRTol;
        return Outcome{ok, "B forms gap " + fmt(static_cast<double>(gm.B_form_gap)) + ", " + std::to_string(gm.x.size()) +
                               " roots inside the unit disk, R_i gap " + fmt(worst)};
    });

    return failures ? 1 : 0;
}
