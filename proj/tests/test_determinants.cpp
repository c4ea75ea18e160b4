#include <doctest.h>

#include <cmath>

#include "mobilium/determinants.hpp"
#include "mobilium/mobile_solver.hpp"

using namespace mobilium;

namespace {

DoublePointSet<double> single_pair(double w, double wbar) {
    DoublePointSet<double> d;
    d.w = {w};
    d.wbar = {wbar};
    d.finish();
    return d;
}

struct Quad4 {
    CouplingSpec spec;
    CurveData<double> c;
    DoublePointSet<double> d;
};

Quad4 quadrangulation() {
    Quad4 s;
    s.spec = CouplingSpec::make(4, 2);
    apply_couplings(s.spec, "g2=0.1,gt2=0.1,gt4=0.05");
    s.c = refine_numeric<double>(s.spec);
    curve_polynomial(s.c);
    s.d = double_points(s.c);
    return s;
}

PathPoly poly(std::initializer_list<std::pair<const std::pair<int, int>, long long>> init) { return PathPoly(init); }

}  // namespace

TEST_CASE("one-pair determinants") {
    auto d = single_pair(0.5, 2);
    CHECK(std::abs(h_n(d, 0) - 1.5) < 1e-15);
    CHECK(std::abs(h_n(d, 1) - 3.75) < 1e-15);
    CHECK(std::abs(h_n(d, -1)) == 0);
    CHECK(std::abs(R_n_det(d, {1.0, 0}, 1) - 0.84) < 1e-14);
    CHECK(std::abs(R_n_det_direct(d, {1.0, 0}, 1) - 0.84) < 1e-14);
    CHECK(std::abs(hbar_n(d, 60) - 1.0) < 1e-15);
    CHECK(check_hbar_identity(d).pass());
    CHECK_THROWS(R_n_det(d, {1.0, 0}, 0));
}

TEST_CASE("empty double-point set") {
    DoublePointSet<double> d;
    d.finish();
    CHECK(h_n(d, 3) == std::complex<double>(1));
    CHECK(R_n_det(d, {1.3, 0}, 2) == std::complex<double>(1.3));
}

TEST_CASE("hbar identity and the two hbar forms") {
    auto q = quadrangulation();
    auto rep = check_hbar_identity(q.d, 10);
    CHECK(rep.pass());
    CHECK(rep.max_error < 1e-8);

    auto spec = CouplingSpec::make(3, 3);
    apply_couplings(spec, "g2=0.05,g3=0.04,gt2=0.03,gt3=0.06");
    auto c = refine_numeric<double>(spec);
    curve_polynomial(c);
    CHECK(check_hbar_identity(double_points(c), 10).pass());
}

TEST_CASE("R_n from determinants") {
    auto q = quadrangulation();
    double Xmax = 0;
    for (auto x : q.d.Xa) Xmax = std::max(Xmax, std::abs(x));
    double prev = 1;
    for (int n = 1; n <= 8; ++n) {
        auto Rn = R_n_det(q.d, q.c.R, n);
        CHECK(Rn.real() > 0);
        CHECK(std::abs(Rn.imag()) < 1e-12);
        if (n <= 4) CHECK(rel_diff(Rn, R_n_det_direct(q.d, q.c.R, n)) < 1e-12);
        double gap = std::abs(Rn / q.c.R - 1.0);
        // geometric approach to R at the rate of the largest |X_a|
        if (n > 1 && gap > 1e-14) CHECK(gap < 2 * prev * Xmax);
        prev = gap;
    }
}

TEST_CASE("R_n agrees with the evaluated mobile series") {
    auto q = quadrangulation();
    double last = 1;
    for (int D : {4, 6}) {
        auto sol = solve(q.spec, D, 6);
        double worst = 0;
        for (int n = 1; n <= 6; ++n) {
            auto series = eval_at_couplings<double>(sol.R_at(n), q.spec);
            worst = std::max(worst, std::abs(R_n_det(q.d, q.c.R, n) - series));
        }
        CHECK(worst < last);
        last = worst;
    }
    CHECK(last < 1e-5);
}

TEST_CASE("small lattice path counts") {
    CHECK(path_gf(PathKind::three_step, 2, 0) == poly({{{0, 2}, 1}, {{1, 0}, 2}}));
    CHECK(path_gf(PathKind::three_step, 1, 1) == poly({{{0, 0}, 1}}));
    CHECK(path_gf(PathKind::three_step, 1, 0) == poly({{{0, 1}, 1}}));
    CHECK(path_gf(PathKind::three_step, 1, -1) == poly({{{1, 0}, 1}}));
    CHECK(path_gf(PathKind::three_step, 3, 4).empty());
    // positive paths: only up-down survives among the R terms
    CHECK(path_gf(PathKind::three_step_positive, 2, 0) == poly({{{0, 2}, 1}, {{1, 0}, 1}}));
    // p = 3: steps +2 and -1; two ups and two downs in four steps, six orders
    CHECK(path_gf(PathKind::p_step, 3, 0, 3) == poly({{{2, 0}, 3}}));
    CHECK(path_gf(PathKind::p_step, 2, 0, 3).empty());
    CHECK(path_eval<double>(path_gf(PathKind::three_step, 2, 0), {2.0, 0}, {3.0, 0}) == std::complex<double>(13));
}

TEST_CASE("path identities") {
    CHECK(check_pathident(8, 3).pass());
    CHECK(check_pathident(8, 3).checked == 28);
    CHECK(check_pathidreduced(8).pass());
    CHECK(check_height_reversal(8).pass());
}

TEST_CASE("general maps") {
    auto spec = general_map_spec(4, {{3, Rational(1, 20)}, {4, Rational(3, 100)}});
    auto gm = general_map_char<double>(spec);
    CHECK(gm.rs_residual < 1e-13);
    CHECK(gm.B_form_gap < 1e-10);
    REQUIRE(gm.x.size() == 2);

    auto c = refine_numeric<double>(spec);
    curve_polynomial(c);
    auto d = double_points(c);
    REQUIRE(d.N == 2);
    CHECK(std::abs(gm.R - c.R) < 1e-12);
    CHECK(std::abs(gm.S - c.beta[0]) < 1e-12);
    for (int a = 0; a < 2; ++a) {
        CHECK(std::abs(d.w[a] * d.wbar[a] - c.R) < 1e-10);
        // x_a squares to X_a
        double best = 1;
        for (auto x : gm.x) best = std::min(best, std::abs(x * x - d.Xa[a]));
        CHECK(best < 1e-10);
    }
    for (int i = 1; i <= 6; ++i) CHECK(rel_diff(gm.R_i(i), R_n_det(d, c.R, i)) < 1e-8);

    CHECK_THROWS_AS(general_map_char<double>(constellation_spec(3, 1, {Rational(1, 20)})), std::invalid_argument);
}

TEST_CASE("constellations") {
    for (auto [p, ell, ghat] : {std::tuple{4, 1, std::vector<Rational>{Rational(1, 25)}},
                                std::tuple{3, 2, std::vector<Rational>{Rational(1, 50), Rational(1, 200)}},
                                std::tuple{3, 1, std::vector<Rational>{Rational(1, 20)}}}) {
        CAPTURE(p);
        CAPTURE(ell);
        auto spec = constellation_spec(p, ell, ghat);
        auto cd = constellation_factor<double>(spec);
        CHECK(cd.N0 == p * ell - ell - 1);
        CHECK(static_cast<int>(cd.reps.size()) == cd.N0);
        auto rep = check_constellation(cd);
        CHECK(rep.pass());
        if (!rep.pass()) MESSAGE(rep.to_json().dump());
        auto ch = check_constellation_char(cd);
        CHECK(ch.pass());
        if (!ch.pass()) MESSAGE(ch.to_json().dump());
        // another representative in each orbit gives the same R_i
        auto rot = constellation_factor<double>(spec, 1);
        using Route = ConstellationData<double>::Route;
        for (int i = 1; i <= 4; ++i) CHECK(rel_diff(rot.R_i(Route::u_x, i), cd.R_i(Route::u_x, i)) < 1e-8);
        // u_i tends to 1
        CHECK(std::abs(cd.block(Route::u_x, 40) - 1.0) < 1e-10);
    }
    CHECK_THROWS_AS(constellation_factor<double>(general_map_spec(4, {{3, Rational(1, 20)}, {4, Rational(1, 20)}})), std::invalid_argument);
}

TEST_CASE("R_n table csv") {
    auto csv = R_table_csv({{1, 1.5, 1.25}});
    CHECK(csv == "n,R_n_det,R_n_series_eval,abs_diff\n1,1.5,1.25,0.25\n");
}
