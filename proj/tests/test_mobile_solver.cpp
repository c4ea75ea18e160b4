#include <doctest.h>

#include "mobilium/mobile_solver.hpp"

using namespace mobilium;

namespace {

CouplingSpec quadrangulation_spec() {
    auto spec = CouplingSpec::make(4, 2);
    spec.g_at(2) = Weight::symbol();
    spec.gt_at(2) = Weight::symbol();
    spec.gt_at(4) = Weight::symbol();
    return spec;
}

}  // namespace

TEST_CASE("zero couplings give the vertex map only") {
    auto spec = CouplingSpec::make(3, 3);
    auto sol = solve(spec, 3, 6);
    for (int i = 1; i <= 6; ++i) CHECK(sol.R_at(i) == sol.one());
    for (int i = 0; i <= 6; ++i) {
        CHECK(sol.B(i, i + 1).is_zero());
        CHECK(sol.W(i, i).is_zero());
    }
    CHECK(check_commutator(sol).pass());
    CHECK(check_dual_R(sol).pass());
    CHECK(check_HK(sol).pass());
    auto lim = limits(sol);
    CHECK(lim.R == sol.one());
    for (auto& a : lim.alpha) CHECK(a.is_zero());
}

TEST_CASE("quadrangulation series") {
    auto sol = solve(quadrangulation_spec(), 4, 12);
    const Series& R = sol.R_at(12);
    CHECK(R.constant_term() == 1);
    CHECK(R.coeff(Monomial::parse("g2*gt2")) == 1);
    CHECK(R.coeff(Monomial::parse("g2^2*gt2^2")) == 1);
    CHECK(R.coeff(Monomial::parse("g2^2*gt4")) == 3);
    CHECK(sol.sweeps <= 4 + 2);
    auto lim = limits(sol);
    Series beta1 = lim.alpha[1] * sol.gt[4] * Rational(3) + sol.gt[2];
    CHECK(lim.beta[3] == sol.gt[4]);
    CHECK(lim.beta[1] == beta1);
    CHECK(lim.alpha[1] == lim.R * sol.g[2]);
    CHECK(check_sum_rule(sol, lim).pass());
    CHECK(check_commutator(sol).pass());
    CHECK(check_dual_R(sol).pass());
    CHECK(check_HK(sol).pass());
    CHECK(check_positivity(sol).pass());
    CHECK(check_triangular(sol).pass());
}

TEST_CASE("degree-one faces") {
    auto spec = CouplingSpec::all_symbolic(3, 3);
    auto sol = solve(spec, 1, 5);
    CHECK(sol.W(3, 3) == Series::variable(sol.space, "g1"));
    CHECK(sol.B(3, 3) == Series::variable(sol.space, "gt1"));
}

TEST_CASE("seed independence") {
    auto spec = CouplingSpec::all_symbolic(3, 3);
    SolveOptions junk;
    junk.perturbed_seed = true;
    auto a = solve(spec, 3, 6);
    auto b = solve(spec, 3, 6, junk);
    CHECK(a.P == b.P);
    CHECK(a.Q == b.Q);
}

TEST_CASE("window stability under enlargement") {
    auto spec = CouplingSpec::all_symbolic(4, 2);
    SolveOptions wide;
    wide.extra_window = 5;
    auto a = solve(spec, 4, 8);
    auto b = solve(spec, 4, 8, wide);
    for (int i = 0; i < a.P.trusted(); ++i) {
        if (i >= 1) CHECK(a.R[i] == b.R[i]);
        for (int j = i; j <= i + 3; ++j) CHECK(a.P(i, j) == b.P(i, j));
        for (int j = std::max(0, i - 1); j <= i; ++j) CHECK(a.Q(i, j) == b.Q(i, j));
    }
}

TEST_CASE("serial and parallel solves agree") {
    auto spec = CouplingSpec::all_symbolic(3, 3);
    SolveOptions ser;
    ser.exec = Exec::serial;
    auto a = solve(spec, 3, 5, ser);
    auto b = solve(spec, 3, 5);
    CHECK(a.P == b.P);
    CHECK(a.Q == b.Q);
}

TEST_CASE("stabilization in i") {
    auto spec = quadrangulation_spec();
    auto sol = solve(spec, 4, 12);
    auto sp = sol.space;
    for (std::size_t m = 0; m < sp->size(); ++m) {
        Rational last = sol.R[12].coeff_index(m);
        int i0 = 12;
        while (i0 > 1 && sol.R[i0 - 1].coeff_index(m) == last) --i0;
        CHECK(i0 <= 12);
    }
    CHECK_THROWS_AS(limits(solve(spec, 4, 2)), SolverError);
}

TEST_CASE("structural identities for several (p, q)") {
    for (auto [p, q] : {std::pair{4, 2}, {3, 3}, {2, 5}}) {
        CAPTURE(p);
        CAPTURE(q);
        auto sol = solve(CouplingSpec::all_symbolic(p, q), 3, 14);
        CHECK(check_commutator(sol).pass());
        CHECK(check_dual_R(sol).pass());
        CHECK(check_HK(sol).pass());
        CHECK(check_sum_rule(sol, limits(sol)).pass());
    }
}

TEST_CASE("sqrt_g parity") {
    auto spec = CouplingSpec::all_symbolic(3, 3, ScalingMode::sqrt_g);
    auto sol = solve(spec, 4, 12);
    auto rep = check_parity(sol);
    CHECK(rep.pass());
    CHECK_FALSE(check_parity(solve(CouplingSpec::all_symbolic(3, 3), 2, 5)).pass());
}

TEST_CASE("negative control: a perturbed entry is located") {
    auto sol = solve(quadrangulation_spec(), 3, 8);
    sol.P.at(3, 4) += Series::variable(sol.space, "g2") * Series::variable(sol.space, "gt2");
    auto rep = check_commutator(sol);
    CHECK_FALSE(rep.pass());
    bool located = false;
    for (auto& v : rep.violations) located |= (v.i >= 2 && v.i <= 4);
    CHECK(located);
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(solve(CouplingSpec::make(2, 2), 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(solve(CouplingSpec::make(3, 3), 2, 0), std::invalid_argument);
}
