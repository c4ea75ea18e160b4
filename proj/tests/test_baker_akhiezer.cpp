#include <doctest.h>

#include <cmath>

#include "mobilium/baker_akhiezer.hpp"

using namespace mobilium;

namespace {

template <class Real>
struct Instance {
    CurveData<Real> c;
    DoublePointSet<Real> d;
};

template <class Real>
Instance<Real> instance(int p, int q, const std::string& text) {
    auto spec = CouplingSpec::make(p, q);
    apply_couplings(spec, text);
    Instance<Real> s;
    s.c = refine_numeric<Real>(spec);
    curve_polynomial(s.c);
    s.d = double_points(s.c);
    return s;
}

template <class Real>
void full_suite(const Instance<Real>& s, int n_max) {
    const int M = operator_window(s.c.p, s.c.q, n_max);
    auto ba = build_psi_phi(s.d, M - 1);
    CHECK(ba.interpolation_error < 1e-10);
    CHECK(check_orthonormality(ba, s.d, 8, 1e-10).pass());
    CHECK(check_constant_orthogonality(ba, s.d, 8, 1e-10).pass());
    CHECK(check_asymptotics(ba, s.d).pass());
    CHECK(check_doublepoint_values(ba, s.d).pass());
    CHECK(check_Delta0(s.d).pass());
    auto ops = reconstruct_operators(ba, s.c, s.d, n_max);
    CHECK(check_Q_band(ops, s.c.q, 1e-8).pass());
    CHECK(check_P_band(ops, s.c.p, s.d, s.c.R, 1e-10).pass());
    CHECK(check_T_bands(ops, s.c).pass());
    CHECK(check_commutator_numeric(ops).pass());
}

}  // namespace

TEST_CASE("one pair: closed form of psi_n") {
    DoublePointSet<double> d;
    d.w = {0.5};
    d.wbar = {2.0};
    d.finish();
    for (int n = 0; n <= 4; ++n) {
        auto psi = build_psi(d, n);
        double x1 = std::pow(2.0, n + 1) - std::pow(0.5, n + 1), x2 = std::pow(2.0, n + 2) - std::pow(0.5, n + 2);
        CHECK(psi.low() == n + 1);
        CHECK(std::abs(psi.coeff(n + 2) - 1.0) < 1e-14);
        CHECK(std::abs(psi.coeff(n + 1) + x2 / x1) < 1e-13);
        CHECK(rel_diff(psi.eval(std::complex<double>(0.5)), psi.eval(std::complex<double>(2.0))) < 1e-11);
    }
    CHECK_THROWS(build_psi(d, -1));
    auto ba = build_psi_phi(d, 6);
    CHECK(check_orthonormality(ba, d, 6).pass());
}

TEST_CASE("quadrangulation in double precision") {
    full_suite(instance<double>(4, 2, "g2=1,gt4=0.05"), 8);
}

TEST_CASE("bipartite (3,3) in double precision") {
    full_suite(instance<double>(3, 3, "g2=0.1,g3=0.25,gt2=0.1,gt3=0.25"), 8);
}

TEST_CASE("small couplings need quad precision") {
    full_suite(instance<Quad>(4, 2, "g2=0.1,gt2=0.1,gt4=0.05"), 8);
}

TEST_CASE("scalar product routes and negative control") {
    auto s = instance<double>(4, 2, "g2=1,gt4=0.05");
    auto ba = build_psi_phi(s.d, 6);
    for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n) {
            auto a = scalar_product(ba.phi[m], ba.psi[n], s.d, ResidueAt::infinity);
            auto b = scalar_product(ba.phi[m], ba.psi[n], s.d, ResidueAt::zero);
            CHECK(std::abs(a - b) < 1e-10);
        }
    auto bad = s.d;
    bad.wbar[0] *= 1.0 + 1e-6;
    bad.finish();
    CHECK_FALSE(check_doublepoint_values(ba, bad).pass());
    auto j = ba_to_json(ba);
    CHECK(j["psi"].size() == 7);
    CHECK(j["phi"][0]["low"] == -3);
}

TEST_CASE("reconstruction needs enough functions") {
    auto s = instance<double>(4, 2, "g2=1,gt4=0.05");
    auto ba = build_psi_phi(s.d, 5);
    CHECK_THROWS_AS(reconstruct_operators(ba, s.c, s.d, 5), std::invalid_argument);
}
