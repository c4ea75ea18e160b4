#include <doctest.h>

#include <random>

#include "mobilium/coupling.hpp"
#include "mobilium/series.hpp"

using namespace mobilium;

namespace {

Series random_series(const SpacePtr& sp, std::mt19937& rng, bool unit = false) {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    std::bernoulli_distribution keep(0.4);
    Series s(sp);
    for (std::size_t i = 0; i < sp->size(); ++i)
        if (keep(rng)) s += Series::monomial(sp, sp->monomial(i), Rational(num(rng), den(rng)));
    if (unit) {
        Rational c0 = s.constant_term();
        s += Series::constant(sp, (c0 == 0 ? Rational(1) : Rational(0)));
    }
    return s;
}

}  // namespace

TEST_CASE("constants and the zero element") {
    auto sp = SeriesSpace::make({"g2", "gt2"}, 4);
    CHECK(Series::constant(sp, 0).is_zero());
    CHECK(Series::constant(sp, 1).terms().size() == 1);
    auto sp1 = SeriesSpace::make({"g"}, 2);
    CHECK(Series::constant(sp1, Rational(3, 2)).constant_term() == Rational(3, 2));
}

TEST_CASE("graded-lex indexing") {
    auto sp = SeriesSpace::make({"x", "y", "z"}, 3);
    CHECK(sp->size() == 20);
    for (std::size_t i = 0; i < sp->size(); ++i) CHECK(sp->rank(sp->exps(i)) == i);
    for (std::size_t i = 1; i < sp->size(); ++i) CHECK(sp->degree(i) >= sp->degree(i - 1));
    CHECK(sp->monomial(1).str() == "x");
    CHECK(sp->monomial(3).str() == "z");
}

TEST_CASE("basic arithmetic") {
    auto sp = SeriesSpace::make({"g2", "gt2"}, 4);
    auto g2 = Series::variable(sp, "g2"), gt2 = Series::variable(sp, "gt2");
    CHECK((g2 * gt2).coeff(Monomial::parse("g2*gt2")) == 1);
    CHECK((g2 - g2).is_zero());
    auto sp1 = SeriesSpace::make({"g2"}, 1);
    auto x = Series::variable(sp1, "g2");
    auto one = Series::constant(sp1, 1);
    auto sq = (one + x) * (one + x);
    CHECK(sq.str() == "1 + 2*g2");
}

TEST_CASE("inversion") {
    auto sp = SeriesSpace::make({"g2"}, 5);
    auto g = Series::variable(sp, "g2");
    auto one = Series::constant(sp, 1);
    auto inv = (one - g).inverse();
    for (int k = 0; k <= 5; ++k) CHECK(inv.coeff(Monomial{{"g2", k}}) == 1);
    CHECK(one.inverse() == one);
    auto sp2 = SeriesSpace::make({"g2"}, 2);
    auto two_plus = Series::constant(sp2, 2) + Series::variable(sp2, "g2");
    auto b = two_plus.inverse();
    CHECK(b.str() == "1/2 - 1/4*g2 + 1/8*g2^2");
    CHECK(b * two_plus == Series::constant(sp2, 1));
    CHECK_THROWS_AS(g.inverse(), SeriesError);
}

TEST_CASE("coefficient lookup contract") {
    auto sp = SeriesSpace::make({"g2", "gt2"}, 2);
    auto s = Series::constant(sp, 1) + Series::variable(sp, "g2") * Series::variable(sp, "gt2") * Rational(3);
    CHECK(s.coeff(Monomial::parse("g2*gt2")) == 3);
    CHECK(s.coeff(Monomial::parse("g2^2")) == 0);
    CHECK_THROWS_AS(s.coeff(Monomial::parse("g2^3")), SeriesError);
}

TEST_CASE("numeric evaluation") {
    auto sp = SeriesSpace::make({"g2", "gt2"}, 4);
    auto s = Series::constant(sp, 1) + Series::variable(sp, "g2") * Series::variable(sp, "gt2");
    auto v = s.eval({{"g2", 0.1}, {"gt2", 0.1}});
    CHECK(v.real() == doctest::Approx(1.01).epsilon(1e-15));
    CHECK(Series(sp).eval({{"g2", 1.0}, {"gt2", 2.0}}) == std::complex<double>(0));
    CHECK_THROWS_AS(s.eval({{"g2", 0.1}}), SeriesError);
}

TEST_CASE("ring axioms on random series") {
    std::mt19937 rng(7);
    for (int D = 0; D <= 6; ++D) {
        auto sp = SeriesSpace::make({"a", "b", "c"}, D);
        for (int trial = 0; trial < 4; ++trial) {
            auto x = random_series(sp, rng), y = random_series(sp, rng), z = random_series(sp, rng);
            CHECK((x * y) * z == x * (y * z));
            CHECK(x * (y + z) == x * y + x * z);
            CHECK(x * y == y * x);
            CHECK(x + y == y + x);
            auto u = random_series(sp, rng, true);
            CHECK(u * u.inverse() == Series::constant(sp, 1));
        }
    }
}

TEST_CASE("truncation commutes with multiplication") {
    std::mt19937 rng(11);
    auto hi = SeriesSpace::make({"a", "b"}, 6);
    for (int trial = 0; trial < 5; ++trial) {
        auto x = random_series(hi, rng), y = random_series(hi, rng);
        for (int d = 0; d <= 6; ++d) CHECK((x * y).truncated(d) == x.truncated(d) * y.truncated(d));
    }
}

TEST_CASE("mixed orders promote to the lower order") {
    auto lo = SeriesSpace::make({"a"}, 1), hi = SeriesSpace::make({"a"}, 3);
    auto x = Series::variable(hi, "a");
    auto y = Series::constant(lo, 1) + Series::variable(lo, "a");
    auto s = x * x + y;
    CHECK(s.order() == 1);
    CHECK(s.str() == "1 + a");
    auto other = SeriesSpace::make({"b"}, 3);
    CHECK_THROWS_AS(x + Series::variable(other, "b"), SeriesError);
}

TEST_CASE("canonical json round trip") {
    std::mt19937 rng(3);
    auto sp = SeriesSpace::make({"g2", "gt2", "gt4"}, 4);
    auto x = random_series(sp, rng);
    auto j = x.to_json();
    CHECK(Series::from_json(j) == x);
    CHECK(Series::from_json(j).to_json().dump() == j.dump());
}

TEST_CASE("rational literals") {
    CHECK(parse_rational("0.05") == Rational(1, 20));
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
    CHECK(parse_rational("1e-4") == Rational(1, 10000));
    CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("coupling parsing") {
    auto spec = CouplingSpec::make(4, 2);
    apply_couplings(spec, "g2=sym,gt2=0.1,gt4=1/20");
    CHECK(spec.g_at(2).kind == Weight::Kind::symbolic);
    CHECK(spec.gt_at(4).value == Rational(1, 20));
    CHECK(spec.variables() == std::vector<std::string>{"g2", "t"});
    CHECK_THROWS_AS(apply_couplings(spec, "g7=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_couplings(spec, "g2"), std::invalid_argument);
    auto sq = CouplingSpec::make(3, 3, ScalingMode::sqrt_g);
    sq.g_at(1) = Weight::symbol();
    CHECK_THROWS_AS(sq.validate(), std::invalid_argument);
}
