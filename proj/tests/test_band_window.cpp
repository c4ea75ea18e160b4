#include <doctest.h>

#include <functional>

#include "mobilium/band_window.hpp"

using namespace mobilium;

namespace {

using C = std::complex<double>;

BandWindow<Series> symbolic_q(const SpacePtr& sp, int M, int q) {
    BandWindow<Series> Q(M, q - 1, 1, Series(sp), 2);
    for (int i = 0; i < M; ++i) {
        if (i + 1 < M) Q.at(i, i + 1) = Series::constant(sp, 1);
        for (int j = std::max(0, i - q + 1); j <= i; ++j)
            Q.at(i, j) = Series::variable(sp, "w" + std::to_string(i) + "_" + std::to_string(j));
    }
    return Q;
}

std::vector<std::string> q_vars(int M, int q) {
    std::vector<std::string> v;
    for (int i = 0; i < M; ++i)
        for (int j = std::max(0, i - q + 1); j <= i; ++j) v.push_back("w" + std::to_string(i) + "_" + std::to_string(j));
    return v;
}

// sum over index paths of length k from i to j using the band steps
Series brute_power(const BandWindow<Series>& A, int k, int i, int j) {
    Series acc(A.zero().space());
    std::function<void(int, int, Series)> walk = [&](int at, int left, Series w) {
        if (left == 0) {
            if (at == j) acc += w;
            return;
        }
        for (int c = std::max(0, at - A.lower()); c <= std::min(A.size() - 1, at + A.upper()); ++c)
            if (!A(at, c).is_zero()) walk(c, left - 1, w * A(at, c));
    };
    walk(i, k, Series::constant(A.zero().space(), 1));
    return acc;
}

}  // namespace

TEST_CASE("power_entry against path enumeration") {
    int M = 14, q = 3;
    auto sp = SeriesSpace::make(q_vars(M, q), 3);
    auto Q = symbolic_q(sp, M, q);
    auto one = Series::constant(sp, 1);
    CHECK(power_entry(Q, 0, 3, 3, one) == one);
    CHECK(power_entry(Q, 0, 3, 4, one).is_zero());
    CHECK(power_entry(Q, 1, 4, 5, one) == one);
    CHECK(power_entry(Q, 3, 5, 4, one) == brute_power(Q, 3, 5, 4));
    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) CHECK(power_entry(Q, k, i, j, one) == brute_power(Q, k, i, j));
    CHECK_THROWS_AS(power_entry(Q, 3, 10, 9, one), GuardViolation);
}

TEST_CASE("serial and parallel kernels agree") {
    int M = 12, q = 3;
    auto sp = SeriesSpace::make(q_vars(M, q), 3);
    auto Q = symbolic_q(sp, M, q);
    CHECK(multiply_serial(Q, Q) == multiply_parallel(Q, Q));
    auto pw_s = powers(Q, 4, Series::constant(sp, 1), Exec::serial);
    auto pw_p = powers(Q, 4, Series::constant(sp, 1), Exec::parallel);
    for (int k = 0; k <= 4; ++k) CHECK(pw_s[k] == pw_p[k]);
}

TEST_CASE("apply_potential") {
    auto sp = SeriesSpace::make({"gt1", "gt2", "gt4"}, 3);
    int M = 10;
    BandWindow<Series> Q(M, 1, 1, Series(sp), 3);
    for (int i = 0; i + 1 < M; ++i) Q.at(i, i + 1) = Series::constant(sp, 1);
    auto one = Series::constant(sp, 1);
    std::vector<Series> none(5, Series(sp));
    auto Z = apply_potential(Q, none, one, Part::upper);
    for (int i = 0; i < M; ++i)
        for (int j = i; j < M; ++j) CHECK(Z(i, j).is_zero());
    std::vector<Series> w1(2, Series(sp));
    w1[1] = Series::variable(sp, "gt1");
    auto I = apply_potential(Q, w1, one, Part::upper);
    CHECK(I(4, 4) == w1[1]);
    CHECK(I(4, 5).is_zero());
    std::vector<Series> quad(5, Series(sp));
    quad[2] = Series::variable(sp, "gt2");
    quad[4] = Series::variable(sp, "gt4");
    auto B = apply_potential(Q, quad, one, Part::upper);
    for (int i = 0; i + 3 < M; ++i) CHECK(B(i, i + 3) == quad[4]);
    CHECK(B(2, 3) == quad[2]);
}

TEST_CASE("commutator of shift operators") {
    int M = 10;
    BandWindow<C> P(M, 1, 0, C(0), 2), Q(M, 0, 1, C(0), 2);
    for (int i = 1; i < M; ++i) P.at(i, i - 1) = 1;
    for (int i = 0; i + 1 < M; ++i) Q.at(i, i + 1) = 1;
    auto c = commutator(P, Q);
    for (int i = 0; i < c.trusted(); ++i)
        for (int j = 0; j < c.trusted(); ++j) CHECK(c(i, j) == C(i == 0 && j == 0 ? -1.0 : 0.0));
    auto d = commutator_diag(P, Q);
    CHECK(d.front() == C(-1));
}

TEST_CASE("commutator of a non-solution has off-diagonal entries") {
    int M = 10;
    BandWindow<C> P(M, 1, 2, C(0), 3), Q(M, 2, 1, C(0), 3);
    for (int i = 0; i < M; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(M - 1, i + 2); ++j) {
            if (P.in_band(i, j)) P.at(i, j) = C(0.1 * (i + 1) + 0.03 * j, 0.01 * i);
            if (Q.in_band(i, j)) Q.at(i, j) = C(0.2 * j - 0.05 * i, 0.02);
        }
    auto c = commutator(P, Q);
    double off = 0;
    for (int i = 0; i < c.trusted(); ++i)
        for (int j = 0; j < c.trusted(); ++j)
            if (i != j) off = std::max(off, std::abs(c(i, j)));
    CHECK(off > 1e-3);
}
