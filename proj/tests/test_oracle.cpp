#include <doctest.h>

#include "mobilium/oracle.hpp"

using namespace mobilium;

namespace {

const std::vector<OracleRoot> kRoots = {
    {RootKind::corner_at_label, 1, 0},
    {RootKind::corner_at_label, 2, 0},
    {RootKind::white_half, 2, 1},
    {RootKind::black_half, 1, 2},
};

OracleCounts run(int p, int q, const OracleRoot& root, int budget, Exec exec = Exec::parallel, int top = -1) {
    OracleRequest req;
    req.p = p;
    req.q = q;
    req.max_weighted = budget;
    req.root = root;
    req.label_top = top;
    return enumerate(req, exec);
}

}  // namespace

TEST_CASE("oracle agrees with the solver through degree 3") {
    for (auto [p, q] : {std::pair{4, 2}, std::pair{3, 3}}) {
        auto sol = solve(CouplingSpec::all_symbolic(p, q), 3, 10);
        for (auto& root : kRoots) {
            CAPTURE(p);
            CAPTURE(q);
            CAPTURE(root.name());
            auto oc = run(p, q, root, 3);
            CHECK_FALSE(oc.inconclusive);
            auto rep = cross_check(sol, oc, 3);
            for (auto& v : rep.violations) MESSAGE(v.detail);
            CHECK(rep.pass());
        }
    }
}

TEST_CASE("quadrangulation counts at small size") {
    auto oc = run(4, 2, {RootKind::corner_at_label, 5, 0}, 2);
    CHECK(oc.counts[Monomial::parse("g2*gt2")] == 1);
    CHECK(oc.counts[Monomial::parse("g2^2*gt2^2")] == 0);  // four weighted vertices, outside the budget
    CHECK(oc.counts.count(Monomial::parse("g2^2*gt4")) == 0);
}

TEST_CASE("label window does not change conclusive counts") {
    OracleRoot root{RootKind::corner_at_label, 2, 0};
    auto a = run(3, 3, root, 3);
    auto b = run(3, 3, root, 3, Exec::parallel, a.max_weighted * 3 + 20);
    CHECK_FALSE(a.inconclusive);
    CHECK(a.counts == b.counts);
}

TEST_CASE("too small a label window is reported") {
    auto oc = run(4, 2, {RootKind::corner_at_label, 1, 0}, 3, Exec::serial, 2);
    CHECK(oc.inconclusive);
}

TEST_CASE("counts with minimum label zero do not depend on the root label") {
    // shifting labels maps min-0 mobiles rooted at i onto min-0 mobiles rooted at i + 1
    auto a = run(3, 3, {RootKind::corner_at_label, 3, 0}, 3);
    auto b = run(3, 3, {RootKind::corner_at_label, 4, 0}, 3);
    CHECK(a.min_label_zero == b.min_label_zero);
    auto w = run(4, 2, {RootKind::white_half, 3, 2}, 3);
    auto w2 = run(4, 2, {RootKind::white_half, 4, 3}, 3);
    CHECK(w.min_label_zero == w2.min_label_zero);
}

TEST_CASE("serial and parallel enumeration agree") {
    OracleRoot root{RootKind::black_half, 1, 2};
    auto a = run(3, 3, root, 3, Exec::serial);
    auto b = run(3, 3, root, 3, Exec::parallel);
    CHECK(a.counts == b.counts);
    CHECK(a.shapes == b.shapes);
}

TEST_CASE("a corrupted coefficient is caught") {
    auto sol = solve(CouplingSpec::all_symbolic(4, 2), 3, 10);
    auto oc = run(4, 2, {RootKind::corner_at_label, 2, 0}, 3);
    REQUIRE(cross_check(sol, oc, 3).pass());
    auto key = Monomial::parse("g2*gt2");
    REQUIRE(oc.counts.count(key));
    oc.counts[key] += 1;
    auto rep = cross_check(sol, oc, 3);
    CHECK_FALSE(rep.pass());
    CHECK(rep.violations.size() == 1);
}

TEST_CASE("oracle budget is capped") {
    CHECK_THROWS_AS(run(4, 2, {}, kOracleMaxWeighted + 1), OracleError);
    CHECK_THROWS_AS(run(0, 2, {}, 2), OracleError);
}

TEST_CASE("fixture csv round trip") {
    std::vector<OracleCounts> all;
    for (auto& root : kRoots) all.push_back(run(3, 3, root, 2));
    auto back = counts_from_csv(counts_to_csv(all));
    REQUIRE(back.size() == all.size());
    for (std::size_t k = 0; k < all.size(); ++k) {
        CHECK(back[k].root.name() == all[k].root.name());
        CHECK(back[k].counts == all[k].counts);
    }
    CHECK_THROWS_AS(counts_from_csv("bad header\n"), OracleError);
}
