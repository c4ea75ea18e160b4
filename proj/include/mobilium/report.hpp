#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mobilium {

struct Violation {
    int i = -1;
    int j = -1;
    std::string detail;
};

struct CheckReport {
    std::string check;
    std::vector<Violation> violations;
    double max_error = 0;  // numeric checks only
    int checked = 0;

    explicit CheckReport(std::string name = {}) : check(std::move(name)) {}

    bool pass() const { return violations.empty(); }
    void fail(int i, int j, std::string detail) {
        if (violations.size() < 50) violations.push_back({i, j, std::move(detail)});
        else if (violations.size() == 50) violations.push_back({-1, -1, "further violations omitted"});
    }
    // records a numeric comparison; fails when err exceeds tol
    void expect_small(double err, double tol, int i, int j, const std::string& what);
    void merge(const CheckReport& o);

    nlohmann::json to_json() const;
};

}  // namespace mobilium
