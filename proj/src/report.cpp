#include "mobilium/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mobilium {

void CheckReport::expect_small(double err, double tol, int i, int j, const std::string& what) {
    ++checked;
    if (!(err <= tol)) {
        std::ostringstream os;
        os.precision(3);
        os << what << ": error " << err << " > " << tol;
        fail(i, j, os.str());
    }
    if (std::isnan(err)) max_error = err;
    else if (!std::isnan(max_error)) max_error = std::max(max_error, err);
}

void CheckReport::merge(const CheckReport& o) {
    for (auto& v : o.violations) fail(v.i, v.j, o.check + ": " + v.detail);
    checked += o.checked;
    max_error = std::max(max_error, o.max_error);
}

nlohmann::json CheckReport::to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (auto& x : violations) v.push_back({{"i", x.i}, {"j", x.j}, {"detail", x.detail}});
    nlohmann::json j = {{"check", check}, {"status", pass() ? "pass" : "fail"}, {"violations", v}};
    if (max_error > 0) j["max_error"] = max_error;
    return j;
}

}  // namespace mobilium
