#pragma once

#include <map>
#include <string>
#include <vector>

#include "mobilium/band_window.hpp"
#include "mobilium/mobile_solver.hpp"
#include "mobilium/report.hpp"
#include "mobilium/series.hpp"

namespace mobilium {

enum class RootKind {
    corner_at_label,  // R_i: marked corner at a labeled vertex with label i
    white_half,       // W_{i,j}: flagged edge, white side kept
    black_half,       // B_{i,j}: flagged edge, black side kept
};

struct OracleRoot {
    RootKind kind = RootKind::corner_at_label;
    int i = 1;
    int j = 0;
    std::string name() const;
};

struct OracleRequest {
    int p = 2;
    int q = 2;
    int max_weighted = 3;
    int label_top = -1;  // largest admissible label; -1 picks a default
    OracleRoot root;
};

struct OracleCounts {
    OracleRoot root;
    int max_weighted = 0;
    std::map<Monomial, long long> counts;
    std::map<Monomial, long long> min_label_zero;
    bool inconclusive = false;
    long long shapes = 0;
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr int kOracleMaxWeighted = 4;

// Exhaustive generation of rooted mobiles with at most max_weighted black and
// white vertices. Plane-tree shapes are generated first, labels are then
// searched and every candidate is accepted only if the clockwise label rules
// hold around each black and white vertex.
OracleCounts enumerate(const OracleRequest& req, Exec exec = Exec::parallel);

// Solver coefficients of the rooted series versus the oracle counts for every
// monomial of degree <= max_degree.
CheckReport cross_check(const MobileSolution& sol, const OracleCounts& counts, int max_degree);

std::string counts_to_csv(const std::vector<OracleCounts>& all);
std::vector<OracleCounts> counts_from_csv(const std::string& text);

}  // namespace mobilium
