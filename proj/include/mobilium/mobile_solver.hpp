#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mobilium/band_window.hpp"
#include "mobilium/coupling.hpp"
#include "mobilium/report.hpp"
#include "mobilium/series.hpp"

namespace mobilium {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    Exec exec = Exec::parallel;
    // start from R_i = 1 + junk, B = W = junk instead of the plain seed
    bool perturbed_seed = false;
    unsigned junk_seed = 1;
    int extra_window = 0;
};

struct Limits {
    std::vector<Series> alpha;  // alpha_0 .. alpha_{q-1}
    std::vector<Series> beta;   // beta_0 .. beta_{p-1}
    Series R;
};

struct MobileSolution {
    CouplingSpec spec;
    int order = 0;
    int n_max = 0;
    SpacePtr space;
    BandWindow<Series> P, Q;
    std::vector<Series> R;  // R[i] = P(i, i-1); R[0] is a placeholder 1
    std::vector<Series> g, gt;
    int sweeps = 0;

    int window() const { return P.size(); }
    // rows 0..n_max are the interior on which identities are asserted
    int interior() const { return n_max + 1; }
    const Series& R_at(int i) const;
    const Series& B(int i, int j) const;
    const Series& W(int i, int j) const;
    Series one() const { return Series::constant(space, 1); }
};

int window_size(int p, int q, int order, int n_max);
int guard_width(int p, int q, int order);

MobileSolution solve(const CouplingSpec& spec, int order, int n_max, const SolveOptions& opts = {});
Limits limits(const MobileSolution& sol);

CheckReport check_commutator(const MobileSolution& sol);
CheckReport check_dual_R(const MobileSolution& sol);
CheckReport check_HK(const MobileSolution& sol);
CheckReport check_parity(const MobileSolution& sol);
CheckReport check_positivity(const MobileSolution& sol);
// (P - gt'(Q)) strictly lower with unit subdiagonal, (Q - g'(P)) strictly upper
// with superdiagonal 1/R_{i+1}
CheckReport check_triangular(const MobileSolution& sol);
CheckReport check_sum_rule(const MobileSolution& sol, const Limits& lim);

nlohmann::json solution_to_json(const MobileSolution& sol, const std::optional<Limits>& lim);

}  // namespace mobilium
