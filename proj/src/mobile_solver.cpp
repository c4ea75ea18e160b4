#include "mobilium/mobile_solver.hpp"

#include <random>

namespace mobilium {

int window_size(int p, int q, int order, int n_max) {
    return n_max + (order + 2) * std::max(p - 1, q - 1) + std::max(p, q);
}

int guard_width(int p, int q, int order) { return (order + 2) * std::max(p - 1, q - 1); }

const Series& MobileSolution::R_at(int i) const {
    if (i < 1) throw std::out_of_range("R_i is defined for i >= 1");
    if (i >= P.trusted()) throw GuardViolation("R_" + std::to_string(i) + " lies in the guard band");
    return R[i];
}

const Series& MobileSolution::B(int i, int j) const {
    if (j < i) throw std::out_of_range("B_ij needs j >= i");
    return P.trusted_at(i, j);
}

const Series& MobileSolution::W(int i, int j) const {
    if (j > i) throw std::out_of_range("W_ij needs j <= i");
    return Q.trusted_at(i, j);
}

namespace {

Series junk(const SpacePtr& sp, std::mt19937& rng) {
    Series s(sp);
    if (sp->size() <= 1) return s;
    std::uniform_int_distribution<std::size_t> pick(1, sp->size() - 1);
    std::uniform_int_distribution<int> val(-3, 3);
    for (int r = 0; r < 3; ++r) s += Series::monomial(sp, sp->monomial(pick(rng)), val(rng));
    return s;
}

}  // namespace

MobileSolution solve(const CouplingSpec& spec, int order, int n_max, const SolveOptions& opts) {
    spec.validate();
    if ((spec.p - 1) * (spec.q - 1) <= 1) throw std::invalid_argument("need (p-1)(q-1) > 1");
    if (order < 0) throw std::invalid_argument("order must be >= 0");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    const int p = spec.p, q = spec.q;
    MobileSolution sol;
    sol.spec = spec;
    sol.order = order;
    sol.n_max = n_max;
    sol.space = spec.space(order);
    sol.g = spec.white_series(sol.space);
    sol.gt = spec.black_series(sol.space);
    const int M = window_size(p, q, order, n_max) + opts.extra_window;
    const int guard = guard_width(p, q, order);
    Series zero(sol.space), one = Series::constant(sol.space, 1);

    BandWindow<Series> P(M, 1, p - 1, zero, guard), Q(M, q - 1, 1, zero, guard);
    std::vector<Series> R(M, one);
    std::mt19937 rng(opts.junk_seed);
    for (int i = 0; i < M; ++i) {
        if (i + 1 < M) Q.at(i, i + 1) = one;
        if (opts.perturbed_seed) {
            if (i >= 1) R[i] += junk(sol.space, rng);
            for (int j = i; j <= std::min(M - 1, i + p - 1); ++j) P.at(i, j) = junk(sol.space, rng);
            for (int j = std::max(0, i - q + 1); j <= i; ++j) Q.at(i, j) = junk(sol.space, rng);
        }
        if (i >= 1) P.at(i, i - 1) = R[i];
    }

    const int max_sweeps = order + 3;
    bool converged = false;
    int sweep = 0;
    while (sweep < max_sweeps) {
        ++sweep;
        bool same = true;
        auto qp = powers(Q, p - 1, one, opts.exec);
        BandWindow<Series> B = apply_potential(qp, sol.gt, Part::upper);
        for (int i = 0; i < M; ++i)
            for (int j = i; j <= std::min(M - 1, i + p - 1); ++j) {
                if (!(P(i, j) == B(i, j))) same = false;
                P.at(i, j) = B(i, j);
            }
        auto pp = powers(P, q - 1, one, opts.exec);
        BandWindow<Series> W = apply_potential(pp, sol.g, Part::lower);
        for (int i = 0; i < M; ++i)
            for (int j = std::max(0, i - q + 1); j <= i; ++j) {
                if (!(Q(i, j) == W(i, j))) same = false;
                Q.at(i, j) = W(i, j);
            }
        std::vector<Series> Rn(M, one);
#pragma omp parallel for schedule(dynamic, 1) if (opts.exec == Exec::parallel)
        for (int i = 1; i < M; ++i) {
            Series L(sol.space);
            for (int k = 1; k <= q; ++k)
                if (!sol.g[k].is_zero()) accumulate_product(L, sol.g[k], pp[k - 1](i - 1, i));
            Rn[i] = (one - L).inverse();
        }
        for (int i = 1; i < M; ++i) {
            if (!(Rn[i] == R[i])) same = false;
            R[i] = Rn[i];
            P.at(i, i - 1) = R[i];
        }
        if (same) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw SolverError("fixed point not reached within " + std::to_string(max_sweeps) + " sweeps");
    sol.sweeps = sweep;
    sol.P = std::move(P);
    sol.Q = std::move(Q);
    sol.R = std::move(R);
    return sol;
}

Limits limits(const MobileSolution& sol) {
    const int p = sol.spec.p, q = sol.spec.q, n = sol.n_max;
    if (n - 1 < q - 1) throw SolverError("n_max too small to read the limits");
    Limits lim;
    auto stable = [&](const Series& a, const Series& b, const std::string& what) {
        if (!(a == b))
            throw SolverError(what + " has not stabilized between i = " + std::to_string(n - 1) + " and i = " +
                              std::to_string(n) + "; increase n_max");
    };
    for (int k = 0; k < q; ++k) {
        stable(sol.W(n - 1, n - 1 - k), sol.W(n, n - k), "alpha_" + std::to_string(k));
        lim.alpha.push_back(sol.W(n, n - k));
    }
    for (int k = 0; k < p; ++k) {
        stable(sol.B(n - 1, n - 1 + k), sol.B(n, n + k), "beta_" + std::to_string(k));
        lim.beta.push_back(sol.B(n, n + k));
    }
    stable(sol.R_at(n - 1), sol.R_at(n), "R");
    lim.R = sol.R_at(n);
    return lim;
}

CheckReport check_commutator(const MobileSolution& sol) {
    CheckReport rep("commutator");
    BandWindow<Series> c = commutator(sol.P, sol.Q);
    Series minus_one = Series::constant(sol.space, -1);
    int rows = sol.interior();
    for (int i = 0; i < rows; ++i)
        for (int j = std::max(0, i - c.lower()); j <= std::min(rows - 1, i + c.upper()); ++j) {
            ++rep.checked;
            const Series& v = c(i, j);
            bool ok = (i == 0 && j == 0) ? v == minus_one : v.is_zero();
            if (!ok) rep.fail(i, j, "[P,Q] entry = " + v.str());
        }
    return rep;
}

CheckReport check_dual_R(const MobileSolution& sol) {
    CheckReport rep("dual_R");
    auto qp = powers(sol.Q, sol.spec.p - 1, sol.one());
    for (int i = 1; i < sol.interior(); ++i) {
        Series rhs = sol.one();
        for (int k = 1; k <= sol.spec.p; ++k)
            if (!sol.gt[k].is_zero()) accumulate_product(rhs, sol.gt[k], qp[k - 1](i, i - 1));
        ++rep.checked;
        if (!(rhs == sol.R[i])) rep.fail(i, i - 1, "R_i - (1 + sum gt_k (Q^{k-1})_{i,i-1}) = " + (sol.R[i] - rhs).str());
    }
    return rep;
}

CheckReport check_HK(const MobileSolution& sol) {
    CheckReport rep("H_equals_K");
    auto qp = multiply(sol.Q, sol.P);
    auto pq = multiply(sol.P, sol.Q);
    Series one = sol.one();
    for (int i = 0; i < sol.interior(); ++i) {
        Series H(sol.space), K(sol.space);
        if (i == 0) {
            H = qp(0, 0) - one;
            K = pq(0, 0);
        } else {
            H = qp(i, i) - qp(i - 1, i - 1);
            K = pq(i, i) - pq(i - 1, i - 1);
            if (i == 1) K -= one;
        }
        ++rep.checked;
        if (!(H == K)) rep.fail(i, i, "H_i - K_i = " + (H - K).str());
    }
    return rep;
}

namespace {

bool parity_ok(const Series& s, int var, int parity) {
    for (auto& [idx, c] : s.terms())
        if (((s.space()->exps(idx)[var] % 2) + 2) % 2 != parity) return false;
    return true;
}

}  // namespace

CheckReport check_parity(const MobileSolution& sol) {
    CheckReport rep("sqrt_g_parity");
    if (sol.spec.mode != ScalingMode::sqrt_g) {
        rep.fail(-1, -1, "solution is not in sqrt_g mode");
        return rep;
    }
    int v = sol.space->var_index(kSqrtGVar);
    for (int i = 1; i < sol.interior(); ++i) {
        ++rep.checked;
        if (!parity_ok(sol.R[i], v, 0)) rep.fail(i, i - 1, "R_i has an odd power of sqrt(g)");
    }
    for (int i = 0; i < sol.interior(); ++i) {
        for (int j = i; j <= i + sol.spec.p - 1; ++j) {
            ++rep.checked;
            int par = (((j - i - 1) % 2) + 2) % 2;
            if (!parity_ok(sol.P(i, j), v, par)) rep.fail(i, j, "B_ij parity class wrong: " + sol.P(i, j).str());
        }
        for (int j = std::max(0, i - sol.spec.q + 1); j <= i; ++j) {
            ++rep.checked;
            int par = (((j - i - 1) % 2) + 2) % 2;
            if (!parity_ok(sol.Q(i, j), v, par)) rep.fail(i, j, "W_ij parity class wrong: " + sol.Q(i, j).str());
        }
    }
    std::string lt2 = CouplingSpec::black_name(2, ScalingMode::sqrt_g);
    if (sol.spec.p >= 2 && sol.spec.gt_at(2).kind == Weight::Kind::symbolic && sol.order >= 1) {
        for (int i = 0; i < sol.interior(); ++i) {
            ++rep.checked;
            if (sol.P(i, i + 1).coeff(Monomial{{lt2, 1}}) != 1) rep.fail(i, i + 1, "B_{i,i+1} does not start with lambdat2");
        }
    }
    return rep;
}

CheckReport check_positivity(const MobileSolution& sol) {
    CheckReport rep("positivity");
    auto check = [&](const Series& s, int i, int j) {
        ++rep.checked;
        for (auto& [idx, c] : s.terms())
            if (c < 0 || c.get_den() != 1) {
                rep.fail(i, j, "coefficient " + c.get_str() + " of " + s.space()->monomial(idx).str());
                return;
            }
    };
    int M = sol.window();
    for (int i = 0; i < M; ++i) {
        if (i >= 1) check(sol.R[i], i, i - 1);
        for (int j = i; j <= std::min(M - 1, i + sol.spec.p - 1); ++j) check(sol.P(i, j), i, j);
        for (int j = std::max(0, i - sol.spec.q + 1); j <= i; ++j) check(sol.Q(i, j), i, j);
    }
    return rep;
}

CheckReport check_triangular(const MobileSolution& sol) {
    CheckReport rep("band_triangularity");
    Series one = sol.one();
    auto T = subtract(sol.Q, apply_potential(sol.P, sol.g, one, Part::full));
    auto Tt = subtract(sol.P, apply_potential(sol.Q, sol.gt, one, Part::full));
    int rows = sol.interior();
    for (int i = 0; i < rows; ++i) {
        for (int j = std::max(0, i - T.lower()); j <= i; ++j) {
            ++rep.checked;
            if (!T(i, j).is_zero()) rep.fail(i, j, "Q - V'(P) not strictly upper");
        }
        ++rep.checked;
        if (!(T(i, i + 1) * sol.R[i + 1] == one)) rep.fail(i, i + 1, "(Q - V'(P))_{i,i+1} != 1/R_{i+1}");
        for (int j = i; j <= i + Tt.upper(); ++j) {
            ++rep.checked;
            if (!Tt(i, j).is_zero()) rep.fail(i, j, "P - Vt'(Q) not strictly lower");
        }
        if (i >= 1) {
            ++rep.checked;
            if (!(Tt(i, i - 1) == one)) rep.fail(i, i - 1, "(P - Vt'(Q))_{i,i-1} != 1");
        }
    }
    return rep;
}

CheckReport check_sum_rule(const MobileSolution& sol, const Limits& lim) {
    CheckReport rep("sum_k_alpha_beta");
    Series s(sol.space);
    int top = std::min(sol.spec.p, sol.spec.q) - 1;
    for (int k = 1; k <= top; ++k) accumulate_product(s, lim.alpha[k], lim.beta[k] * Rational(k));
    ++rep.checked;
    Series rhs = lim.R - sol.one();
    if (!(s == rhs)) rep.fail(-1, -1, "sum k alpha_k beta_k - (R - 1) = " + (s - rhs).str());
    return rep;
}

nlohmann::json solution_to_json(const MobileSolution& sol, const std::optional<Limits>& lim) {
    nlohmann::json j;
    j["p"] = sol.spec.p;
    j["q"] = sol.spec.q;
    j["order"] = sol.order;
    j["n_max"] = sol.n_max;
    j["window"] = sol.window();
    j["sweeps"] = sol.sweeps;
    nlohmann::json R = nlohmann::json::object();
    for (int i = 1; i <= sol.n_max; ++i) R["R_" + std::to_string(i)] = sol.R[i].to_json();
    j["R"] = R;
    if (lim) {
        nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
        for (auto& s : lim->alpha) a.push_back(s.to_json());
        for (auto& s : lim->beta) b.push_back(s.to_json());
        j["limits"] = {{"alpha", a}, {"beta", b}, {"R", lim->R.to_json()}};
    }
    return j;
}

}  // namespace mobilium
