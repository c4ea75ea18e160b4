// mobilium: series solver, spectral-curve checks and oracle cross-checks.
// Exit codes: 0 pass, 1 check failure or genericity violation, 2 invalid
// configuration, 3 inconclusive oracle window.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobilium/baker_akhiezer.hpp"
#include "mobilium/determinants.hpp"
#include "mobilium/mobile_solver.hpp"
#include "mobilium/oracle.hpp"
#include "mobilium/spectral_curve.hpp"

using namespace mobilium;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kInvalid = 2, kInconclusive = 3 };

struct Tolerances {
    double pair = 1e-10;
    double residue = 1e-8;
    double ey = 1e-8;
    double curve = 1e-10;
    double hbar = 1e-8;
    double ortho = 1e-10;
    double q_band = 1e-8;
    double p_band = 1e-10;
    double t_band = 1e-8;
    double constellation = 1e-8;
    double b_form = 1e-10;
    double general_r = 1e-8;
};

struct RunConfig {
    std::string command;
    int p = 4, q = 2;
    std::optional<std::string> couplings;
    int order = 8;
    int n_max = 8;
    std::string mode = "plain";
    std::string out = "json";
    std::string output;
    Tolerances tol;
    // verify
    int oracle_degree = 3;
    std::string fixture;
    // constellation
    int ell = 1;
    std::string ghat = "1/25";
};

const char* const kDefaultQuadrangulation = "g2=1/10,gt2=1/10,gt4=1/20";

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Inconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class Real>
json cx(Cx<Real> z) {
    return json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())});
}

CouplingSpec build_spec(const RunConfig& cfg, bool numeric) {
    ScalingMode mode;
    if (cfg.mode == "plain") mode = ScalingMode::plain;
    else if (cfg.mode == "sqrt_g") mode = ScalingMode::sqrt_g;
    else throw InvalidConfig("--mode must be plain or sqrt_g");
    if (cfg.p < 2 || cfg.q < 2) throw InvalidConfig("p and q must be >= 2");
    CouplingSpec spec;
    if (!cfg.couplings) {
        if (numeric) {
            if (cfg.p != 4 || cfg.q != 2 || mode != ScalingMode::plain)
                throw InvalidConfig("numeric commands need --couplings");
            spec = CouplingSpec::make(4, 2);
            apply_couplings(spec, kDefaultQuadrangulation);
        } else {
            spec = CouplingSpec::all_symbolic(cfg.p, cfg.q, mode);
        }
    } else {
        spec = CouplingSpec::make(cfg.p, cfg.q, mode);
        apply_couplings(spec, *cfg.couplings);
    }
    spec.validate();
    if (numeric && !spec.fully_numeric()) throw InvalidConfig("numeric commands require fully numeric couplings");
    if (numeric && mode == ScalingMode::sqrt_g && spec.g <= 0) throw InvalidConfig("sqrt_g mode needs g=<value> > 0");
    return spec;
}

struct Result {
    json body = json::object();
    json checks = json::array();
    std::string csv;
    bool pass = true;

    void add(const CheckReport& r) {
        checks.push_back(r.to_json());
        pass = pass && r.pass();
    }
};

void emit(const RunConfig& cfg, Result& res) {
    std::string text;
    if (cfg.out == "csv") {
        text = res.csv;
    } else {
        json j = res.body;
        j["schema"] = 1;
        j["command"] = cfg.command;
        j["checks"] = res.checks;
        j["status"] = res.pass ? "pass" : "fail";
        text = j.dump(2) + "\n";
    }
    if (cfg.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cfg.output);
        if (!f) throw InvalidConfig("cannot write " + cfg.output);
        f << text;
    }
}

// ---- solve ----

Result cmd_series(const RunConfig& cfg) {
    auto spec = build_spec(cfg, false);
    if (cfg.order < 0) throw InvalidConfig("--order must be non-negative");
    if (cfg.n_max < 1) throw InvalidConfig("--nmax must be positive");
    Result res;
    auto sol = solve(spec, cfg.order, cfg.n_max);
    auto lim = limits(sol);
    res.add(check_commutator(sol));
    res.add(check_dual_R(sol));
    res.add(check_HK(sol));
    res.add(check_triangular(sol));
    res.add(check_sum_rule(sol, lim));
    if (spec.mode == ScalingMode::sqrt_g) res.add(check_parity(sol));
    else res.add(check_positivity(sol));
    auto curve = solve_limit_system(spec, cfg.order);
    res.add(compare_with_limits(curve, lim));
    res.body["solution"] = solution_to_json(sol, lim);
    std::ostringstream csv;
    csv << "i,R_i\n";
    for (int i = 1; i <= cfg.n_max; ++i) csv << i << ",\"" << sol.R_at(i).str() << "\"\n";
    csv << "inf,\"" << lim.R.str() << "\"\n";
    res.csv = csv.str();
    return res;
}

// ---- curve ----

struct RRow {
    int n;
    double det, series, gap;
};

template <class Real>
std::vector<RRow> r_table(const CouplingSpec& spec, const DoublePointSet<Real>& d, Cx<Real> R, int order, int n_max) {
    auto sol = solve(spec, order, n_max);
    std::vector<RRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        Cx<Real> det = R_n_det(d, R, n), ser = eval_at_couplings<Real>(sol.R_at(n), spec);
        rows.push_back({n, static_cast<double>(det.real()), static_cast<double>(ser.real()),
                        static_cast<double>(rabs<Real>(std::abs(det - ser)))});
    }
    return rows;
}

std::string rows_csv(const std::vector<RRow>& rows) {
    std::vector<std::array<double, 3>> plain;
    for (auto& r : rows) plain.push_back({static_cast<double>(r.n), r.det, r.series});
    return R_table_csv(plain);
}

template <class Real>
std::vector<CheckReport> ba_suite(const CurveData<Real>& c, const DoublePointSet<Real>& d, const RunConfig& cfg) {
    auto ba = build_psi_phi(d, operator_window(c.p, c.q, cfg.n_max) - 1);
    auto ops = reconstruct_operators(ba, c, d, cfg.n_max);
    return {check_orthonormality(ba, d, cfg.n_max, cfg.tol.ortho), check_Q_band(ops, c.q, cfg.tol.q_band),
            check_P_band(ops, c.p, d, c.R, cfg.tol.p_band), check_T_bands(ops, c, cfg.tol.t_band)};
}

template <class Real>
Result curve_at(const CouplingSpec& spec, const RunConfig& cfg, const char* precision) {
    Result res;
    auto c = refine_numeric<Real>(spec);
    res.body["precision"] = precision;
    res.body["R"] = cx(c.R);
    if (c.N() <= 0) {
        res.body["trivial"] = true;
        res.body["N"] = 0;
        res.csv = rows_csv({});
        return res;
    }
    curve_polynomial(c);
    res.add(check_curve_residual(c, 20, cfg.tol.curve));
    res.add(check_curve_boundary(c, cfg.tol.curve));
    auto d = double_points(c);
    res.add(check_pairs(c, d, cfg.tol.pair));
    res.add(check_residue_identity(d, cfg.tol.residue));
    res.add(check_Ey_factorization(c, d, cfg.tol.ey));
    res.add(check_hbar_identity(d, 10, cfg.tol.hbar));
    res.body["curve"] = curve_to_json(c, &d);

    // Off-diagonal scalar products lose about |wbar/w|^n digits; a failure below
    // quad precision is redone in quad before it counts.
    auto ba = ba_suite(c, d, cfg);
    std::string ba_precision = precision;
    bool ba_ok = std::all_of(ba.begin(), ba.end(), [](const CheckReport& r) { return r.pass(); });
    if (!ba_ok && !std::is_same_v<Real, Quad>) {
        auto cq = refine_numeric<Quad>(spec);
        curve_polynomial(cq);
        ba = ba_suite(cq, double_points(cq), cfg);
        ba_precision = "quad";
    }
    for (auto& r : ba) res.add(r);
    res.body["ba_precision"] = ba_precision;

    auto rows = r_table(spec, d, c.R, cfg.order, cfg.n_max);
    json table = json::array();
    for (auto& r : rows)
        table.push_back({{"n", r.n}, {"R_n_det", r.det}, {"R_n_series_eval", r.series}, {"abs_diff", r.gap}});
    res.body["R_table"] = table;
    res.body["order"] = cfg.order;
    res.csv = rows_csv(rows);
    return res;
}

Result cmd_curve(const RunConfig& cfg) {
    auto spec = build_spec(cfg, true);
    switch (precision_from_env()) {
        case Precision::extended: return curve_at<long double>(spec, cfg, "extended");
        case Precision::quad: return curve_at<Quad>(spec, cfg, "quad");
        default: return curve_at<double>(spec, cfg, "double");
    }
}

// ---- verify ----

Result cmd_verify(const RunConfig& cfg) {
    auto spec = build_spec(cfg, true);
    if (spec.mode != ScalingMode::plain) throw InvalidConfig("verify uses plain couplings");
    if (cfg.oracle_degree < 0) throw InvalidConfig("--oracle-degree must be non-negative");
    if (cfg.oracle_degree > kOracleMaxWeighted)
        throw Inconclusive("oracle requests above " + std::to_string(kOracleMaxWeighted) +
                           " weighted vertices are out of the desk-scale window");
    Result res;

    std::vector<OracleCounts> counts;
    if (!cfg.fixture.empty()) {
        std::ifstream f(cfg.fixture);
        if (!f) throw InvalidConfig("cannot read fixture " + cfg.fixture);
        std::stringstream ss;
        ss << f.rdbuf();
        try {
            counts = counts_from_csv(ss.str());
        } catch (const OracleError& e) {
            CheckReport bad("fixture");
            bad.fail(-1, -1, e.what());
            res.add(bad);
            return res;
        }
    } else {
        const OracleRoot roots[] = {{RootKind::corner_at_label, 1, 0},
                                    {RootKind::corner_at_label, 2, 0},
                                    {RootKind::white_half, 2, 1},
                                    {RootKind::black_half, 1, 2}};
        for (auto& root : roots) {
            OracleRequest req;
            req.p = spec.p;
            req.q = spec.q;
            req.max_weighted = cfg.oracle_degree;
            req.root = root;
            counts.push_back(enumerate(req));
        }
    }
    auto sym = solve(CouplingSpec::all_symbolic(spec.p, spec.q), cfg.oracle_degree, 10);
    json oracle = json::array();
    for (auto& oc : counts) {
        if (oc.inconclusive) throw Inconclusive("oracle window inconclusive for " + oc.root.name());
        res.add(cross_check(sym, oc, std::min(cfg.oracle_degree, oc.max_weighted)));
        oracle.push_back({{"root", oc.root.name()}, {"monomials", oc.counts.size()}, {"shapes", oc.shapes}});
    }
    res.body["oracle"] = oracle;

    // series R_n at orders D-2 and D against the determinant formula: the gap must shrink
    auto c = refine_numeric<double>(spec);
    CheckReport conv("series_vs_determinant");
    if (c.N() > 0) {
        curve_polynomial(c);
        auto d = double_points(c);
        int hi = std::max(cfg.order, 2), lo = hi - 2;
        auto coarse = r_table(spec, d, c.R, lo, cfg.n_max);
        auto fine = r_table(spec, d, c.R, hi, cfg.n_max);
        json gaps = json::array();
        for (int n = 0; n < cfg.n_max; ++n) {
            ++conv.checked;
            gaps.push_back({{"n", n + 1}, {"coarse", coarse[n].gap}, {"fine", fine[n].gap}});
            if (!(fine[n].gap < coarse[n].gap))
                conv.fail(n + 1, -1, "gap did not shrink from order " + std::to_string(lo) + " to " + std::to_string(hi));
        }
        res.body["series_vs_determinant"] = gaps;
    }
    res.add(conv);
    return res;
}

// ---- constellation ----

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(parse_rational(item));
        } catch (const SeriesError& e) {
            throw InvalidConfig(e.what());
        }
    }
    return out;
}

Result cmd_constellation(const RunConfig& cfg) {
    auto ghat = parse_list(cfg.ghat);
    if (static_cast<int>(ghat.size()) != cfg.ell) throw InvalidConfig("--ghat needs exactly ell values");
    auto cd = constellation_factor<double>(constellation_spec(cfg.p, cfg.ell, ghat));
    Result res;
    res.add(check_constellation(cd, cfg.n_max, cfg.tol.constellation));
    res.add(check_constellation_char(cd, cfg.tol.constellation));
    res.body["R"] = cx(cd.R);
    res.body["N0"] = cd.N0;
    res.body["orbit_error"] = static_cast<double>(cd.orbit_error);
    json reps = json::array();
    for (std::size_t a = 0; a < cd.w.size(); ++a)
        reps.push_back({{"w", cx(cd.w[a])}, {"wbar", cx(cd.wbar[a])}, {"X", cx(cd.X[a])}});
    res.body["representatives"] = reps;
    std::ostringstream csv;
    csv << "i,R_u_w,R_v_x\n";
    csv.precision(17);
    for (int i = 1; i <= cfg.n_max; ++i)
        csv << i << "," << cd.R_i(ConstellationData<double>::Route::u_w, i).real() << ","
            << cd.R_i(ConstellationData<double>::Route::v_x, i).real() << "\n";
    res.csv = csv.str();
    return res;
}

// ---- general-map ----

Result cmd_general_map(const RunConfig& cfg) {
    if (!cfg.couplings) throw InvalidConfig("general-map needs --couplings g3=...,g4=...");
    std::vector<std::pair<int, Rational>> g;
    {
        CouplingSpec probe = CouplingSpec::make(2, cfg.q);
        apply_couplings(probe, *cfg.couplings);
        for (int k = 1; k <= cfg.q; ++k) {
            const auto& w = probe.g_at(k);
            if (w.kind == Weight::Kind::symbolic) throw InvalidConfig("general-map needs numeric couplings");
            if (w.kind == Weight::Kind::numeric) g.emplace_back(k, w.value);
        }
        for (int k = 1; k <= 2; ++k)
            if (probe.gt_at(k).kind != Weight::Kind::zero) throw InvalidConfig("general-map fixes gt_2 = 1");
    }
    auto spec = general_map_spec(cfg.q, g);
    auto gm = general_map_char<double>(spec);
    Result res;
    CheckReport forms("general_map_B_forms");
    ++forms.checked;
    forms.expect_small(gm.B_form_gap, cfg.tol.b_form, -1, -1, "B_n closed form vs continued-fraction form");
    res.add(forms);
    CheckReport roots("general_map_root_count");
    ++roots.checked;
    if (static_cast<int>(gm.x.size()) != cfg.q - 2)
        roots.fail(-1, -1, std::to_string(gm.x.size()) + " roots inside the unit disk, expected " + std::to_string(cfg.q - 2));
    res.add(roots);

    CheckReport ri("general_map_R_i");
    auto c = refine_numeric<double>(spec);
    curve_polynomial(c);
    auto d = double_points(c);
    json table = json::array();
    std::ostringstream csv;
    csv << "i,R_i_general,R_n_det,abs_diff\n";
    csv.precision(17);
    for (int i = 1; i <= cfg.n_max; ++i) {
        auto a = gm.R_i(i), b = R_n_det(d, c.R, i);
        ++ri.checked;
        ri.expect_small(rel_diff(a, b), cfg.tol.general_r, i, -1, "R_i general-map form vs determinant");
        table.push_back({{"i", i}, {"R_i_general", a.real()}, {"R_n_det", b.real()}});
        csv << i << "," << a.real() << "," << b.real() << "," << std::abs(a - b) << "\n";
    }
    res.add(ri);
    res.body["R"] = cx(gm.R);
    res.body["S"] = cx(gm.S);
    json xs = json::array();
    for (auto x : gm.x) xs.push_back(cx(x));
    res.body["x"] = xs;
    res.body["R_table"] = table;
    res.csv = csv.str();
    return res;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool pq = true) {
    if (pq) {
        sub->add_option("--p", cfg.p, "black face degree bound");
        sub->add_option("--q", cfg.q, "white face degree bound");
        sub->add_option("--couplings", cfg.couplings, "k=v list, e.g. g2=1/10,gt4=sym; 'none' for all zero");
        sub->add_option("--mode", cfg.mode, "plain or sqrt_g")->check(CLI::IsMember({"plain", "sqrt_g"}));
    }
    sub->add_option("--order", cfg.order, "series truncation order D");
    sub->add_option("--nmax", cfg.n_max, "largest index reported");
    sub->add_option("--out", cfg.out, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--output", cfg.output, "write to a file instead of stdout");
    auto& t = cfg.tol;
    sub->add_option("--tol-pair", t.pair);
    sub->add_option("--tol-residue", t.residue);
    sub->add_option("--tol-ey", t.ey);
    sub->add_option("--tol-curve", t.curve);
    sub->add_option("--tol-hbar", t.hbar);
    sub->add_option("--tol-ortho", t.ortho);
    sub->add_option("--tol-q-band", t.q_band);
    sub->add_option("--tol-p-band", t.p_band);
    sub->add_option("--tol-t-band", t.t_band);
    sub->add_option("--tol-constellation", t.constellation);
    sub->add_option("--tol-b-form", t.b_form);
    sub->add_option("--tol-general-r", t.general_r);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobile generating functions: series, spectral curve and cross-checks"};
    app.require_subcommand(1);
    RunConfig cfg;
    cfg.order = -1;

    auto* s = app.add_subcommand("solve", "exact series solution and structural checks");
    add_common(s, cfg);
    auto* c = app.add_subcommand("curve", "numeric curve, double points, determinants and operator checks");
    add_common(c, cfg);
    auto* v = app.add_subcommand("verify", "oracle cross-check and series-vs-determinant convergence");
    add_common(v, cfg);
    v->add_option("--oracle-degree", cfg.oracle_degree, "largest monomial degree compared with the oracle");
    v->add_option("--fixture", cfg.fixture, "oracle counts CSV used instead of enumeration");
    auto* k = app.add_subcommand("constellation", "p-constellation factorization checks");
    add_common(k, cfg, false);
    k->add_option("--p", cfg.p, "constellation degree p");
    k->add_option("--ell", cfg.ell, "number of white weights");
    k->add_option("--ghat", cfg.ghat, "comma-separated ghat_1..ghat_ell");
    auto* gmap = app.add_subcommand("general-map", "general-map specialization checks");
    add_common(gmap, cfg, false);
    gmap->add_option("--q", cfg.q, "largest face degree");
    gmap->add_option("--couplings", cfg.couplings, "g3=...,g4=...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kPass : kInvalid;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.order < 0) cfg.order = cfg.command == "solve" ? 4 : 8;

    try {
        Result res;
        if (cfg.command == "solve") res = cmd_series(cfg);
        else if (cfg.command == "curve") res = cmd_curve(cfg);
        else if (cfg.command == "verify") res = cmd_verify(cfg);
        else if (cfg.command == "constellation") res = cmd_constellation(cfg);
        else res = cmd_general_map(cfg);
        emit(cfg, res);
        return res.pass ? kPass : kFail;
    } catch (const Inconclusive& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    } catch (const OracleError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    } catch (const GenericityError& e) {
        std::cerr << "genericity: " << e.what() << "\n";
        return kFail;
    } catch (const DegenerateCurve& e) {
        std::cerr << "genericity: " << e.what() << "\n";
        return kFail;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
}
