#include "mobilium/oracle.hpp"
#include <algorithm>

#include <functional>
#include <memory>
#include <sstream>

namespace mobilium {

std::string OracleRoot::name() const {
    switch (kind) {
        case RootKind::corner_at_label: return "R_" + std::to_string(i);
        case RootKind::white_half: return "W_" + std::to_string(i) + "_" + std::to_string(j);
        case RootKind::black_half: return "B_" + std::to_string(i) + "_" + std::to_string(j);
    }
    return "?";
}

namespace {

enum class VType { labeled, white, black };

struct Node {
    VType type;
    int parent = -1;
    std::vector<int> kids;
};

struct Tree {
    std::vector<Node> nodes;
    int weighted = 0;
};

using TreePtr = std::shared_ptr<const Tree>;

// appends `sub` below node `at` of `dst`
void graft(Tree& dst, int at, const Tree& sub) {
    int off = static_cast<int>(dst.nodes.size());
    for (const Node& n : sub.nodes) {
        Node c = n;
        c.parent = n.parent < 0 ? at : n.parent + off;
        for (int& k : c.kids) k += off;
        dst.nodes.push_back(c);
    }
    dst.nodes[at].kids.push_back(off);
    dst.weighted += sub.weighted;
}

class ShapeGenerator {
public:
    ShapeGenerator(int p, int q) : p_(p), q_(q) {}

    // subtrees whose root has the given type, using exactly `budget` weighted vertices
    const std::vector<TreePtr>& trees(VType t, int budget) {
        auto key = std::make_pair(static_cast<int>(t), budget);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::vector<TreePtr> out;
        if (t == VType::labeled) {
            for (auto& seq : sequences({VType::white}, budget, budget)) out.push_back(make_root(VType::labeled, seq));
        } else if (t == VType::white && budget >= 1) {
            for (auto& seq : sequences({VType::labeled, VType::black}, q_ - 1, budget - 1))
                out.push_back(make_root(VType::white, seq));
        } else if (t == VType::black && budget >= 1) {
            for (auto& seq : sequences({VType::white}, p_ - 1, budget - 1)) out.push_back(make_root(VType::black, seq));
        }
        return memo_[key] = std::move(out);
    }

    // ordered child lists of length <= max_len using exactly `budget`
    std::vector<std::vector<TreePtr>> sequences(const std::vector<VType>& types, int max_len, int budget) {
        std::vector<std::vector<TreePtr>> out;
        std::vector<TreePtr> cur;
        std::function<void(int, int)> rec = [&](int len_left, int left) {
            if (left == 0) out.push_back(cur);
            if (len_left == 0) return;
            for (VType t : types)
                for (int b = (t == VType::labeled ? 0 : 1); b <= left; ++b) {
                    // copy: trees() may rehash the memo while we iterate
                    std::vector<TreePtr> subs = trees(t, b);
                    for (auto& s : subs) {
                        cur.push_back(s);
                        rec(len_left - 1, left - b);
                        cur.pop_back();
                    }
                }
        };
        rec(max_len, budget);
        return out;
    }

    TreePtr make_root(VType t, const std::vector<TreePtr>& kids) {
        auto tr = std::make_shared<Tree>();
        tr->nodes.push_back(Node{t, -1, {}});
        tr->weighted = t == VType::labeled ? 0 : 1;
        for (auto& k : kids) graft(*tr, 0, *k);
        return tr;
    }

private:
    int p_, q_;
    std::map<std::pair<int, int>, std::vector<TreePtr>> memo_;
};

// One item in the clockwise sequence around a black or white vertex: the two
// labels met when crossing it (equal for a labeled neighbour).
struct Item {
    int first;
    int second;
    bool labeled;
};

struct Rule {
    enum Kind { equal_offset, at_least } kind;
    int a, b, offset;  // a == b + offset, or a >= b
};

struct BlackDegree {
    std::vector<std::pair<int, int>> gaps;  // (next.first, cur.second) per consecutive pair
    int flags;
};

class Labeler {
public:
    Labeler(const Tree& t, const OracleRequest& req) : tree_(t), req_(req) { build(); }

    // calls visit(labels) for each accepted assignment
    template <class F>
    void run(F&& visit) {
        values_.assign(nvars_, -1);
        search(0, visit);
    }

    const std::vector<std::vector<Item>>& around() const { return around_; }
    int nvars() const { return nvars_; }

    // Recheck Definition 2.1 from scratch on a complete labeling.
    bool valid(const std::vector<int>& v) const {
        for (std::size_t n = 0; n < tree_.nodes.size(); ++n) {
            VType t = tree_.nodes[n].type;
            if (t == VType::labeled) {
                if (v[label_var_[n]] < 1) return false;
                continue;
            }
            const auto& seq = around_[n];
            int k = static_cast<int>(seq.size());
            int buds = 0, flags = 0;
            bool has_flag = false;
            for (int s = 0; s < k; ++s) {
                const Item& cur = seq[s];
                const Item& nxt = seq[(s + 1) % k];
                if (!cur.labeled) {
                    has_flag = true;
                    ++flags;
                    if (v[cur.first] < 0 || v[cur.second] < 0) return false;
                }
                if (t == VType::white) {
                    if (!cur.labeled && v[cur.second] < v[cur.first]) return false;  // non-decreasing across a flag
                    int expect = cur.labeled ? v[cur.first] - 1 : v[cur.second];
                    if (v[nxt.first] != expect) return false;
                } else {
                    if (v[cur.second] > v[cur.first]) return false;  // non-increasing across a flag
                    int gap = v[nxt.first] - v[cur.second];
                    if (gap < 0) return false;
                    buds += gap;
                }
            }
            if (!has_flag) return false;
            if (t == VType::black && flags + buds > req_.p) return false;
        }
        return true;
    }

    std::vector<int> white_degrees(const std::vector<int>&) const {
        std::vector<int> d;
        for (std::size_t n = 0; n < tree_.nodes.size(); ++n)
            if (tree_.nodes[n].type == VType::white) d.push_back(static_cast<int>(around_[n].size()));
        return d;
    }

    std::vector<int> black_degrees(const std::vector<int>& v) const {
        std::vector<int> d;
        for (std::size_t n = 0; n < tree_.nodes.size(); ++n) {
            if (tree_.nodes[n].type != VType::black) continue;
            const auto& seq = around_[n];
            int k = static_cast<int>(seq.size()), deg = k;
            for (int s = 0; s < k; ++s) deg += v[seq[(s + 1) % k].first] - v[seq[s].second];
            d.push_back(deg);
        }
        return d;
    }

private:
    void build() {
        const auto& N = tree_.nodes;
        label_var_.assign(N.size(), -1);
        L_.assign(N.size(), -1);
        R_.assign(N.size(), -1);
        fixed_.clear();
        auto fresh = [&](bool is_labeled) {
            lower_.push_back(is_labeled ? 1 : 0);
            return nvars_++;
        };
        // variables in depth-first order so equalities propagate
        std::function<void(int)> alloc = [&](int n) {
            if (N[n].type == VType::labeled) label_var_[n] = fresh(true);
            if (N[n].parent >= 0) {
                VType a = N[n].type, b = N[N[n].parent].type;
                if (a != VType::labeled && b != VType::labeled) {
                    L_[n] = fresh(false);
                    R_[n] = fresh(false);
                }
            }
            for (int k : N[n].kids) alloc(k);
        };
        const OracleRoot& root = req_.root;
        if (root.kind != RootKind::corner_at_label) {
            root_L_ = fresh(false);
            root_R_ = fresh(false);
            // W_{i,j}: i is on the left walking towards the white vertex (R side);
            // B_{i,j}: i is on the left walking towards the black vertex (L side).
            fixed_[root_L_] = root.kind == RootKind::white_half ? root.j : root.i;
            fixed_[root_R_] = root.kind == RootKind::white_half ? root.i : root.j;
        }
        alloc(0);
        if (root.kind == RootKind::corner_at_label) fixed_[label_var_[0]] = root.i;

        around_.assign(N.size(), {});
        for (std::size_t n = 0; n < N.size(); ++n) {
            if (N[n].type == VType::labeled) continue;
            bool white = N[n].type == VType::white;
            auto item_to = [&](int nb, int edge_child) -> Item {
                if (N[nb].type == VType::labeled) return {label_var_[nb], label_var_[nb], true};
                // walking white -> black, L is on the left; clockwise around the
                // white vertex L comes first, around the black vertex R does
                return white ? Item{L_[edge_child], R_[edge_child], false} : Item{R_[edge_child], L_[edge_child], false};
            };
            auto& seq = around_[n];
            if (N[n].parent >= 0) seq.push_back(item_to(N[n].parent, static_cast<int>(n)));
            else if (root.kind != RootKind::corner_at_label)
                seq.push_back(white ? Item{root_L_, root_R_, false} : Item{root_R_, root_L_, false});
            for (int k : N[n].kids) seq.push_back(item_to(k, k));
            int k = static_cast<int>(seq.size());
            BlackDegree bd{{}, 0};
            for (int s = 0; s < k; ++s) {
                const Item& cur = seq[s];
                const Item& nxt = seq[(s + 1) % k];
                if (!cur.labeled) {
                    ++bd.flags;
                    if (white) rules_.push_back({Rule::at_least, cur.second, cur.first, 0});
                    else rules_.push_back({Rule::at_least, cur.first, cur.second, 0});
                }
                if (white) {
                    if (cur.labeled) rules_.push_back({Rule::equal_offset, nxt.first, cur.first, -1});
                    else rules_.push_back({Rule::equal_offset, nxt.first, cur.second, 0});
                } else {
                    rules_.push_back({Rule::at_least, nxt.first, cur.second, 0});
                    bd.gaps.emplace_back(nxt.first, cur.second);
                }
            }
            if (!white) blacks_.push_back(bd);
        }
        // index rules by the later of their two variables
        by_var_.assign(nvars_, {});
        for (std::size_t r = 0; r < rules_.size(); ++r)
            by_var_[std::max(rules_[r].a, rules_[r].b)].push_back(static_cast<int>(r));
        black_by_var_.assign(nvars_, {});
        for (std::size_t b = 0; b < blacks_.size(); ++b) {
            int last = 0;
            for (auto& [x, y] : blacks_[b].gaps) last = std::max({last, x, y});
            black_by_var_[last].push_back(static_cast<int>(b));
        }
    }

    template <class F>
    void search(int var, F& visit) {
        if (var == nvars_) {
            visit(values_);
            return;
        }
        int lo = lower_[var], hi = req_.label_top;
        if (auto it = fixed_.find(var); it != fixed_.end()) lo = hi = it->second;
        // an equality with an earlier variable pins the value
        for (int r : by_var_[var]) {
            const Rule& rule = rules_[r];
            if (rule.kind != Rule::equal_offset || rule.a == rule.b) continue;
            int v = rule.a == var ? values_[rule.b] + rule.offset : values_[rule.a] - rule.offset;
            lo = std::max(lo, v);
            hi = std::min(hi, v);
        }
        for (int v = lo; v <= hi; ++v) {
            values_[var] = v;
            if (consistent(var)) search(var + 1, visit);
        }
        values_[var] = -1;
    }

    bool consistent(int var) const {
        for (int r : by_var_[var]) {
            const Rule& rule = rules_[r];
            int a = values_[rule.a], b = values_[rule.b];
            if (rule.kind == Rule::equal_offset ? a != b + rule.offset : a < b) return false;
        }
        for (int bi : black_by_var_[var]) {
            const BlackDegree& bd = blacks_[bi];
            int deg = bd.flags;
            for (auto& [x, y] : bd.gaps) deg += values_[x] - values_[y];
            if (deg > req_.p) return false;
        }
        return true;
    }

    const Tree& tree_;
    const OracleRequest& req_;
    int nvars_ = 0;
    std::vector<int> lower_;
    std::vector<int> label_var_, L_, R_;
    int root_L_ = -1, root_R_ = -1;
    std::map<int, int> fixed_;
    std::vector<std::vector<Item>> around_;
    std::vector<Rule> rules_;
    std::vector<BlackDegree> blacks_;
    std::vector<std::vector<int>> by_var_, black_by_var_;
    std::vector<int> values_;
};

Monomial weight_of(const std::vector<int>& white, const std::vector<int>& black) {
    Monomial m;
    for (int d : white) m.exponents["g" + std::to_string(d)] += 1;
    for (int d : black) m.exponents["gt" + std::to_string(d)] += 1;
    return m;
}

}  // namespace

OracleCounts enumerate(const OracleRequest& req0, Exec exec) {
    OracleRequest req = req0;
    if (req.p < 1 || req.q < 1) throw OracleError("p and q must be positive");
    if (req.max_weighted > kOracleMaxWeighted)
        throw OracleError("oracle requests above " + std::to_string(kOracleMaxWeighted) +
                          " weighted vertices exceed desk scale");
    if (req.max_weighted < 0) throw OracleError("negative vertex budget");
    int base = std::max(req.root.i, req.root.j);
    if (req.label_top < 0) req.label_top = base + req.max_weighted * std::max(req.p, req.q) + 2;
    if (req.label_top < base) throw OracleError("label window does not contain the root labels");

    ShapeGenerator gen(req.p, req.q);
    std::vector<TreePtr> shapes;
    VType root_type = req.root.kind == RootKind::corner_at_label ? VType::labeled
                      : req.root.kind == RootKind::white_half    ? VType::white
                                                                 : VType::black;
    for (int b = 1; b <= req.max_weighted; ++b)
        for (auto& t : gen.trees(root_type, b)) shapes.push_back(t);

    OracleCounts out;
    out.root = req.root;
    out.max_weighted = req.max_weighted;
    out.shapes = static_cast<long long>(shapes.size());
    int nshapes = static_cast<int>(shapes.size());
    bool parallel = exec == Exec::parallel;
#pragma omp parallel if (parallel)
    {
        std::map<Monomial, long long> counts, zero;
        bool touched = false;
#pragma omp for schedule(dynamic, 1)
        for (int s = 0; s < nshapes; ++s) {
            Labeler lab(*shapes[s], req);
            lab.run([&](const std::vector<int>& v) {
                if (!lab.valid(v)) return;
                Monomial m = weight_of(lab.white_degrees(v), lab.black_degrees(v));
                counts[m] += 1;
                int lo = *std::min_element(v.begin(), v.end());
                int hi = *std::max_element(v.begin(), v.end());
                if (lo == 0) zero[m] += 1;
                if (hi >= req.label_top) touched = true;
            });
        }
#pragma omp critical
        {
            for (auto& [m, c] : counts) out.counts[m] += c;
            for (auto& [m, c] : zero) out.min_label_zero[m] += c;
            out.inconclusive |= touched;
        }
    }
    return out;
}

CheckReport cross_check(const MobileSolution& sol, const OracleCounts& oc, int max_degree) {
    CheckReport rep("oracle_" + oc.root.name());
    if (sol.spec.mode != ScalingMode::plain) {
        rep.fail(-1, -1, "oracle comparison needs plain-mode couplings");
        return rep;
    }
    if (oc.inconclusive) rep.fail(-1, -1, "oracle label window was inconclusive");
    if (max_degree > oc.max_weighted || max_degree > sol.order) {
        rep.fail(-1, -1, "requested degree exceeds oracle or solver coverage");
        return rep;
    }
    const Series* s = nullptr;
    const OracleRoot& r = oc.root;
    switch (r.kind) {
        case RootKind::corner_at_label: s = &sol.R_at(r.i); break;
        case RootKind::white_half: s = &sol.W(r.i, r.j); break;
        case RootKind::black_half: s = &sol.B(r.i, r.j); break;
    }
    auto sp = sol.space;
    for (auto& v : sp->vars())
        if (v == kGradingVar) {
            rep.fail(-1, -1, "oracle comparison needs symbolic couplings");
            return rep;
        }
    // every solver monomial up to max_degree against the oracle
    for (std::size_t idx = 0; idx < sp->degree_start(max_degree + 1); ++idx) {
        Monomial m = sp->monomial(idx);
        long long expect = 0;
        if (auto it = oc.counts.find(m); it != oc.counts.end()) expect = it->second;
        if (idx == 0 && r.kind == RootKind::corner_at_label) expect += 1;  // the vertex map
        Rational got = s->coeff_index(idx);
        ++rep.checked;
        if (got != Rational(static_cast<long>(expect)))
            rep.fail(r.i, r.j, m.str() + ": solver " + got.get_str() + " vs oracle " + std::to_string(expect));
    }
    // oracle monomials the solver space cannot express must involve zero couplings
    for (auto& [m, c] : oc.counts) {
        if (m.degree() > max_degree) continue;
        bool expressible = true;
        for (auto& kv : m.exponents) expressible &= sp->var_index(kv.first) >= 0;
        if (expressible) continue;
        bool uses_zero = false;
        for (auto& kv : m.exponents) {
            bool black = kv.first.rfind("gt", 0) == 0;
            int k = std::stoi(kv.first.substr(black ? 2 : 1));
            const auto& list = black ? sol.spec.black : sol.spec.white;
            if (k > static_cast<int>(list.size()) || list[k - 1].kind == Weight::Kind::zero) uses_zero = true;
        }
        if (!uses_zero) rep.fail(r.i, r.j, "oracle monomial " + m.str() + " missing from solver space");
    }
    return rep;
}

std::string counts_to_csv(const std::vector<OracleCounts>& all) {
    std::ostringstream os;
    os << "root,max_weighted,monomial,count\n";
    for (auto& oc : all)
        for (auto& [m, c] : oc.counts) os << oc.root.name() << ',' << oc.max_weighted << ',' << m.str() << ',' << c << '\n';
    return os.str();
}

std::vector<OracleCounts> counts_from_csv(const std::string& text) {
    std::vector<OracleCounts> out;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line != "root,max_weighted,monomial,count") throw OracleError("unexpected fixture header");
    std::map<std::string, std::size_t> where;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 4) throw OracleError("malformed fixture line: " + line);
        OracleRoot root;
        std::vector<int> nums;
        std::stringstream ns(f[0].substr(2));
        std::string part;
        while (std::getline(ns, part, '_')) nums.push_back(std::stoi(part));
        if (f[0][0] == 'R' && nums.size() == 1) root = {RootKind::corner_at_label, nums[0], 0};
        else if (f[0][0] == 'W' && nums.size() == 2) root = {RootKind::white_half, nums[0], nums[1]};
        else if (f[0][0] == 'B' && nums.size() == 2) root = {RootKind::black_half, nums[0], nums[1]};
        else throw OracleError("unknown root " + f[0]);
        auto [it, fresh] = where.emplace(f[0], out.size());
        if (fresh) {
            out.emplace_back();
            out.back().root = root;
            out.back().max_weighted = std::stoi(f[1]);
        }
        out[it->second].counts[Monomial::parse(f[2])] = std::stoll(f[3]);
    }
    return out;
}

}  // namespace mobilium
