#include "mobilium/series.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <mutex>
#include <sstream>

namespace mobilium {

Rational parse_rational(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    if (text.empty()) throw SeriesError("empty rational literal");
    auto dot = text.find('.');
    auto exp = text.find_first_of("eE");
    try {
        if (dot == std::string::npos && exp == std::string::npos) {
            Rational r(text, 10);
            r.canonicalize();
            return r;
        }
        std::string mant = exp == std::string::npos ? text : text.substr(0, exp);
        long e10 = exp == std::string::npos ? 0 : std::stol(text.substr(exp + 1));
        bool neg = !mant.empty() && (mant[0] == '-' || mant[0] == '+');
        bool minus = !mant.empty() && mant[0] == '-';
        if (neg) mant = mant.substr(1);
        auto d = mant.find('.');
        std::string digits = mant;
        if (d != std::string::npos) {
            e10 -= static_cast<long>(mant.size() - d - 1);
            digits = mant.substr(0, d) + mant.substr(d + 1);
        }
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
            throw SeriesError("malformed number '" + raw + "'");
        mpz_class num(digits, 10), den(1);
        mpz_class ten(10);
        for (long i = 0; i < std::labs(e10); ++i) {
            if (e10 > 0) num *= ten; else den *= ten;
        }
        Rational r(num, den);
        r.canonicalize();
        return minus ? Rational(-r) : r;
    } catch (const std::invalid_argument&) {
        throw SeriesError("malformed number '" + raw + "'");
    }
}

std::string to_string(const Rational& r) { return r.get_str(); }

Monomial::Monomial(std::initializer_list<std::pair<const std::string, int>> init) {
    for (auto& [k, v] : init)
        if (v != 0) exponents[k] += v;
}

int Monomial::degree() const {
    int d = 0;
    for (auto& kv : exponents) d += kv.second;
    return d;
}

Monomial Monomial::parse(const std::string& text) {
    Monomial m;
    if (text.empty() || text == "1") return m;
    std::stringstream ss(text);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
        auto caret = factor.find('^');
        std::string name = factor.substr(0, caret);
        int e = caret == std::string::npos ? 1 : std::stoi(factor.substr(caret + 1));
        if (name.empty() || e < 0) throw SeriesError("bad monomial '" + text + "'");
        if (e > 0) m.exponents[name] += e;
    }
    return m;
}

std::string Monomial::str() const {
    if (exponents.empty()) return "1";
    std::string s;
    for (auto& [k, v] : exponents) {
        if (!s.empty()) s += '*';
        s += k;
        if (v != 1) s += "^" + std::to_string(v);
    }
    return s;
}

SpacePtr SeriesSpace::make(std::vector<std::string> vars, int order) {
    if (order < 0) throw SeriesError("truncation order must be >= 0");
    static std::mutex mu;
    static std::map<std::pair<std::vector<std::string>, int>, std::weak_ptr<const SeriesSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(vars, order);
    if (auto it = cache.find(key); it != cache.end())
        if (auto sp = it->second.lock()) return sp;
    std::shared_ptr<const SeriesSpace> sp(new SeriesSpace(std::move(vars), order));
    cache[key] = sp;
    return sp;
}

SeriesSpace::SeriesSpace(std::vector<std::string> vars, int order) : vars_(std::move(vars)), order_(order) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        for (std::size_t j = i + 1; j < vars_.size(); ++j)
            if (vars_[i] == vars_[j]) throw SeriesError("duplicate variable " + vars_[i]);
    int n = nvars();
    int top = order_ + n + 1;
    binom_.assign(top + 1, std::vector<unsigned long long>(top + 1, 0));
    for (int a = 0; a <= top; ++a) {
        binom_[a][0] = 1;
        for (int b = 1; b <= a; ++b) binom_[a][b] = binom_[a - 1][b - 1] + binom_[a - 1][b];
    }
    // enumerate by degree, descending lexicographic exponent vectors
    std::vector<int> e(n, 0);
    for (int d = 0; d <= order_; ++d) {
        start_.push_back(exps_.size());
        if (n == 0) {
            if (d == 0) { exps_.push_back({}); degree_.push_back(0); }
            continue;
        }
        std::fill(e.begin(), e.end(), 0);
        e[0] = d;
        while (true) {
            exps_.push_back(e);
            degree_.push_back(d);
            // previous vector in lex order with the same sum
            int i = n - 2;
            while (i >= 0 && e[i] == 0) --i;
            if (i < 0) break;
            e[i] -= 1;
            int rest = 0;
            for (int k = i + 1; k < n; ++k) { rest += e[k]; e[k] = 0; }
            e[i + 1] = rest + 1;
        }
    }
    start_.push_back(exps_.size());
    std::size_t sz = exps_.size();
    if (sz * sz <= (1u << 22)) {
        table_.assign(sz * sz, -1);
        std::vector<int> s(n);
        for (std::size_t a = 0; a < sz; ++a)
            for (std::size_t b = 0; b < sz; ++b) {
                if (degree_[a] + degree_[b] > order_) continue;
                for (int k = 0; k < n; ++k) s[k] = exps_[a][k] + exps_[b][k];
                table_[a * sz + b] = static_cast<long>(rank(s));
            }
    }
}

unsigned long long SeriesSpace::count(int k, int s) const {
    if (s < 0) return 0;
    if (k == 0) return s == 0 ? 1 : 0;
    return binom_[s + k - 1][k - 1];
}

std::size_t SeriesSpace::rank(const std::vector<int>& e) const {
    int d = 0;
    for (int v : e) d += v;
    if (d > order_) throw SeriesError("monomial degree exceeds truncation order");
    std::size_t r = start_[d];
    int rem = d;
    int n = nvars();
    for (int i = 0; i < n; ++i) {
        for (int v = e[i] + 1; v <= rem; ++v) r += count(n - i - 1, rem - v);
        rem -= e[i];
    }
    return r;
}

long SeriesSpace::product(std::size_t a, std::size_t b) const {
    if (degree_[a] + degree_[b] > order_) return -1;
    if (!table_.empty()) return table_[a * exps_.size() + b];
    std::vector<int> s(nvars());
    for (int k = 0; k < nvars(); ++k) s[k] = exps_[a][k] + exps_[b][k];
    return static_cast<long>(rank(s));
}

int SeriesSpace::var_index(const std::string& name) const {
    for (int i = 0; i < nvars(); ++i)
        if (vars_[i] == name) return i;
    return -1;
}

Monomial SeriesSpace::monomial(std::size_t idx) const {
    Monomial m;
    for (int k = 0; k < nvars(); ++k)
        if (exps_[idx][k]) m.exponents[vars_[k]] = exps_[idx][k];
    return m;
}

std::size_t SeriesSpace::index_of(const Monomial& m) const {
    std::vector<int> e(nvars(), 0);
    for (auto& [name, v] : m.exponents) {
        int k = var_index(name);
        if (k < 0) throw SeriesError("unknown variable " + name);
        e[k] = v;
    }
    if (m.degree() > order_)
        throw SeriesError("monomial " + m.str() + " is beyond truncation order " + std::to_string(order_));
    return rank(e);
}

Series Series::constant(SpacePtr space, const Rational& value) {
    Series s(std::move(space));
    Rational v = value;
    v.canonicalize();
    if (v != 0) s.terms_.emplace_back(0, std::move(v));
    return s;
}

Series Series::variable(SpacePtr space, const std::string& name) {
    Monomial m;
    m.exponents[name] = 1;
    return monomial(std::move(space), m);
}

Series Series::monomial(SpacePtr space, const Monomial& m, const Rational& c) {
    for (auto& kv : m.exponents)
        if (space->var_index(kv.first) < 0) throw SeriesError("unknown variable " + kv.first);
    Series s(space);
    Rational v = c;
    v.canonicalize();
    if (v == 0 || m.degree() > space->order()) return s;
    s.terms_.emplace_back(space->index_of(m), std::move(v));
    return s;
}

Rational Series::coeff(const Monomial& m) const {
    return coeff_index(space_->index_of(m));
}

Rational Series::coeff_index(std::size_t idx) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), idx,
                               [](const Term& t, std::size_t i) { return t.first < i; });
    if (it != terms_.end() && it->first == idx) return it->second;
    return 0;
}

int Series::valuation() const { return terms_.empty() ? -1 : space_->degree(terms_.front().first); }

void Series::check_compatible(const Series& o) const {
    if (!space_ || !o.space_) throw SeriesError("uninitialised series");
    if (space_ != o.space_ && !space_->same_universe(*o.space_))
        throw SeriesError("variable-universe mismatch");
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

namespace {

std::vector<Series::Term> merge(const std::vector<Series::Term>& a, const std::vector<Series::Term>& b, int sign,
                                std::size_t limit) {
    std::vector<Series::Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            if (a[i].first < limit) out.push_back(a[i]);
            ++i;
        } else if (i == a.size() || b[j].first < a[i].first) {
            if (b[j].first < limit) out.emplace_back(b[j].first, sign > 0 ? b[j].second : Rational(-b[j].second));
            ++j;
        } else {
            Rational v = sign > 0 ? Rational(a[i].second + b[j].second) : Rational(a[i].second - b[j].second);
            if (v != 0 && a[i].first < limit) out.emplace_back(a[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

Series& Series::operator+=(const Series& o) {
    check_compatible(o);
    if (o.order() < order()) *this = truncated(o.order());
    terms_ = merge(terms_, o.terms_, +1, space_->size());
    return *this;
}

Series& Series::operator-=(const Series& o) {
    check_compatible(o);
    if (o.order() < order()) *this = truncated(o.order());
    terms_ = merge(terms_, o.terms_, -1, space_->size());
    return *this;
}

Series& Series::operator*=(const Rational& c0) {
    Rational c = c0;
    c.canonicalize();
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.second *= c;
    return *this;
}

Series operator*(const Series& a, const Series& b) {
    a.check_compatible(b);
    const SpacePtr& sp = a.order() <= b.order() ? a.space_ : b.space_;
    Series r(sp);
    r.add_product(a, b);
    return r;
}

void Series::add_product(const Series& a, const Series& b) {
    check_compatible(a);
    check_compatible(b);
    int ord = std::min({order(), a.order(), b.order()});
    if (ord < order()) *this = truncated(ord);
    const SeriesSpace& sp = *space_;
    if (a.is_zero() || b.is_zero()) return;
    // exponent indices differ between spaces of different order, so work in this space
    const Series& A = a.space_ == space_ ? a : a.in_space(space_);
    const Series& B = b.space_ == space_ ? b : b.in_space(space_);
    thread_local std::vector<Rational> acc;
    thread_local std::vector<char> used;
    thread_local Rational tmp;
    std::size_t n = sp.size();
    if (acc.size() < n) {
        acc.resize(n);
        used.resize(n, 0);
    }
    std::vector<std::size_t> touched;
    for (auto& t : terms_) {
        acc[t.first] = t.second;
        used[t.first] = 1;
        touched.push_back(t.first);
    }
    int D = sp.order();
    for (auto& [ia, ca] : A.terms_) {
        int room = D - sp.degree(ia);
        if (room < 0) break;
        for (auto& [ib, cb] : B.terms_) {
            if (sp.degree(ib) > room) break;
            long k = sp.product(ia, ib);
            mpq_mul(tmp.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
            if (!used[k]) {
                used[k] = 1;
                acc[k] = tmp;
                touched.push_back(static_cast<std::size_t>(k));
            } else {
                mpq_add(acc[k].get_mpq_t(), acc[k].get_mpq_t(), tmp.get_mpq_t());
            }
        }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<Term> out;
    out.reserve(touched.size());
    for (auto k : touched) {
        if (acc[k] != 0) out.emplace_back(k, acc[k]);
        used[k] = 0;
    }
    terms_ = std::move(out);
}

void add_product(Series& acc, const Series& a, const Series& b) { acc.add_product(a, b); }

bool Series::operator==(const Series& o) const {
    if (space_ != o.space_) {
        if (!space_ || !o.space_ || !space_->same_universe(*o.space_) || order() != o.order()) return false;
    }
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].first != o.terms_[i].first || terms_[i].second != o.terms_[i].second) return false;
    return true;
}

Series Series::inverse() const {
    Rational c0 = constant_term();
    if (c0 == 0) throw SeriesError("series with zero constant term is not invertible");
    // b = (1/c0) * sum_k (-(a/c0 - 1))^k, built by Newton-free fixed point b <- (1 - (a - c0) b)/c0
    Series u = *this;
    u -= constant(space_, c0);
    Rational inv0 = 1 / c0;
    Series b = constant(space_, inv0);
    int v = u.valuation();
    if (v < 0) return b;
    for (int k = 0; k <= order() + 1; ++k) {
        Series next = constant(space_, 1);
        Series ub = u * b;
        next -= ub;
        next *= inv0;
        if (next == b) break;
        b = std::move(next);
    }
    return b;
}

Series Series::truncated(int order) const {
    if (order >= this->order()) return *this;
    return in_space(SeriesSpace::make(space_->vars(), order));
}

Series Series::in_space(const SpacePtr& target) const {
    if (!space_->same_universe(*target)) throw SeriesError("variable-universe mismatch");
    if (target == space_) return *this;
    Series r(target);
    for (auto& [idx, c] : terms_) {
        if (space_->degree(idx) > target->order()) break;
        r.terms_.emplace_back(target->rank(space_->exps(idx)), c);
    }
    return r;
}

namespace {

template <class C>
C eval_impl(const Series& s, const std::map<std::string, C>& at) {
    const SeriesSpace& sp = *s.space();
    std::vector<C> vals(sp.nvars());
    for (int k = 0; k < sp.nvars(); ++k) {
        auto it = at.find(sp.vars()[k]);
        if (it == at.end()) throw SeriesError("no value for variable " + sp.vars()[k]);
        vals[k] = it->second;
    }
    using R = typename C::value_type;
    C sum = 0;
    for (auto& [idx, c] : s.terms()) {
        C term;
        if constexpr (std::is_same_v<R, double>) {
            term = c.get_d();
        } else {
            term = std::strtold(mpz_class(c.get_num()).get_str().c_str(), nullptr) /
                   std::strtold(mpz_class(c.get_den()).get_str().c_str(), nullptr);
        }
        const auto& e = sp.exps(idx);
        for (int k = 0; k < sp.nvars(); ++k)
            for (int r = 0; r < e[k]; ++r) term *= vals[k];
        sum += term;
    }
    return sum;
}

}  // namespace

std::complex<double> Series::eval(const std::map<std::string, std::complex<double>>& at) const {
    return eval_impl(*this, at);
}

std::complex<long double> Series::eval_extended(const std::map<std::string, std::complex<long double>>& at) const {
    return eval_impl(*this, at);
}

nlohmann::json Series::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (auto& [idx, c] : terms_) {
        terms.push_back({{"exps", space_->exps(idx)},
                         {"num", mpz_class(c.get_num()).get_str()},
                         {"den", mpz_class(c.get_den()).get_str()}});
    }
    return {{"vars", space_->vars()}, {"order", space_->order()}, {"terms", terms}};
}

Series Series::from_json(const nlohmann::json& j) {
    auto sp = SeriesSpace::make(j.at("vars").get<std::vector<std::string>>(), j.at("order").get<int>());
    Series s(sp);
    for (auto& t : j.at("terms")) {
        auto e = t.at("exps").get<std::vector<int>>();
        if (static_cast<int>(e.size()) != sp->nvars()) throw SeriesError("exponent vector length mismatch");
        Rational c(mpz_class(t.at("num").get<std::string>()), mpz_class(t.at("den").get<std::string>()));
        c.canonicalize();
        if (c != 0) s.terms_.emplace_back(sp->rank(e), c);
    }
    std::sort(s.terms_.begin(), s.terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    return s;
}

std::string Series::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [idx, c] : terms_) {
        Monomial m = space_->monomial(idx);
        bool neg = c < 0;
        Rational a = neg ? Rational(-c) : c;
        if (s.empty()) s += neg ? "-" : "";
        else s += neg ? " - " : " + ";
        if (m.exponents.empty()) s += a.get_str();
        else if (a == 1) s += m.str();
        else s += a.get_str() + "*" + m.str();
    }
    return s;
}

}  // namespace mobilium
