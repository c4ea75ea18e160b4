#pragma once

#include <gmpxx.h>

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mobilium {

using Rational = mpq_class;

// Parses "3", "-2/5" or a decimal like "0.05" into an exact rational.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

struct Monomial {
    std::map<std::string, int> exponents;

    Monomial() = default;
    Monomial(std::initializer_list<std::pair<const std::string, int>> init);

    int degree() const;
    // "1", "g2", "g2^2*gt4"
    static Monomial parse(const std::string& text);
    std::string str() const;
    bool operator==(const Monomial& o) const { return exponents == o.exponents; }
    bool operator<(const Monomial& o) const { return exponents < o.exponents; }
};

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Monomials of total degree <= D in a fixed variable list, indexed in
// graded-lex order: ascending degree, then descending exponent vector.
class SeriesSpace {
public:
    static std::shared_ptr<const SeriesSpace> make(std::vector<std::string> vars, int order);

    const std::vector<std::string>& vars() const { return vars_; }
    int order() const { return order_; }
    std::size_t size() const { return exps_.size(); }
    int nvars() const { return static_cast<int>(vars_.size()); }

    const std::vector<int>& exps(std::size_t idx) const { return exps_[idx]; }
    int degree(std::size_t idx) const { return degree_[idx]; }
    // first index of each degree; degree_start(D+1) == size()
    std::size_t degree_start(int d) const { return start_[d]; }
    std::size_t rank(const std::vector<int>& e) const;
    // index of the product monomial, or -1 if its degree exceeds the order
    long product(std::size_t a, std::size_t b) const;
    int var_index(const std::string& name) const;

    Monomial monomial(std::size_t idx) const;
    std::size_t index_of(const Monomial& m) const;

    bool same_universe(const SeriesSpace& o) const { return vars_ == o.vars_; }

private:
    SeriesSpace(std::vector<std::string> vars, int order);
    unsigned long long count(int k, int s) const;

    std::vector<std::string> vars_;
    int order_;
    std::vector<std::vector<int>> exps_;
    std::vector<int> degree_;
    std::vector<std::size_t> start_;
    std::vector<std::vector<unsigned long long>> binom_;
    std::vector<long> table_;  // dense product table when small enough
};

using SpacePtr = std::shared_ptr<const SeriesSpace>;

class Series {
public:
    using Term = std::pair<std::size_t, Rational>;

    Series() = default;
    explicit Series(SpacePtr space) : space_(std::move(space)) {}

    static Series constant(SpacePtr space, const Rational& value);
    static Series variable(SpacePtr space, const std::string& name);
    static Series monomial(SpacePtr space, const Monomial& m, const Rational& c = 1);

    const SpacePtr& space() const { return space_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int order() const { return space_->order(); }

    Rational coeff(const Monomial& m) const;
    Rational coeff_index(std::size_t idx) const;
    Rational constant_term() const { return coeff_index(0); }
    // lowest total degree with a nonzero coefficient, -1 for zero
    int valuation() const;

    Series operator-() const;
    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(const Rational& c);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Series& a, const Series& b);
    friend Series operator*(Series a, const Rational& c) { return a *= c; }
    friend Series operator*(const Rational& c, Series a) { return a *= c; }
    bool operator==(const Series& o) const;
    bool operator!=(const Series& o) const { return !(*this == o); }

    // this += a*b
    void add_product(const Series& a, const Series& b);
    Series inverse() const;
    Series truncated(int order) const;
    Series in_space(const SpacePtr& target) const;

    std::complex<double> eval(const std::map<std::string, std::complex<double>>& at) const;
    std::complex<long double> eval_extended(
        const std::map<std::string, std::complex<long double>>& at) const;

    nlohmann::json to_json() const;
    static Series from_json(const nlohmann::json& j);
    std::string str() const;

private:
    Series(SpacePtr space, std::vector<Term> terms) : space_(std::move(space)), terms_(std::move(terms)) {}
    void check_compatible(const Series& o) const;

    SpacePtr space_;
    std::vector<Term> terms_;  // sorted by index, no zeros
};

void add_product(Series& acc, const Series& a, const Series& b);

}  // namespace mobilium
