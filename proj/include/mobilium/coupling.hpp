#pragma once

#include <complex>
#include <cstdlib>
#include <type_traits>
#include <string>
#include <vector>

#include "mobilium/series.hpp"

namespace mobilium {

enum class ScalingMode { plain, sqrt_g };

// A face weight is zero, a free series variable, or a number. Numbers enter
// the series ring multiplied by the grading variable "t" so that every
// weighted vertex still raises the total degree by one.
struct Weight {
    enum class Kind { zero, symbolic, numeric };
    Kind kind = Kind::zero;
    Rational value = 0;

    static Weight none() { return {}; }
    static Weight symbol() { return {Kind::symbolic, 0}; }
    static Weight number(const Rational& v) { return v == 0 ? Weight{} : Weight{Kind::numeric, v}; }
};

inline const char* const kGradingVar = "t";
inline const char* const kSqrtGVar = "sqrtg";

struct CouplingSpec {
    int p = 2;
    int q = 2;
    std::vector<Weight> white;  // white[k-1] is g_k (or lambda_k), k = 1..q
    std::vector<Weight> black;  // black[k-1] is gt_k (or lambdat_k), k = 1..p
    ScalingMode mode = ScalingMode::plain;
    // value of g when the spec is evaluated numerically in sqrt_g mode
    Rational g = 0;

    static CouplingSpec make(int p, int q, ScalingMode mode = ScalingMode::plain);
    // every g_k, gt_k symbolic (g_1, gt_1 excluded in sqrt_g mode)
    static CouplingSpec all_symbolic(int p, int q, ScalingMode mode = ScalingMode::plain);

    Weight& g_at(int k) { return white.at(k - 1); }
    Weight& gt_at(int k) { return black.at(k - 1); }
    const Weight& g_at(int k) const { return white.at(k - 1); }
    const Weight& gt_at(int k) const { return black.at(k - 1); }

    // throws std::invalid_argument describing the first violated constraint
    void validate(bool require_top_degrees = false) const;
    int N() const { return (p - 1) * (q - 1) - 1; }

    static std::string white_name(int k, ScalingMode mode);
    static std::string black_name(int k, ScalingMode mode);

    // series variables in canonical order
    std::vector<std::string> variables() const;
    SpacePtr space(int order) const;
    // g_k and gt_k as series, index 0 unused
    std::vector<Series> white_series(const SpacePtr& sp) const;
    std::vector<Series> black_series(const SpacePtr& sp) const;

    bool fully_numeric() const;
    bool all_zero() const;
    // numeric g_k, gt_k with sqrt_g scaling applied; index 0 unused
    template <class Real>
    std::vector<std::complex<Real>> white_values() const;
    template <class Real>
    std::vector<std::complex<Real>> black_values() const;
};

template <class Real>
Real rational_to(const Rational& r) {
    if constexpr (std::is_same_v<Real, double>) {
        return r.get_d();
    } else if constexpr (std::is_same_v<Real, long double>) {
        return std::strtold(mpz_class(r.get_num()).get_str().c_str(), nullptr) /
               std::strtold(mpz_class(r.get_den()).get_str().c_str(), nullptr);
    } else {
        return Real(mpz_class(r.get_num()).get_str()) / Real(mpz_class(r.get_den()).get_str());
    }
}

// Parses "g2=0.1,gt4=1/20,gt2=sym" onto a spec. "none" clears all weights.
void apply_couplings(CouplingSpec& spec, const std::string& text);

}  // namespace mobilium
