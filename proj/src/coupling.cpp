#include "mobilium/coupling.hpp"
#include "mobilium/numeric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mobilium {

CouplingSpec CouplingSpec::make(int p, int q, ScalingMode mode) {
    CouplingSpec s;
    s.p = p;
    s.q = q;
    s.mode = mode;
    s.white.assign(std::max(q, 0), Weight::none());
    s.black.assign(std::max(p, 0), Weight::none());
    return s;
}

CouplingSpec CouplingSpec::all_symbolic(int p, int q, ScalingMode mode) {
    CouplingSpec s = make(p, q, mode);
    int first = mode == ScalingMode::sqrt_g ? 2 : 1;
    for (int k = first; k <= q; ++k) s.g_at(k) = Weight::symbol();
    for (int k = first; k <= p; ++k) s.gt_at(k) = Weight::symbol();
    return s;
}

void CouplingSpec::validate(bool require_top_degrees) const {
    if (p < 2 || q < 2) throw std::invalid_argument("p and q must be >= 2");
    if (static_cast<int>(white.size()) != q || static_cast<int>(black.size()) != p)
        throw std::invalid_argument("weight lists must have lengths q and p");
    if (mode == ScalingMode::sqrt_g) {
        if (white[0].kind != Weight::Kind::zero || black[0].kind != Weight::Kind::zero)
            throw std::invalid_argument("sqrt_g mode requires g_1 = gt_1 = 0");
    }
    if (require_top_degrees) {
        if (white[q - 1].kind == Weight::Kind::zero) throw std::invalid_argument("top white weight must be nonzero");
        if (black[p - 1].kind == Weight::Kind::zero) throw std::invalid_argument("top black weight must be nonzero");
    }
}

std::string CouplingSpec::white_name(int k, ScalingMode mode) {
    return (mode == ScalingMode::sqrt_g ? "lambda" : "g") + std::to_string(k);
}

std::string CouplingSpec::black_name(int k, ScalingMode mode) {
    return (mode == ScalingMode::sqrt_g ? "lambdat" : "gt") + std::to_string(k);
}

std::vector<std::string> CouplingSpec::variables() const {
    std::vector<std::string> vars;
    bool numeric = false;
    if (mode == ScalingMode::sqrt_g) vars.push_back(kSqrtGVar);
    for (int k = 1; k <= q; ++k) {
        if (white[k - 1].kind == Weight::Kind::symbolic) vars.push_back(white_name(k, mode));
        numeric |= white[k - 1].kind == Weight::Kind::numeric;
    }
    for (int k = 1; k <= p; ++k) {
        if (black[k - 1].kind == Weight::Kind::symbolic) vars.push_back(black_name(k, mode));
        numeric |= black[k - 1].kind == Weight::Kind::numeric;
    }
    if (numeric) vars.push_back(kGradingVar);
    return vars;
}

SpacePtr CouplingSpec::space(int order) const { return SeriesSpace::make(variables(), order); }

namespace {

std::vector<Series> weights_as_series(const std::vector<Weight>& ws, ScalingMode mode, bool white, const SpacePtr& sp) {
    std::vector<Series> out(ws.size() + 1, Series(sp));
    for (std::size_t k = 1; k <= ws.size(); ++k) {
        const Weight& w = ws[k - 1];
        Series s(sp);
        std::string name = white ? CouplingSpec::white_name(k, mode) : CouplingSpec::black_name(k, mode);
        if (w.kind == Weight::Kind::symbolic) s = Series::variable(sp, name);
        else if (w.kind == Weight::Kind::numeric) s = Series::variable(sp, kGradingVar) * w.value;
        if (mode == ScalingMode::sqrt_g && !s.is_zero() && k > 2) {
            Monomial m;
            m.exponents[kSqrtGVar] = static_cast<int>(k) - 2;
            s = s * Series::monomial(sp, m);
        }
        out[k] = std::move(s);
    }
    return out;
}

}  // namespace

std::vector<Series> CouplingSpec::white_series(const SpacePtr& sp) const {
    return weights_as_series(white, mode, true, sp);
}

std::vector<Series> CouplingSpec::black_series(const SpacePtr& sp) const {
    return weights_as_series(black, mode, false, sp);
}

bool CouplingSpec::fully_numeric() const {
    for (auto& w : white)
        if (w.kind == Weight::Kind::symbolic) return false;
    for (auto& w : black)
        if (w.kind == Weight::Kind::symbolic) return false;
    return true;
}

bool CouplingSpec::all_zero() const {
    for (auto& w : white)
        if (w.kind != Weight::Kind::zero) return false;
    for (auto& w : black)
        if (w.kind != Weight::Kind::zero) return false;
    return true;
}

namespace {

template <class Real>
std::vector<std::complex<Real>> values(const CouplingSpec& s, const std::vector<Weight>& ws) {
    std::vector<std::complex<Real>> out(ws.size() + 1, std::complex<Real>(0));
    Real sg = s.mode == ScalingMode::sqrt_g ? rsqrt<Real>(rational_to<Real>(s.g)) : Real(1);
    for (std::size_t k = 1; k <= ws.size(); ++k) {
        if (ws[k - 1].kind == Weight::Kind::symbolic)
            throw std::invalid_argument("numeric evaluation needs numeric couplings");
        if (ws[k - 1].kind == Weight::Kind::zero) continue;
        Real v = rational_to<Real>(ws[k - 1].value);
        if (s.mode == ScalingMode::sqrt_g)
            for (std::size_t r = 2; r < k; ++r) v *= sg;
        out[k] = v;
    }
    return out;
}

}  // namespace

template <class Real>
std::vector<std::complex<Real>> CouplingSpec::white_values() const {
    return values<Real>(*this, white);
}

template <class Real>
std::vector<std::complex<Real>> CouplingSpec::black_values() const {
    return values<Real>(*this, black);
}

template std::vector<std::complex<double>> CouplingSpec::white_values<double>() const;
template std::vector<std::complex<double>> CouplingSpec::black_values<double>() const;
template std::vector<std::complex<long double>> CouplingSpec::white_values<long double>() const;
template std::vector<std::complex<long double>> CouplingSpec::black_values<long double>() const;
template std::vector<std::complex<Quad>> CouplingSpec::white_values<Quad>() const;
template std::vector<std::complex<Quad>> CouplingSpec::black_values<Quad>() const;

void apply_couplings(CouplingSpec& spec, const std::string& text) {
    for (auto& w : spec.white) w = Weight::none();
    for (auto& w : spec.black) w = Weight::none();
    if (text == "none" || text.empty()) return;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("coupling '" + item + "' is not of the form k=v");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        bool is_black = false;
        std::string digits;
        for (const char* prefix : {"lambdat", "lambda", "gt", "g"}) {
            std::string pre(prefix);
            if (key.rfind(pre, 0) == 0) {
                is_black = pre == "gt" || pre == "lambdat";
                digits = key.substr(pre.size());
                break;
            }
        }
        if (key == "g" && spec.mode == ScalingMode::sqrt_g) {
            spec.g = parse_rational(val);
            continue;
        }
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("unknown coupling name '" + key + "'");
        int k = std::stoi(digits);
        auto& list = is_black ? spec.black : spec.white;
        if (k < 1 || k > static_cast<int>(list.size()))
            throw std::invalid_argument("coupling '" + key + "' is outside the allowed degree range");
        if (val == "sym") list[k - 1] = Weight::symbol();
        else {
            try {
                list[k - 1] = Weight::number(parse_rational(val));
            } catch (const SeriesError& e) {
                throw std::invalid_argument(e.what());
            }
        }
    }
}

}  // namespace mobilium
