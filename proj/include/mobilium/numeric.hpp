#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

namespace mobilium {

// 113-bit quad precision for ill-conditioned instances
using Quad = boost::multiprecision::float128;

template <class Real>
using Cx = std::complex<Real>;

// real math that also resolves for Quad
template <class Real>
Real pi_v() {
    using std::acos;
    return acos(Real(-1));
}
template <class Real>
Real rsqrt(Real x) {
    using std::sqrt;
    return sqrt(x);
}
template <class Real>
Real rpow(Real x, Real y) {
    using std::pow;
    return pow(x, y);
}
template <class Real>
Real rabs(Real x) {
    using std::abs;
    return abs(x);
}

template <class Real>
using CMat = Eigen::Matrix<Cx<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
using CVec = Eigen::Matrix<Cx<Real>, Eigen::Dynamic, 1>;

enum class Precision { double_, extended, quad };

// MOBILIUM_PRECISION=extended selects long double kernels, quad selects Quad
inline Precision precision_from_env() {
    const char* v = std::getenv("MOBILIUM_PRECISION");
    if (!v || std::string(v).empty() || std::string(v) == "double") return Precision::double_;
    if (std::string(v) == "extended") return Precision::extended;
    if (std::string(v) == "quad") return Precision::quad;
    throw std::invalid_argument("MOBILIUM_PRECISION must be 'double', 'extended' or 'quad'");
}

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class Real>
Cx<Real> determinant(const CMat<Real>& m) {
    if (m.rows() == 0) return Cx<Real>(1);
    return m.partialPivLu().determinant();
}

// ascending coefficients
template <class Real>
Cx<Real> poly_eval(const std::vector<Cx<Real>>& c, Cx<Real> z) {
    Cx<Real> acc(0);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

template <class Real>
Cx<Real> poly_deriv_eval(const std::vector<Cx<Real>>& c, Cx<Real> z) {
    Cx<Real> acc(0);
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + c[k] * Real(k);
    return acc;
}

template <class Real>
Real poly_abs_eval(const std::vector<Cx<Real>>& c, Real r) {
    Real acc = 0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * r + std::abs(c[k]);
    return acc;
}

// Newton steps on one root; returns the relative residual |p(z)| / sum |c_k||z|^k
template <class Real>
Real newton_polish(const std::vector<Cx<Real>>& c, Cx<Real>& z, int max_steps = 8) {
    Real scale = std::max(poly_abs_eval(c, std::abs(z)), std::numeric_limits<Real>::min());
    Real res = std::abs(poly_eval(c, z)) / scale;
    for (int s = 0; s < max_steps; ++s) {
        Cx<Real> d = poly_deriv_eval(c, z);
        if (d == Cx<Real>(0)) break;
        Cx<Real> step = poly_eval(c, z) / d;
        Cx<Real> next = z - step;
        Real nres = std::abs(poly_eval(c, next)) / std::max(poly_abs_eval(c, std::abs(next)), std::numeric_limits<Real>::min());
        if (!(nres < res) && std::abs(step) <= std::numeric_limits<Real>::epsilon() * std::abs(z)) break;
        if (nres > res) break;
        z = next;
        res = nres;
    }
    return res;
}

// All roots of sum_k c_k z^k via companion-matrix eigenvalues, each polished
// by Newton. Trailing zero leading coefficients are rejected.
template <class Real>
std::vector<Cx<Real>> poly_roots(const std::vector<Cx<Real>>& c) {
    int deg = static_cast<int>(c.size()) - 1;
    if (deg < 0) throw NumericError("empty polynomial");
    if (c.back() == Cx<Real>(0)) throw NumericError("leading coefficient vanishes");
    if (deg == 0) return {};
    CMat<Real> comp = CMat<Real>::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c.back();
    Eigen::ComplexEigenSolver<CMat<Real>> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericError("companion eigenvalue solver failed");
    std::vector<Cx<Real>> roots(deg);
    for (int i = 0; i < deg; ++i) {
        roots[i] = es.eigenvalues()(i);
        newton_polish(c, roots[i]);
    }
    return roots;
}

template <class Real>
Real rel_diff(Cx<Real> a, Cx<Real> b) {
    Real s = std::max(std::abs(a), std::abs(b));
    return s == 0 ? Real(0) : std::abs(a - b) / s;
}

}  // namespace mobilium
