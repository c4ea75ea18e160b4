#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mobilium {

// Laurent polynomial sum_e c_e z^e over any ring with a zero element.
template <class T>
class Laurent {
public:
    Laurent() = default;
    explicit Laurent(T zero) : zero_(std::move(zero)) {}

    static Laurent monomial(int e, T c, T zero) {
        Laurent l(std::move(zero));
        l.low_ = e;
        l.c_.push_back(std::move(c));
        return l;
    }

    // coefficients c[0..] of z^low, z^{low+1}, ...
    static Laurent from_coeffs(int low, std::vector<T> c, T zero) {
        Laurent l(std::move(zero));
        l.low_ = low;
        l.c_ = std::move(c);
        return l;
    }

    bool empty() const { return c_.empty(); }
    int low() const { return low_; }
    int high() const { return low_ + static_cast<int>(c_.size()) - 1; }
    const T& zero() const { return zero_; }
    const std::vector<T>& coeffs() const { return c_; }

    const T& coeff(int e) const {
        if (c_.empty() || e < low_ || e > high()) return zero_;
        return c_[e - low_];
    }

    T& at(int e) {
        if (c_.empty()) {
            low_ = e;
            c_.push_back(zero_);
        } else if (e < low_) {
            c_.insert(c_.begin(), low_ - e, zero_);
            low_ = e;
        } else if (e > high()) {
            c_.resize(e - low_ + 1, zero_);
        }
        return c_[e - low_];
    }

    void add(int e, const T& v) { at(e) += v; }

    Laurent& operator+=(const Laurent& o) {
        for (int e = o.low(); e <= o.high(); ++e) add(e, o.coeff(e));
        return *this;
    }
    Laurent& operator-=(const Laurent& o) {
        for (int e = o.low(); e <= o.high(); ++e) at(e) -= o.coeff(e);
        return *this;
    }
    friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
    friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent r(a.zero_);
        if (a.empty() || b.empty()) return r;
        r.low_ = a.low_ + b.low_;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, a.zero_);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        return r;
    }

    Laurent scaled(const T& s) const {
        Laurent r = *this;
        for (auto& x : r.c_) x = x * s;
        return r;
    }

    // multiplication by z^s
    Laurent shifted(int s) const {
        Laurent r = *this;
        r.low_ += s;
        return r;
    }

    Laurent pow(int k, const T& one) const {
        if (k < 0) throw std::invalid_argument("negative Laurent power");
        Laurent r = monomial(0, one, zero_);
        Laurent base = *this;
        while (k) {
            if (k & 1) r = r * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return r;
    }

    // numeric rings only
    template <class Z>
    Z eval(const Z& z) const {
        if (c_.empty()) return Z(0);
        Z acc(0);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + Z(c_[k]);
        return acc * pow_int(z, low_);
    }

    Laurent derivative() const {
        Laurent r(zero_);
        for (int e = low_; e <= high(); ++e)
            if (e != 0) r.add(e - 1, coeff(e) * static_cast<typename T::value_type>(e));
        return r;
    }

    template <class Z>
    static Z pow_int(Z z, int e) {
        if (e < 0) {
            z = Z(1) / z;
            e = -e;
        }
        Z r(1);
        while (e) {
            if (e & 1) r *= z;
            e >>= 1;
            if (e) z *= z;
        }
        return r;
    }

private:
    int low_ = 0;
    std::vector<T> c_;
    T zero_{};
};

}  // namespace mobilium
