#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "mobilium/series.hpp"

namespace mobilium {

class GuardViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Exec { serial, parallel };

template <class T>
inline void accumulate_product(T& acc, const T& a, const T& b) {
    acc += a * b;
}

template <>
inline void accumulate_product<Series>(Series& acc, const Series& a, const Series& b) {
    if (a.is_zero() || b.is_zero()) return;
    acc.add_product(a, b);
}

template <class T>
inline bool ring_is_zero(const T& x) {
    return x == T(0);
}

template <>
inline bool ring_is_zero<Series>(const Series& x) {
    return x.is_zero();
}

// M x M window of a semi-infinite band matrix. Entries outside the band read
// as zero; rows at or beyond size - guard are untrusted.
template <class T>
class BandWindow {
public:
    BandWindow() = default;
    BandWindow(int size, int lower, int upper, T zero, int guard = 0)
        : size_(size), lower_(lower), upper_(upper), guard_(guard), zero_(std::move(zero)),
          data_(static_cast<std::size_t>(size) * (lower + upper + 1), zero_) {}

    int size() const { return size_; }
    int lower() const { return lower_; }
    int upper() const { return upper_; }
    int guard() const { return guard_; }
    void set_guard(int g) { guard_ = g; }
    int trusted() const { return size_ - guard_; }
    const T& zero() const { return zero_; }

    bool in_band(int i, int j) const {
        return i >= 0 && j >= 0 && i < size_ && j < size_ && j >= i - lower_ && j <= i + upper_;
    }

    const T& operator()(int i, int j) const {
        if (!in_band(i, j)) return zero_;
        return data_[slot(i, j)];
    }

    T& at(int i, int j) {
        if (!in_band(i, j))
            throw std::out_of_range("band entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside storage");
        return data_[slot(i, j)];
    }

    // Entry that must lie in the trusted interior.
    const T& trusted_at(int i, int j) const {
        if (std::max(i, j) >= trusted())
            throw GuardViolation("entry (" + std::to_string(i) + "," + std::to_string(j) + ") touches the guard band");
        return (*this)(i, j);
    }

    bool operator==(const BandWindow& o) const {
        if (size_ != o.size_) return false;
        int lo = std::max(lower_, o.lower_), up = std::max(upper_, o.upper_);
        for (int i = 0; i < size_; ++i)
            for (int j = std::max(0, i - lo); j <= std::min(size_ - 1, i + up); ++j)
                if (!((*this)(i, j) == o(i, j))) return false;
        return true;
    }

private:
    std::size_t slot(int i, int j) const {
        return static_cast<std::size_t>(i) * (lower_ + upper_ + 1) + (j - i + lower_);
    }

    int size_ = 0, lower_ = 0, upper_ = 0, guard_ = 0;
    T zero_{};
    std::vector<T> data_;
};

template <class T>
BandWindow<T> identity_like(const BandWindow<T>& a, const T& one) {
    BandWindow<T> id(a.size(), 0, 0, a.zero(), a.guard());
    for (int i = 0; i < a.size(); ++i) id.at(i, i) = one;
    return id;
}

namespace detail {

template <class T>
void multiply_row(const BandWindow<T>& a, const BandWindow<T>& b, BandWindow<T>& c, int i) {
    int M = a.size();
    for (int j = std::max(0, i - c.lower()); j <= std::min(M - 1, i + c.upper()); ++j) {
        int lo = std::max({0, i - a.lower(), j - b.upper()});
        int hi = std::min({M - 1, i + a.upper(), j + b.lower()});
        T& dst = c.at(i, j);
        for (int l = lo; l <= hi; ++l) accumulate_product(dst, a(i, l), b(l, j));
    }
}

}  // namespace detail

// Reference kernel: plain row loop.
template <class T>
BandWindow<T> multiply_serial(const BandWindow<T>& a, const BandWindow<T>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("window sizes differ");
    BandWindow<T> c(a.size(), a.lower() + b.lower(), a.upper() + b.upper(), a.zero(), std::max(a.guard(), b.guard()));
    for (int i = 0; i < a.size(); ++i) detail::multiply_row(a, b, c, i);
    return c;
}

// Rows are independent, so they are distributed over OpenMP threads.
template <class T>
BandWindow<T> multiply_parallel(const BandWindow<T>& a, const BandWindow<T>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("window sizes differ");
    BandWindow<T> c(a.size(), a.lower() + b.lower(), a.upper() + b.upper(), a.zero(), std::max(a.guard(), b.guard()));
    int M = a.size();
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < M; ++i) detail::multiply_row(a, b, c, i);
    return c;
}

template <class T>
BandWindow<T> multiply(const BandWindow<T>& a, const BandWindow<T>& b, Exec exec = Exec::parallel) {
    return exec == Exec::serial ? multiply_serial(a, b) : multiply_parallel(a, b);
}

// A^0 .. A^kmax
template <class T>
std::vector<BandWindow<T>> powers(const BandWindow<T>& a, int kmax, const T& one, Exec exec = Exec::parallel) {
    std::vector<BandWindow<T>> out;
    out.push_back(identity_like(a, one));
    for (int k = 1; k <= kmax; ++k) out.push_back(k == 1 ? a : multiply(out.back(), a, exec));
    return out;
}

// Entry of A^k. The product only ever visits indices within k*max(band) of
// (i, j), so the request is refused when that strip leaves the trusted rows.
template <class T>
T power_entry(const BandWindow<T>& a, int k, int i, int j, const T& one) {
    if (k < 0) throw std::invalid_argument("negative power");
    int reach = std::max(i, j) + k * std::max(a.lower(), a.upper());
    if (i < 0 || j < 0 || reach >= a.trusted())
        throw GuardViolation("power_entry(" + std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j) +
                             ") needs rows beyond the trusted window");
    // vector-matrix products on the row e_i
    int M = a.size();
    std::vector<T> row(M, a.zero());
    row[i] = one;
    int lo = i, hi = i;
    for (int s = 0; s < k; ++s) {
        std::vector<T> next(M, a.zero());
        int nlo = std::max(0, lo - a.lower()), nhi = std::min(M - 1, hi + a.upper());
        for (int l = lo; l <= hi; ++l) {
            if (ring_is_zero(row[l])) continue;
            for (int c = std::max(0, l - a.lower()); c <= std::min(M - 1, l + a.upper()); ++c)
                accumulate_product(next[c], row[l], a(l, c));
        }
        row.swap(next);
        lo = nlo;
        hi = nhi;
    }
    return row[j];
}

enum class Part { upper, lower, full };

// sum_k weights[k] * A^(k-1), keeping j >= i (upper), j <= i (lower) or all
// entries. weights[0] is ignored so that weights[k] multiplies A^(k-1).
template <class T>
BandWindow<T> apply_potential(const std::vector<BandWindow<T>>& pw, const std::vector<T>& weights, Part part) {
    const BandWindow<T>& base = pw.front();
    int kmax = static_cast<int>(weights.size()) - 1;
    if (kmax > static_cast<int>(pw.size()))
        throw std::invalid_argument("not enough powers for the potential");
    int lower = 0, upper = 0;
    for (int k = 1; k <= kmax; ++k) {
        lower = std::max(lower, pw[k - 1].lower());
        upper = std::max(upper, pw[k - 1].upper());
    }
    if (part == Part::upper) lower = 0;
    if (part == Part::lower) upper = 0;
    BandWindow<T> out(base.size(), lower, upper, base.zero(), base.guard());
    for (int k = 1; k <= kmax; ++k) {
        if (ring_is_zero(weights[k])) continue;
        const BandWindow<T>& a = pw[k - 1];
        for (int i = 0; i < a.size(); ++i)
            for (int j = std::max(0, i - lower); j <= std::min(a.size() - 1, i + upper); ++j)
                if (!ring_is_zero(a(i, j))) accumulate_product(out.at(i, j), weights[k], a(i, j));
    }
    return out;
}

template <class T>
BandWindow<T> apply_potential(const BandWindow<T>& a, const std::vector<T>& weights, const T& one, Part part,
                              Exec exec = Exec::parallel) {
    int kmax = static_cast<int>(weights.size()) - 1;
    return apply_potential(powers(a, std::max(0, kmax - 1), one, exec), weights, part);
}

template <class T>
BandWindow<T> subtract(const BandWindow<T>& a, const BandWindow<T>& b) {
    BandWindow<T> c(a.size(), std::max(a.lower(), b.lower()), std::max(a.upper(), b.upper()), a.zero(),
                    std::max(a.guard(), b.guard()));
    for (int i = 0; i < a.size(); ++i)
        for (int j = std::max(0, i - c.lower()); j <= std::min(a.size() - 1, i + c.upper()); ++j) {
            T v = a(i, j);
            v -= b(i, j);
            c.at(i, j) = std::move(v);
        }
    return c;
}

// [P, Q] = PQ - QP. Rows within the widened guard are dropped from trust.
template <class T>
BandWindow<T> commutator(const BandWindow<T>& p, const BandWindow<T>& q, Exec exec = Exec::parallel) {
    BandWindow<T> c = subtract(multiply(p, q, exec), multiply(q, p, exec));
    c.set_guard(std::min(c.size(), std::max(p.guard(), q.guard()) + std::max({p.lower(), p.upper(), q.lower(), q.upper()})));
    return c;
}

template <class T>
std::vector<T> commutator_diag(const BandWindow<T>& p, const BandWindow<T>& q, Exec exec = Exec::parallel) {
    BandWindow<T> c = commutator(p, q, exec);
    std::vector<T> d;
    for (int i = 0; i < c.trusted(); ++i) d.push_back(c(i, i));
    return d;
}

}  // namespace mobilium
