#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "heavy/rational.hpp"

namespace heavy {

// Scalars are either exact (Rational) or approximate (double).
template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
concept Scalar = std::is_same_v<T, Rational> || std::is_same_v<T, double>;

inline Rational wrap_unit(const Rational& x) { return x.frac(); }

inline double wrap_unit(double x)
{
    double r = x - std::floor(x);
    // A tiny negative input can round up to exactly 1.
    return r >= 1.0 ? 0.0 : r;
}

template <Scalar T>
T scalar_from(const Rational& r)
{
    if constexpr (is_exact_v<T>)
        return r;
    else
        return r.to_double();
}

inline double to_double(const Rational& r) { return r.to_double(); }
inline double to_double(double x) { return x; }

template <Scalar T>
bool in_unit_interval(const T& x)
{
    return !(x < T(0)) && x < T(1);
}

// Point of the k-torus; every coordinate lies in [0, 1).
template <Scalar T>
using TorusPoint = std::vector<T>;

// Finite union of half-open arcs [a, b) of the circle [0, 1), sorted and
// pairwise disjoint (touching endpoints are allowed).
template <Scalar T>
class IntervalUnion {
public:
    IntervalUnion() = default;

    explicit IntervalUnion(std::vector<std::pair<T, T>> intervals)
        : intervals_(std::move(intervals))
    {
        for (std::size_t i = 0; i < intervals_.size(); ++i) {
            const auto& [a, b] = intervals_[i];
            if (a < T(0) || !(a < b) || T(1) < b)
                throw std::invalid_argument("interval must satisfy 0 <= a < b <= 1");
            if (i > 0 && a < intervals_[i - 1].second)
                throw std::invalid_argument("intervals must be sorted and disjoint");
            length_ += b - a;
        }
    }

    static IntervalUnion single(T a, T b) { return IntervalUnion({{std::move(a), std::move(b)}}); }

    bool contains(const T& x) const
    {
        for (const auto& [a, b] : intervals_) {
            if (x < a)
                return false;
            if (x < b)
                return true;
        }
        return false;
    }

    const T& length() const { return length_; }
    const std::vector<std::pair<T, T>>& intervals() const { return intervals_; }

    template <Scalar U>
    IntervalUnion<U> as() const
    {
        std::vector<std::pair<U, U>> out;
        out.reserve(intervals_.size());
        for (const auto& [a, b] : intervals_)
            out.emplace_back(convert<U>(a), convert<U>(b));
        return IntervalUnion<U>(std::move(out));
    }

private:
    template <Scalar U>
    static U convert(const T& v)
    {
        if constexpr (std::is_same_v<U, T>)
            return v;
        else if constexpr (is_exact_v<T>)
            return v.to_double();
        else
            static_assert(!sizeof(U), "cannot convert an approximate interval to an exact one");
    }

    std::vector<std::pair<T, T>> intervals_;
    T length_ = T(0);
};

}  // namespace heavy
