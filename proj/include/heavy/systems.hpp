#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "heavy/circle.hpp"
#include "heavy/heaviness.hpp"

namespace heavy {

// Circle rotation x -> x + alpha mod 1.
template <Scalar T>
class Rotation {
public:
    using point_type = T;
    using scalar = T;

    explicit Rotation(T alpha) : alpha_(wrap_unit(alpha)) {}

    T step(const T& x) const { return wrap_unit(x + alpha_); }
    T inverse(const T& x) const { return wrap_unit(x - alpha_); }
    bool contains(const T& x) const { return in_unit_interval(x); }
    const T& alpha() const { return alpha_; }

private:
    T alpha_;
};

// x -> m x mod 1 for m >= 2. Not invertible, so two-sided operations do not
// accept it.
template <Scalar T>
class TimesM {
public:
    using point_type = T;
    using scalar = T;

    explicit TimesM(std::int64_t m) : m_(m)
    {
        if (m < 2)
            throw std::invalid_argument("multiplier must be at least 2");
    }

    T step(const T& x) const { return wrap_unit(x * T(m_)); }
    bool contains(const T& x) const { return in_unit_interval(x); }
    std::int64_t multiplier() const { return m_; }

private:
    std::int64_t m_;
};

// The triangular torus map
//   (x_1, ..., x_k) -> (x_1 + alpha, x_2 + x_1, ..., x_k + x_{k-1})  mod 1.
template <Scalar T>
class SkewProduct {
public:
    using point_type = TorusPoint<T>;
    using scalar = T;

    SkewProduct(T alpha, std::size_t k) : alpha_(wrap_unit(alpha)), k_(k)
    {
        if (k == 0)
            throw std::invalid_argument("torus dimension must be at least 1");
    }

    point_type step(const point_type& x) const
    {
        point_type y(k_);
        y[0] = wrap_unit(x[0] + alpha_);
        for (std::size_t i = 1; i < k_; ++i)
            y[i] = wrap_unit(x[i] + x[i - 1]);
        return y;
    }

    // Solved coordinate by coordinate starting from the first.
    point_type inverse(const point_type& x) const
    {
        point_type y(k_);
        y[0] = wrap_unit(x[0] - alpha_);
        for (std::size_t i = 1; i < k_; ++i)
            y[i] = wrap_unit(x[i] - y[i - 1]);
        return y;
    }

    bool contains(const point_type& x) const
    {
        if (x.size() != k_)
            return false;
        for (const auto& c : x)
            if (!in_unit_interval(c))
                return false;
        return true;
    }

    const T& alpha() const { return alpha_; }
    std::size_t dimension() const { return k_; }

private:
    T alpha_;
    std::size_t k_;
};

inline std::int64_t factorial(std::size_t k)
{
    std::int64_t out = 1;
    for (std::size_t i = 2; i <= k; ++i)
        out *= static_cast<std::int64_t>(i);
    return out;
}

// Skew product whose last coordinate runs through p(n) = alpha n^k + ... mod 1.
// The last coordinate of the displayed map has leading coefficient
// (first-coordinate increment) / k!, so the increment here is k! alpha.
template <Scalar T>
SkewProduct<T> polynomial_system(const T& alpha, std::size_t k)
{
    return SkewProduct<T>(wrap_unit(alpha * T(factorial(k))), k);
}

// Starting point for p(x) = alpha x^k + a[k-1] x^{k-1} + ... + a[0]: the
// finite-difference chain q_k = p, q_{i-1}(x) = q_i(x+1) - q_i(x) evaluated
// at 0, i.e. (Delta^{k-1} p(0), ..., Delta p(0), p(0)) mod 1.
template <Scalar T>
TorusPoint<T> coeffs_to_point(const T& alpha, const std::vector<T>& coeffs)
{
    const std::size_t k = coeffs.size();
    if (k == 0)
        throw std::invalid_argument("polynomial degree must be at least 1");

    // p(0), ..., p(k-1) mod 1 by Horner with the integer argument.
    std::vector<T> values(k);
    for (std::size_t n = 0; n < k; ++n) {
        T v = alpha;
        for (std::size_t i = k; i-- > 0;)
            v = wrap_unit(v * T(static_cast<std::int64_t>(n)) + coeffs[i]);
        values[n] = v;
    }

    TorusPoint<T> point(k);
    for (std::size_t order = 0; order < k; ++order) {
        point[k - 1 - order] = values[0];
        for (std::size_t n = 0; n + 1 < values.size(); ++n)
            values[n] = wrap_unit(values[n + 1] - values[n]);
        values.pop_back();
    }
    return point;
}

// Last coordinate of start, T start, ..., T^{N-1} start.
template <Scalar T>
std::vector<T> point_to_sequence(const SkewProduct<T>& system, TorusPoint<T> start, std::size_t count)
{
    if (!system.contains(start))
        throw std::invalid_argument("start point dimension does not match the system");
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        out.push_back(start.back());
        if (n + 1 < count)
            start = system.step(start);
    }
    return out;
}

// The Morse sequence 0110 1001 ..., the fixed point of 0 -> 01, 1 -> 10.
//
// A prefix is generated by iterating the substitution. Positions past the
// stored prefix are still answered: the image of symbol n occupies positions
// 2n and 2n+1, so bit(2n + r) = bit(n) xor r.
class MorseSequence {
public:
    explicit MorseSequence(std::size_t prefix_length = 1024);

    int bit(std::uint64_t n) const;
    std::size_t prefix_length() const { return bits_.size(); }
    const std::vector<std::uint8_t>& prefix() const { return bits_; }

private:
    std::vector<std::uint8_t> bits_;
};

std::string morse_prefix(std::size_t length);

// Shift on the orbit of the Morse sequence. A point is an offset p standing
// for T^p x; the shift adds one.
class MorseShift {
public:
    using point_type = std::uint64_t;

    point_type step(point_type p) const { return p + 1; }
    bool contains(point_type) const { return true; }
};

// Indicator of {y : y_1 = 1}, with the invariant measure's value 1/2.
class MorseBit {
public:
    using value_type = Rational;

    explicit MorseBit(const MorseSequence& seq) : seq_(&seq) {}

    Rational operator()(std::uint64_t offset) const { return Rational(seq_->bit(offset)); }
    Rational mean() const { return Rational(1, 2); }

private:
    const MorseSequence* seq_;
};

// Deficits sum_{i<n} (bit_{p+i} - 1/2) for n = 1..horizon, kept doubled so
// they are integers.
struct MorseProfile {
    std::int64_t min_twice_deficit = 0;
    std::uint64_t zero_count = 0;
    bool heavy() const { return min_twice_deficit >= 0; }
};

MorseProfile morse_profile(const MorseSequence& seq, std::uint64_t offset, std::uint64_t horizon);

}  // namespace heavy
