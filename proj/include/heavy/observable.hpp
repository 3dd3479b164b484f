#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "heavy/circle.hpp"

namespace heavy {

// An observable is a callable f(point) with a known space average mean().
// Observables that are only defined on part of a space also expose
// contains(point), which trace computations check along the orbit.
template <class F, class P>
concept Observable = requires(const F& f, const P& p) {
    typename F::value_type;
    { f(p) } -> std::convertible_to<typename F::value_type>;
    { f.mean() } -> std::convertible_to<typename F::value_type>;
};

// Indicator of an interval union on the circle.
template <Scalar T>
class Indicator {
public:
    using value_type = T;

    explicit Indicator(IntervalUnion<T> set) : set_(std::move(set)) {}

    T operator()(const T& x) const { return set_.contains(x) ? T(1) : T(0); }
    T mean() const { return set_.length(); }
    const IntervalUnion<T>& set() const { return set_; }

private:
    IntervalUnion<T> set_;
};

// Piecewise-constant function on the circle: values[i] on
// [breakpoints[i], breakpoints[i+1]), the last piece running up to 1.
template <Scalar T>
class StepFunction {
public:
    using value_type = T;

    StepFunction(std::vector<T> breakpoints, std::vector<T> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values))
    {
        if (breakpoints_.empty() || breakpoints_.size() != values_.size())
            throw std::invalid_argument("step function needs one value per breakpoint");
        if (breakpoints_.front() != T(0))
            throw std::invalid_argument("step function breakpoints must start at 0");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i)
            if (!(breakpoints_[i - 1] < breakpoints_[i]))
                throw std::invalid_argument("step function breakpoints must increase");
        if (!(breakpoints_.back() < T(1)))
            throw std::invalid_argument("step function breakpoints must lie in [0,1)");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            T right = i + 1 < breakpoints_.size() ? breakpoints_[i + 1] : T(1);
            mean_ += values_[i] * (right - breakpoints_[i]);
        }
    }

    T operator()(const T& x) const
    {
        std::size_t i = 0;
        while (i + 1 < breakpoints_.size() && !(x < breakpoints_[i + 1]))
            ++i;
        return values_[i];
    }

    T mean() const { return mean_; }

private:
    std::vector<T> breakpoints_;
    std::vector<T> values_;
    T mean_ = T(0);
};

template <Scalar T, class P = T>
class Constant {
public:
    using value_type = T;

    explicit Constant(T c) : c_(std::move(c)) {}

    T operator()(const P&) const { return c_; }
    T mean() const { return c_; }

private:
    T c_;
};

// Values on the atoms {0..n-1} of a finite space, averaged with weights.
class Table {
public:
    using value_type = Rational;

    Table(std::vector<Rational> values, const std::vector<Rational>& weights) : values_(std::move(values))
    {
        if (values_.size() != weights.size())
            throw std::invalid_argument("table needs one value per atom");
        for (std::size_t i = 0; i < values_.size(); ++i)
            mean_ += weights[i] * values_[i];
    }

    bool contains(std::size_t atom) const { return atom < values_.size(); }
    Rational operator()(std::size_t atom) const { return values_.at(atom); }
    Rational mean() const { return mean_; }
    const std::vector<Rational>& values() const { return values_; }

private:
    std::vector<Rational> values_;
    Rational mean_;
};

// Lifts a circle observable to the torus through the last coordinate, i.e.
// f(x_1, ..., x_k) = g(x_k). Its torus average is the circle average of g.
template <class G>
class LastCoordinate {
public:
    using value_type = typename G::value_type;
    using scalar = value_type;

    LastCoordinate(G g, std::size_t dimension) : g_(std::move(g)), dimension_(dimension) {}

    bool contains(const TorusPoint<scalar>& p) const { return p.size() == dimension_; }
    value_type operator()(const TorusPoint<scalar>& p) const { return g_(p.back()); }
    value_type mean() const { return g_.mean(); }

private:
    G g_;
    std::size_t dimension_;
};

}  // namespace heavy
