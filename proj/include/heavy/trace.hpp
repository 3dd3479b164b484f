#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "heavy/circle.hpp"

namespace heavy {

// Deficits at or above -tolerance count as nonnegative in approximate mode.
inline constexpr double default_tolerance = 1e-9;

struct NumericMode {
    bool exact = true;
    double tolerance = 0.0;

    static NumericMode approximate(double tolerance) { return {false, tolerance}; }
};

// Sign tests under a numeric mode. Exact mode ignores the tolerance.
template <Scalar T>
bool deficit_negative(const T& d, double tolerance)
{
    if constexpr (is_exact_v<T>)
        return d < T(0);
    else
        return d < -tolerance;
}

template <Scalar T>
bool deficit_zero(const T& d, double tolerance)
{
    if constexpr (is_exact_v<T>)
        return d == T(0);
    else
        return std::abs(d) <= tolerance;
}

// d_n = S_n(x) - n * mean for n = first_index .. first_index + size - 1.
// One-sided traces start at 0; two-sided traces start at some n1 <= 0.
// d_0 is always zero.
template <Scalar T>
struct DeficitTrace {
    std::int64_t first_index = 0;
    std::vector<T> deficits;
    NumericMode mode;

    std::int64_t last_index() const { return first_index + static_cast<std::int64_t>(deficits.size()) - 1; }
    std::int64_t horizon() const { return last_index(); }

    const T& at(std::int64_t n) const
    {
        if (n < first_index || n > last_index())
            throw std::out_of_range("trace index outside window");
        return deficits[static_cast<std::size_t>(n - first_index)];
    }
};

template <Scalar T>
struct HeavinessReport {
    // First n >= 1 with a negative deficit; empty means beyond the horizon.
    std::optional<std::int64_t> psi;
    // Minimum and first minimizer over 1..N (0 and 0 when the trace has no
    // positive times).
    T min_deficit = T(0);
    std::int64_t argmin_time = 0;
    std::vector<std::int64_t> zero_times;
    // Set for approximate traces: the verdict is a floating-point one.
    bool numerical = false;

    bool heavy() const { return !psi.has_value(); }
};

template <Scalar T>
HeavinessReport<T> psi(const DeficitTrace<T>& trace)
{
    if (trace.first_index > 0 || trace.last_index() < 0)
        throw std::invalid_argument("malformed trace: window must contain time 0");
    if (!deficit_zero(trace.at(0), 0.0))
        throw std::invalid_argument("malformed trace: d_0 must be zero");

    HeavinessReport<T> report;
    report.numerical = !trace.mode.exact;
    const double tol = trace.mode.tolerance;
    for (std::int64_t n = 1; n <= trace.last_index(); ++n) {
        const T& d = trace.at(n);
        if (n == 1 || d < report.min_deficit) {
            report.min_deficit = d;
            report.argmin_time = n;
        }
        if (!report.psi && deficit_negative(d, tol))
            report.psi = n;
        if (deficit_zero(d, tol))
            report.zero_times.push_back(n);
    }
    return report;
}

}  // namespace heavy
