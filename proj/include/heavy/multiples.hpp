#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "heavy/circle.hpp"
#include "heavy/trace.hpp"

namespace heavy {

// Deficits of the sequence x, 2x, 3x, ... (mod 1) against a target set:
// d_n = #{1 <= i <= n : i x mod 1 in target} - n |target|.
DeficitTrace<Rational> multiples_deficits(const Rational& x, const IntervalUnion<Rational>& target,
                                          std::size_t horizon);
DeficitTrace<double> multiples_deficits(double x, const IntervalUnion<double>& target, std::size_t horizon,
                                        double tolerance = default_tolerance);

struct MultiplesDecision {
    Rational x;
    IntervalUnion<Rational> target;
    // Smallest N with d_N < 0; empty when the sequence is heavy for all N.
    std::optional<std::int64_t> first_failure;
    // Hits over one period q minus q |target|; d_{mq+r} = m surplus + d_r.
    Rational period_surplus;
    // Smallest deficit over the first period.
    Rational period_min;

    bool heavy() const { return !first_failure.has_value(); }
};

// Exact all-N decision for rational x = p/q using the q-periodicity of i x mod 1.
MultiplesDecision heavy_multiples_exact(const Rational& x, const IntervalUnion<Rational>& target);

// [a0; a1, ..., am]; a0 = 0 for x in [0, 1). Quotients are indexed from 1.
struct ContinuedFraction {
    std::int64_t a0 = 0;
    std::vector<std::int64_t> quotients;

    bool normalized() const { return quotients.size() % 2 == 0; }
    Rational value() const;
};

// Euclidean expansion of x in [0, 1) rewritten to an even number of partial
// quotients: [..., a] with a >= 2 becomes [..., a - 1, 1]. Zero has the
// empty expansion.
ContinuedFraction cf_expand_normalized(const Rational& x);

// Brings any valid expansion to even length without changing its value.
ContinuedFraction normalize(ContinuedFraction cf);

// k divides a_j for every odd j. Rejects expansions of odd length.
bool odd_index_divisible(const ContinuedFraction& cf, std::int64_t k);

struct SweepRow {
    std::int64_t p = 0;
    std::int64_t q = 0;
    bool heavy = false;
    bool divisible = false;
    Rational surplus;
    std::optional<std::int64_t> first_failure;
    ContinuedFraction cf;

    bool agree() const { return heavy == divisible; }
};

struct SweepReport {
    std::int64_t k = 0;
    std::int64_t q_max = 0;
    std::vector<SweepRow> rows;
    std::size_t agreements = 0;

    std::vector<const SweepRow*> mismatches() const;
};

// Every reduced p/q with 1 <= p < q <= q_max, compared on [0, 1/k).
SweepReport characterization_sweep(std::int64_t k, std::int64_t q_max);

struct ScanResult {
    std::vector<Rational> survivors;
    std::size_t grid_size = 0;
    double survivor_fraction = 0.0;
};

// Grid points i/q, i = 0..q-1, whose multiples are heavy for target: for all N
// when horizon is empty, else through the horizon.
ScanResult heavy_multiples_scan(const IntervalUnion<Rational>& target, std::int64_t q,
                                std::optional<std::size_t> horizon = std::nullopt);

}  // namespace heavy
