#include "heavy/multiples.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace heavy {

namespace {

// Membership of residue r/q for r = 0..q-1.
std::vector<bool> residue_hits(std::int64_t q, const IntervalUnion<Rational>& target)
{
    std::vector<bool> hits(static_cast<std::size_t>(q));
    for (std::int64_t r = 0; r < q; ++r)
        hits[static_cast<std::size_t>(r)] = target.contains(Rational(r, q));
    return hits;
}

}  // namespace

DeficitTrace<Rational> multiples_deficits(const Rational& x, const IntervalUnion<Rational>& target,
                                          std::size_t horizon)
{
    if (horizon == 0)
        throw std::invalid_argument("horizon must be at least 1");
    if (!in_unit_interval(x))
        throw std::invalid_argument("x must lie in [0,1)");

    const std::int64_t p = x.num();
    const std::int64_t q = x.den();
    const auto hits = residue_hits(q, target);
    const Rational length = target.length();

    DeficitTrace<Rational> trace;
    trace.deficits.reserve(horizon + 1);
    trace.deficits.push_back(Rational(0));
    std::int64_t r = 0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        r = (r + p) % q;
        Rational step = hits[static_cast<std::size_t>(r)] ? Rational(1) - length : -length;
        trace.deficits.push_back(trace.deficits.back() + step);
    }
    return trace;
}

DeficitTrace<double> multiples_deficits(double x, const IntervalUnion<double>& target, std::size_t horizon,
                                        double tolerance)
{
    if (horizon == 0)
        throw std::invalid_argument("horizon must be at least 1");
    if (!in_unit_interval(x))
        throw std::invalid_argument("x must lie in [0,1)");

    DeficitTrace<double> trace;
    trace.mode = NumericMode::approximate(tolerance);
    trace.deficits.reserve(horizon + 1);
    trace.deficits.push_back(0.0);
    const double length = target.length();
    for (std::size_t n = 1; n <= horizon; ++n) {
        // i x computed afresh each time; accumulating x would drift.
        double point = wrap_unit(static_cast<double>(n) * x);
        trace.deficits.push_back(trace.deficits.back() + ((target.contains(point) ? 1.0 : 0.0) - length));
    }
    return trace;
}

MultiplesDecision heavy_multiples_exact(const Rational& x, const IntervalUnion<Rational>& target)
{
    if (!in_unit_interval(x))
        throw std::invalid_argument("x must lie in [0,1)");

    const std::int64_t p = x.num();
    const std::int64_t q = x.den();
    const auto hits = residue_hits(q, target);

    // Work in units of 1/den(|target|) so the period is integer arithmetic.
    const Rational length = target.length();
    const std::int64_t scale = length.den();
    const std::int64_t per_step = length.num();

    MultiplesDecision out{x, target, std::nullopt, Rational(0), Rational(0)};
    std::int64_t d = 0;
    std::int64_t lowest = 0;
    std::int64_t r = 0;
    for (std::int64_t n = 1; n <= q; ++n) {
        r = (r + p) % q;
        d += (hits[static_cast<std::size_t>(r)] ? scale : 0) - per_step;
        if (n == 1 || d < lowest)
            lowest = d;
        if (d < 0 && !out.first_failure)
            out.first_failure = n;
    }
    out.period_surplus = Rational(d, scale);
    out.period_min = Rational(lowest, scale);
    // d_q is the surplus itself, so a first period with no failure has a
    // nonnegative surplus and d_{mq+r} = m surplus + d_r never fails later.
    return out;
}

Rational ContinuedFraction::value() const
{
    Rational v;
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) {
        if (*it <= 0)
            throw std::invalid_argument("partial quotients must be positive");
        v = Rational(1) / (Rational(*it) + v);
    }
    return Rational(a0) + v;
}

ContinuedFraction normalize(ContinuedFraction cf)
{
    auto& a = cf.quotients;
    for (auto v : a)
        if (v <= 0)
            throw std::invalid_argument("partial quotients must be positive");
    if (a.size() % 2 == 0)
        return cf;
    if (a.back() >= 2) {
        a.back() -= 1;
        a.push_back(1);
    } else if (a.size() >= 2) {
        a.pop_back();
        a.back() += 1;
    } else {
        // [a0; 1] = a0 + 1 has the empty even expansion.
        a.clear();
        cf.a0 += 1;
    }
    return cf;
}

ContinuedFraction cf_expand_normalized(const Rational& x)
{
    if (!in_unit_interval(x))
        throw std::invalid_argument("x must lie in [0,1)");
    ContinuedFraction cf;
    std::int64_t num = x.den();
    std::int64_t den = x.num();
    while (den != 0) {
        cf.quotients.push_back(num / den);
        std::int64_t rem = num % den;
        num = den;
        den = rem;
    }
    return normalize(std::move(cf));
}

bool odd_index_divisible(const ContinuedFraction& cf, std::int64_t k)
{
    if (!cf.normalized())
        throw std::invalid_argument("expansion is not normalized to even length");
    if (k <= 0)
        throw std::invalid_argument("divisor must be positive");
    for (std::size_t j = 0; j < cf.quotients.size(); j += 2)  // a_1, a_3, ...
        if (cf.quotients[j] % k != 0)
            return false;
    return true;
}

std::vector<const SweepRow*> SweepReport::mismatches() const
{
    std::vector<const SweepRow*> out;
    for (const auto& row : rows)
        if (!row.agree())
            out.push_back(&row);
    return out;
}

SweepReport characterization_sweep(std::int64_t k, std::int64_t q_max)
{
    if (k < 2 || q_max < 2)
        throw std::invalid_argument("sweep needs k >= 2 and q_max >= 2");

    SweepReport report;
    report.k = k;
    report.q_max = q_max;
    const auto target = IntervalUnion<Rational>::single(Rational(0), Rational(1, k));
    for (std::int64_t q = 2; q <= q_max; ++q) {
        for (std::int64_t p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1)
                continue;
            const Rational x(p, q);
            auto decision = heavy_multiples_exact(x, target);
            SweepRow row;
            row.p = p;
            row.q = q;
            row.cf = cf_expand_normalized(x);
            row.heavy = decision.heavy();
            row.divisible = odd_index_divisible(row.cf, k);
            row.surplus = decision.period_surplus;
            row.first_failure = decision.first_failure;
            if (row.agree())
                ++report.agreements;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

ScanResult heavy_multiples_scan(const IntervalUnion<Rational>& target, std::int64_t q,
                                std::optional<std::size_t> horizon)
{
    if (q < 1)
        throw std::invalid_argument("grid resolution must be at least 1");
    if (horizon && *horizon == 0)
        throw std::invalid_argument("horizon must be at least 1");

    ScanResult out;
    out.grid_size = static_cast<std::size_t>(q);
    for (std::int64_t i = 0; i < q; ++i) {
        const Rational x(i, q);
        bool heavy = horizon ? psi(multiples_deficits(x, target, *horizon)).heavy()
                             : heavy_multiples_exact(x, target).heavy();
        if (heavy)
            out.survivors.push_back(x);
    }
    out.survivor_fraction = static_cast<double>(out.survivors.size()) / static_cast<double>(q);
    return out;
}

}  // namespace heavy
