#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "heavy/observable.hpp"
#include "heavy/trace.hpp"

namespace heavy {

template <class S>
concept DynamicalSystem = requires(const S& s, const typename S::point_type& p) {
    { s.step(p) } -> std::same_as<typename S::point_type>;
    { s.contains(p) } -> std::same_as<bool>;
};

// Two-sided operations need T^{-1}; non-invertible maps do not model this.
template <class S>
concept InvertibleSystem = DynamicalSystem<S> && requires(const S& s, const typename S::point_type& p) {
    { s.inverse(p) } -> std::same_as<typename S::point_type>;
};

namespace detail {

template <class Sys, class F>
void require_point(const Sys& sys, const F& f, const typename Sys::point_type& x)
{
    if (!sys.contains(x))
        throw std::domain_error("point outside the system's domain");
    if constexpr (requires { f.contains(x); }) {
        if (!f.contains(x))
            throw std::domain_error("observable is not defined at an orbit point");
    }
}

template <class F>
NumericMode mode_for(double tolerance)
{
    if constexpr (is_exact_v<typename F::value_type>)
        return {};
    else
        return NumericMode::approximate(tolerance);
}

// min over 1..N of d_n without storing the trace.
template <DynamicalSystem Sys, Observable<typename Sys::point_type> F>
typename F::value_type min_deficit(const Sys& sys, typename Sys::point_type x, const F& f, std::size_t horizon)
{
    using T = typename F::value_type;
    const T mean = f.mean();
    T d = T(0);
    T best = T(0);
    for (std::size_t n = 1; n <= horizon; ++n) {
        require_point(sys, f, x);
        d += f(x) - mean;
        if (n == 1 || d < best)
            best = d;
        if (n < horizon)
            x = sys.step(x);
    }
    return best;
}

}  // namespace detail

// Forward deficits d_0..d_N of x, d_n = sum_{i<n} f(T^i x) - n * mean(f).
template <DynamicalSystem Sys, Observable<typename Sys::point_type> F>
DeficitTrace<typename F::value_type> deficit_trace(const Sys& sys, typename Sys::point_type x, const F& f,
                                                   std::size_t horizon, double tolerance = default_tolerance)
{
    using T = typename F::value_type;
    if (horizon == 0)
        throw std::invalid_argument("horizon must be at least 1");

    DeficitTrace<T> trace;
    trace.mode = detail::mode_for<F>(tolerance);
    trace.deficits.reserve(horizon + 1);
    trace.deficits.push_back(T(0));
    const T mean = f.mean();
    for (std::size_t n = 1; n <= horizon; ++n) {
        detail::require_point(sys, f, x);
        trace.deficits.push_back(trace.deficits.back() + (f(x) - mean));
        if (n < horizon)
            x = sys.step(x);
    }
    return trace;
}

// x in H(N). Every point is heavy through time 0.
template <DynamicalSystem Sys, Observable<typename Sys::point_type> F>
bool heavy_through(const Sys& sys, const typename Sys::point_type& x, const F& f, std::size_t horizon,
                   double tolerance = default_tolerance)
{
    if (horizon == 0) {
        detail::require_point(sys, f, x);
        return true;
    }
    return psi(deficit_trace(sys, x, f, horizon, tolerance)).heavy();
}

// Deficits over n1..n2 with n1 <= 0 <= n2. For n < 0,
// S_n(x) = -(f(T^{-1}x) + ... + f(T^{n}x)).
template <InvertibleSystem Sys, Observable<typename Sys::point_type> F>
DeficitTrace<typename F::value_type> two_sided_trace(const Sys& sys, const typename Sys::point_type& x, const F& f,
                                                     std::int64_t n1, std::int64_t n2,
                                                     double tolerance = default_tolerance)
{
    using T = typename F::value_type;
    if (n1 > 0 || n2 < 0)
        throw std::invalid_argument("two-sided window must satisfy n1 <= 0 <= n2");

    const T mean = f.mean();
    std::vector<T> backward;  // d_{-1}, d_{-2}, ...
    backward.reserve(static_cast<std::size_t>(-n1));
    detail::require_point(sys, f, x);
    T d = T(0);
    auto y = x;
    for (std::int64_t j = 1; j <= -n1; ++j) {
        y = sys.inverse(y);
        detail::require_point(sys, f, y);
        d -= f(y) - mean;
        backward.push_back(d);
    }

    DeficitTrace<T> trace;
    trace.first_index = n1;
    trace.mode = detail::mode_for<F>(tolerance);
    trace.deficits.assign(backward.rbegin(), backward.rend());
    trace.deficits.push_back(T(0));
    d = T(0);
    y = x;
    for (std::int64_t n = 1; n <= n2; ++n) {
        detail::require_point(sys, f, y);
        d += f(y) - mean;
        trace.deficits.push_back(d);
        if (n < n2)
            y = sys.step(y);
    }
    return trace;
}

// x in H(n1, n2): d_i >= 0 for every i in [n1, n2]. Windows not containing 0
// are accepted too.
template <InvertibleSystem Sys, Observable<typename Sys::point_type> F>
bool heavy_window(const Sys& sys, const typename Sys::point_type& x, const F& f, std::int64_t n1, std::int64_t n2,
                  double tolerance = default_tolerance)
{
    if (n1 > n2)
        throw std::invalid_argument("window must satisfy n1 <= n2");
    auto trace = two_sided_trace(sys, x, f, std::min<std::int64_t>(n1, 0), std::max<std::int64_t>(n2, 0), tolerance);
    for (std::int64_t n = n1; n <= n2; ++n)
        if (deficit_negative(trace.at(n), trace.mode.tolerance))
            return false;
    return true;
}

template <class P, Scalar T>
struct HeavyCandidate {
    std::size_t index = 0;
    P point;
    HeavinessReport<T> report;
};

// Candidate maximizing min_{1<=n<=N} d_n; ties go to the lowest index. The
// caller decides whether report.min_deficit >= 0, i.e. whether a point heavy
// through N was found. Candidates are scored on up to `threads` workers.
template <DynamicalSystem Sys, Observable<typename Sys::point_type> F>
HeavyCandidate<typename Sys::point_type, typename F::value_type>
find_heavy_candidate(const Sys& sys, const F& f, std::size_t horizon,
                     std::span<const typename Sys::point_type> candidates, double tolerance = default_tolerance,
                     unsigned threads = 0)
{
    using T = typename F::value_type;
    if (candidates.empty())
        throw std::invalid_argument("candidate source is empty");
    if (horizon == 0)
        throw std::invalid_argument("horizon must be at least 1");

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, candidates.size()));

    struct Best {
        std::size_t index = 0;
        std::optional<T> score;
    };
    std::vector<Best> best(threads);
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (candidates.size() + threads - 1) / threads;

    auto work = [&](unsigned w) {
        try {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(candidates.size(), lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                T score = detail::min_deficit(sys, candidates[i], f, horizon);
                if (!best[w].score || *best[w].score < score)
                    best[w] = {i, score};
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    Best overall;
    for (const auto& b : best)
        if (b.score && (!overall.score || *overall.score < *b.score))
            overall = b;

    HeavyCandidate<typename Sys::point_type, T> out;
    out.index = overall.index;
    out.point = candidates[overall.index];
    out.report = psi(deficit_trace(sys, out.point, f, horizon, tolerance));
    return out;
}

template <class P>
struct TwoSidedWitness {
    P point;
    // Largest verified symmetric window: point lies in H(-window, window).
    std::int64_t window = 0;
    // Orbit times of x0: T^i x0 in H(-N, 0), T^j x0 in H(0, N), and the point
    // is T^k x0 with k the first minimizer of S_k(x0) over [i, j].
    std::int64_t i = 0;
    std::int64_t j = 0;
    std::int64_t k = 0;
};

// Walks the forward orbit of x0 for up to max_steps steps looking for an
// entry into H(-N, 0) followed by an entry into H(0, N), then returns the
// orbit point where the partial sums bottom out in between.
template <InvertibleSystem Sys, Observable<typename Sys::point_type> F>
std::optional<TwoSidedWitness<typename Sys::point_type>>
two_sided_search(const Sys& sys, const F& f, std::int64_t horizon, const typename Sys::point_type& x0,
                 std::int64_t max_steps, double tolerance = default_tolerance)
{
    using T = typename F::value_type;
    using P = typename Sys::point_type;
    if (max_steps < 1)
        throw std::invalid_argument("max steps must be at least 1");
    if (horizon < 0)
        throw std::invalid_argument("window must be nonnegative");

    std::vector<P> orbit{x0};
    std::vector<T> partial{T(0)};
    const T mean = f.mean();
    detail::require_point(sys, f, x0);
    for (std::int64_t t = 1; t <= max_steps; ++t) {
        partial.push_back(partial.back() + (f(orbit.back()) - mean));
        orbit.push_back(sys.step(orbit.back()));
    }

    std::optional<std::int64_t> entry_back;
    for (std::int64_t t = 0; t < max_steps && !entry_back; ++t)
        if (heavy_window(sys, orbit[t], f, -horizon, 0, tolerance))
            entry_back = t;
    if (!entry_back)
        return std::nullopt;

    std::optional<std::int64_t> entry_fwd;
    for (std::int64_t t = *entry_back + 1; t <= max_steps && !entry_fwd; ++t)
        if (heavy_window(sys, orbit[t], f, 0, horizon, tolerance))
            entry_fwd = t;
    if (!entry_fwd)
        return std::nullopt;

    std::int64_t k = *entry_back;
    for (std::int64_t t = *entry_back + 1; t <= *entry_fwd; ++t)
        if (partial[t] < partial[k])
            k = t;

    TwoSidedWitness<P> out{orbit[k], 0, *entry_back, *entry_fwd, k};
    for (std::int64_t w = horizon; w > 0; --w) {
        if (heavy_window(sys, out.point, f, -w, w, tolerance)) {
            out.window = w;
            break;
        }
    }
    return out;
}

}  // namespace heavy
