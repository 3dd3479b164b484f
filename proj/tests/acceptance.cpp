// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "heavy/heavy.hpp"
#include "oracles.hpp"

using namespace heavy;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (pass)
            detail = why;
        pass = false;
    }
};

// 1. Random finite systems: H(N) nonempty and certificates hold.
Outcome positive_measure_sweep()
{
    Outcome out;
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> atoms(1, 10);
    std::size_t checks = 0;
    for (int s = 0; s < 500; ++s) {
        auto sys = random_finite_system(rng, atoms(rng));
        for (std::size_t N = 1; N <= 20; ++N) {
            auto cert = verify_positive_measure(sys, N);
            ++checks;
            if (!cert.heavy_nonempty)
                out.fail("H(" + std::to_string(N) + ") empty for\n" + sys.to_text());
            if (!cert.holds())
                out.fail("certificate failed at N=" + std::to_string(N) + " for\n" + sys.to_text());
        }
    }
    if (out.pass)
        out.detail = std::to_string(checks) + " certificates";
    return out;
}

// 2. Identity on two atoms with f = (1, -1).
Outcome two_point_counterexample()
{
    Outcome out;
    auto sys = FiniteSystem::uniform({0, 1}, {1, -1});
    auto t = two_sided_trace(sys, std::size_t{0}, sys.observable(), -5, 5);
    for (std::int64_t n = -5; n <= 5; ++n)
        if (t.at(n) != Rational(n))
            out.fail("S_" + std::to_string(n) + "(0) = " + t.at(n).str());
    auto u = two_sided_trace(sys, std::size_t{1}, sys.observable(), -5, 5);
    for (std::int64_t n = -5; n <= 5; ++n)
        if (u.at(n) != Rational(-n))
            out.fail("S_" + std::to_string(n) + "(1) = " + u.at(n).str());
    if (!window_set_exact(sys, -1, 1).empty())
        out.fail("H(-1,1) nonempty");
    if (out.pass)
        out.detail = "S_n(0) = n on [-5,5], H(-1,1) empty";
    return out;
}

// 3. Single cycles keep every window nonempty; two cycles with an invariant
//    indicator empty H(-1, 1).
Outcome ergodic_dichotomy()
{
    Outcome out;
    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<std::size_t> atoms(2, 10);
    for (int s = 0; s < 100; ++s) {
        auto base = random_finite_system(rng, atoms(rng), true);
        auto cyc = cycle_system(base.f_values());
        for (std::int64_t N = 1; N <= 20; ++N)
            if (window_set_exact(cyc, -N, N).empty())
                out.fail("H(-N,N) empty for a single cycle at N=" + std::to_string(N) + "\n" + cyc.to_text());
    }

    std::size_t converse = 0;
    for (std::size_t a = 1; a <= 5; ++a) {
        for (std::size_t b = 1; b <= 5; ++b) {
            // Cycle A on atoms 0..a-1, cycle B on a..a+b-1; f = chi_A - a/(a+b).
            const std::size_t n = a + b;
            std::vector<std::size_t> perm(n);
            std::vector<Rational> f(n);
            for (std::size_t i = 0; i < n; ++i) {
                perm[i] = i < a ? (i + 1) % a : a + (i - a + 1) % b;
                f[i] = (i < a ? Rational(1) : Rational(0)) - Rational(static_cast<std::int64_t>(a),
                                                                      static_cast<std::int64_t>(n));
            }
            auto sys = FiniteSystem::uniform(perm, f);
            if (sys.cycles().size() != 2)
                out.fail("expected two cycles");
            if (!window_set_exact(sys, -1, 1).empty())
                out.fail("H(-1,1) nonempty for the invariant indicator\n" + sys.to_text());
            ++converse;
        }
    }
    if (out.pass)
        out.detail = "100 single cycles x N<=20, " + std::to_string(converse) + " two-cycle systems";
    return out;
}

// 4. Morse words starting with 11 are heavy for {y_1 = 1} through 2^16 and
//    return to zero deficit at least 100 times.
Outcome morse_heaviness()
{
    Outcome out;
    const std::uint64_t total = std::uint64_t{1} << 18;
    const std::uint64_t positions = std::uint64_t{1} << 17;
    const std::uint64_t horizon = std::uint64_t{1} << 16;
    MorseSequence seq(total);

    std::vector<std::uint64_t> starts;
    for (std::uint64_t p = 0; p < positions; ++p)
        if (seq.bit(p) == 1 && seq.bit(p + 1) == 1)
            starts.push_back(p);
    // Cross-check the generator against the digit-sum oracle on the whole prefix.
    for (std::uint64_t n = 0; n < total; ++n)
        if (seq.bit(n) != oracle::morse_bit(n)) {
            out.fail("generator disagrees with digit-sum parity at " + std::to_string(n));
            return out;
        }

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> errors(workers);
    std::vector<std::uint64_t> fewest_zeros(workers, ~std::uint64_t{0});
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < starts.size(); i += workers) {
                auto prof = morse_profile(seq, starts[i], horizon);
                fewest_zeros[w] = std::min(fewest_zeros[w], prof.zero_count);
                if ((!prof.heavy() || prof.zero_count < 100) && errors[w].empty())
                    errors[w] = "p=" + std::to_string(starts[i]) + " min2d=" +
                                std::to_string(prof.min_twice_deficit) + " zeros=" + std::to_string(prof.zero_count);
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (!e.empty())
            out.fail(e);
    if (starts.empty())
        out.fail("no positions with 11");
    if (out.pass) {
        auto fewest = *std::min_element(fewest_zeros.begin(), fewest_zeros.end());
        out.detail = std::to_string(starts.size()) + " positions, fewest zero returns " + std::to_string(fewest);
    }
    return out;
}

// 5. CF characterization for k = 2, 3, 4 and q <= 300.
Outcome cf_characterization()
{
    Outcome out;
    std::ostringstream detail;
    for (std::int64_t k : {2, 3, 4}) {
        auto sweep = characterization_sweep(k, 300);
        detail << "k=" << k << ": " << sweep.agreements << "/" << sweep.rows.size() << "  ";
        for (const auto* row : sweep.mismatches()) {
            std::ostringstream m;
            m << "k=" << k << " x=" << row->p << "/" << row->q << " heavy=" << row->heavy
              << " divisible=" << row->divisible << " surplus=" << row->surplus << " cf=[0;";
            for (auto a : row->cf.quotients)
                m << ' ' << a;
            m << "]";
            std::cerr << "  mismatch " << m.str() << '\n';
            out.fail(m.str());
        }
    }
    if (out.pass)
        out.detail = detail.str();
    return out;
}

// 6. Skew product with alpha = sqrt(2), k = 2, target [0, 1/4): a 512 x 512
//    grid contains a point heavy through N = 2000.
Outcome polynomial_heaviness()
{
    Outcome out;
    const double tolerance = 1e-9;
    SkewProduct<double> sys(std::sqrt(2.0), 2);
    LastCoordinate<Indicator<double>> f(Indicator<double>(IntervalUnion<double>::single(0.0, 0.25)), 2);
    std::vector<TorusPoint<double>> grid;
    grid.reserve(512 * 512);
    for (int i = 0; i < 512; ++i)
        for (int j = 0; j < 512; ++j)
            grid.push_back({Rational(i, 512).to_double(), Rational(j, 512).to_double()});
    auto best = find_heavy_candidate(sys, f, 2000, std::span<const TorusPoint<double>>(grid), tolerance);
    if (!best.report.heavy())
        out.fail("best min deficit " + std::to_string(best.report.min_deficit));
    // Re-verify the witness independently of the search.
    if (!heavy_through(sys, best.point, f, 2000, tolerance))
        out.fail("witness fails re-verification");
    if (out.pass) {
        std::ostringstream d;
        d << "witness (" << best.point[0] << ", " << best.point[1] << ") min deficit " << best.report.min_deficit
          << " [numerical]";
        out.detail = d.str();
    }
    return out;
}

// 7. Skew-product sequences equal direct polynomial evaluation mod 1.
Outcome skew_round_trip()
{
    Outcome out;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::size_t> degree(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = degree(rng);
        Rational alpha = oracle::random_rational(rng, 64);
        std::vector<Rational> a;
        for (std::size_t i = 0; i < k; ++i)
            a.push_back(oracle::random_rational(rng, 64));
        auto seq = point_to_sequence(polynomial_system(alpha, k), coeffs_to_point(alpha, a), 51);
        for (std::int64_t n = 0; n <= 50; ++n)
            if (seq[static_cast<std::size_t>(n)] != oracle::polynomial_mod1(alpha, a, n))
                out.fail("trial " + std::to_string(trial) + " n=" + std::to_string(n));
    }
    if (out.pass)
        out.detail = "100 rational polynomials, n <= 50";
    return out;
}

// 8. Invariant suites under seeded generators.
Outcome invariants()
{
    Outcome out;
    std::mt19937_64 rng(8888);
    std::uniform_int_distribution<std::size_t> atoms(1, 10);
    std::size_t checked = 0;

    // Telescoping, shift relation, nesting on finite systems.
    for (int s = 0; s < 100; ++s) {
        auto sys = random_finite_system(rng, atoms(rng));
        auto f = sys.observable();
        const auto h = static_cast<std::int64_t>(2 * sys.size());
        for (std::size_t x = 0; x < sys.size(); ++x) {
            auto t = two_sided_trace(sys, x, f, -2 * h, 2 * h);
            std::size_t y = x;
            for (std::int64_t n = 1; n <= 2 * h; ++n) {
                if (t.at(n) - t.at(n - 1) != f(y) - f.mean())
                    out.fail("telescoping");
                y = sys.step(y);
            }
            y = x;
            for (std::int64_t m = 0; m <= h; ++m) {
                auto shifted = two_sided_trace(sys, y, f, -h, h);
                for (std::int64_t n = -h; n <= h; ++n)
                    if (shifted.at(n) != t.at(n + m) - t.at(m))
                        out.fail("shift relation");
                y = sys.step(y);
            }
            y = x;
            for (std::int64_t m = 0; m >= -h; --m) {
                auto shifted = two_sided_trace(sys, y, f, -h, h);
                for (std::int64_t n = -h; n <= h; ++n)
                    if (shifted.at(n) != t.at(n + m) - t.at(m))
                        out.fail("shift relation (negative m)");
                y = sys.inverse(y);
            }
            for (std::size_t N = 1; N <= 20; ++N)
                if (heavy_through(sys, x, f, N) && !heavy_through(sys, x, f, N - 1))
                    out.fail("nesting");
            ++checked;
        }
    }

    // Periodicity of multiples deficits.
    for (int s = 0; s < 200; ++s) {
        Rational x = oracle::random_rational(rng, 50);
        auto target = IntervalUnion<Rational>::single(0, Rational(1, 2 + s % 5));
        auto d = heavy_multiples_exact(x, target);
        const std::int64_t q = x.den();
        auto t = multiples_deficits(x, target, static_cast<std::size_t>(3 * q));
        for (std::int64_t m = 0; m < 3; ++m)
            for (std::int64_t r = 0; r < q; ++r)
                if (t.at(m * q + r) != Rational(m) * d.period_surplus + t.at(r))
                    out.fail("periodicity");
    }

    // CF round trip.
    for (int s = 0; s < 2000; ++s) {
        Rational x = oracle::random_rational(rng, 100000);
        auto cf = cf_expand_normalized(x);
        if (!cf.normalized() || cf.value() != x || normalize(cf).value() != x)
            out.fail("cf round trip at " + x.str());
    }

    // Morse digit-sum parity.
    MorseSequence seq(std::size_t{1} << 12);
    for (std::uint64_t n = 0; n < (std::uint64_t{1} << 16); ++n)
        if (seq.bit(n) != oracle::morse_bit(n))
            out.fail("morse parity at " + std::to_string(n));

    if (out.pass)
        out.detail = std::to_string(checked) + " finite points, 200 rationals, 2000 expansions, 2^16 Morse bits";
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "positive-measure-sweep", 10, positive_measure_sweep},
        {2, "two-point-counterexample", 1, two_point_counterexample},
        {3, "ergodic-dichotomy", 5, ergodic_dichotomy},
        {4, "morse-heaviness", 60, morse_heaviness},
        {5, "cf-characterization", 30, cf_characterization},
        {6, "polynomial-heaviness", 120, polynomial_heaviness},
        {7, "skew-round-trip", 5, skew_round_trip},
        {8, "invariant-suites", 60, invariants},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_seconds)
            o.fail("took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_seconds) + " s");
        if (!o.pass)
            ++failures;
        std::printf("[%s] %d %-26s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
