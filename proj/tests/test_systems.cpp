#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "heavy/heavy.hpp"
#include "oracles.hpp"

using namespace heavy;

TEST_CASE("rotation steps")
{
    Rotation<Rational> zero(Rational(0));
    CHECK(zero.step(Rational(2, 7)) == Rational(2, 7));

    Rotation<Rational> third(Rational(1, 3));
    std::vector<Rational> orbit{Rational(0)};
    for (int i = 0; i < 3; ++i)
        orbit.push_back(third.step(orbit.back()));
    CHECK(orbit == std::vector<Rational>{0, Rational(1, 3), Rational(2, 3), 0});
    CHECK(third.inverse(Rational(0)) == Rational(2, 3));

    static_assert(InvertibleSystem<Rotation<Rational>>);
    static_assert(InvertibleSystem<Rotation<double>>);
}

TEST_CASE("times-m map")
{
    TimesM<Rational> two(2);
    TimesM<Rational> three(3);
    CHECK(two.step(Rational(1, 3)) == Rational(2, 3));
    CHECK(three.step(Rational(1, 3)) == Rational(0));
    CHECK(TimesM<double>(2).step(0.3) == doctest::Approx(0.6));
    CHECK(two.step(Rational::parse("0.3")) == Rational(3, 5));
    CHECK_THROWS_AS(TimesM<Rational>(1), std::invalid_argument);

    // Not invertible: two-sided operations are unavailable at compile time.
    static_assert(DynamicalSystem<TimesM<Rational>>);
    static_assert(!InvertibleSystem<TimesM<Rational>>);
}

TEST_CASE("skew product iterates the displayed map")
{
    SkewProduct<Rational> sys(Rational(1, 4), 2);
    TorusPoint<Rational> p{0, 0};
    std::vector<Rational> second;
    for (int i = 0; i < 5; ++i) {
        second.push_back(p[1]);
        p = sys.step(p);
    }
    CHECK(second == std::vector<Rational>{0, 0, Rational(1, 4), Rational(3, 4), Rational(1, 2)});

    SUBCASE("k = 1 is the rotation")
    {
        SkewProduct<Rational> one(Rational(2, 5), 1);
        Rotation<Rational> rot(Rational(2, 5));
        Rational x(1, 7);
        TorusPoint<Rational> y{x};
        for (int i = 0; i < 12; ++i) {
            y = one.step(y);
            x = rot.step(x);
            CHECK(y[0] == x);
        }
    }

    SUBCASE("inverse undoes step")
    {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 200; ++trial) {
            std::size_t k = 1 + trial % 4;
            SkewProduct<Rational> s(oracle::random_rational(rng, 50), k);
            TorusPoint<Rational> q;
            for (std::size_t i = 0; i < k; ++i)
                q.push_back(oracle::random_rational(rng, 50));
            CHECK(s.inverse(s.step(q)) == q);
            CHECK(s.step(s.inverse(q)) == q);
        }
    }

    CHECK(!sys.contains(TorusPoint<Rational>{0}));
    CHECK(!sys.contains(TorusPoint<Rational>{0, 1}));
}

TEST_CASE("measure preservation on rational grids")
{
    // A bijection of the invariant grid of denominator-q points preserves the
    // uniform measure on it.
    for (std::int64_t q = 1; q <= 64; ++q) {
        CAPTURE(q);
        for (std::int64_t a = 0; a < q; ++a) {
            Rotation<Rational> rot(Rational(a, q));
            std::set<Rational> image;
            for (std::int64_t i = 0; i < q; ++i)
                image.insert(rot.step(Rational(i, q)));
            CHECK(image.size() == static_cast<std::size_t>(q));
        }
    }
    for (std::int64_t q = 1; q <= 12; ++q) {
        CAPTURE(q);
        SkewProduct<Rational> sys(Rational(1, q), 2);
        std::set<TorusPoint<Rational>> image;
        for (std::int64_t i = 0; i < q; ++i)
            for (std::int64_t j = 0; j < q; ++j)
                image.insert(sys.step({Rational(i, q), Rational(j, q)}));
        CHECK(image.size() == static_cast<std::size_t>(q * q));
    }
}

TEST_CASE("times-m has m preimages on grids coprime to m")
{
    for (std::int64_t m = 2; m <= 5; ++m) {
        for (std::int64_t q = 1; q <= 40; ++q) {
            if (std::gcd(m, q) != 1)
                continue;
            // On the denominator-mq grid every denominator-q point has exactly
            // m preimages.
            TimesM<Rational> sys(m);
            std::vector<int> count(static_cast<std::size_t>(q), 0);
            for (std::int64_t i = 0; i < m * q; ++i) {
                Rational y = sys.step(Rational(i, m * q));
                REQUIRE(y.den() <= q);
                count[static_cast<std::size_t>((y * Rational(q)).num())]++;
            }
            for (int c : count)
                CHECK(c == m);
        }
    }
}

TEST_CASE("polynomial sequences from the skew product")
{
    SUBCASE("degree one is the rotation orbit")
    {
        Rational alpha(2, 7);
        Rational a0(1, 5);
        auto start = coeffs_to_point(alpha, std::vector<Rational>{a0});
        CHECK(start == TorusPoint<Rational>{a0});
        auto seq = point_to_sequence(polynomial_system(alpha, 1), start, 6);
        for (std::int64_t n = 0; n < 6; ++n)
            CHECK(seq[n] == (a0 + alpha * Rational(n)).frac());
    }

    SUBCASE("n^2 / 2")
    {
        auto start = coeffs_to_point(Rational(1, 2), std::vector<Rational>{0, 0});
        auto seq = point_to_sequence(polynomial_system(Rational(1, 2), 2), start, 5);
        std::vector<Rational> direct;
        for (std::int64_t n = 0; n < 5; ++n)
            direct.push_back(Rational(n * n, 2).frac());
        CHECK(direct == std::vector<Rational>{0, Rational(1, 2), 0, Rational(1, 2), 0});
        CHECK(seq == direct);
    }

    SUBCASE("random rational coefficients match direct evaluation")
    {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 60; ++trial) {
            std::size_t k = 1 + trial % 4;
            Rational alpha = oracle::random_rational(rng, 40);
            std::vector<Rational> a;
            for (std::size_t i = 0; i < k; ++i)
                a.push_back(oracle::random_rational(rng, 40));
            auto seq = point_to_sequence(polynomial_system(alpha, k), coeffs_to_point(alpha, a), 51);
            for (std::int64_t n = 0; n <= 50; ++n) {
                CAPTURE(trial);
                CAPTURE(n);
                CHECK(seq[static_cast<std::size_t>(n)] == oracle::polynomial_mod1(alpha, a, n));
            }
        }
    }

    SUBCASE("double precision tracks the exact sequence")
    {
        auto exact = point_to_sequence(polynomial_system(Rational(1, 3), 2),
                                       coeffs_to_point(Rational(1, 3), std::vector<Rational>{Rational(1, 8), 0}), 20);
        auto approx = point_to_sequence(polynomial_system(1.0 / 3, 2), coeffs_to_point(1.0 / 3, std::vector<double>{0.125, 0}), 20);
        for (std::size_t n = 0; n < 20; ++n) {
            double d = std::abs(exact[n].to_double() - approx[n]);
            CHECK(std::min(d, 1 - d) < 1e-12);
        }
    }

    CHECK_THROWS_AS(coeffs_to_point(Rational(1, 2), std::vector<Rational>{}), std::invalid_argument);
    CHECK_THROWS_AS(point_to_sequence(SkewProduct<Rational>(Rational(1, 2), 3), TorusPoint<Rational>{0, 0}, 3),
                    std::invalid_argument);
}

TEST_CASE("Morse prefixes")
{
    CHECK(morse_prefix(8) == "01101001");
    CHECK(morse_prefix(4) == "0110");
    auto p16 = morse_prefix(16);
    auto p32 = morse_prefix(32);
    std::string complement;
    for (char c : p16)
        complement.push_back(c == '0' ? '1' : '0');
    CHECK(p32 == p16 + complement);
}

TEST_CASE("Morse bits equal the digit-sum parity")
{
    MorseSequence seq(1 << 10);
    for (std::uint64_t n = 0; n < (1u << 16); ++n)
        REQUIRE(seq.bit(n) == oracle::morse_bit(n));
    // Far past the stored prefix.
    for (std::uint64_t n : {std::uint64_t{1} << 40, (std::uint64_t{1} << 40) + 12345, ~std::uint64_t{0} >> 1})
        CHECK(seq.bit(n) == oracle::morse_bit(n));
}

TEST_CASE("Morse shift observable")
{
    MorseSequence seq(64);
    MorseBit f(seq);
    CHECK(f.mean() == Rational(1, 2));
    auto t = deficit_trace(MorseShift{}, std::uint64_t{0}, f, 8);
    // Bits 0110 1001.
    std::vector<Rational> want{0, Rational(-1, 2), 0, Rational(1, 2), 0, Rational(1, 2), 0, Rational(-1, 2), 0};
    CHECK(t.deficits == want);

    // Offsets beyond the prefix extend transparently.
    auto far = deficit_trace(MorseShift{}, std::uint64_t{1000}, f, 100);
    auto prof = morse_profile(seq, 1000, 100);
    Rational lowest = psi(far).min_deficit;
    CHECK(lowest * Rational(2) == Rational(prof.min_twice_deficit));
}
