#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "heavy/observable.hpp"
#include "heavy/rational.hpp"

namespace heavy {

// Invertible measure-preserving system on atoms {0..n-1}: T is a permutation,
// mu gives each atom a positive weight (constant along each cycle, which is
// what T-invariance means for a permutation), and f has mu-integral zero.
class FiniteSystem {
public:
    using point_type = std::size_t;

    FiniteSystem(std::vector<std::size_t> perm, std::vector<Rational> weights, std::vector<Rational> f_values);

    // Uniform weights 1/n.
    static FiniteSystem uniform(std::vector<std::size_t> perm, std::vector<Rational> f_values);

    std::size_t size() const { return perm_.size(); }
    std::size_t step(std::size_t atom) const { return perm_[atom]; }
    std::size_t inverse(std::size_t atom) const { return inverse_[atom]; }
    bool contains(std::size_t atom) const { return atom < perm_.size(); }

    const std::vector<std::size_t>& perm() const { return perm_; }
    const std::vector<Rational>& weights() const { return weights_; }
    const std::vector<Rational>& f_values() const { return f_values_; }
    const Rational& f(std::size_t atom) const { return f_values_[atom]; }

    Table observable() const { return Table(f_values_, weights_); }

    // Cycles of the permutation, each listed from its smallest atom.
    std::vector<std::vector<std::size_t>> cycles() const;

    // Same space and measure with T^{-1} and -f.
    FiniteSystem reversed() const;

    // Plain-text record:
    //   atoms 3
    //   perm 1 2 0
    //   weights 1/3 1/3 1/3
    //   f 2 -1 -1
    // Blank lines and lines starting with '#' are ignored.
    std::string to_text() const;
    static FiniteSystem from_text(const std::string& text);

private:
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> inverse_;
    std::vector<Rational> weights_;
    std::vector<Rational> f_values_;
};

std::ostream& operator<<(std::ostream& os, const FiniteSystem& sys);

// Uniform random permutation of n atoms with uniform weights and integer f in
// [-5, 5] conditioned on summing to zero. With require_nonzero, f = 0 is
// rejected as well (needs n >= 2).
FiniteSystem random_finite_system(std::mt19937_64& rng, std::size_t atoms, bool require_nonzero = false);

// A single n-cycle 0 -> 1 -> ... -> n-1 -> 0 carrying the given f.
FiniteSystem cycle_system(std::vector<Rational> f_values);

// First n in 1..N with S_n(atom) < 0, or nullopt when atom is heavy through N.
std::optional<std::size_t> psi_exact(const FiniteSystem& sys, std::size_t atom, std::size_t horizon);

// H(N) as a sorted atom list; H(0) is every atom.
std::vector<std::size_t> heavy_set_exact(const FiniteSystem& sys, std::size_t horizon);

// H(n1, n2) = {x : S_i(x) >= 0 for n1 <= i <= n2}, any n1 <= n2.
std::vector<std::size_t> window_set_exact(const FiniteSystem& sys, std::int64_t n1, std::int64_t n2);

// S_n(x) for any integer n, negative times following the inverse map.
Rational partial_sum(const FiniteSystem& sys, std::size_t atom, std::int64_t n);

Rational measure(const FiniteSystem& sys, const std::vector<std::size_t>& atoms);

struct TowerRow {
    std::vector<std::size_t> base;
    std::size_t height = 0;
    // T^i(base) for i < height, base atom by base atom.
    std::vector<std::size_t> atoms;
    // Integral of f over the row (with multiplicity).
    Rational sum;
};

struct TowerCollision {
    enum class Kind { earlier_row, same_row, heavy_atom };

    std::size_t row = 0;
    std::size_t atom = 0;
    Kind kind = Kind::earlier_row;
    // Row that covered the atom first (earlier_row and same_row).
    std::optional<std::size_t> other_row;
};

struct TowerPartition {
    std::vector<TowerRow> rows;
    std::vector<TowerCollision> collisions;
    std::vector<std::size_t> covered;
    // Atoms heavy through N; never used as bases.
    std::vector<std::size_t> heavy;
};

// Peels rows off the non-heavy atoms: each stage takes the largest remaining
// psi value n_j <= N among uncovered atoms, uses every uncovered atom with that
// psi value as the base, and covers the row T^0..T^{n_j - 1} of that base.
// Stops when every non-heavy atom is covered. Heights strictly decrease.
TowerPartition greedy_tower_partition(const FiniteSystem& sys, std::size_t horizon);

struct PositiveMeasureCertificate {
    std::size_t horizon = 0;
    std::vector<std::size_t> heavy_set;
    Rational heavy_measure;
    bool heavy_nonempty = false;
    bool rows_negative = false;
    bool rows_disjoint = false;
    bool rows_cover = false;
    TowerPartition tower;

    // H(N) is nonempty, every row integrates below zero, and the rows do not
    // form a disjoint cover (which would force the f-integral below zero).
    bool holds() const { return heavy_nonempty && rows_negative && !(rows_disjoint && rows_cover); }
};

PositiveMeasureCertificate verify_positive_measure(const FiniteSystem& sys, std::size_t horizon);

}  // namespace heavy
