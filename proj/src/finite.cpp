#include "heavy/finite.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace heavy {

FiniteSystem::FiniteSystem(std::vector<std::size_t> perm, std::vector<Rational> weights,
                           std::vector<Rational> f_values)
    : perm_(std::move(perm)), weights_(std::move(weights)), f_values_(std::move(f_values))
{
    const std::size_t n = perm_.size();
    if (n == 0)
        throw std::invalid_argument("finite system needs at least one atom");
    if (weights_.size() != n || f_values_.size() != n)
        throw std::invalid_argument("weights and f need one entry per atom");

    inverse_.assign(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (perm_[i] >= n || inverse_[perm_[i]] != n)
            throw std::invalid_argument("map is not a permutation");
        inverse_[perm_[i]] = i;
    }

    Rational total;
    Rational integral;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights_[i] <= Rational(0))
            throw std::invalid_argument("weights must be positive");
        if (weights_[perm_[i]] != weights_[i])
            throw std::invalid_argument("weights must be constant along cycles");
        total += weights_[i];
        integral += weights_[i] * f_values_[i];
    }
    if (total != Rational(1))
        throw std::invalid_argument("weights must sum to 1");
    if (integral != Rational(0))
        throw std::invalid_argument("f must integrate to zero");
}

FiniteSystem FiniteSystem::uniform(std::vector<std::size_t> perm, std::vector<Rational> f_values)
{
    const auto n = static_cast<std::int64_t>(perm.size());
    std::vector<Rational> weights(perm.size(), n > 0 ? Rational(1, n) : Rational(0));
    return FiniteSystem(std::move(perm), std::move(weights), std::move(f_values));
}

std::vector<std::vector<std::size_t>> FiniteSystem::cycles() const
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(size(), false);
    for (std::size_t start = 0; start < size(); ++start) {
        if (seen[start])
            continue;
        auto& cycle = out.emplace_back();
        for (std::size_t a = start; !seen[a]; a = perm_[a]) {
            seen[a] = true;
            cycle.push_back(a);
        }
    }
    return out;
}

FiniteSystem FiniteSystem::reversed() const
{
    std::vector<Rational> negated;
    negated.reserve(size());
    for (const auto& v : f_values_)
        negated.push_back(-v);
    return FiniteSystem(inverse_, weights_, std::move(negated));
}

std::string FiniteSystem::to_text() const
{
    std::ostringstream os;
    os << "atoms " << size() << "\nperm";
    for (auto p : perm_)
        os << ' ' << p;
    os << "\nweights";
    for (const auto& w : weights_)
        os << ' ' << w;
    os << "\nf";
    for (const auto& v : f_values_)
        os << ' ' << v;
    os << '\n';
    return os.str();
}

FiniteSystem FiniteSystem::from_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::optional<std::size_t> atoms;
    std::optional<std::vector<std::size_t>> perm;
    std::optional<std::vector<Rational>> weights;
    std::optional<std::vector<Rational>> f;

    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key) || key.front() == '#')
            continue;
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;)
            tokens.push_back(tok);

        if (key == "atoms") {
            if (tokens.size() != 1)
                throw std::invalid_argument("'atoms' takes one count");
            atoms = static_cast<std::size_t>(std::stoull(tokens[0]));
        } else if (key == "perm") {
            perm.emplace();
            for (const auto& t : tokens) {
                if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
                    throw std::invalid_argument("malformed permutation entry: '" + t + "'");
                perm->push_back(static_cast<std::size_t>(std::stoull(t)));
            }
        } else if (key == "weights" || key == "f") {
            auto& target = key == "f" ? f : weights;
            target.emplace();
            for (const auto& t : tokens)
                target->push_back(Rational::parse(t));
        } else {
            throw std::invalid_argument("unknown field '" + key + "' in finite system record");
        }
    }

    if (!perm || !f)
        throw std::invalid_argument("finite system record needs 'perm' and 'f'");
    if (atoms && *atoms != perm->size())
        throw std::invalid_argument("'atoms' does not match the permutation length");
    if (!weights)
        return uniform(std::move(*perm), std::move(*f));
    return FiniteSystem(std::move(*perm), std::move(*weights), std::move(*f));
}

std::ostream& operator<<(std::ostream& os, const FiniteSystem& sys)
{
    return os << sys.to_text();
}

FiniteSystem random_finite_system(std::mt19937_64& rng, std::size_t atoms, bool require_nonzero)
{
    if (atoms == 0)
        throw std::invalid_argument("finite system needs at least one atom");
    if (require_nonzero && atoms < 2)
        throw std::invalid_argument("a nonzero zero-sum f needs at least two atoms");

    std::vector<std::size_t> perm(atoms);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    std::uniform_int_distribution<int> value(-5, 5);
    std::vector<int> f(atoms);
    for (;;) {
        for (auto& v : f)
            v = value(rng);
        const bool zero_sum = std::accumulate(f.begin(), f.end(), 0) == 0;
        const bool all_zero = std::all_of(f.begin(), f.end(), [](int v) { return v == 0; });
        if (zero_sum && !(require_nonzero && all_zero))
            break;
    }
    std::vector<Rational> f_values(f.begin(), f.end());
    return FiniteSystem::uniform(std::move(perm), std::move(f_values));
}

FiniteSystem cycle_system(std::vector<Rational> f_values)
{
    const std::size_t n = f_values.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = (i + 1) % n;
    return FiniteSystem::uniform(std::move(perm), std::move(f_values));
}

std::optional<std::size_t> psi_exact(const FiniteSystem& sys, std::size_t atom, std::size_t horizon)
{
    if (!sys.contains(atom))
        throw std::out_of_range("atom index out of range");
    Rational s;
    for (std::size_t n = 1; n <= horizon; ++n) {
        s += sys.f(atom);
        if (s < Rational(0))
            return n;
        atom = sys.step(atom);
    }
    return std::nullopt;
}

std::vector<std::size_t> heavy_set_exact(const FiniteSystem& sys, std::size_t horizon)
{
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < sys.size(); ++a)
        if (!psi_exact(sys, a, horizon))
            out.push_back(a);
    return out;
}

Rational partial_sum(const FiniteSystem& sys, std::size_t atom, std::int64_t n)
{
    if (!sys.contains(atom))
        throw std::out_of_range("atom index out of range");
    Rational s;
    if (n >= 0) {
        for (std::int64_t i = 0; i < n; ++i) {
            s += sys.f(atom);
            atom = sys.step(atom);
        }
    } else {
        for (std::int64_t i = 0; i < -n; ++i) {
            atom = sys.inverse(atom);
            s -= sys.f(atom);
        }
    }
    return s;
}

std::vector<std::size_t> window_set_exact(const FiniteSystem& sys, std::int64_t n1, std::int64_t n2)
{
    if (n1 > n2)
        throw std::invalid_argument("window must satisfy n1 <= n2");
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < sys.size(); ++a) {
        bool inside = true;
        // Forward sums.
        Rational s;
        std::size_t x = a;
        for (std::int64_t i = 1; i <= n2 && inside; ++i) {
            s += sys.f(x);
            x = sys.step(x);
            if (i >= n1 && s < Rational(0))
                inside = false;
        }
        // Backward sums.
        s = Rational(0);
        x = a;
        for (std::int64_t i = -1; i >= n1 && inside; --i) {
            x = sys.inverse(x);
            s -= sys.f(x);
            if (i <= n2 && s < Rational(0))
                inside = false;
        }
        if (inside)
            out.push_back(a);
    }
    return out;
}

Rational measure(const FiniteSystem& sys, const std::vector<std::size_t>& atoms)
{
    Rational out;
    for (auto a : atoms)
        out += sys.weights().at(a);
    return out;
}

TowerPartition greedy_tower_partition(const FiniteSystem& sys, std::size_t horizon)
{
    if (horizon == 0)
        throw std::invalid_argument("horizon must be at least 1");

    const std::size_t n = sys.size();
    std::vector<std::optional<std::size_t>> psi(n);
    for (std::size_t a = 0; a < n; ++a)
        psi[a] = psi_exact(sys, a, horizon);

    TowerPartition out;
    for (std::size_t a = 0; a < n; ++a)
        if (!psi[a])
            out.heavy.push_back(a);

    // covered_by[a] = first row containing atom a.
    std::vector<std::optional<std::size_t>> covered_by(n);
    std::optional<std::size_t> last_height;
    for (;;) {
        std::size_t height = 0;
        for (std::size_t a = 0; a < n; ++a)
            if (psi[a] && !covered_by[a])
                height = std::max(height, *psi[a]);
        if (height == 0)
            break;
        if (last_height && height >= *last_height)
            throw std::logic_error("tower heights failed to decrease");
        last_height = height;

        const std::size_t row_index = out.rows.size();
        TowerRow row;
        row.height = height;
        for (std::size_t a = 0; a < n; ++a)
            if (psi[a] == height && !covered_by[a])
                row.base.push_back(a);

        for (auto b : row.base) {
            std::size_t x = b;
            for (std::size_t i = 0; i < height; ++i) {
                row.atoms.push_back(x);
                row.sum += sys.weights()[x] * sys.f(x);
                if (!psi[x])
                    out.collisions.push_back({row_index, x, TowerCollision::Kind::heavy_atom, std::nullopt});
                if (covered_by[x]) {
                    auto kind = *covered_by[x] == row_index ? TowerCollision::Kind::same_row
                                                            : TowerCollision::Kind::earlier_row;
                    out.collisions.push_back({row_index, x, kind, covered_by[x]});
                } else {
                    covered_by[x] = row_index;
                }
                x = sys.step(x);
            }
        }
        out.rows.push_back(std::move(row));
    }

    for (std::size_t a = 0; a < n; ++a)
        if (covered_by[a])
            out.covered.push_back(a);
    return out;
}

PositiveMeasureCertificate verify_positive_measure(const FiniteSystem& sys, std::size_t horizon)
{
    PositiveMeasureCertificate cert;
    cert.horizon = horizon;
    cert.heavy_set = heavy_set_exact(sys, horizon);
    cert.heavy_measure = measure(sys, cert.heavy_set);
    cert.heavy_nonempty = !cert.heavy_set.empty();

    if (horizon == 0) {
        cert.rows_negative = true;
        return cert;
    }

    cert.tower = greedy_tower_partition(sys, horizon);
    cert.rows_negative = std::all_of(cert.tower.rows.begin(), cert.tower.rows.end(),
                                     [](const TowerRow& r) { return r.sum < Rational(0); });
    cert.rows_disjoint = std::none_of(cert.tower.collisions.begin(), cert.tower.collisions.end(),
                                      [](const TowerCollision& c) { return c.kind != TowerCollision::Kind::heavy_atom; });
    cert.rows_cover = cert.tower.covered.size() == sys.size();
    return cert;
}

}  // namespace heavy
