#include "cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/parse.hpp"
#include "heavy/heavy.hpp"
#include "json.hpp"

namespace heavy::cli {

namespace {

using json = nlohmann::ordered_json;

struct Args {
    std::string system;
    std::string obs;
    std::string x;
    std::string points;
    std::string target;
    std::string alpha;
    std::string coeffs;
    std::string format;
    std::string out;
    std::int64_t horizon = -1;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    std::int64_t grid = 0;
    std::int64_t atom = -1;
    std::int64_t max_steps = 1000;
    std::uint64_t seed = 0;
    std::int64_t atoms = 8;
    std::int64_t count = 100;
    std::int64_t k = 2;
    std::int64_t q_max = 300;
    std::int64_t q = 0;
    std::int64_t length = 0;
    std::int64_t offset = 0;
    unsigned threads = 0;
    bool approx = false;
    double tolerance = default_tolerance;
};

struct Report {
    json doc = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    int status = 0;
};

// --- value formatting -------------------------------------------------------

json value_json(const Rational& r) { return r.str(); }
json value_json(double v) { return v; }
std::string value_str(const Rational& r) { return r.str(); }
std::string value_str(double v) { return format_real(v); }
std::string value_str(std::size_t v) { return std::to_string(v); }

template <Scalar T>
std::string value_str(const TorusPoint<T>& p)
{
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (i ? "," : "") + value_str(p[i]);
    return s;
}

json value_json(std::size_t v) { return v; }

template <Scalar T>
json value_json(const TorusPoint<T>& p)
{
    json arr = json::array();
    for (const auto& c : p)
        arr.push_back(value_json(c));
    return arr;
}

json optional_json(const std::optional<std::int64_t>& v, const char* absent)
{
    return v ? json(*v) : json(absent);
}

template <Scalar T>
json report_json(const HeavinessReport<T>& r)
{
    json doc;
    doc["psi"] = optional_json(r.psi, "beyond-horizon");
    doc["verdict"] = r.heavy() ? "heavy" : "not-heavy";
    doc["numerical"] = r.numerical;
    doc["min_deficit"] = value_json(r.min_deficit);
    doc["argmin_time"] = r.argmin_time;
    doc["zero_times"] = r.zero_times;
    return doc;
}

template <Scalar T>
void emit_trace(Report& rep, const DeficitTrace<T>& t)
{
    rep.doc["mode"] = t.mode.exact ? "exact" : "approximate";
    rep.doc["tolerance"] = t.mode.exact ? json(nullptr) : json(t.mode.tolerance);
    rep.doc["first_index"] = t.first_index;
    rep.doc["last_index"] = t.last_index();
    json arr = json::array();
    rep.columns = {"n", "deficit"};
    for (std::int64_t n = t.first_index; n <= t.last_index(); ++n) {
        arr.push_back(value_json(t.at(n)));
        rep.rows.push_back({std::to_string(n), value_str(t.at(n))});
    }
    rep.doc["deficits"] = std::move(arr);
}

// --- system dispatch ----------------------------------------------------------

template <Scalar T>
T parse_point(const Rotation<T>&, std::string_view s) { return parse_scalar<T>(s); }
template <Scalar T>
T parse_point(const TimesM<T>&, std::string_view s) { return parse_scalar<T>(s); }

template <Scalar T>
TorusPoint<T> parse_point(const SkewProduct<T>&, std::string_view s)
{
    TorusPoint<T> p;
    for (const auto& c : split(s, ','))
        p.push_back(parse_scalar<T>(c));
    return p;
}

std::size_t parse_point(const FiniteSystem&, std::string_view s)
{
    auto v = parse_int(s);
    if (v < 0)
        throw UsageError("atom index must be nonnegative");
    return static_cast<std::size_t>(v);
}

std::uint64_t parse_point(const MorseShift&, std::string_view s)
{
    auto v = parse_int(s);
    if (v < 0)
        throw UsageError("shift offset must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

template <Scalar T>
std::vector<T> circle_grid(std::int64_t q)
{
    std::vector<T> out;
    for (std::int64_t i = 0; i < q; ++i)
        out.push_back(scalar_from<T>(Rational(i, q)));
    return out;
}

template <Scalar T>
std::vector<T> grid_points(const Rotation<T>&, std::int64_t q) { return circle_grid<T>(q); }
template <Scalar T>
std::vector<T> grid_points(const TimesM<T>&, std::int64_t q) { return circle_grid<T>(q); }

template <Scalar T>
std::vector<TorusPoint<T>> grid_points(const SkewProduct<T>& sys, std::int64_t q)
{
    const auto axis = circle_grid<T>(q);
    double total = std::pow(static_cast<double>(q), static_cast<double>(sys.dimension()));
    if (total > 5e7)
        throw UsageError("torus grid too large");
    std::vector<TorusPoint<T>> out;
    std::vector<std::size_t> idx(sys.dimension(), 0);
    for (;;) {
        TorusPoint<T> p;
        for (auto i : idx)
            p.push_back(axis[i]);
        out.push_back(std::move(p));
        std::size_t d = idx.size();
        while (d > 0 && ++idx[d - 1] == axis.size())
            idx[--d] = 0;
        if (d == 0)
            break;
    }
    return out;
}

std::vector<std::size_t> grid_points(const FiniteSystem& sys, std::int64_t)
{
    std::vector<std::size_t> out(sys.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = i;
    return out;
}

std::vector<std::uint64_t> grid_points(const MorseShift&, std::int64_t q)
{
    std::vector<std::uint64_t> out(static_cast<std::size_t>(q));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = i;
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FiniteSystem load_finite(const SystemSpec& spec)
{
    if (spec.kind == SystemSpec::Kind::finite)
        return FiniteSystem::from_text(read_file(spec.args.at(0)));
    if (spec.kind == SystemSpec::Kind::cycle) {
        std::vector<Rational> f;
        for (const auto& v : spec.args)
            f.push_back(parse_exact(v));
        return cycle_system(std::move(f));
    }
    throw UsageError("this command needs a finite system (finite:PATH or cycle:v0,v1,...)");
}

bool wants_approx(const Args& a)
{
    for (const auto* s : {&a.system, &a.obs, &a.x, &a.points, &a.target, &a.alpha, &a.coeffs})
        if (is_irrational_literal(*s))
            return true;
    return a.approx;
}

template <Scalar T>
CircleObservable<T> circle_observable(const Args& a)
{
    if (a.obs.empty())
        throw UsageError("--obs is required for circle and torus systems");
    return parse_circle_observable<T>(a.obs);
}

template <Scalar T, class Fn>
void dispatch_scalar(const Args& a, const SystemSpec& spec, Fn&& fn)
{
    switch (spec.kind) {
    case SystemSpec::Kind::rotation:
        fn(Rotation<T>(parse_scalar<T>(spec.args[0])), circle_observable<T>(a));
        return;
    case SystemSpec::Kind::times:
        fn(TimesM<T>(parse_int(spec.args[0])), circle_observable<T>(a));
        return;
    case SystemSpec::Kind::skew:
    case SystemSpec::Kind::poly: {
        auto k = parse_int(spec.args[1]);
        if (k < 1)
            throw UsageError("torus dimension must be at least 1");
        T alpha = parse_scalar<T>(spec.args[0]);
        auto sys = spec.kind == SystemSpec::Kind::skew ? SkewProduct<T>(alpha, static_cast<std::size_t>(k))
                                                       : polynomial_system(alpha, static_cast<std::size_t>(k));
        fn(sys, LastCoordinate<CircleObservable<T>>(circle_observable<T>(a), static_cast<std::size_t>(k)));
        return;
    }
    default:
        break;
    }
}

// Calls fn(system, observable) with concrete types for the configured system.
template <class Fn>
void with_system(const Args& a, Fn&& fn)
{
    if (a.system.empty())
        throw UsageError("--system is required");
    auto spec = parse_system_spec(a.system);
    switch (spec.kind) {
    case SystemSpec::Kind::finite:
    case SystemSpec::Kind::cycle: {
        auto sys = load_finite(spec);
        if (a.obs.empty()) {
            fn(sys, sys.observable());
        } else if (a.obs.starts_with("table:")) {
            std::vector<Rational> values;
            for (const auto& v : split(std::string_view(a.obs).substr(6), ','))
                values.push_back(parse_exact(v));
            fn(sys, Table(std::move(values), sys.weights()));
        } else {
            throw UsageError("finite systems take 'table:v0,v1,...' observables");
        }
        return;
    }
    case SystemSpec::Kind::morse: {
        if (!a.obs.empty() && a.obs != "morse")
            throw UsageError("the Morse shift uses its fixed observable");
        MorseSequence seq(std::size_t{1} << 16);
        fn(MorseShift{}, MorseBit(seq));
        return;
    }
    default:
        if (wants_approx(a))
            dispatch_scalar<double>(a, spec, fn);
        else
            dispatch_scalar<Rational>(a, spec, fn);
    }
}

template <class Sys>
constexpr bool invertible_v = InvertibleSystem<std::decay_t<Sys>>;

[[noreturn]] void reject_non_invertible()
{
    throw UsageError("two-sided windows need an invertible system");
}

std::size_t horizon_arg(const Args& a)
{
    if (a.horizon < 0)
        throw UsageError("--N is required");
    return static_cast<std::size_t>(a.horizon);
}

template <class Sys>
std::vector<typename Sys::point_type> candidates(const Args& a, const Sys& sys)
{
    if (!a.points.empty()) {
        std::vector<typename Sys::point_type> out;
        for (const auto& p : split(a.points, ';'))
            out.push_back(parse_point(sys, p));
        return out;
    }
    if (a.grid < 1 && !std::is_same_v<Sys, FiniteSystem>)
        throw UsageError("give --grid q or --points p1;p2;...");
    return grid_points(sys, a.grid);
}

// --- commands -----------------------------------------------------------------

Report cmd_trace(const Args& a)
{
    Report rep;
    with_system(a, [&](const auto& sys, const auto& f) {
        auto t = deficit_trace(sys, parse_point(sys, a.x), f, horizon_arg(a), a.tolerance);
        emit_trace(rep, t);
        rep.doc["report"] = report_json(psi(t));
    });
    return rep;
}

Report cmd_trace2(const Args& a)
{
    Report rep;
    with_system(a, [&](const auto& sys, const auto& f) {
        if constexpr (invertible_v<decltype(sys)>) {
            auto t = two_sided_trace(sys, parse_point(sys, a.x), f, a.n1, a.n2, a.tolerance);
            emit_trace(rep, t);
            rep.doc["in_window"] = heavy_window(sys, parse_point(sys, a.x), f, a.n1, a.n2, a.tolerance);
        } else {
            reject_non_invertible();
        }
    });
    return rep;
}

Report cmd_heavy_scan(const Args& a)
{
    Report rep;
    with_system(a, [&](const auto& sys, const auto& f) {
        const auto points = candidates(a, sys);
        const auto N = horizon_arg(a);
        rep.columns = {"index", "point", "heavy", "psi", "min_deficit"};
        json survivors = json::array();
        bool numerical = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            bool heavy = true;
            std::string psi_text = "beyond-horizon";
            std::string min_text = "0";
            if (N > 0) {
                auto r = psi(deficit_trace(sys, points[i], f, N, a.tolerance));
                heavy = r.heavy();
                numerical = r.numerical;
                if (r.psi)
                    psi_text = std::to_string(*r.psi);
                min_text = value_str(r.min_deficit);
            }
            if (heavy)
                survivors.push_back(value_json(points[i]));
            rep.rows.push_back({std::to_string(i), value_str(points[i]), heavy ? "1" : "0", psi_text, min_text});
        }
        rep.doc["horizon"] = N;
        rep.doc["candidates"] = points.size();
        rep.doc["survivor_count"] = survivors.size();
        rep.doc["survivor_fraction"] = static_cast<double>(survivors.size()) / static_cast<double>(points.size());
        rep.doc["numerical"] = numerical;
        rep.doc["survivors"] = std::move(survivors);
    });
    return rep;
}

Report cmd_heavy_search(const Args& a)
{
    Report rep;
    with_system(a, [&](const auto& sys, const auto& f) {
        using P = typename std::decay_t<decltype(sys)>::point_type;
        const auto points = candidates(a, sys);
        auto best = find_heavy_candidate(sys, f, horizon_arg(a), std::span<const P>(points), a.tolerance, a.threads);
        const bool found = !deficit_negative(best.report.min_deficit, best.report.numerical ? a.tolerance : 0.0);
        rep.doc["candidates"] = points.size();
        rep.doc["index"] = best.index;
        rep.doc["point"] = value_json(best.point);
        rep.doc["heavy_found"] = found;
        rep.doc["report"] = report_json(best.report);
        rep.columns = {"index", "point", "min_deficit", "heavy_found"};
        rep.rows.push_back({std::to_string(best.index), value_str(best.point), value_str(best.report.min_deficit),
                            found ? "1" : "0"});
    });
    return rep;
}

Report cmd_two_sided_search(const Args& a)
{
    Report rep;
    with_system(a, [&](const auto& sys, const auto& f) {
        if constexpr (invertible_v<decltype(sys)>) {
            auto w = two_sided_search(sys, f, static_cast<std::int64_t>(horizon_arg(a)), parse_point(sys, a.x),
                                      a.max_steps, a.tolerance);
            rep.doc["found"] = w.has_value();
            rep.columns = {"found", "point", "window", "i", "j", "k"};
            if (w) {
                rep.doc["point"] = value_json(w->point);
                rep.doc["window"] = w->window;
                rep.doc["i"] = w->i;
                rep.doc["j"] = w->j;
                rep.doc["k"] = w->k;
                rep.rows.push_back({"1", value_str(w->point), std::to_string(w->window), std::to_string(w->i),
                                    std::to_string(w->j), std::to_string(w->k)});
            } else {
                rep.rows.push_back({"0", "", "", "", "", ""});
            }
        } else {
            reject_non_invertible();
        }
    });
    return rep;
}

json atoms_json(const std::vector<std::size_t>& atoms)
{
    return json(atoms);
}

std::string atoms_str(const std::vector<std::size_t>& atoms)
{
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        s += (i ? " " : "") + std::to_string(atoms[i]);
    return s;
}

Report cmd_finite_psi(const Args& a)
{
    Report rep;
    auto sys = load_finite(parse_system_spec(a.system));
    const auto N = horizon_arg(a);
    rep.columns = {"atom", "psi"};
    json arr = json::array();
    for (std::size_t atom = 0; atom < sys.size(); ++atom) {
        if (a.atom >= 0 && static_cast<std::size_t>(a.atom) != atom)
            continue;
        auto p = psi_exact(sys, atom, N);
        json entry;
        entry["atom"] = atom;
        entry["psi"] = p ? json(*p) : json("beyond-horizon");
        arr.push_back(entry);
        rep.rows.push_back({std::to_string(atom), p ? std::to_string(*p) : "beyond-horizon"});
    }
    if (a.atom >= 0 && arr.empty())
        throw UsageError("atom index out of range");
    rep.doc["horizon"] = N;
    rep.doc["atoms"] = std::move(arr);
    return rep;
}

Report cmd_finite_heavy(const Args& a)
{
    Report rep;
    auto sys = load_finite(parse_system_spec(a.system));
    const auto N = horizon_arg(a);
    auto set = heavy_set_exact(sys, N);
    rep.doc["horizon"] = N;
    rep.doc["heavy_set"] = atoms_json(set);
    rep.doc["measure"] = measure(sys, set).str();
    rep.columns = {"atom"};
    for (auto atom : set)
        rep.rows.push_back({std::to_string(atom)});
    return rep;
}

const char* collision_kind(TowerCollision::Kind k)
{
    switch (k) {
    case TowerCollision::Kind::earlier_row:
        return "earlier-row";
    case TowerCollision::Kind::same_row:
        return "same-row";
    case TowerCollision::Kind::heavy_atom:
        return "heavy-atom";
    }
    return "?";
}

json tower_json(const TowerPartition& t)
{
    json doc;
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row;
        row["base"] = atoms_json(r.base);
        row["height"] = r.height;
        row["atoms"] = atoms_json(r.atoms);
        row["sum"] = r.sum.str();
        rows.push_back(row);
    }
    json collisions = json::array();
    for (const auto& c : t.collisions) {
        json entry;
        entry["row"] = c.row;
        entry["atom"] = c.atom;
        entry["kind"] = collision_kind(c.kind);
        entry["other_row"] = c.other_row ? json(*c.other_row) : json(nullptr);
        collisions.push_back(entry);
    }
    doc["rows"] = std::move(rows);
    doc["collisions"] = std::move(collisions);
    doc["covered"] = atoms_json(t.covered);
    doc["heavy"] = atoms_json(t.heavy);
    return doc;
}

Report cmd_tower(const Args& a)
{
    Report rep;
    auto sys = load_finite(parse_system_spec(a.system));
    auto t = greedy_tower_partition(sys, horizon_arg(a));
    rep.doc["horizon"] = a.horizon;
    rep.doc["tower"] = tower_json(t);
    rep.columns = {"row", "height", "base", "atoms", "sum"};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        rep.rows.push_back({std::to_string(i), std::to_string(r.height), atoms_str(r.base), atoms_str(r.atoms),
                            r.sum.str()});
    }
    return rep;
}

Report cmd_finite_verify(const Args& a)
{
    Report rep;
    const auto N = horizon_arg(a);
    std::vector<FiniteSystem> systems;
    if (!a.system.empty()) {
        systems.push_back(load_finite(parse_system_spec(a.system)));
    } else {
        if (a.atoms < 1 || a.count < 1)
            throw UsageError("--atoms and --count must be positive");
        std::mt19937_64 rng(a.seed);
        for (std::int64_t i = 0; i < a.count; ++i)
            systems.push_back(random_finite_system(rng, static_cast<std::size_t>(a.atoms)));
    }

    rep.columns = {"system", "N", "heavy_size", "heavy_measure", "rows", "collisions", "holds"};
    std::size_t checks = 0;
    json failures = json::array();
    for (std::size_t s = 0; s < systems.size(); ++s) {
        for (std::size_t n = 1; n <= N; ++n) {
            auto cert = verify_positive_measure(systems[s], n);
            ++checks;
            if (!cert.holds()) {
                json f;
                f["system"] = systems[s].to_text();
                f["N"] = n;
                failures.push_back(f);
            }
            rep.rows.push_back({std::to_string(s), std::to_string(n), std::to_string(cert.heavy_set.size()),
                                cert.heavy_measure.str(), std::to_string(cert.tower.rows.size()),
                                std::to_string(cert.tower.collisions.size()), cert.holds() ? "1" : "0"});
        }
    }
    rep.doc["systems"] = systems.size();
    rep.doc["horizon"] = N;
    rep.doc["seed"] = a.seed;
    rep.doc["checks"] = checks;
    rep.doc["failures"] = failures.size();
    rep.doc["certificate"] = failures.empty() ? "holds" : "FAILED";
    rep.doc["failed_cases"] = std::move(failures);
    rep.status = rep.doc["failures"].get<std::size_t>() == 0 ? 0 : 1;
    return rep;
}

Report cmd_window(const Args& a)
{
    Report rep;
    if (a.n1 > a.n2)
        throw UsageError("window must satisfy n1 <= n2");
    auto spec = parse_system_spec(a.system);
    if ((spec.kind == SystemSpec::Kind::finite || spec.kind == SystemSpec::Kind::cycle) && a.x.empty()) {
        auto sys = load_finite(spec);
        auto set = window_set_exact(sys, a.n1, a.n2);
        rep.doc["n1"] = a.n1;
        rep.doc["n2"] = a.n2;
        rep.doc["window_set"] = atoms_json(set);
        rep.doc["measure"] = measure(sys, set).str();
        rep.columns = {"atom"};
        for (auto atom : set)
            rep.rows.push_back({std::to_string(atom)});
        return rep;
    }
    with_system(a, [&](const auto& sys, const auto& f) {
        if constexpr (invertible_v<decltype(sys)>) {
            bool in = heavy_window(sys, parse_point(sys, a.x), f, a.n1, a.n2, a.tolerance);
            rep.doc["n1"] = a.n1;
            rep.doc["n2"] = a.n2;
            rep.doc["in_window"] = in;
            rep.columns = {"in_window"};
            rep.rows.push_back({in ? "1" : "0"});
        } else {
            reject_non_invertible();
        }
    });
    return rep;
}

Report cmd_multiples(const Args& a)
{
    Report rep;
    const auto N = horizon_arg(a);
    if (wants_approx(a)) {
        auto t = multiples_deficits(parse_real(a.x), parse_intervals<double>(a.target), N, a.tolerance);
        emit_trace(rep, t);
        rep.doc["report"] = report_json(psi(t));
    } else {
        auto t = multiples_deficits(parse_exact(a.x), parse_intervals<Rational>(a.target), N);
        emit_trace(rep, t);
        rep.doc["report"] = report_json(psi(t));
    }
    return rep;
}

Report cmd_multiples_exact(const Args& a)
{
    Report rep;
    auto d = heavy_multiples_exact(parse_exact(a.x), parse_intervals<Rational>(a.target));
    rep.doc["x"] = d.x.str();
    rep.doc["verdict"] = d.heavy() ? "heavy" : "not-heavy";
    rep.doc["first_failure"] = d.first_failure ? json(*d.first_failure) : json(nullptr);
    rep.doc["period_surplus"] = d.period_surplus.str();
    rep.doc["period_min"] = d.period_min.str();
    rep.columns = {"x", "heavy", "first_failure", "period_surplus"};
    rep.rows.push_back({d.x.str(), d.heavy() ? "1" : "0", d.first_failure ? std::to_string(*d.first_failure) : "",
                        d.period_surplus.str()});
    return rep;
}

Report cmd_cf(const Args& a)
{
    Report rep;
    auto x = parse_exact(a.x);
    auto cf = cf_expand_normalized(x);
    rep.doc["x"] = x.str();
    rep.doc["a0"] = cf.a0;
    rep.doc["quotients"] = cf.quotients;
    rep.doc["value"] = cf.value().str();
    rep.doc["k"] = a.k;
    rep.doc["odd_index_divisible"] = odd_index_divisible(cf, a.k);
    rep.columns = {"index", "quotient"};
    for (std::size_t i = 0; i < cf.quotients.size(); ++i)
        rep.rows.push_back({std::to_string(i + 1), std::to_string(cf.quotients[i])});
    return rep;
}

Report cmd_cf_sweep(const Args& a)
{
    Report rep;
    auto sweep = characterization_sweep(a.k, a.q_max);
    rep.columns = {"p", "q", "heavy", "divisible", "agree", "surplus", "first_failure"};
    json mismatches = json::array();
    for (const auto& row : sweep.rows) {
        rep.rows.push_back({std::to_string(row.p), std::to_string(row.q), row.heavy ? "1" : "0",
                            row.divisible ? "1" : "0", row.agree() ? "1" : "0", row.surplus.str(),
                            row.first_failure ? std::to_string(*row.first_failure) : ""});
        if (!row.agree()) {
            json m;
            m["p"] = row.p;
            m["q"] = row.q;
            m["heavy"] = row.heavy;
            m["divisible"] = row.divisible;
            m["quotients"] = row.cf.quotients;
            m["surplus"] = row.surplus.str();
            m["first_failure"] = row.first_failure ? json(*row.first_failure) : json(nullptr);
            mismatches.push_back(m);
        }
    }
    rep.doc["k"] = sweep.k;
    rep.doc["q_max"] = sweep.q_max;
    rep.doc["total"] = sweep.rows.size();
    rep.doc["agreements"] = sweep.agreements;
    rep.doc["mismatches"] = std::move(mismatches);
    rep.status = sweep.agreements == sweep.rows.size() ? 0 : 1;
    return rep;
}

Report cmd_multiples_scan(const Args& a)
{
    Report rep;
    std::optional<std::size_t> N;
    if (a.horizon >= 0)
        N = static_cast<std::size_t>(a.horizon);
    auto scan = heavy_multiples_scan(parse_intervals<Rational>(a.target), a.q, N);
    json survivors = json::array();
    rep.columns = {"x"};
    for (const auto& s : scan.survivors) {
        survivors.push_back(s.str());
        rep.rows.push_back({s.str()});
    }
    rep.doc["q"] = a.q;
    rep.doc["horizon"] = N ? json(*N) : json("all");
    rep.doc["grid_size"] = scan.grid_size;
    rep.doc["survivor_fraction"] = scan.survivor_fraction;
    rep.doc["survivors"] = std::move(survivors);
    return rep;
}

Report cmd_morse(const Args& a)
{
    Report rep;
    if (a.horizon > 0) {
        MorseSequence seq(std::size_t{1} << 16);
        auto t = deficit_trace(MorseShift{}, static_cast<std::uint64_t>(a.offset), MorseBit(seq),
                               static_cast<std::size_t>(a.horizon));
        emit_trace(rep, t);
        rep.doc["offset"] = a.offset;
        rep.doc["report"] = report_json(psi(t));
        return rep;
    }
    if (a.length < 1)
        throw UsageError("give --length L, or --offset and --N for a trace");
    auto prefix = morse_prefix(static_cast<std::size_t>(a.length));
    rep.doc["length"] = a.length;
    rep.doc["prefix"] = prefix;
    rep.columns = {"n", "bit"};
    for (std::size_t i = 0; i < prefix.size(); ++i)
        rep.rows.push_back({std::to_string(i), std::string(1, prefix[i])});
    return rep;
}

template <Scalar T>
void poly_sequence(const Args& a, Report& rep)
{
    T alpha = parse_scalar<T>(a.alpha);
    std::vector<T> coeffs;
    for (const auto& c : split(a.coeffs, ','))
        coeffs.push_back(parse_scalar<T>(c));
    auto start = coeffs_to_point(alpha, coeffs);
    auto sys = polynomial_system(alpha, coeffs.size());
    auto seq = point_to_sequence(sys, start, horizon_arg(a));
    rep.doc["k"] = coeffs.size();
    rep.doc["system_alpha"] = value_json(sys.alpha());
    rep.doc["start"] = value_json(start);
    json arr = json::array();
    rep.columns = {"n", "value"};
    for (std::size_t n = 0; n < seq.size(); ++n) {
        arr.push_back(value_json(seq[n]));
        rep.rows.push_back({std::to_string(n), value_str(seq[n])});
    }
    rep.doc["sequence"] = std::move(arr);
}

Report cmd_poly_seq(const Args& a)
{
    Report rep;
    if (a.alpha.empty() || a.coeffs.empty())
        throw UsageError("--alpha and --coeffs are required");
    if (wants_approx(a))
        poly_sequence<double>(a, rep);
    else
        poly_sequence<Rational>(a, rep);
    return rep;
}

void write_csv(std::ostream& os, const Report& rep)
{
    for (std::size_t i = 0; i < rep.columns.size(); ++i)
        os << (i ? "," : "") << rep.columns[i];
    os << '\n';
    for (const auto& row : rep.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& cell = row[i];
            os << (i ? "," : "");
            if (cell.find_first_of(",\"") != std::string::npos) {
                os << '"';
                for (char c : cell)
                    os << (c == '"' ? "\"\"" : std::string(1, c));
                os << '"';
            } else {
                os << cell;
            }
        }
        os << '\n';
    }
}

double env_tolerance()
{
    if (const char* v = std::getenv(tolerance_env)) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw UsageError(std::string(tolerance_env) + " is not a number");
        }
    }
    return default_tolerance;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Args a;
    CLI::App app{"Heaviness of Birkhoff sums in measure-preserving systems", "heavy-cli"};
    app.require_subcommand(1);
    std::optional<double> tol;

    using Command = std::function<Report(const Args&)>;
    std::vector<std::pair<CLI::App*, Command>> commands;
    std::map<CLI::App*, std::string> default_format;

    auto add = [&](const char* name, const char* help, Command fn, const char* fmt = "json") {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--format", a.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", a.out, "write the report to a file");
        sub->add_option("--tol", tol, "approximate-mode tolerance (default $HEAVY_TOLERANCE or 1e-9)");
        commands.emplace_back(sub, std::move(fn));
        default_format[sub] = fmt;
        return sub;
    };
    auto system_opts = [&](CLI::App* sub) {
        sub->add_option("--system", a.system, "rotation:A | times:M | skew:A,K | poly:A,K | finite:PATH | cycle:v,... | morse");
        sub->add_option("--obs", a.obs, "indicator:a,b[;c,d] | step:b=v,... | const:c | table:v,...");
        sub->add_flag("--approx", a.approx, "use double precision even for rational input");
    };

    auto* trace = add("trace", "forward deficit trace and psi", cmd_trace);
    system_opts(trace);
    trace->add_option("--x", a.x, "start point")->required();
    trace->add_option("--N", a.horizon, "horizon")->required();

    auto* trace2 = add("trace2", "two-sided deficit trace", cmd_trace2);
    system_opts(trace2);
    trace2->add_option("--x", a.x, "start point")->required();
    trace2->add_option("--n1", a.n1, "window start (<= 0)")->required();
    trace2->add_option("--n2", a.n2, "window end (>= 0)")->required();

    for (auto [name, help, fn] : {std::tuple{"heavy-scan", "heaviness through N for every candidate", &cmd_heavy_scan},
                                  std::tuple{"heavy-search", "best finite-horizon heavy candidate", &cmd_heavy_search}}) {
        auto* sub = add(name, help, fn, std::string_view(name) == "heavy-scan" ? "csv" : "json");
        system_opts(sub);
        sub->add_option("--N", a.horizon, "horizon")->required();
        sub->add_option("--grid", a.grid, "grid resolution q (points i/q per coordinate)");
        sub->add_option("--points", a.points, "candidate list p1;p2;...");
        sub->add_option("--threads", a.threads, "worker threads (0 = all cores)");
    }

    auto* tss = add("two-sided-search", "orbit search for a two-sided heavy point", cmd_two_sided_search);
    system_opts(tss);
    tss->add_option("--x", a.x, "orbit seed x0")->required();
    tss->add_option("--N", a.horizon, "window half-width")->required();
    tss->add_option("--M", a.max_steps, "maximum orbit steps");

    auto* fpsi = add("finite-psi", "exact first failure time per atom", cmd_finite_psi);
    fpsi->add_option("--system", a.system, "finite:PATH or cycle:v0,v1,...")->required();
    fpsi->add_option("--atom", a.atom, "single atom (default: all)");
    fpsi->add_option("--N", a.horizon, "horizon")->required();

    auto* fheavy = add("finite-heavy", "exact H(N)", cmd_finite_heavy);
    fheavy->add_option("--system", a.system, "finite:PATH or cycle:v0,v1,...")->required();
    fheavy->add_option("--N", a.horizon, "horizon")->required();

    auto* tower = add("tower", "greedy tower peeling", cmd_tower);
    tower->add_option("--system", a.system, "finite:PATH or cycle:v0,v1,...")->required();
    tower->add_option("--N", a.horizon, "horizon")->required();

    auto* fverify = add("finite-verify", "positive-measure certificates for N = 1..N", cmd_finite_verify);
    fverify->add_option("--system", a.system, "check one system instead of random ones");
    fverify->add_option("--seed", a.seed, "random seed");
    fverify->add_option("--atoms", a.atoms, "atoms per random system");
    fverify->add_option("--count", a.count, "number of random systems");
    fverify->add_option("--N", a.horizon, "largest horizon")->required();

    auto* window = add("window", "two-sided window membership H(n1, n2)", cmd_window);
    system_opts(window);
    window->add_option("--x", a.x, "point (omit for the whole set of a finite system)");
    window->add_option("--n1", a.n1, "window start")->required();
    window->add_option("--n2", a.n2, "window end")->required();

    auto* mult = add("multiples", "deficits of x, 2x, 3x, ...", cmd_multiples);
    mult->add_option("--x", a.x, "x in [0,1)")->required();
    mult->add_option("--target", a.target, "a,b[;c,d...]")->required();
    mult->add_option("--N", a.horizon, "horizon")->required();
    mult->add_flag("--approx", a.approx, "double precision");

    auto* mexact = add("multiples-exact", "exact all-N decision for rational x", cmd_multiples_exact);
    mexact->add_option("--x", a.x, "rational x in [0,1)")->required();
    mexact->add_option("--target", a.target, "a,b[;c,d...]")->required();

    auto* cf = add("cf", "even-length continued fraction", cmd_cf);
    cf->add_option("--x", a.x, "rational x in [0,1)")->required();
    cf->add_option("--k", a.k, "divisor for the odd-index test");

    auto* sweep = add("cf-sweep", "continued-fraction characterization sweep", cmd_cf_sweep, "csv");
    sweep->add_option("--k", a.k, "interval [0,1/k)")->required();
    sweep->add_option("--qmax", a.q_max, "largest denominator")->required();

    auto* mscan = add("multiples-scan", "grid scan of heavy multiples", cmd_multiples_scan);
    mscan->add_option("--target", a.target, "a,b[;c,d...]")->required();
    mscan->add_option("--q", a.q, "grid resolution")->required();
    mscan->add_option("--N", a.horizon, "finite horizon (default: exact for all N)");

    auto* morse = add("morse", "Morse sequence prefix or shift trace", cmd_morse);
    morse->add_option("--length", a.length, "prefix length");
    morse->add_option("--offset", a.offset, "shift offset for a trace");
    morse->add_option("--N", a.horizon, "trace horizon");

    auto* poly = add("poly-seq", "polynomial sequence from the torus skew product", cmd_poly_seq);
    poly->add_option("--alpha", a.alpha, "leading coefficient")->required();
    poly->add_option("--coeffs", a.coeffs, "a0,a1,...,a_{k-1}")->required();
    poly->add_option("--N", a.horizon, "sequence length")->required();
    poly->add_flag("--approx", a.approx, "double precision");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        a.tolerance = tol ? *tol : env_tolerance();
        for (auto& [sub, fn] : commands) {
            if (!sub->parsed())
                continue;
            if (a.format.empty())
                a.format = default_format[sub];
            Report rep = fn(a);
            json head{{"command", sub->get_name()}};
            head.update(rep.doc);
            rep.doc = std::move(head);

            std::ofstream file;
            if (!a.out.empty()) {
                file.open(a.out);
                if (!file)
                    throw UsageError("cannot write '" + a.out + "'");
            }
            std::ostream& os = a.out.empty() ? out : file;
            if (a.format == "csv")
                write_csv(os, rep);
            else
                os << rep.doc.dump(2) << '\n';
            return rep.status;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace heavy::cli
