#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heavy/circle.hpp"
#include "heavy/observable.hpp"

namespace heavy::cli {

// Bad flags or arguments; reported with exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep);

// Irrational literals: "sqrt(n)" or "sqrt(p/q)". Anything else is read as an
// exact fraction or decimal.
bool is_irrational_literal(std::string_view text);
double parse_real(std::string_view text);
Rational parse_exact(std::string_view text);

template <Scalar T>
T parse_scalar(std::string_view text)
{
    if constexpr (is_exact_v<T>)
        return parse_exact(text);
    else
        return parse_real(text);
}

std::int64_t parse_int(std::string_view text);

// "a,b" or "a,b;c,d;..." as half-open arcs.
template <Scalar T>
IntervalUnion<T> parse_intervals(std::string_view text)
{
    std::vector<std::pair<T, T>> arcs;
    for (const auto& part : split(text, ';')) {
        auto ends = split(part, ',');
        if (ends.size() != 2)
            throw UsageError("interval '" + part + "' must be 'a,b'");
        arcs.emplace_back(parse_scalar<T>(ends[0]), parse_scalar<T>(ends[1]));
    }
    return IntervalUnion<T>(std::move(arcs));
}

// Any circle observable behind one type, so commands are written once per
// scalar type.
template <Scalar T>
class CircleObservable {
public:
    using value_type = T;

    template <class G>
    explicit CircleObservable(G g) : mean_(g.mean()), eval_(std::move(g))
    {
    }

    T operator()(const T& x) const { return eval_(x); }
    T mean() const { return mean_; }

private:
    T mean_;
    std::function<T(const T&)> eval_;
};

// indicator:a,b[;c,d...]   step:b0=v0,b1=v1,...   const:c
template <Scalar T>
CircleObservable<T> parse_circle_observable(std::string_view text)
{
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw UsageError("observable '" + std::string(text) + "' must be kind:parameters");
    auto kind = text.substr(0, colon);
    auto body = text.substr(colon + 1);
    if (kind == "indicator")
        return CircleObservable<T>(Indicator<T>(parse_intervals<T>(body)));
    if (kind == "const")
        return CircleObservable<T>(Constant<T>(parse_scalar<T>(body)));
    if (kind == "step") {
        std::vector<T> breaks;
        std::vector<T> values;
        for (const auto& piece : split(body, ',')) {
            auto eq = piece.find('=');
            if (eq == std::string::npos)
                throw UsageError("step piece '" + piece + "' must be breakpoint=value");
            breaks.push_back(parse_scalar<T>(piece.substr(0, eq)));
            values.push_back(parse_scalar<T>(piece.substr(eq + 1)));
        }
        return CircleObservable<T>(StepFunction<T>(std::move(breaks), std::move(values)));
    }
    throw UsageError("unknown observable kind '" + std::string(kind) + "'");
}

struct SystemSpec {
    enum class Kind { rotation, times, skew, poly, finite, cycle, morse };

    Kind kind = Kind::rotation;
    std::vector<std::string> args;
};

// rotation:A  times:M  skew:A,K  poly:A,K  finite:PATH  cycle:v0,v1,...  morse
SystemSpec parse_system_spec(std::string_view text);

std::string format_real(double v);

}  // namespace heavy::cli
