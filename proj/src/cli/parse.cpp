#include "cli/parse.hpp"

#include <cmath>
#include <cstdio>

namespace heavy::cli {

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

bool is_irrational_literal(std::string_view text)
{
    return text.find("sqrt(") != std::string_view::npos;
}

double parse_real(std::string_view text)
{
    if (text.starts_with("sqrt(") && text.ends_with(")")) {
        double radicand = parse_exact(text.substr(5, text.size() - 6)).to_double();
        if (radicand < 0)
            throw UsageError("square root of a negative number: '" + std::string(text) + "'");
        return std::sqrt(radicand);
    }
    return parse_exact(text).to_double();
}

Rational parse_exact(std::string_view text)
{
    if (is_irrational_literal(text))
        throw UsageError("'" + std::string(text) + "' is irrational; use --approx");
    try {
        return Rational::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::int64_t parse_int(std::string_view text)
{
    Rational r = parse_exact(text);
    if (!r.is_integer())
        throw UsageError("expected an integer, got '" + std::string(text) + "'");
    return r.num();
}

SystemSpec parse_system_spec(std::string_view text)
{
    auto colon = text.find(':');
    auto kind = text.substr(0, colon);
    std::string body = colon == std::string_view::npos ? std::string() : std::string(text.substr(colon + 1));

    SystemSpec spec;
    std::size_t want = 1;
    if (kind == "rotation") {
        spec.kind = SystemSpec::Kind::rotation;
    } else if (kind == "times") {
        spec.kind = SystemSpec::Kind::times;
    } else if (kind == "skew" || kind == "poly") {
        spec.kind = kind == "skew" ? SystemSpec::Kind::skew : SystemSpec::Kind::poly;
        want = 2;
    } else if (kind == "finite") {
        spec.kind = SystemSpec::Kind::finite;
        spec.args = {body};
        return spec;
    } else if (kind == "cycle") {
        spec.kind = SystemSpec::Kind::cycle;
        spec.args = split(body, ',');
        return spec;
    } else if (kind == "morse") {
        spec.kind = SystemSpec::Kind::morse;
        return spec;
    } else {
        throw UsageError("unknown system '" + std::string(text) + "'");
    }
    spec.args = split(body, ',');
    if (spec.args.size() != want || spec.args.front().empty())
        throw UsageError("system '" + std::string(text) + "' expects " + std::to_string(want) + " parameter(s)");
    return spec;
}

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace heavy::cli
