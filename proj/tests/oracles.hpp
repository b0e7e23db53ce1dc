#pragma once

// Reference computations written without reusing library code. They favour
// obviousness over speed: long double accumulation, linear scans, regexes.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace oracle
{

// Per-timestep weighted sum: out[t] = sum_i w_i * x_i[t].
inline std::vector<long double> weighted_sum(const std::vector<std::vector<double>>& xs,
                                             const std::vector<long double>& w)
{
    std::vector<long double> out(xs.empty() ? 0 : xs[0].size(), 0.0L);
    for (std::size_t t = 0; t < out.size(); ++t)
    {
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            out[t] += w[i] * static_cast<long double>(xs[i][t]);
        }
    }
    return out;
}

inline std::vector<long double> proportional(const std::vector<double>& measure)
{
    long double total = 0.0L;
    for (double m : measure)
    {
        total += m;
    }
    std::vector<long double> w;
    for (double m : measure)
    {
        w.push_back(static_cast<long double>(m) / total);
    }
    return w;
}

inline std::vector<long double> uniform(std::size_t n)
{
    return std::vector<long double>(n, 1.0L / static_cast<long double>(n));
}

inline bool close_rel(long double expected, double actual, long double rel)
{
    const long double scale = std::max(std::fabs(expected), 1.0L);
    return std::fabs(expected - static_cast<long double>(actual)) <= rel * scale;
}

struct Moments
{
    long double mean{0};
    long double variance{0};
};

// Two-pass sample moments.
inline Moments moments(const std::vector<double>& v)
{
    Moments m;
    for (double x : v)
    {
        m.mean += x;
    }
    m.mean /= static_cast<long double>(v.size());
    if (v.size() > 1)
    {
        for (double x : v)
        {
            m.variance += (x - m.mean) * (x - m.mean);
        }
        m.variance /= static_cast<long double>(v.size() - 1);
    }
    return m;
}

// Smallest k with 2^k >= n, plus one.
inline std::size_t sturges(std::size_t n)
{
    std::size_t k = 0;
    while ((std::uint64_t{1} << k) < n)
    {
        ++k;
    }
    return k + 1;
}

// Seconds since 1970-01-01 by counting whole days.
inline std::int64_t epoch_seconds(int year, int month, int day, int hour, int minute, int second)
{
    const auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
    static const int month_days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    std::int64_t days = 0;
    for (int y = 1970; y < year; ++y)
    {
        days += leap(y) ? 366 : 365;
    }
    for (int m = 1; m < month; ++m)
    {
        days += month_days[m - 1] + (m == 2 && leap(year) ? 1 : 0);
    }
    days += day - 1;
    return days * 86400 + hour * 3600 + minute * 60 + second;
}

struct Header
{
    std::string kind; // zone, surface, node, schedule, site
    std::optional<std::string> entity;
    std::string name;
    std::string unit;
    std::string frequency;
};

inline std::string strip(const std::string& s)
{
    static const std::regex edges(R"(^\s+|\s+$)");
    return std::regex_replace(s, edges, "");
}

inline std::string upper(std::string s)
{
    for (char& c : s)
    {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return s;
}

// Header grammar: `[ENTITY:]Name [Unit][(Frequency)]`. The entity ends at the
// last ':' before the first '['; the unit runs to the first ']' after it.
inline std::optional<Header> header(const std::string& raw)
{
    static const std::regex shape(R"(^([^\[]*)\[([^\]]*)\]([\s\S]*)$)");
    static const std::regex last_colon(R"(^([\s\S]*):([^:]*)$)");
    static const std::regex bad_tail(R"(^[^(]*\([^)]*$)");
    static const std::regex freq(R"(^[^(]*\(([^)]*)\)[\s\S]*$)");

    const std::string text = strip(raw);
    std::smatch m;
    if (!std::regex_match(text, m, shape))
    {
        return std::nullopt;
    }
    const std::string qualified = m[1].str();
    Header h;
    h.unit = strip(m[2].str());
    const std::string tail = m[3].str();

    std::string entity;
    std::string name = qualified;
    std::smatch c;
    if (std::regex_match(qualified, c, last_colon))
    {
        entity = strip(c[1].str());
        name = c[2].str();
    }
    name = strip(name);
    if (name.empty())
    {
        return std::nullopt;
    }
    if (std::regex_match(tail, bad_tail))
    {
        return std::nullopt;
    }
    std::smatch f;
    if (std::regex_match(tail, f, freq))
    {
        h.frequency = strip(f[1].str());
    }

    const std::string uname = upper(name);
    const auto starts = [&](const char* p) { return uname.rfind(p, 0) == 0; };
    h.kind = starts("ZONE ") ? "zone"
             : starts("SURFACE ") ? "surface"
             : starts("SYSTEM NODE ") ? "node"
             : starts("SCHEDULE ") ? "schedule"
                                   : "site";
    if (h.kind == "site")
    {
        const std::string ue = upper(entity);
        const bool building_level =
            entity.empty() || ue == "ENVIRONMENT" || ue == "WHOLE BUILDING" || ue == "FACILITY" || ue == "BUILDING";
        h.name = building_level ? name : entity + ":" + name;
        return h;
    }
    if (entity.empty())
    {
        return std::nullopt;
    }
    h.entity = entity;
    h.name = name;
    return h;
}

} // namespace oracle
