#include "epdata/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/core.h>

namespace epdata
{

namespace
{

// Neumaier-compensated sum; inputs arrive sorted so the result does not
// depend on the caller's ordering.
double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values)
    {
        const double t = sum + v;
        carry += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + carry;
}

} // namespace

std::size_t sturges_bins(std::size_t n)
{
    if (n <= 1)
    {
        return 1;
    }
    return static_cast<std::size_t>(std::bit_width(n - 1)) + 1; // bit_width(n-1) == ceil(log2 n)
}

DistributionSummary describe(std::span<const double> values, std::optional<std::size_t> bins)
{
    std::vector<double> finite;
    finite.reserve(values.size());
    for (double v : values)
    {
        if (std::isfinite(v))
        {
            finite.push_back(v);
        }
    }
    if (finite.empty())
    {
        fail(ErrorCode::EmptySeries, fmt::format("no finite values among {}", values.size()));
    }
    std::sort(finite.begin(), finite.end());

    DistributionSummary s;
    s.count = finite.size();
    s.dropped = values.size() - finite.size();
    s.min = finite.front();
    s.max = finite.back();
    s.range = s.max - s.min;
    const auto n = static_cast<double>(s.count);
    s.mean = std::clamp(compensated_sum(finite) / n, s.min, s.max);
    if (s.count > 1)
    {
        std::vector<double> squares;
        squares.reserve(finite.size());
        for (double v : finite)
        {
            squares.push_back((v - s.mean) * (v - s.mean));
        }
        std::sort(squares.begin(), squares.end());
        s.variance = compensated_sum(squares) / (n - 1.0);
    }

    const std::size_t k = s.range > 0.0 ? std::max<std::size_t>(bins.value_or(sturges_bins(s.count)), 1) : 1;
    if (bins && *bins == 0)
    {
        fail(ErrorCode::InvalidRecord, "bin count must be at least 1");
    }
    const double width = s.range / static_cast<double>(k);
    s.histogram.resize(k);
    for (std::size_t i = 0; i < k; ++i)
    {
        s.histogram[i].lower = s.min + width * static_cast<double>(i);
        s.histogram[i].upper = i + 1 == k ? s.max : s.min + width * static_cast<double>(i + 1);
    }
    for (double v : finite)
    {
        std::size_t i = k - 1;
        if (width > 0.0)
        {
            i = std::min(k - 1, static_cast<std::size_t>((v - s.min) / width));
            // Edges are computed, so nudge to the bin whose bounds hold v.
            while (i > 0 && v < s.histogram[i].lower)
            {
                --i;
            }
            while (i + 1 < k && v >= s.histogram[i + 1].lower)
            {
                ++i;
            }
        }
        ++s.histogram[i].count;
    }
    return s;
}

ScatterPayload scatter(const Series& x, const Series& y)
{
    if (x.timestamps.size() != x.values.size() || y.timestamps.size() != y.values.size())
    {
        fail(ErrorCode::LengthMismatch, "series timestamps and values differ in length");
    }
    // Index by instant so unsorted inputs still join correctly.
    std::vector<std::size_t> xi(x.timestamps.size());
    std::vector<std::size_t> yi(y.timestamps.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
    {
        xi[i] = i;
    }
    for (std::size_t i = 0; i < yi.size(); ++i)
    {
        yi[i] = i;
    }
    std::stable_sort(xi.begin(), xi.end(), [&](auto a, auto b) { return x.timestamps[a] < x.timestamps[b]; });
    std::stable_sort(yi.begin(), yi.end(), [&](auto a, auto b) { return y.timestamps[a] < y.timestamps[b]; });

    ScatterPayload out;
    out.x_label = x.label;
    out.y_label = y.label;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < xi.size() && j < yi.size())
    {
        const Instant tx = x.timestamps[xi[i]];
        const Instant ty = y.timestamps[yi[j]];
        if (tx < ty)
        {
            ++i;
        }
        else if (ty < tx)
        {
            ++j;
        }
        else
        {
            const double vx = x.values[xi[i]];
            const double vy = y.values[yi[j]];
            if (std::isfinite(vx) && std::isfinite(vy))
            {
                out.timestamps.push_back(tx);
                out.x.push_back(vx);
                out.y.push_back(vy);
            }
            ++i;
            ++j;
        }
    }
    if (out.timestamps.empty())
    {
        fail(ErrorCode::NoOverlap, fmt::format("'{}' and '{}' share no timestamps", x.label, y.label));
    }
    return out;
}

Series column_series(const VariableTable& table, std::string_view entity, std::string label)
{
    const auto it = std::find_if(table.columns.begin(), table.columns.end(),
                                 [&](const auto& c) { return zone_key(c.first) == zone_key(entity); });
    if (it == table.columns.end())
    {
        fail(ErrorCode::UnknownZoneEntity,
             fmt::format("'{}' has no column for '{}'", table.variable_name, std::string(entity)));
    }
    if (label.empty())
    {
        label = it->first.empty() ? table.variable_name : fmt::format("{}:{}", it->first, table.variable_name);
    }
    return Series{std::move(label), table.timestamps, it->second};
}

std::map<std::string, VariableTable> timeseries_slice(const std::map<std::string, VariableTable>& tables,
                                                      Instant start, Instant end)
{
    if (start > end)
    {
        fail(ErrorCode::InvalidRange, fmt::format("start {} is after end {}", format_iso(start), format_iso(end)));
    }
    std::map<std::string, VariableTable> out;
    bool any = false;
    for (const auto& [name, table] : tables)
    {
        VariableTable sliced = table;
        sliced.timestamps.clear();
        for (auto& [entity, column] : sliced.columns)
        {
            column.clear();
        }
        for (std::size_t i = 0; i < table.timestamps.size(); ++i)
        {
            const Instant t = table.timestamps[i];
            if (t < start || t > end)
            {
                continue;
            }
            sliced.timestamps.push_back(t);
            for (const auto& [entity, column] : table.columns)
            {
                sliced.columns[entity].push_back(column[i]);
            }
        }
        any = any || !sliced.timestamps.empty();
        out.emplace(name, std::move(sliced));
    }
    if (!any)
    {
        fail(ErrorCode::EmptyRange,
             fmt::format("no samples between {} and {}", format_iso(start), format_iso(end)));
    }
    return out;
}

} // namespace epdata
