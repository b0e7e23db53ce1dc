#include "epdata/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace epdata
{

double WeightVector::total() const
{
    double sum = 0.0;
    for (const auto& [zone, w] : weights)
    {
        sum += w;
    }
    return sum;
}

WeightVector build_weights(std::span<const ZoneGeometry> zones, AggregationMethod method)
{
    if (zones.empty())
    {
        fail(ErrorCode::EmptyZoneList, "cannot build weights for an empty zone list");
    }
    std::set<std::string> keys;
    for (const auto& zone : zones)
    {
        if (!keys.insert(zone_key(zone.zone_name)).second)
        {
            fail(ErrorCode::KeyMismatch, fmt::format("zone '{}' listed twice", zone.zone_name));
        }
    }

    WeightVector out;
    if (method == AggregationMethod::simple)
    {
        const double w = 1.0 / static_cast<double>(zones.size());
        for (const auto& zone : zones)
        {
            out.weights[zone.zone_name] = w;
        }
        return out;
    }

    const bool by_area = method == AggregationMethod::area_weighted;
    double total = 0.0;
    for (const auto& zone : zones)
    {
        const double measure = by_area ? zone.floor_area : zone.volume;
        if (!(measure > 0.0) || !std::isfinite(measure))
        {
            fail(ErrorCode::MissingGeometry,
                 fmt::format("zone '{}' has no usable {}", zone.zone_name, by_area ? "floor area" : "volume"));
        }
        total += measure;
    }
    for (const auto& zone : zones)
    {
        out.weights[zone.zone_name] = (by_area ? zone.floor_area : zone.volume) / total;
    }
    return out;
}

WeightVector uniform_weights(std::span<const std::string> zone_names)
{
    if (zone_names.empty())
    {
        fail(ErrorCode::EmptyZoneList, "cannot build weights for an empty zone list");
    }
    WeightVector out;
    const double w = 1.0 / static_cast<double>(zone_names.size());
    for (const auto& name : zone_names)
    {
        out.weights[name] = w;
    }
    return out;
}

WeightVector weights_for_selection(AggregationMethod method, std::span<const ZoneGeometry> geometry,
                                   std::span<const std::string> group)
{
    std::map<std::string, const ZoneGeometry*> by_key;
    for (const auto& zone : geometry)
    {
        by_key.emplace(zone_key(zone.zone_name), &zone);
    }

    std::set<std::string> seen;
    std::vector<std::string> names;
    std::vector<ZoneGeometry> resolved;
    for (const auto& composite : group)
    {
        const std::string key = zone_key(composite);
        if (!seen.insert(key).second)
        {
            continue;
        }
        const auto it = by_key.find(key);
        if (it == by_key.end())
        {
            if (method != AggregationMethod::simple)
            {
                fail(ErrorCode::MissingGeometry, fmt::format("no geometry for zone '{}'", composite));
            }
            names.emplace_back(trim(composite));
            continue;
        }
        names.push_back(it->second->zone_name);
        resolved.push_back(*it->second);
    }
    if (method == AggregationMethod::simple)
    {
        return uniform_weights(names);
    }
    return build_weights(resolved, method);
}

std::vector<double> aggregate_series(const std::map<std::string, std::vector<double>>& per_zone,
                                     const WeightVector& weights, Combine combine)
{
    std::map<std::string, const std::vector<double>*> series;
    for (const auto& [zone, values] : per_zone)
    {
        if (!series.emplace(zone_key(zone), &values).second)
        {
            fail(ErrorCode::KeyMismatch, fmt::format("zone '{}' supplied twice", zone));
        }
    }
    std::map<std::string, double> w;
    for (const auto& [zone, weight] : weights.weights)
    {
        w.emplace(zone_key(zone), weight);
    }

    std::vector<std::string> missing;
    std::vector<std::string> extra;
    for (const auto& [key, _] : w)
    {
        if (!series.contains(key))
        {
            missing.push_back(key);
        }
    }
    for (const auto& [key, _] : series)
    {
        if (!w.contains(key))
        {
            extra.push_back(key);
        }
    }
    if (!missing.empty() || !extra.empty() || series.empty())
    {
        fail(ErrorCode::KeyMismatch, fmt::format("zones without series: [{}]; series without weights: [{}]",
                                                 fmt::join(missing, ", "), fmt::join(extra, ", ")));
    }

    const std::size_t length = series.begin()->second->size();
    for (const auto& [key, values] : series)
    {
        if (values->size() != length)
        {
            fail(ErrorCode::LengthMismatch,
                 fmt::format("zone '{}' has {} values, expected {}", key, values->size(), length));
        }
    }

    std::vector<double> out(length);
    for (std::size_t t = 0; t < length; ++t)
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        bool gap = false;
        for (const auto& [key, values] : series)
        {
            const double x = (*values)[t];
            gap = gap || std::isnan(x);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (gap)
        {
            out[t] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        if (combine == Combine::sum)
        {
            double sum = 0.0;
            for (const auto& [key, values] : series)
            {
                sum += (*values)[t];
            }
            out[t] = sum;
            continue;
        }
        // Offsetting by the minimum keeps equal inputs exact; the clamp absorbs
        // rounding so the result stays inside the convex hull.
        double acc = 0.0;
        for (const auto& [key, values] : series)
        {
            acc += w.at(key) * ((*values)[t] - lo);
        }
        out[t] = std::clamp(lo + acc, lo, hi);
    }
    return out;
}

AggregatedDataset aggregate_dataset(const std::map<std::string, VariableTable>& tables,
                                    std::span<const ZoneGeometry> geometry, const AggregationSpec& spec,
                                    std::span<const VariableSelection> selection)
{
    std::set<std::string> zone_names;
    for (const auto& [name, table] : tables)
    {
        if (table.kind == SeriesKind::zone)
        {
            for (const auto& [entity, values] : table.columns)
            {
                zone_names.insert(entity);
            }
        }
    }
    const AggregationSpec valid = require(validate_aggregation_spec(spec, zone_names));

    std::vector<VariableSelection> chosen(selection.begin(), selection.end());
    if (chosen.empty())
    {
        for (const auto& [name, table] : tables)
        {
            chosen.push_back({name, Combine::mean});
        }
    }
    for (const auto& item : chosen)
    {
        if (!tables.contains(item.variable_name))
        {
            fail(ErrorCode::UnknownVariable, fmt::format("variable '{}' is not in the dataset", item.variable_name));
        }
    }

    std::map<std::string, const ZoneGeometry*> geometry_by_key;
    for (const auto& zone : geometry)
    {
        geometry_by_key.emplace(zone_key(zone.zone_name), &zone);
    }

    AggregatedDataset out;
    out.method = valid.method;
    for (const auto& group : valid.groups)
    {
        const WeightVector weights = weights_for_selection(valid.method, geometry, group.composite_zone_names);
        std::set<std::string> members;
        for (const auto& [zone, w] : weights.weights)
        {
            members.insert(zone_key(zone));
        }

        AggregatedZone zone{group.aggregated_zone_name, {}, 0.0, 0.0};
        for (const auto& [name, w] : weights.weights)
        {
            zone.composite_zone_names.push_back(name);
            const auto it = geometry_by_key.find(zone_key(name));
            if (it == geometry_by_key.end())
            {
                zone.floor_area.reset();
                zone.volume.reset();
            }
            else if (zone.floor_area)
            {
                *zone.floor_area += it->second->floor_area;
                *zone.volume += it->second->volume;
            }
        }
        out.zones.push_back(std::move(zone));

        auto& group_tables = out.groups[group.aggregated_zone_name];
        for (const auto& item : chosen)
        {
            const VariableTable& table = tables.at(item.variable_name);
            if (table.kind != SeriesKind::zone)
            {
                continue;
            }
            std::map<std::string, std::vector<double>> per_zone;
            for (const auto& [entity, values] : table.columns)
            {
                if (members.contains(zone_key(entity)))
                {
                    per_zone.emplace(entity, values);
                }
            }
            VariableTable reduced;
            reduced.variable_name = table.variable_name;
            reduced.kind = table.kind;
            reduced.unit = table.unit;
            reduced.frequency = table.frequency;
            reduced.timestamps = table.timestamps;
            try
            {
                reduced.columns.emplace(group.aggregated_zone_name, aggregate_series(per_zone, weights, item.combine));
            }
            catch (const Error& e)
            {
                fail(e.code(), fmt::format("{} in group '{}': {}", table.variable_name, group.aggregated_zone_name,
                                           e.detail()));
            }
            group_tables.emplace(table.variable_name, std::move(reduced));
        }
    }

    for (const auto& item : chosen)
    {
        const VariableTable& table = tables.at(item.variable_name);
        if (table.kind != SeriesKind::zone)
        {
            out.groups[std::string(kBuildingGroup)].emplace(table.variable_name, table);
        }
    }
    return out;
}

} // namespace epdata
