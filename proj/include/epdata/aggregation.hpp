#pragma once

#include "epdata/domain.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epdata
{

/// Convex weights keyed by zone name (the spelling of the geometry source).
struct WeightVector
{
    std::map<std::string, double> weights;

    double total() const;
};

WeightVector build_weights(std::span<const ZoneGeometry> zones, AggregationMethod method);
WeightVector uniform_weights(std::span<const std::string> zone_names);

/// Resolves a group's composite names (case-insensitively) and builds its
/// weights. `simple` needs no geometry: unmatched names keep their own spelling.
WeightVector weights_for_selection(AggregationMethod method, std::span<const ZoneGeometry> geometry,
                                   std::span<const std::string> group);

/// Weighted mean is the default for every variable; `sum` is an explicit
/// per-variable override for extensive quantities.
enum class Combine
{
    mean,
    sum,
};

/// out[t] = sum_i w_i * x_i[t]  (or sum_i x_i[t] for Combine::sum).
/// Keys of `per_zone` and `weights` are matched case-insensitively.
std::vector<double> aggregate_series(const std::map<std::string, std::vector<double>>& per_zone,
                                     const WeightVector& weights, Combine combine = Combine::mean);

struct VariableSelection
{
    std::string variable_name;
    Combine combine{Combine::mean};
};

/// Reserved group for non-zone variables, passed through unchanged.
inline constexpr std::string_view kBuildingGroup = "__building__";

struct AggregatedZone
{
    std::string name;
    std::vector<std::string> composite_zone_names; // as resolved against the input columns
    std::optional<double> floor_area;              // sum over composites, when all are known
    std::optional<double> volume;
};

struct AggregatedDataset
{
    AggregationMethod method{AggregationMethod::simple};
    /// aggregated zone (or kBuildingGroup) -> variable -> table
    std::map<std::string, std::map<std::string, VariableTable>> groups;
    std::vector<AggregatedZone> zones;
};

AggregatedDataset aggregate_dataset(const std::map<std::string, VariableTable>& tables,
                                    std::span<const ZoneGeometry> geometry, const AggregationSpec& spec,
                                    std::span<const VariableSelection> selection);

} // namespace epdata
