#pragma once

#include "epdata/aggregation.hpp"
#include "epdata/domain.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epdata
{

class Store;

// Portable nested archive:
//
//   <dir>/manifest.json
//   <dir>/<group>/<variable>.csv
//
// A group is `simulation_<id>` for generation output, or an aggregated zone
// for aggregation output. Every leaf holds one variable: a textual timestamp
// column followed by one value column per entity (`value` for site data).
// Values are written in shortest round-trip form, so re-reading is bit-exact.
struct NestedArchive
{
    enum class Kind
    {
        generation,
        aggregation,
    };

    Kind kind{Kind::generation};
    std::optional<SimulationId> simulation;
    std::optional<AggregationMethod> method;
    int time_resolution{60};
    /// group -> variable name -> table
    std::map<std::string, std::map<std::string, VariableTable>> groups;
};

std::string_view to_string(NestedArchive::Kind kind);

/// File-system safe leaf name for a variable, without extension.
std::string sanitize_name(std::string_view name);

std::string write_leaf_csv(const VariableTable& table);
/// Parses a leaf; the metadata arguments come from the manifest.
VariableTable read_leaf_csv(std::string_view text, const VariableTable& metadata,
                            const std::vector<std::string>& entities);

/// Sum of leaf sizes, without touching the file system.
std::size_t nested_leaf_bytes(const NestedArchive& archive);

/// Every non-aggregated variable of a simulation, one group.
NestedArchive load_generation_archive(const Store& store, SimulationId simulation);
/// Aggregated-zone variables produced by `method`, one group per aggregated zone.
NestedArchive load_aggregation_archive(const Store& store, SimulationId simulation, AggregationMethod method);
/// Methods for which aggregated series are stored.
std::vector<AggregationMethod> aggregation_methods(const Store& store, SimulationId simulation);

NestedArchive archive_from_dataset(const AggregatedDataset& dataset, int time_resolution,
                                   std::optional<SimulationId> simulation = std::nullopt);

/// Writes the tree; returns the leaf paths in write order.
std::vector<std::filesystem::path> write_nested(const NestedArchive& archive, const std::filesystem::path& dir);
NestedArchive read_nested(const std::filesystem::path& dir);

} // namespace epdata
