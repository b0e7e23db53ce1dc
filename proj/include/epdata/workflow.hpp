#pragma once

#include "epdata/aggregation.hpp"
#include "epdata/nested_export.hpp"
#include "epdata/parsers.hpp"
#include "epdata/stats.hpp"
#include "epdata/store.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epdata
{

/// Fraction in [0, 1].
using ProgressFn = std::function<void(double)>;

struct IngestRequest
{
    std::filesystem::path idf;
    std::optional<std::filesystem::path> eio; // without it zones carry no geometry
    std::filesystem::path output;             // tabular eplusout.csv
    BuildingRecord building;
    PrototypeAttributes attributes;
    std::string weather_file_location;
    std::string schedule_name{"default"};
    int year{kDefaultYear};
    std::size_t batch_size{10'000};
    bool compact{true};
};

struct IngestResult
{
    BuildingId building;
    SimulationId simulation;
    int time_resolution{0};
    std::size_t steps{0};
    std::size_t series{0};
    std::size_t rows{0};
    std::size_t skipped_empty_cells{0};
    std::size_t zones{0};
};

/// The simulation record an ingest of `request` would create, read from the
/// output header and first rows only.
SimulationRecord probe_simulation(const IngestRequest& request);

/// Id of an already-populated simulation with the same natural key, if any.
std::optional<SimulationId> find_populated_simulation(const Store& store, const IngestRequest& request);

/// Parse, register and load one EnergyPlus run. Throws DuplicateSimulation
/// when the simulation already holds samples.
IngestResult ingest_files(Store& store, const IngestRequest& request, const ProgressFn& progress = {});

/// Loads a generation archive as a new simulation (zone geometry unknown).
IngestResult ingest_archive(Store& store, const NestedArchive& archive, const BuildingRecord& building,
                            const std::string& weather_file_location, const std::string& schedule_name);

struct AggregateRequest
{
    SimulationId simulation;
    AggregationSpec spec;
    std::vector<VariableSelection> selection; // empty: every zone variable
    std::size_t batch_size{10'000};
};

struct AggregateResult
{
    std::map<std::string, ZoneId> aggregated_zones;
    std::vector<VariableId> variables;
    std::size_t rows{0};
    std::vector<Issue> warnings;
    AggregatedDataset dataset;
};

/// Zone-variable tables of a simulation keyed by variable name, one column
/// per zone entity (aggregated zones excluded).
std::map<std::string, VariableTable> simulation_tables(const Store& store, SimulationId simulation);
/// Geometry of the simulation's building zones that have it.
std::vector<ZoneGeometry> building_geometry(const Store& store, BuildingId building);

/// Aggregates stored series, registers the aggregated zones and stores their
/// series under the same simulation.
AggregateResult aggregate_simulation(Store& store, const AggregateRequest& request, const ProgressFn& progress = {});

/// Finds a stored variable of a simulation by id ("12"), by name when only one
/// entity carries it, or by `ENTITY:Variable Name` (case-insensitive).
/// Throws UnknownSimulation / UnknownVariable.
VariableEntry resolve_variable(const Store& store, SimulationId simulation, std::string_view reference);

/// `[start, end]` from optional ISO bounds; InvalidRange when start > end.
TimeRange time_range(const std::optional<std::string>& start, const std::optional<std::string>& end);

/// The stored series of one variable as a plottable line, labeled by its header.
/// Throws EmptyRange when nothing falls in `range`.
Series stored_series(const Store& store, SimulationId simulation, const VariableEntry& variable,
                     const TimeRange& range);

// ---------------------------------------------------------------------------
// External simulator adapter
// ---------------------------------------------------------------------------

struct SimulationOverrides
{
    std::optional<int> timestep_minutes;
    std::optional<RunPeriod> run_period;
    std::vector<OutputVariableRequest> variables; // replaces every Output:Variable when nonempty
    /// Schedule:Compact name -> replacement object text, swapped verbatim.
    std::map<std::string, std::string> schedules;
};

/// Output-variable list file: one request per line as `Variable Name`,
/// `Variable Name,Frequency` or `key,Variable Name,Frequency`; `#` starts a comment.
std::vector<OutputVariableRequest> parse_variable_list(std::string_view text);

/// Throws InvalidResolution / InvalidRecord for unusable overrides.
void validate_overrides(const SimulationOverrides& overrides);

/// Rewrites only the objects the overrides touch; everything else is kept byte for byte.
std::string apply_overrides(std::string_view idf_text, const SimulationOverrides& overrides);

struct SimulateRequest
{
    std::filesystem::path executable;
    std::filesystem::path idf;
    std::filesystem::path epw;
    SimulationOverrides overrides;
    BuildingRecord building;
    PrototypeAttributes attributes;
    std::string schedule_name{"default"};
    int year{kDefaultYear};
    std::filesystem::path work_dir; // created if missing
};

/// Runs `<exe> -r -w <epw> -d <work_dir> <rewritten idf>` and ingests the outputs.
IngestResult run_simulation(Store& store, const SimulateRequest& request, const ProgressFn& progress = {});

} // namespace epdata
