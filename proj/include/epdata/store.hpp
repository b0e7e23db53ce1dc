#pragma once

#include "epdata/aggregation.hpp"
#include "epdata/domain.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

struct sqlite3;

namespace epdata
{

/// Free-form prototype attributes (heating system, foundation type, ...).
using PrototypeAttributes = std::map<std::string, std::string>;

struct TimeRange
{
    Instant start;
    Instant end; // inclusive

    static TimeRange all();
    bool contains(Instant t) const { return t >= start && t <= end; }
};

struct VariableEntry
{
    VariableId variable_id;
    SeriesDescriptor descriptor;
    std::optional<ZoneId> zone_id;
};

struct ZoneEntry
{
    ZoneId zone_id;
    std::string zone_name;
    std::optional<double> floor_area;
    std::optional<double> volume;
    bool is_aggregated{false};
};

struct AggregationLink
{
    ZoneId aggregated_zone_id;
    ZoneId composite_zone_id;
    AggregationMethod method;
};

struct InsertOptions
{
    std::size_t batch_size{10'000};
    /// Called after each committed batch with the running total.
    std::function<void(std::size_t)> on_batch;
};

struct TableUsage
{
    std::string table;
    std::size_t rows{0};
    std::size_t bytes{0};
};

struct StorageReport
{
    std::vector<TableUsage> tables;
    std::size_t store_bytes{0};
    std::size_t naive_bytes{0};
    double reduction_factor{0.0}; // naive / store; 0 when there is nothing to compare
};

/// The normalized relational store. One instance owns one SQLite connection
/// and is not thread-safe; open one per thread. Any number of readers may
/// coexist with a single writer (WAL journal).
class Store
{
public:
    static Store open(const std::filesystem::path& path, bool read_only = false);

    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    ~Store();

    const std::filesystem::path& path() const { return path_; }

    /// Creates every table and key constraint; idempotent.
    void init_schema();
    /// Logical table names; `timeseries` is served by a virtual table over its chunks.
    static const std::vector<std::string>& table_names();
    std::vector<std::string> existing_tables() const;

    BuildingId upsert_building(const BuildingRecord& record, const PrototypeAttributes& attributes = {});
    /// Building with the same natural key (kind, prototype, standard, climate).
    std::optional<BuildingId> find_building(const BuildingRecord& record) const;
    std::optional<BuildingRecord> get_building(BuildingId id) const;
    PrototypeAttributes prototype_attributes(BuildingId id) const;

    SimulationId upsert_simulation(const SimulationRecord& record);
    std::optional<SimulationId> find_simulation(const SimulationRecord& record) const;
    std::optional<SimulationRecord> get_simulation(SimulationId id) const;
    std::vector<SimulationRecord> list_simulations() const;

    /// Identical zones (same name and dimensions) share one row across buildings.
    std::map<std::string, ZoneId> register_zones(std::span<const ZoneGeometry> geometry, BuildingId building);
    /// Zones whose geometry is unknown (no EIO); stored with NULL dimensions.
    std::map<std::string, ZoneId> register_zone_names(std::span<const std::string> names, BuildingId building);
    std::map<std::string, ZoneId> register_aggregation(const AggregationSpec& spec,
                                                       const std::map<std::string, ZoneId>& zone_ids,
                                                       std::span<const AggregatedZone> aggregated,
                                                       BuildingId building);
    std::vector<ZoneEntry> zones_for_building(BuildingId building) const;
    std::optional<ZoneEntry> get_zone(ZoneId id) const;
    std::vector<AggregationLink> aggregation_links(ZoneId aggregated_zone) const;

    /// Result aligned with the input. Zone-kind entities resolve
    /// case-insensitively against `zone_ids` when given, else against the
    /// building's zones.
    std::vector<VariableId> register_variables(std::span<const SeriesDescriptor> descriptors, BuildingId building,
                                               const std::map<std::string, ZoneId>& zone_ids = {});
    std::optional<VariableEntry> get_variable(VariableId id) const;
    /// Variables that have samples for the simulation.
    std::vector<VariableEntry> list_variables(SimulationId simulation) const;

    /// Result aligned with the input; requires strictly increasing instants.
    std::vector<DatetimeId> intern_datetimes(std::span<const Instant> timestamps);

    /// All-or-nothing per batch. On failure, prior batches stay committed and
    /// the error names the resume point.
    std::size_t bulk_insert_samples(std::span<const SampleTriple> rows, const InsertOptions& options = {});
    /// Pull-based stream; `next` returns false at end of input.
    std::size_t bulk_insert_samples(const std::function<bool(SampleTriple&)>& next,
                                    const InsertOptions& options = {});

    /// One table per variable, holding a single column keyed by the entity.
    std::map<VariableId, VariableTable> query_series(SimulationId simulation, std::span<const VariableId> variables,
                                                     const TimeRange& range = TimeRange::all()) const;
    std::optional<TimeRange> data_range(SimulationId simulation) const;

    std::size_t count_rows(const std::string& table) const;
    std::size_t sample_count(SimulationId simulation) const;
    /// timeseries rows whose simulation, variable or datetime has no parent row.
    std::size_t count_orphan_samples() const;

    /// Merges undersized chunks and reclaims free pages.
    void compact();

    StorageReport storage_report(const std::optional<std::filesystem::path>& comparison = {});

    /// Raw connection for read-only SQL (e.g. integrity checks). Owned by the store.
    sqlite3* connection() const { return db_.get(); }

private:
    struct Closer
    {
        void operator()(sqlite3* db) const noexcept;
    };

    Store(std::unique_ptr<sqlite3, Closer> db, std::filesystem::path path, bool read_only);

    std::size_t insert_batch(std::span<const SampleTriple> rows);
    std::size_t naive_export_bytes() const;

    std::unique_ptr<sqlite3, Closer> db_;
    std::filesystem::path path_;
    bool read_only_{false};
};

} // namespace epdata
