#pragma once

#include "epdata/errors.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace epdata
{

// Surrogate keys are 32-bit; zero means "not yet assigned".
template <class Tag>
struct Id
{
    std::int32_t value{0};

    constexpr explicit operator bool() const noexcept { return value > 0; }
    friend constexpr auto operator<=>(Id, Id) = default;
};

using BuildingId = Id<struct BuildingTag>;
using SimulationId = Id<struct SimulationTag>;
using VariableId = Id<struct VariableTag>;
using ZoneId = Id<struct ZoneTag>;
using DatetimeId = Id<struct DatetimeTag>;

/// A wall-clock instant without time zone, second resolution.
using Instant = std::chrono::sys_seconds;

inline constexpr int kDefaultYear = 2023;

Instant make_instant(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);
/// `YYYY-MM-DDTHH:MM:SS`
std::string format_iso(Instant t);
/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS]` and the same with a space separator.
Instant parse_iso(std::string_view text);

enum class PrototypeKind
{
    commercial,
    residential,
    manufactured,
};

enum class SeriesKind
{
    zone,
    surface,
    node,
    schedule,
    site,
};

enum class AggregationMethod
{
    simple,
    area_weighted,
    volume_weighted,
};

std::string_view to_string(PrototypeKind kind);
std::string_view to_string(SeriesKind kind);
std::string_view to_string(AggregationMethod method);
PrototypeKind parse_prototype_kind(std::string_view text);
SeriesKind parse_series_kind(std::string_view text);
AggregationMethod parse_aggregation_method(std::string_view text);

/// Case-insensitive, whitespace-trimmed key used for every zone-name comparison.
/// EnergyPlus upper-cases names in report files while IDF input keeps the user's case.
std::string zone_key(std::string_view name);
std::string_view trim(std::string_view text);

struct BuildingRecord
{
    BuildingId building_id;
    PrototypeKind prototype_kind{PrototypeKind::commercial};
    std::string prototype_name;
    std::string energy_standard;
    std::string climate_zone;
};

struct SimulationRecord
{
    SimulationId simulation_id;
    BuildingId building_id;
    std::string weather_file_location;
    int time_resolution{60}; // minutes
    std::string schedule_name;
};

struct SeriesDescriptor
{
    std::string variable_name;
    SeriesKind kind{SeriesKind::site};
    std::optional<std::string> entity;
    std::string unit;
    std::string frequency;

    /// Throws InvalidRecord when the kind/entity pairing is inconsistent.
    static SeriesDescriptor make(std::string variable_name, SeriesKind kind, std::optional<std::string> entity,
                                 std::string unit, std::string frequency);

    /// EnergyPlus-style `ENTITY:Variable Name [Unit](Frequency)`.
    std::string header() const;

    friend bool operator==(const SeriesDescriptor&, const SeriesDescriptor&) = default;
    friend auto operator<=>(const SeriesDescriptor&, const SeriesDescriptor&) = default;
};

struct ZoneGeometry
{
    std::string zone_name;
    double floor_area{0.0}; // m2
    double volume{0.0};     // m3

    static ZoneGeometry make(std::string zone_name, double floor_area, double volume);
};

struct AggregationGroup
{
    std::string aggregated_zone_name;
    std::vector<std::string> composite_zone_names;
};

struct AggregationSpec
{
    AggregationMethod method{AggregationMethod::simple};
    std::vector<AggregationGroup> groups;
};

/// Table of one variable: a shared calendar plus one value column per entity.
/// Site-level variables have a single column keyed by the empty string.
struct VariableTable
{
    std::string variable_name;
    SeriesKind kind{SeriesKind::site};
    std::string unit;
    std::string frequency;
    std::vector<Instant> timestamps;
    std::map<std::string, std::vector<double>> columns;

    /// Throws LengthMismatch / NonMonotonicInput when invariants fail.
    void check() const;
};

struct SampleTriple
{
    SimulationId simulation_id;
    VariableId variable_id;
    DatetimeId datetime_id;
    double value{0.0};

    /// Rejects NaN and infinities.
    static SampleTriple make(SimulationId simulation, VariableId variable, DatetimeId datetime, double value);
};

struct Issue
{
    ErrorCode code;
    std::string subject;
    std::string message;
};

/// Result of a validation: the input when every invariant holds, plus any
/// errors (which void the value) and warnings (which do not).
template <class T>
struct Checked
{
    std::optional<T> value;
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    explicit operator bool() const noexcept { return value.has_value(); }
};

bool is_valid_resolution(int minutes);

Checked<SimulationRecord> validate_simulation(const SimulationRecord& record);
Checked<BuildingRecord> validate_building(const BuildingRecord& record);
Checked<AggregationSpec> validate_aggregation_spec(const AggregationSpec& spec, const std::set<std::string>& known_zones);

/// Throws the first error of a failed check.
template <class T>
T require(Checked<T> checked)
{
    if (!checked.value)
    {
        const Issue& first = checked.errors.front();
        fail(first.code, first.message);
    }
    return std::move(*checked.value);
}

} // namespace epdata
