#include "epdata/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/core.h>

namespace epdata
{

using namespace std::chrono;

Instant make_instant(int year, unsigned month, unsigned day, int hour, int minute, int second)
{
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    return sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
}

std::string format_iso(Instant t)
{
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss hms{t - day_start};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

namespace
{

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out)
{
    if (pos + width > text.size())
    {
        return false;
    }
    const char* first = text.data() + pos;
    const char* last = first + width;
    if (!std::all_of(first, last, [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }))
    {
        return false;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

} // namespace

Instant parse_iso(std::string_view text)
{
    text = trim(text);
    int y = 0;
    int mo = 0;
    int d = 0;
    int h = 0;
    int mi = 0;
    int s = 0;
    const bool date_ok = text.size() >= 10 && read_int(text, 0, 4, y) && text[4] == '-' &&
                         read_int(text, 5, 2, mo) && text[7] == '-' && read_int(text, 8, 2, d);
    if (!date_ok)
    {
        fail(ErrorCode::BadStamp, fmt::format("not an ISO-8601 date: '{}'", text));
    }
    if (text.size() > 10)
    {
        const bool time_ok = (text[10] == 'T' || text[10] == ' ') && text.size() >= 16 && read_int(text, 11, 2, h) &&
                             text[13] == ':' && read_int(text, 14, 2, mi) &&
                             (text.size() == 16 || (text.size() == 19 && text[16] == ':' && read_int(text, 17, 2, s)));
        if (!time_ok)
        {
            fail(ErrorCode::BadStamp, fmt::format("not an ISO-8601 date-time: '{}'", text));
        }
    }
    const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                             std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
    {
        fail(ErrorCode::BadStamp, fmt::format("date-time out of range: '{}'", text));
    }
    return make_instant(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
}

std::string_view to_string(PrototypeKind kind)
{
    switch (kind)
    {
    case PrototypeKind::commercial: return "commercial";
    case PrototypeKind::residential: return "residential";
    case PrototypeKind::manufactured: return "manufactured";
    }
    return "commercial";
}

std::string_view to_string(SeriesKind kind)
{
    switch (kind)
    {
    case SeriesKind::zone: return "zone";
    case SeriesKind::surface: return "surface";
    case SeriesKind::node: return "node";
    case SeriesKind::schedule: return "schedule";
    case SeriesKind::site: return "site";
    }
    return "site";
}

std::string_view to_string(AggregationMethod method)
{
    switch (method)
    {
    case AggregationMethod::simple: return "simple";
    case AggregationMethod::area_weighted: return "area_weighted";
    case AggregationMethod::volume_weighted: return "volume_weighted";
    }
    return "simple";
}

namespace
{

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, std::string_view what)
{
    const std::string key = [&] {
        std::string lowered(trim(text));
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        std::replace(lowered.begin(), lowered.end(), '-', '_');
        return lowered;
    }();
    for (Enum value : values)
    {
        if (to_string(value) == key)
        {
            return value;
        }
    }
    fail(ErrorCode::InvalidRecord, fmt::format("unknown {} '{}'", what, text));
}

} // namespace

PrototypeKind parse_prototype_kind(std::string_view text)
{
    return parse_enum(text,
                      std::array{PrototypeKind::commercial, PrototypeKind::residential, PrototypeKind::manufactured},
                      "prototype kind");
}

SeriesKind parse_series_kind(std::string_view text)
{
    return parse_enum(text,
                      std::array{SeriesKind::zone, SeriesKind::surface, SeriesKind::node, SeriesKind::schedule,
                                 SeriesKind::site},
                      "series kind");
}

AggregationMethod parse_aggregation_method(std::string_view text)
{
    return parse_enum(text,
                      std::array{AggregationMethod::simple, AggregationMethod::area_weighted,
                                 AggregationMethod::volume_weighted},
                      "aggregation method");
}

std::string_view trim(std::string_view text)
{
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!text.empty() && is_space(text.front()))
    {
        text.remove_prefix(1);
    }
    while (!text.empty() && is_space(text.back()))
    {
        text.remove_suffix(1);
    }
    return text;
}

std::string zone_key(std::string_view name)
{
    std::string key(trim(name));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return key;
}

SeriesDescriptor SeriesDescriptor::make(std::string variable_name, SeriesKind kind, std::optional<std::string> entity,
                                        std::string unit, std::string frequency)
{
    if (trim(variable_name).empty())
    {
        fail(ErrorCode::InvalidRecord, "series descriptor needs a variable name");
    }
    if (kind == SeriesKind::site && entity)
    {
        fail(ErrorCode::InvalidRecord, fmt::format("site variable '{}' cannot carry an entity", variable_name));
    }
    if (kind != SeriesKind::site && (!entity || trim(*entity).empty()))
    {
        fail(ErrorCode::InvalidRecord,
             fmt::format("{} variable '{}' needs an entity", to_string(kind), variable_name));
    }
    return SeriesDescriptor{std::move(variable_name), kind, std::move(entity), std::move(unit), std::move(frequency)};
}

std::string SeriesDescriptor::header() const
{
    std::string out;
    if (entity)
    {
        out += *entity;
        out += ':';
    }
    out += variable_name;
    out += " [";
    out += unit;
    out += ']';
    if (!frequency.empty())
    {
        out += '(';
        out += frequency;
        out += ')';
    }
    return out;
}

ZoneGeometry ZoneGeometry::make(std::string zone_name, double floor_area, double volume)
{
    if (trim(zone_name).empty())
    {
        fail(ErrorCode::InvalidRecord, "zone geometry needs a zone name");
    }
    if (!(floor_area > 0.0) || !(volume > 0.0) || !std::isfinite(floor_area) || !std::isfinite(volume))
    {
        fail(ErrorCode::NonPositiveGeometry,
             fmt::format("zone '{}' has floor area {} and volume {}", zone_name, floor_area, volume));
    }
    return ZoneGeometry{std::move(zone_name), floor_area, volume};
}

void VariableTable::check() const
{
    for (const auto& [entity, values] : columns)
    {
        if (values.size() != timestamps.size())
        {
            fail(ErrorCode::LengthMismatch,
                 fmt::format("column '{}' of '{}' has {} values for {} timestamps", entity, variable_name,
                             values.size(), timestamps.size()));
        }
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i)
    {
        if (timestamps[i] <= timestamps[i - 1])
        {
            fail(ErrorCode::NonMonotonicInput,
                 fmt::format("timestamps of '{}' not strictly increasing at index {}", variable_name, i));
        }
    }
}

SampleTriple SampleTriple::make(SimulationId simulation, VariableId variable, DatetimeId datetime, double value)
{
    if (!std::isfinite(value))
    {
        fail(ErrorCode::NonFiniteValue,
             fmt::format("sample ({}, {}, {}) is not finite", simulation.value, variable.value, datetime.value));
    }
    return SampleTriple{simulation, variable, datetime, value};
}

bool is_valid_resolution(int minutes)
{
    return minutes > 0 && minutes <= 60 && 60 % minutes == 0;
}

Checked<SimulationRecord> validate_simulation(const SimulationRecord& record)
{
    Checked<SimulationRecord> out;
    if (!is_valid_resolution(record.time_resolution))
    {
        out.errors.push_back({ErrorCode::InvalidResolution, std::to_string(record.time_resolution),
                              fmt::format("time resolution {} min does not divide 60", record.time_resolution)});
    }
    if (trim(record.weather_file_location).empty())
    {
        out.errors.push_back({ErrorCode::MissingWeatherFile, "", "weather file location is empty"});
    }
    if (record.simulation_id.value < 0 || record.building_id.value < 0)
    {
        out.errors.push_back({ErrorCode::InvalidRecord, "", "surrogate keys must not be negative"});
    }
    if (out.errors.empty())
    {
        out.value = record;
    }
    return out;
}

Checked<BuildingRecord> validate_building(const BuildingRecord& record)
{
    Checked<BuildingRecord> out;
    if (trim(record.prototype_name).empty())
    {
        out.errors.push_back({ErrorCode::InvalidRecord, "prototype_name", "prototype name is empty"});
    }
    if (record.building_id.value < 0)
    {
        out.errors.push_back({ErrorCode::InvalidRecord, "building_id", "building id must not be negative"});
    }
    if (out.errors.empty())
    {
        out.value = record;
    }
    return out;
}

Checked<AggregationSpec> validate_aggregation_spec(const AggregationSpec& spec, const std::set<std::string>& known_zones)
{
    Checked<AggregationSpec> out;
    std::set<std::string> known;
    for (const auto& zone : known_zones)
    {
        known.insert(zone_key(zone));
    }
    if (spec.groups.empty())
    {
        out.errors.push_back({ErrorCode::EmptyGroup, "", "aggregation spec has no groups"});
    }
    std::set<std::string> seen_names;
    std::map<std::string, int> membership;
    for (const auto& group : spec.groups)
    {
        const std::string name = zone_key(group.aggregated_zone_name);
        if (name.empty() || name == "__BUILDING__")
        {
            out.errors.push_back({ErrorCode::ReservedName, group.aggregated_zone_name,
                                  fmt::format("'{}' is not a usable aggregated zone name", group.aggregated_zone_name)});
        }
        else if (!seen_names.insert(name).second)
        {
            out.errors.push_back({ErrorCode::DuplicateAggregatedName, group.aggregated_zone_name,
                                  fmt::format("aggregated zone '{}' defined twice", group.aggregated_zone_name)});
        }
        if (group.composite_zone_names.empty())
        {
            out.errors.push_back({ErrorCode::EmptyGroup, group.aggregated_zone_name,
                                  fmt::format("aggregated zone '{}' has no composite zones", group.aggregated_zone_name)});
        }
        for (const auto& composite : group.composite_zone_names)
        {
            if (!known.contains(zone_key(composite)))
            {
                out.errors.push_back(
                    {ErrorCode::UnknownZone, composite, fmt::format("composite zone '{}' is not known", composite)});
            }
            ++membership[zone_key(composite)];
        }
        if (known.contains(name))
        {
            out.warnings.push_back({ErrorCode::ReservedName, group.aggregated_zone_name,
                                    fmt::format("aggregated zone '{}' shadows an existing zone name",
                                                group.aggregated_zone_name)});
        }
    }
    for (const auto& [zone, count] : membership)
    {
        if (count > 1)
        {
            out.warnings.push_back({ErrorCode::OverlappingGroups, zone,
                                    fmt::format("zone '{}' appears in {} aggregation groups", zone, count)});
        }
    }
    if (out.errors.empty())
    {
        out.value = spec;
    }
    return out;
}

} // namespace epdata
