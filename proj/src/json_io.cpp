#include "epdata/json_io.hpp"

#include <cmath>

#include <fmt/core.h>

namespace epdata
{

namespace
{

[[noreturn]] void bad_field(std::string_view field, std::string_view why)
{
    fail(ErrorCode::InvalidRecord, fmt::format("field '{}': {}", field, why));
}

std::string string_field(const Json& j, const char* name, std::optional<std::string> fallback = std::nullopt)
{
    if (!j.is_object() || !j.contains(name) || j.at(name).is_null())
    {
        if (fallback)
        {
            return *fallback;
        }
        bad_field(name, "required");
    }
    if (!j.at(name).is_string())
    {
        bad_field(name, "expected a string");
    }
    return j.at(name).get<std::string>();
}

unsigned unsigned_field(const Json& j, const char* name)
{
    if (!j.contains(name) || !j.at(name).is_number_integer() || j.at(name).get<long long>() < 0)
    {
        bad_field(name, "expected a non-negative integer");
    }
    return j.at(name).get<unsigned>();
}

Combine parse_combine(std::string_view text)
{
    const std::string key = zone_key(text);
    if (key == "MEAN")
    {
        return Combine::mean;
    }
    if (key == "SUM")
    {
        return Combine::sum;
    }
    bad_field("combine", fmt::format("'{}' is neither mean nor sum", std::string(text)));
}

} // namespace

Json number_or_null(double value)
{
    return std::isfinite(value) ? Json(value) : Json(nullptr);
}

Json json_of(const BuildingRecord& b)
{
    return {
        {"building_id", b.building_id.value},         {"prototype_kind", to_string(b.prototype_kind)},
        {"prototype_name", b.prototype_name},         {"energy_standard", b.energy_standard},
        {"climate_zone", b.climate_zone},
    };
}

Json json_of(const SimulationRecord& s)
{
    return {
        {"simulation_id", s.simulation_id.value},
        {"building_id", s.building_id.value},
        {"weather_file_location", s.weather_file_location},
        {"time_resolution", s.time_resolution},
        {"schedule_name", s.schedule_name},
    };
}

Json json_of(const VariableEntry& v)
{
    return {
        {"variable_id", v.variable_id.value},
        {"variable_name", v.descriptor.variable_name},
        {"kind", to_string(v.descriptor.kind)},
        {"entity", v.descriptor.entity ? Json(*v.descriptor.entity) : Json(nullptr)},
        {"unit", v.descriptor.unit},
        {"frequency", v.descriptor.frequency},
        {"zone_id", v.zone_id ? Json(v.zone_id->value) : Json(nullptr)},
    };
}

Json json_of(const ZoneEntry& z)
{
    return {
        {"zone_id", z.zone_id.value},
        {"zone_name", z.zone_name},
        {"floor_area", z.floor_area ? Json(*z.floor_area) : Json(nullptr)},
        {"volume", z.volume ? Json(*z.volume) : Json(nullptr)},
        {"is_aggregated", z.is_aggregated},
    };
}

Json json_of(const DistributionSummary& s)
{
    Json bins = Json::array();
    for (const auto& b : s.histogram)
    {
        bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
    }
    return {
        {"count", s.count}, {"dropped", s.dropped}, {"mean", s.mean},   {"variance", s.variance},
        {"min", s.min},     {"max", s.max},         {"range", s.range}, {"histogram", bins},
    };
}

Json json_of(const ScatterPayload& p)
{
    Json timestamps = Json::array();
    for (Instant t : p.timestamps)
    {
        timestamps.push_back(format_iso(t));
    }
    return {
        {"x_label", p.x_label}, {"y_label", p.y_label}, {"timestamps", timestamps}, {"x", p.x}, {"y", p.y},
    };
}

Json json_of(const StorageReport& r)
{
    Json tables = Json::array();
    for (const auto& t : r.tables)
    {
        tables.push_back({{"table", t.table}, {"rows", t.rows}, {"bytes", t.bytes}});
    }
    return {
        {"tables", tables},
        {"store_bytes", r.store_bytes},
        {"naive_bytes", r.naive_bytes},
        {"reduction_factor", r.reduction_factor},
    };
}

Json json_of(const IngestResult& r)
{
    return {
        {"building_id", r.building.value}, {"simulation_id", r.simulation.value}, {"time_resolution", r.time_resolution},
        {"steps", r.steps},                {"series", r.series},                  {"rows", r.rows},
        {"skipped_empty_cells", r.skipped_empty_cells}, {"zones", r.zones},
    };
}

Json json_of(const AggregateResult& r)
{
    Json zones = Json::object();
    for (const auto& [name, id] : r.aggregated_zones)
    {
        zones[name] = id.value;
    }
    Json variables = Json::array();
    for (VariableId id : r.variables)
    {
        variables.push_back(id.value);
    }
    Json warnings = Json::array();
    for (const auto& w : r.warnings)
    {
        warnings.push_back(json_of(w));
    }
    return {
        {"method", to_string(r.dataset.method)},
        {"aggregated_zones", zones},
        {"variable_ids", variables},
        {"rows", r.rows},
        {"warnings", warnings},
    };
}

Json json_of(const Issue& issue)
{
    return {{"code", to_string(issue.code)}, {"subject", issue.subject}, {"message", issue.message}};
}

Json json_of(const Error& error)
{
    Json j = {{"error", to_string(error.code())}, {"detail", error.detail()}};
    if (error.line())
    {
        j["line"] = *error.line();
    }
    return j;
}

Json series_json(const VariableEntry& variable, const VariableTable& table)
{
    Json j = json_of(variable);
    Json timestamps = Json::array();
    for (Instant t : table.timestamps)
    {
        timestamps.push_back(format_iso(t));
    }
    Json values = Json::array();
    if (!table.columns.empty())
    {
        for (double v : table.columns.begin()->second)
        {
            values.push_back(number_or_null(v));
        }
    }
    j["timestamps"] = std::move(timestamps);
    j["values"] = std::move(values);
    return j;
}

BuildingRecord building_from_json(const Json& j)
{
    if (!j.is_object())
    {
        bad_field("building", "expected an object");
    }
    BuildingRecord b;
    b.prototype_kind = parse_prototype_kind(string_field(j, "prototype_kind", std::string("commercial")));
    b.prototype_name = string_field(j, "prototype_name");
    b.energy_standard = string_field(j, "energy_standard", std::string());
    b.climate_zone = string_field(j, "climate_zone", std::string());
    return b;
}

PrototypeAttributes attributes_from_json(const Json& j)
{
    PrototypeAttributes out;
    if (j.is_null())
    {
        return out;
    }
    if (!j.is_object())
    {
        bad_field("attributes", "expected an object of strings");
    }
    for (const auto& [key, value] : j.items())
    {
        out[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return out;
}

AggregationSpec aggregation_spec_from_json(const Json& j)
{
    if (!j.is_object())
    {
        bad_field("spec", "expected an object");
    }
    AggregationSpec spec;
    spec.method = parse_aggregation_method(string_field(j, "method", std::string("simple")));
    if (!j.contains("groups") || !j.at("groups").is_array())
    {
        bad_field("groups", "expected an array");
    }
    for (const auto& g : j.at("groups"))
    {
        AggregationGroup group;
        group.aggregated_zone_name = string_field(g, "name");
        if (!g.contains("zones") || !g.at("zones").is_array())
        {
            bad_field("zones", "expected an array of zone names");
        }
        for (const auto& z : g.at("zones"))
        {
            if (!z.is_string())
            {
                bad_field("zones", "expected zone names");
            }
            group.composite_zone_names.push_back(z.get<std::string>());
        }
        spec.groups.push_back(std::move(group));
    }
    return spec;
}

std::vector<VariableSelection> selection_from_json(const Json& j)
{
    std::vector<VariableSelection> out;
    if (j.is_null())
    {
        return out;
    }
    if (!j.is_array())
    {
        bad_field("variables", "expected an array");
    }
    for (const auto& v : j)
    {
        if (v.is_string())
        {
            out.push_back({v.get<std::string>(), Combine::mean});
        }
        else
        {
            out.push_back({string_field(v, "name"), parse_combine(string_field(v, "combine", std::string("mean")))});
        }
    }
    return out;
}

SimulationOverrides overrides_from_json(const Json& j)
{
    SimulationOverrides o;
    if (j.is_null())
    {
        return o;
    }
    if (!j.is_object())
    {
        bad_field("overrides", "expected an object");
    }
    if (j.contains("timestep_minutes") && !j.at("timestep_minutes").is_null())
    {
        if (!j.at("timestep_minutes").is_number_integer())
        {
            bad_field("timestep_minutes", "expected an integer");
        }
        o.timestep_minutes = j.at("timestep_minutes").get<int>();
    }
    if (j.contains("run_period") && !j.at("run_period").is_null())
    {
        const Json& rp = j.at("run_period");
        o.run_period = RunPeriod{unsigned_field(rp, "begin_month"), unsigned_field(rp, "begin_day"),
                                 unsigned_field(rp, "end_month"), unsigned_field(rp, "end_day")};
    }
    if (j.contains("variables") && j.at("variables").is_array())
    {
        for (const auto& v : j.at("variables"))
        {
            o.variables.push_back(OutputVariableRequest{string_field(v, "key", std::string("*")),
                                                        string_field(v, "name"),
                                                        string_field(v, "frequency", std::string("TimeStep"))});
        }
    }
    if (j.contains("schedules") && j.at("schedules").is_object())
    {
        for (const auto& [name, text] : j.at("schedules").items())
        {
            if (!text.is_string())
            {
                bad_field("schedules", "expected Schedule:Compact text");
            }
            o.schedules[name] = text.get<std::string>();
        }
    }
    return o;
}

} // namespace epdata
