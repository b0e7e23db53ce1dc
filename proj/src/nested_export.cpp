#include "epdata/nested_export.hpp"

#include "epdata/parsers.hpp"
#include "epdata/store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/core.h>
#include <json.hpp>

namespace epdata
{

namespace
{

constexpr std::string_view kFormat = "epdata-nested";
constexpr int kFormatVersion = 1;

std::string quote_csv(std::string_view field)
{
    if (field.find_first_of(",\"\n") == std::string_view::npos)
    {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field)
    {
        if (c == '"')
        {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> entity_order(const VariableTable& table)
{
    std::vector<std::string> out;
    for (const auto& [entity, column] : table.columns)
    {
        out.push_back(entity);
    }
    return out;
}

// Merges `src` into `dst`; calendars are unioned and gaps filled with NaN.
void merge_table(VariableTable& dst, VariableTable src)
{
    if (dst.columns.empty())
    {
        dst = std::move(src);
        return;
    }
    if (dst.timestamps == src.timestamps)
    {
        for (auto& [entity, column] : src.columns)
        {
            dst.columns[entity] = std::move(column);
        }
        return;
    }
    std::vector<Instant> calendar;
    std::set_union(dst.timestamps.begin(), dst.timestamps.end(), src.timestamps.begin(), src.timestamps.end(),
                   std::back_inserter(calendar));
    const auto reindex = [&](const std::vector<Instant>& from, const std::vector<double>& column) {
        std::vector<double> out(calendar.size(), std::numeric_limits<double>::quiet_NaN());
        std::size_t j = 0;
        for (std::size_t i = 0; i < from.size(); ++i)
        {
            while (calendar[j] < from[i])
            {
                ++j;
            }
            out[j] = column[i];
        }
        return out;
    };
    for (auto& [entity, column] : dst.columns)
    {
        column = reindex(dst.timestamps, column);
    }
    for (const auto& [entity, column] : src.columns)
    {
        dst.columns[entity] = reindex(src.timestamps, column);
    }
    dst.timestamps = std::move(calendar);
}

std::string generation_group(SimulationId simulation)
{
    return fmt::format("simulation_{}", simulation.value);
}

SimulationRecord require_simulation(const Store& store, SimulationId simulation)
{
    auto record = store.get_simulation(simulation);
    if (!record)
    {
        fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", simulation.value));
    }
    return *record;
}

// Aggregated zones and the methods that produced them.
std::map<std::int32_t, std::set<AggregationMethod>> aggregated_zones(const Store& store,
                                                                     const std::vector<VariableEntry>& variables)
{
    std::map<std::int32_t, std::set<AggregationMethod>> out;
    std::set<std::int32_t> seen;
    for (const auto& v : variables)
    {
        if (!v.zone_id || !seen.insert(v.zone_id->value).second)
        {
            continue;
        }
        const auto zone = store.get_zone(*v.zone_id);
        if (zone && zone->is_aggregated)
        {
            auto& methods = out[v.zone_id->value];
            for (const auto& link : store.aggregation_links(*v.zone_id))
            {
                methods.insert(link.method);
            }
        }
    }
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
            {
                field += '"';
                ++i;
            }
            else if (c == '"')
            {
                quoted = false;
            }
            else
            {
                field += c;
            }
        }
        else if (c == '"')
        {
            quoted = true;
        }
        else if (c == ',')
        {
            out.push_back(std::move(field));
            field.clear();
        }
        else
        {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

} // namespace

std::string_view to_string(NestedArchive::Kind kind)
{
    return kind == NestedArchive::Kind::generation ? "generation" : "aggregation";
}

std::string sanitize_name(std::string_view name)
{
    std::string out;
    for (char c : trim(name))
    {
        const auto u = static_cast<unsigned char>(c);
        out += (std::isalnum(u) != 0 || c == '-' || c == '_' || c == '.') ? c : '_';
    }
    if (out.empty() || out.front() == '.')
    {
        out.insert(out.begin(), '_');
    }
    return out;
}

std::string write_leaf_csv(const VariableTable& table)
{
    std::string out = "timestamp";
    for (const auto& [entity, column] : table.columns)
    {
        out += ',';
        out += entity.empty() ? std::string("value") : quote_csv(entity);
    }
    out += '\n';
    for (std::size_t i = 0; i < table.timestamps.size(); ++i)
    {
        out += format_iso(table.timestamps[i]);
        for (const auto& [entity, column] : table.columns)
        {
            out += ',';
            if (std::isfinite(column[i]))
            {
                out += format_double(column[i]);
            }
        }
        out += '\n';
    }
    return out;
}

VariableTable read_leaf_csv(std::string_view text, const VariableTable& metadata,
                            const std::vector<std::string>& entities)
{
    VariableTable table;
    table.variable_name = metadata.variable_name;
    table.kind = metadata.kind;
    table.unit = metadata.unit;
    table.frequency = metadata.frequency;
    std::vector<std::vector<double>> columns(entities.size());

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
        {
            line.remove_suffix(1);
        }
        if (line_no == 1 || line.empty())
        {
            if (line_no == 1 && split_csv_line(line).size() != entities.size() + 1)
            {
                fail(ErrorCode::MalformedHeader, "leaf header does not match the manifest", 1);
            }
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != entities.size() + 1)
        {
            fail(ErrorCode::RaggedRow,
                 fmt::format("expected {} fields, found {}", entities.size() + 1, fields.size()), line_no);
        }
        table.timestamps.push_back(parse_iso(fields[0]));
        for (std::size_t c = 0; c < entities.size(); ++c)
        {
            const std::string_view cell = trim(fields[c + 1]);
            columns[c].push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(cell));
        }
    }
    for (std::size_t c = 0; c < entities.size(); ++c)
    {
        table.columns.emplace(entities[c], std::move(columns[c]));
    }
    table.check();
    return table;
}

std::size_t nested_leaf_bytes(const NestedArchive& archive)
{
    std::size_t total = 0;
    for (const auto& [group, variables] : archive.groups)
    {
        for (const auto& [name, table] : variables)
        {
            total += write_leaf_csv(table).size();
        }
    }
    return total;
}

NestedArchive load_generation_archive(const Store& store, SimulationId simulation)
{
    const SimulationRecord record = require_simulation(store, simulation);
    NestedArchive archive;
    archive.kind = NestedArchive::Kind::generation;
    archive.simulation = simulation;
    archive.time_resolution = record.time_resolution;

    const auto variables = store.list_variables(simulation);
    const auto aggregated = aggregated_zones(store, variables);
    std::vector<VariableId> ids;
    for (const auto& v : variables)
    {
        if (!v.zone_id || !aggregated.contains(v.zone_id->value))
        {
            ids.push_back(v.variable_id);
        }
    }
    auto& group = archive.groups[generation_group(simulation)];
    for (auto& [id, table] : store.query_series(simulation, ids))
    {
        const std::string name = table.variable_name;
        merge_table(group[name], std::move(table));
    }
    return archive;
}

NestedArchive load_aggregation_archive(const Store& store, SimulationId simulation, AggregationMethod method)
{
    const SimulationRecord record = require_simulation(store, simulation);
    NestedArchive archive;
    archive.kind = NestedArchive::Kind::aggregation;
    archive.simulation = simulation;
    archive.method = method;
    archive.time_resolution = record.time_resolution;

    const auto variables = store.list_variables(simulation);
    const auto aggregated = aggregated_zones(store, variables);
    std::vector<VariableId> ids;
    std::map<VariableId, std::string> group_of;
    for (const auto& v : variables)
    {
        if (!v.zone_id)
        {
            continue;
        }
        const auto it = aggregated.find(v.zone_id->value);
        if (it != aggregated.end() && it->second.contains(method))
        {
            ids.push_back(v.variable_id);
            group_of[v.variable_id] = *v.descriptor.entity;
        }
    }
    for (auto& [id, table] : store.query_series(simulation, ids))
    {
        const std::string name = table.variable_name;
        merge_table(archive.groups[group_of[id]][name], std::move(table));
    }
    return archive;
}

std::vector<AggregationMethod> aggregation_methods(const Store& store, SimulationId simulation)
{
    std::set<AggregationMethod> methods;
    for (const auto& [zone, found] : aggregated_zones(store, store.list_variables(simulation)))
    {
        methods.insert(found.begin(), found.end());
    }
    return {methods.begin(), methods.end()};
}

NestedArchive archive_from_dataset(const AggregatedDataset& dataset, int time_resolution,
                                   std::optional<SimulationId> simulation)
{
    NestedArchive archive;
    archive.kind = NestedArchive::Kind::aggregation;
    archive.simulation = simulation;
    archive.method = dataset.method;
    archive.time_resolution = time_resolution;
    archive.groups = dataset.groups;
    return archive;
}

std::vector<std::filesystem::path> write_nested(const NestedArchive& archive, const std::filesystem::path& dir)
{
    nlohmann::json leaves = nlohmann::json::array();
    std::vector<std::filesystem::path> written;
    std::set<std::string> used_groups;
    for (const auto& [group, variables] : archive.groups)
    {
        std::string group_dir = sanitize_name(group);
        for (int n = 2; !used_groups.insert(zone_key(group_dir)).second; ++n)
        {
            group_dir = fmt::format("{}_{}", sanitize_name(group), n);
        }
        std::set<std::string> used_files;
        for (const auto& [name, table] : variables)
        {
            table.check();
            std::string stem = sanitize_name(name);
            for (int n = 2; !used_files.insert(zone_key(stem)).second; ++n)
            {
                stem = fmt::format("{}_{}", sanitize_name(name), n);
            }
            const std::string relative = fmt::format("{}/{}.csv", group_dir, stem);
            const std::filesystem::path path = dir / group_dir / (stem + ".csv");
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
            if (ec)
            {
                fail(ErrorCode::IoFailure, fmt::format("cannot create '{}': {}", path.parent_path().string(),
                                                       ec.message()));
            }
            write_text_file(path, write_leaf_csv(table));
            written.push_back(path);
            leaves.push_back({
                {"group", group},
                {"variable", name},
                {"file", relative},
                {"kind", to_string(table.kind)},
                {"unit", table.unit},
                {"frequency", table.frequency},
                {"entities", entity_order(table)},
                {"rows", table.timestamps.size()},
            });
        }
    }
    nlohmann::json manifest = {
        {"format", kFormat},
        {"version", kFormatVersion},
        {"kind", to_string(archive.kind)},
        {"time_resolution", archive.time_resolution},
        {"simulation_id", archive.simulation ? nlohmann::json(archive.simulation->value) : nlohmann::json(nullptr)},
        {"method", archive.method ? nlohmann::json(to_string(*archive.method)) : nlohmann::json(nullptr)},
        {"leaves", leaves},
    };
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        fail(ErrorCode::IoFailure, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return written;
}

NestedArchive read_nested(const std::filesystem::path& dir)
{
    nlohmann::json manifest;
    try
    {
        manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    }
    catch (const nlohmann::json::exception& e)
    {
        fail(ErrorCode::SyntaxError, fmt::format("manifest.json: {}", e.what()));
    }
    try
    {
        if (manifest.at("format").get<std::string>() != kFormat)
        {
            fail(ErrorCode::SyntaxError, "manifest.json: not a nested archive");
        }
        NestedArchive archive;
        archive.kind = manifest.at("kind").get<std::string>() == "generation" ? NestedArchive::Kind::generation
                                                                              : NestedArchive::Kind::aggregation;
        archive.time_resolution = manifest.at("time_resolution").get<int>();
        if (!manifest.at("simulation_id").is_null())
        {
            archive.simulation = SimulationId{manifest.at("simulation_id").get<std::int32_t>()};
        }
        if (!manifest.at("method").is_null())
        {
            archive.method = parse_aggregation_method(manifest.at("method").get<std::string>());
        }
        for (const auto& leaf : manifest.at("leaves"))
        {
            VariableTable metadata;
            metadata.variable_name = leaf.at("variable").get<std::string>();
            metadata.kind = parse_series_kind(leaf.at("kind").get<std::string>());
            metadata.unit = leaf.at("unit").get<std::string>();
            metadata.frequency = leaf.at("frequency").get<std::string>();
            const auto entities = leaf.at("entities").get<std::vector<std::string>>();
            const auto file = leaf.at("file").get<std::string>();
            VariableTable table = read_leaf_csv(read_text_file(dir / file), metadata, entities);
            if (table.timestamps.size() != leaf.at("rows").get<std::size_t>())
            {
                fail(ErrorCode::LengthMismatch, fmt::format("{}: row count differs from the manifest", file));
            }
            archive.groups[leaf.at("group").get<std::string>()][metadata.variable_name] = std::move(table);
        }
        return archive;
    }
    catch (const nlohmann::json::exception& e)
    {
        fail(ErrorCode::SyntaxError, fmt::format("manifest.json: {}", e.what()));
    }
}

} // namespace epdata
