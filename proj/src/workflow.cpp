#include "epdata/workflow.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>
#include <unordered_map>

#include <fmt/core.h>

namespace epdata
{

namespace
{

struct ColumnRef
{
    VariableId variable;
    const std::vector<Instant>* timestamps;
    const std::vector<double>* values;
};

struct InsertSummary
{
    std::size_t rows{0};
    std::size_t skipped{0};
};

// Interns the union calendar and streams every finite sample into the store.
InsertSummary insert_columns(Store& store, SimulationId simulation, const std::vector<ColumnRef>& columns,
                             std::size_t batch_size, const std::function<void(std::size_t, std::size_t)>& progress)
{
    std::set<Instant> calendar;
    std::size_t total = 0;
    for (const auto& c : columns)
    {
        calendar.insert(c.timestamps->begin(), c.timestamps->end());
        total += c.values->size();
    }
    const std::vector<Instant> ordered(calendar.begin(), calendar.end());
    const auto ids = store.intern_datetimes(ordered);
    std::unordered_map<std::int64_t, DatetimeId> id_of;
    id_of.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i)
    {
        id_of.emplace(ordered[i].time_since_epoch().count(), ids[i]);
    }

    InsertSummary summary;
    std::size_t column = 0;
    std::size_t row = 0;
    const auto next = [&](SampleTriple& out) {
        while (column < columns.size())
        {
            const auto& c = columns[column];
            if (row >= c.values->size())
            {
                ++column;
                row = 0;
                continue;
            }
            const double v = (*c.values)[row];
            const Instant t = (*c.timestamps)[row];
            ++row;
            if (!std::isfinite(v))
            {
                ++summary.skipped; // empty cells are gaps, not samples
                continue;
            }
            out = SampleTriple{simulation, c.variable, id_of.at(t.time_since_epoch().count()), v};
            return true;
        }
        return false;
    };
    InsertOptions options;
    options.batch_size = batch_size;
    options.on_batch = [&](std::size_t committed) {
        if (progress)
        {
            progress(committed + summary.skipped, total);
        }
    };
    summary.rows = store.bulk_insert_samples(next, options);
    return summary;
}

std::vector<Instant> output_instants(const RawOutputTable& table, int year)
{
    std::vector<Instant> out;
    out.reserve(table.datetime_column.size());
    for (std::size_t i = 0; i < table.datetime_column.size(); ++i)
    {
        try
        {
            out.push_back(parse_output_datetime(table.datetime_column[i], year));
        }
        catch (const Error& e)
        {
            fail(e.code(), e.detail(), static_cast<long>(i) + 2);
        }
    }
    return out;
}

int resolution_of(const std::vector<Instant>& instants, const std::filesystem::path& idf)
{
    if (instants.size() >= 2)
    {
        return infer_resolution_minutes(instants);
    }
    return parse_idf(read_text_file(idf)).time_resolution_minutes();
}

std::string first_lines(const std::string& text, std::size_t n)
{
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n && pos != std::string::npos; ++i)
    {
        pos = text.find('\n', pos);
        if (pos != std::string::npos)
        {
            ++pos;
        }
    }
    return pos == std::string::npos ? text : text.substr(0, pos);
}

void report(const ProgressFn& progress, double fraction)
{
    if (progress)
    {
        progress(std::clamp(fraction, 0.0, 1.0));
    }
}

std::string shell_quote(const std::string& arg)
{
    std::string out = "'";
    for (char c : arg)
    {
        if (c == '\'')
        {
            out += "'\\''";
        }
        else
        {
            out += c;
        }
    }
    out += '\'';
    return out;
}

bool iequals(std::string_view a, std::string_view b)
{
    return zone_key(a) == zone_key(b);
}

} // namespace

SimulationRecord probe_simulation(const IngestRequest& request)
{
    const std::string head = first_lines(read_text_file(request.output), 4);
    const RawOutputTable table = parse_output_table(head);
    SimulationRecord record;
    record.weather_file_location = request.weather_file_location;
    record.schedule_name = request.schedule_name;
    record.time_resolution = resolution_of(output_instants(table, request.year), request.idf);
    return record;
}

std::optional<SimulationId> find_populated_simulation(const Store& store, const IngestRequest& request)
{
    const auto building = store.find_building(request.building);
    if (!building)
    {
        return std::nullopt;
    }
    SimulationRecord record = probe_simulation(request);
    record.building_id = *building;
    const auto found = store.find_simulation(record);
    if (found && store.sample_count(*found) > 0)
    {
        return found;
    }
    return std::nullopt;
}

IngestResult ingest_files(Store& store, const IngestRequest& request, const ProgressFn& progress)
{
    report(progress, 0.0);
    const IdfModel model = parse_idf(read_text_file(request.idf));
    std::vector<ZoneGeometry> geometry;
    if (request.eio)
    {
        geometry = parse_eio(read_text_file(*request.eio));
    }
    const RawOutputTable table = parse_output_table(read_text_file(request.output));
    const std::vector<Instant> instants = output_instants(table, request.year);
    for (std::size_t i = 1; i < instants.size(); ++i)
    {
        if (instants[i] <= instants[i - 1])
        {
            fail(ErrorCode::NonMonotonicInput,
                 fmt::format("stamp '{}' does not follow '{}'", table.datetime_column[i], table.datetime_column[i - 1]),
                 static_cast<long>(i) + 2);
        }
    }
    const int resolution = instants.size() >= 2 ? infer_resolution_minutes(instants) : model.time_resolution_minutes();
    report(progress, 0.1);

    SimulationRecord record{{}, {}, request.weather_file_location, resolution, request.schedule_name};
    require(validate_simulation(record));
    require(validate_building(request.building));

    IngestResult result;
    result.building = store.upsert_building(request.building, request.attributes);
    record.building_id = result.building;
    if (const auto existing = store.find_simulation(record); existing && store.sample_count(*existing) > 0)
    {
        fail(ErrorCode::DuplicateSimulation,
             fmt::format("simulation {} already holds {} samples", existing->value, store.sample_count(*existing)));
    }
    result.simulation = store.upsert_simulation(record);
    result.time_resolution = resolution;

    // Zones: EIO geometry where available, names alone otherwise.
    std::map<std::string, ZoneId> zone_ids;
    std::set<std::string> covered;
    if (!geometry.empty())
    {
        zone_ids = store.register_zones(geometry, result.building);
        for (const auto& g : geometry)
        {
            covered.insert(zone_key(g.zone_name));
        }
    }
    std::vector<std::string> names_only;
    const auto want = [&](const std::string& name) {
        if (covered.insert(zone_key(name)).second)
        {
            names_only.push_back(name);
        }
    };
    for (const auto& zone : model.zones)
    {
        want(zone);
    }
    for (const auto& series : table.series)
    {
        if (series.descriptor.kind == SeriesKind::zone)
        {
            want(*series.descriptor.entity);
        }
    }
    if (!names_only.empty())
    {
        for (auto& [name, id] : store.register_zone_names(names_only, result.building))
        {
            zone_ids.emplace(name, id);
        }
    }
    result.zones = zone_ids.size();

    std::vector<SeriesDescriptor> descriptors;
    descriptors.reserve(table.series.size());
    for (const auto& series : table.series)
    {
        descriptors.push_back(series.descriptor);
    }
    const auto variable_ids = store.register_variables(descriptors, result.building, zone_ids);
    report(progress, 0.2);

    std::vector<ColumnRef> columns;
    for (std::size_t i = 0; i < table.series.size(); ++i)
    {
        columns.push_back({variable_ids[i], &instants, &table.series[i].values});
    }
    const auto summary = insert_columns(store, result.simulation, columns, request.batch_size,
                                        [&](std::size_t done, std::size_t total) {
                                            report(progress, 0.2 + 0.7 * static_cast<double>(done) /
                                                                       static_cast<double>(std::max<std::size_t>(total, 1)));
                                        });
    if (request.compact)
    {
        store.compact();
    }
    result.steps = instants.size();
    result.series = table.series.size();
    result.rows = summary.rows;
    result.skipped_empty_cells = summary.skipped;
    report(progress, 1.0);
    return result;
}

IngestResult ingest_archive(Store& store, const NestedArchive& archive, const BuildingRecord& building,
                            const std::string& weather_file_location, const std::string& schedule_name)
{
    if (archive.kind != NestedArchive::Kind::generation || archive.groups.size() != 1)
    {
        fail(ErrorCode::InvalidRecord, "only single-simulation generation archives can be ingested");
    }
    const auto& tables = archive.groups.begin()->second;
    SimulationRecord record{{}, {}, weather_file_location, archive.time_resolution, schedule_name};
    require(validate_simulation(record));

    IngestResult result;
    result.building = store.upsert_building(building);
    record.building_id = result.building;
    if (const auto existing = store.find_simulation(record); existing && store.sample_count(*existing) > 0)
    {
        fail(ErrorCode::DuplicateSimulation, fmt::format("simulation {} already holds samples", existing->value));
    }
    result.simulation = store.upsert_simulation(record);
    result.time_resolution = archive.time_resolution;

    std::vector<std::string> zones;
    std::set<std::string> seen;
    std::vector<SeriesDescriptor> descriptors;
    std::vector<std::pair<const VariableTable*, const std::vector<double>*>> sources;
    for (const auto& [name, table] : tables)
    {
        for (const auto& [entity, column] : table.columns)
        {
            std::optional<std::string> qualifier;
            if (table.kind != SeriesKind::site)
            {
                qualifier = entity;
            }
            descriptors.push_back(SeriesDescriptor::make(table.variable_name, table.kind, qualifier, table.unit,
                                                         table.frequency));
            sources.emplace_back(&table, &column);
            if (table.kind == SeriesKind::zone && seen.insert(zone_key(entity)).second)
            {
                zones.push_back(entity);
            }
        }
    }
    const auto zone_ids = store.register_zone_names(zones, result.building);
    result.zones = zone_ids.size();
    const auto variable_ids = store.register_variables(descriptors, result.building, zone_ids);
    std::vector<ColumnRef> columns;
    std::set<Instant> calendar;
    for (std::size_t i = 0; i < sources.size(); ++i)
    {
        columns.push_back({variable_ids[i], &sources[i].first->timestamps, sources[i].second});
        calendar.insert(sources[i].first->timestamps.begin(), sources[i].first->timestamps.end());
    }
    const auto summary = insert_columns(store, result.simulation, columns, 10'000, {});
    store.compact();
    result.steps = calendar.size();
    result.series = descriptors.size();
    result.rows = summary.rows;
    result.skipped_empty_cells = summary.skipped;
    return result;
}

std::map<std::string, VariableTable> simulation_tables(const Store& store, SimulationId simulation)
{
    auto archive = load_generation_archive(store, simulation);
    if (archive.groups.empty())
    {
        return {};
    }
    return std::move(archive.groups.begin()->second);
}

std::vector<ZoneGeometry> building_geometry(const Store& store, BuildingId building)
{
    std::vector<ZoneGeometry> out;
    std::set<std::string> seen;
    const auto zones = store.zones_for_building(building);
    for (auto it = zones.rbegin(); it != zones.rend(); ++it) // newest registration wins
    {
        if (!it->is_aggregated && it->floor_area && it->volume && seen.insert(zone_key(it->zone_name)).second)
        {
            out.push_back(ZoneGeometry{it->zone_name, *it->floor_area, *it->volume});
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

AggregateResult aggregate_simulation(Store& store, const AggregateRequest& request, const ProgressFn& progress)
{
    report(progress, 0.0);
    const auto record = store.get_simulation(request.simulation);
    if (!record)
    {
        fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", request.simulation.value));
    }
    const auto tables = simulation_tables(store, request.simulation);
    const auto geometry = building_geometry(store, record->building_id);

    AggregateResult result;
    {
        std::set<std::string> known;
        for (const auto& [name, table] : tables)
        {
            if (table.kind == SeriesKind::zone)
            {
                for (const auto& [entity, column] : table.columns)
                {
                    known.insert(entity);
                }
            }
        }
        result.warnings = validate_aggregation_spec(request.spec, known).warnings;
    }
    result.dataset = aggregate_dataset(tables, geometry, request.spec, request.selection);
    report(progress, 0.3);

    std::map<std::string, ZoneId> composites;
    for (const auto& zone : store.zones_for_building(record->building_id))
    {
        if (!zone.is_aggregated)
        {
            composites[zone.zone_name] = zone.zone_id; // later (newer) rows win
        }
    }
    result.aggregated_zones =
        store.register_aggregation(request.spec, composites, result.dataset.zones, record->building_id);

    std::vector<SeriesDescriptor> descriptors;
    std::vector<const VariableTable*> sources;
    for (const auto& [group, variables] : result.dataset.groups)
    {
        if (group == kBuildingGroup)
        {
            continue; // pass-through series are already stored
        }
        for (const auto& [name, table] : variables)
        {
            descriptors.push_back(
                SeriesDescriptor::make(table.variable_name, SeriesKind::zone, group, table.unit, table.frequency));
            sources.push_back(&table);
        }
    }
    result.variables = store.register_variables(descriptors, record->building_id, result.aggregated_zones);
    for (VariableId id : result.variables)
    {
        const auto stored = store.query_series(request.simulation, std::span<const VariableId>(&id, 1));
        if (!stored.begin()->second.timestamps.empty())
        {
            fail(ErrorCode::DuplicateTriple,
                 fmt::format("aggregated series '{}' ({}) already stored for simulation {}",
                             stored.begin()->second.variable_name, *store.get_variable(id)->descriptor.entity,
                             request.simulation.value));
        }
    }
    report(progress, 0.4);

    std::vector<ColumnRef> columns;
    for (std::size_t i = 0; i < sources.size(); ++i)
    {
        columns.push_back({result.variables[i], &sources[i]->timestamps, &sources[i]->columns.begin()->second});
    }
    const auto summary = insert_columns(store, request.simulation, columns, request.batch_size,
                                        [&](std::size_t done, std::size_t total) {
                                            report(progress, 0.4 + 0.5 * static_cast<double>(done) /
                                                                       static_cast<double>(std::max<std::size_t>(total, 1)));
                                        });
    store.compact();
    result.rows = summary.rows;
    report(progress, 1.0);
    return result;
}

// ---------------------------------------------------------------------------

std::vector<OutputVariableRequest> parse_variable_list(std::string_view text)
{
    std::vector<OutputVariableRequest> out;
    long line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        const std::size_t nl = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty())
        {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (start <= line.size())
        {
            const std::size_t comma = std::min(line.find(',', start), line.size());
            fields.emplace_back(trim(line.substr(start, comma - start)));
            start = comma + 1;
        }
        OutputVariableRequest request{"*", "", "TimeStep"};
        if (fields.size() == 1)
        {
            request.variable_name = fields[0];
        }
        else if (fields.size() == 2)
        {
            request.variable_name = fields[0];
            request.frequency = fields[1];
        }
        else if (fields.size() == 3)
        {
            request = {fields[0], fields[1], fields[2]};
        }
        else
        {
            fail(ErrorCode::SyntaxError, fmt::format("expected at most 3 fields, got {}", fields.size()), line_no);
        }
        if (request.variable_name.empty() || request.key.empty() || request.frequency.empty())
        {
            fail(ErrorCode::SyntaxError, "empty field in variable list", line_no);
        }
        out.push_back(std::move(request));
    }
    return out;
}

void validate_overrides(const SimulationOverrides& overrides)
{
    if (overrides.timestep_minutes && !is_valid_resolution(*overrides.timestep_minutes))
    {
        fail(ErrorCode::InvalidResolution,
             fmt::format("timestep of {} minutes does not divide an hour", *overrides.timestep_minutes));
    }
    if (const auto& rp = overrides.run_period)
    {
        using namespace std::chrono;
        // A leap year so that Feb 29 is accepted.
        const year_month_day begin{year{2024}, month{rp->begin_month}, day{rp->begin_day}};
        const year_month_day end{year{2024}, month{rp->end_month}, day{rp->end_day}};
        if (!begin.ok() || !end.ok() || sys_days{end} < sys_days{begin})
        {
            fail(ErrorCode::InvalidRecord,
                 fmt::format("run period {}/{} - {}/{} is not a forward range within one year", rp->begin_month,
                             rp->begin_day, rp->end_month, rp->end_day));
        }
    }
    for (const auto& v : overrides.variables)
    {
        if (trim(v.variable_name).empty())
        {
            fail(ErrorCode::InvalidRecord, "output variable override without a name");
        }
    }
    for (const auto& [name, text] : overrides.schedules)
    {
        const auto objects = scan_idf_objects(text);
        if (objects.size() != 1 || !iequals(objects[0].class_name, "Schedule:Compact") || objects[0].fields.empty() ||
            !iequals(objects[0].fields[0], name))
        {
            fail(ErrorCode::InvalidRecord,
                 fmt::format("replacement for schedule '{}' must be one Schedule:Compact object of that name", name));
        }
    }
}

std::string apply_overrides(std::string_view idf_text, const SimulationOverrides& overrides)
{
    validate_overrides(overrides);
    const auto objects = scan_idf_objects(idf_text);

    struct Edit
    {
        std::size_t begin;
        std::size_t end;
        std::string text;
    };
    std::vector<Edit> edits;
    std::string appended;

    if (overrides.timestep_minutes)
    {
        const std::string text = fmt::format("Timestep,\n    {};", 60 / *overrides.timestep_minutes);
        const auto it = std::find_if(objects.begin(), objects.end(),
                                     [](const IdfObject& o) { return iequals(o.class_name, "Timestep"); });
        if (it != objects.end())
        {
            edits.push_back({it->begin, it->end, text});
        }
        else
        {
            appended += "\n" + text + "\n";
        }
    }
    if (const auto& rp = overrides.run_period)
    {
        const auto it = std::find_if(objects.begin(), objects.end(),
                                     [](const IdfObject& o) { return iequals(o.class_name, "RunPeriod"); });
        const std::string name = it != objects.end() && !it->fields.empty() && !it->fields[0].empty()
                                     ? it->fields[0]
                                     : std::string("Run Period 1");
        const std::string text = fmt::format("RunPeriod,\n    {},\n    {},\n    {},\n    ,\n    {},\n    {},\n    ,\n"
                                             "    ,\n    No,\n    No;",
                                             name, rp->begin_month, rp->begin_day, rp->end_month, rp->end_day);
        if (it != objects.end())
        {
            edits.push_back({it->begin, it->end, text});
        }
        else
        {
            appended += "\n" + text + "\n";
        }
    }
    if (!overrides.variables.empty())
    {
        for (const auto& o : objects)
        {
            if (iequals(o.class_name, "Output:Variable"))
            {
                edits.push_back({o.begin, o.end, ""});
            }
        }
        appended += "\n";
        for (const auto& v : overrides.variables)
        {
            appended += fmt::format("Output:Variable,{},{},{};\n", v.key.empty() ? "*" : v.key, v.variable_name,
                                    v.frequency.empty() ? "Hourly" : v.frequency);
        }
    }
    for (const auto& [name, text] : overrides.schedules)
    {
        const auto it = std::find_if(objects.begin(), objects.end(), [&](const IdfObject& o) {
            return iequals(o.class_name, "Schedule:Compact") && !o.fields.empty() && iequals(o.fields[0], name);
        });
        if (it == objects.end())
        {
            fail(ErrorCode::InvalidRecord, fmt::format("model has no Schedule:Compact named '{}'", name));
        }
        edits.push_back({it->begin, it->end, std::string(trim(text))});
    }

    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin > b.begin; });
    std::string out(idf_text);
    for (const auto& e : edits)
    {
        out.replace(e.begin, e.end - e.begin, e.text);
    }
    return out + appended;
}

IngestResult run_simulation(Store& store, const SimulateRequest& request, const ProgressFn& progress)
{
    validate_overrides(request.overrides);
    std::error_code ec;
    if (request.executable.empty() || !std::filesystem::is_regular_file(request.executable, ec))
    {
        fail(ErrorCode::SimulatorNotConfigured,
             fmt::format("simulator executable '{}' not found", request.executable.string()));
    }
    const std::string model = apply_overrides(read_text_file(request.idf), request.overrides);
    std::filesystem::create_directories(request.work_dir, ec);
    if (ec)
    {
        fail(ErrorCode::IoFailure, fmt::format("cannot create '{}': {}", request.work_dir.string(), ec.message()));
    }
    const auto idf_path = request.work_dir / "model.idf";
    write_text_file(idf_path, model);
    report(progress, 0.05);

    const std::string command =
        fmt::format("{} -r -w {} -d {} {} > {} 2>&1", shell_quote(request.executable.string()),
                    shell_quote(request.epw.string()), shell_quote(request.work_dir.string()),
                    shell_quote(idf_path.string()), shell_quote((request.work_dir / "simulator.log").string()));
    const int status = std::system(command.c_str());
    if (status != 0)
    {
        fail(ErrorCode::IoFailure, fmt::format("simulator exited with status {} (see {})", status,
                                               (request.work_dir / "simulator.log").string()));
    }
    const auto csv = request.work_dir / "eplusout.csv";
    if (!std::filesystem::exists(csv, ec))
    {
        fail(ErrorCode::IoFailure, fmt::format("simulator produced no '{}'", csv.string()));
    }
    IngestRequest ingest;
    ingest.idf = idf_path;
    if (const auto eio = request.work_dir / "eplusout.eio"; std::filesystem::exists(eio, ec))
    {
        ingest.eio = eio;
    }
    ingest.output = csv;
    ingest.building = request.building;
    ingest.attributes = request.attributes;
    ingest.weather_file_location = request.epw.string();
    ingest.schedule_name = request.schedule_name;
    ingest.year = request.year;
    return ingest_files(store, ingest, [&](double f) { report(progress, 0.3 + 0.7 * f); });
}

VariableEntry resolve_variable(const Store& store, SimulationId simulation, std::string_view reference)
{
    if (!store.get_simulation(simulation))
    {
        fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", simulation.value));
    }
    const std::string ref{trim(reference)};
    const std::vector<VariableEntry> variables = store.list_variables(simulation);
    if (!ref.empty() && std::all_of(ref.begin(), ref.end(), [](char c) { return c >= '0' && c <= '9'; }))
    {
        std::int32_t id = 0;
        std::from_chars(ref.data(), ref.data() + ref.size(), id);
        for (const auto& v : variables)
        {
            if (v.variable_id.value == id)
            {
                return v;
            }
        }
        fail(ErrorCode::UnknownVariable, fmt::format("variable {} has no samples in simulation {}", ref,
                                                     simulation.value));
    }
    const std::string key = zone_key(ref);
    std::vector<const VariableEntry*> by_name;
    for (const auto& v : variables)
    {
        const auto& d = v.descriptor;
        if (d.entity && zone_key(*d.entity + ":" + d.variable_name) == key)
        {
            return v;
        }
        if (zone_key(d.variable_name) == key)
        {
            by_name.push_back(&v);
        }
    }
    if (by_name.size() == 1)
    {
        return *by_name.front();
    }
    if (by_name.empty())
    {
        fail(ErrorCode::UnknownVariable, fmt::format("no variable '{}' in simulation {}", ref, simulation.value));
    }
    fail(ErrorCode::UnknownVariable,
         fmt::format("'{}' is ambiguous ({} entities); use ENTITY:{} or a variable id", ref, by_name.size(), ref));
}

TimeRange time_range(const std::optional<std::string>& start, const std::optional<std::string>& end)
{
    TimeRange range = TimeRange::all();
    if (start && !trim(*start).empty())
    {
        range.start = parse_iso(trim(*start));
    }
    if (end && !trim(*end).empty())
    {
        range.end = parse_iso(trim(*end));
    }
    if (range.start > range.end)
    {
        fail(ErrorCode::InvalidRange, fmt::format("start {} is after end {}", format_iso(range.start),
                                                  format_iso(range.end)));
    }
    return range;
}

Series stored_series(const Store& store, SimulationId simulation, const VariableEntry& variable,
                     const TimeRange& range)
{
    const VariableId ids[] = {variable.variable_id};
    auto tables = store.query_series(simulation, ids, range);
    const auto it = tables.find(variable.variable_id);
    if (it == tables.end() || it->second.timestamps.empty())
    {
        fail(ErrorCode::EmptyRange, fmt::format("'{}' has no samples between {} and {}", variable.descriptor.header(),
                                                format_iso(range.start), format_iso(range.end)));
    }
    Series out;
    out.label = variable.descriptor.header();
    out.timestamps = std::move(it->second.timestamps);
    out.values = std::move(it->second.columns.begin()->second);
    return out;
}

} // namespace epdata
