#include "epdata/cli.hpp"

#include "epdata/json_io.hpp"
#include "epdata/plot.hpp"
#include "epdata/service.hpp"
#include "epdata/synth.hpp"
#include "epdata/workflow.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <set>

#include <fmt/core.h>

namespace epdata
{

namespace
{

// Everything any subcommand can be given; each subcommand binds its subset.
struct Options
{
    std::string store;
    bool json{false};
    int verbosity{0};
    int year{kDefaultYear};

    // synth
    std::string out_dir;
    std::uint64_t seed{7};
    int zones{5};
    int days{7};
    int resolution{5};

    // ingest
    std::string idf;
    std::string eio;
    std::string csv;
    std::string archive;
    std::string prototype_kind{"commercial"};
    std::string prototype_name;
    std::string standard;
    std::string climate;
    std::string weather;
    std::string schedule{"default"};
    std::vector<std::string> attributes;
    std::size_t batch_size{10'000};

    // shared selection
    int sim{0};
    std::vector<std::string> vars;
    std::vector<std::string> sum_vars;
    std::string start;
    std::string end;
    std::string range;

    // aggregate
    std::string method{"simple"};
    std::vector<std::string> groups;

    // stats / plot
    std::string x;
    std::string y;
    std::size_t bins{0};
    std::string kind;
    std::string out_file;
    int width{800};
    int height{500};

    // export / bench
    std::string compare;

    // serve
    std::string host{"127.0.0.1"};
    int port{-1};
    std::string static_dir;
    std::string simulator;
    std::string work_dir;
};

std::string default_store()
{
    if (const char* dsn = std::getenv("STORE_DSN"); dsn != nullptr && *dsn != '\0')
    {
        std::string path = dsn;
        return path.rfind("sqlite://", 0) == 0 ? path.substr(9) : path;
    }
    return "epdata.sqlite";
}

void print_json(std::ostream& out, const Json& j)
{
    out << j.dump(2) << '\n';
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const std::size_t at = std::min(text.find(sep, start), text.size());
        const auto piece = trim(text.substr(start, at - start));
        if (!piece.empty())
        {
            out.emplace_back(piece);
        }
        start = at + 1;
    }
    return out;
}

TimeRange selected_range(const Options& o)
{
    if (!o.range.empty() && zone_key(o.range) != "FULL")
    {
        fail(ErrorCode::InvalidRange, fmt::format("--range accepts only 'full', got '{}'", o.range));
    }
    const auto bound = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
    return time_range(bound(o.start), bound(o.end));
}

BuildingRecord building_of(const Options& o)
{
    BuildingRecord b;
    b.prototype_kind = parse_prototype_kind(o.prototype_kind);
    b.prototype_name = o.prototype_name;
    b.energy_standard = o.standard;
    b.climate_zone = o.climate;
    return b;
}

PrototypeAttributes attributes_of(const Options& o)
{
    PrototypeAttributes out;
    for (const auto& a : o.attributes)
    {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0)
        {
            fail(ErrorCode::InvalidRecord, fmt::format("--attr expects key=value, got '{}'", a));
        }
        out[std::string(trim(std::string_view(a).substr(0, eq)))] = std::string(trim(std::string_view(a).substr(eq + 1)));
    }
    return out;
}

ProgressFn progress_printer(const Options& o, std::ostream& err)
{
    if (o.verbosity == 0)
    {
        return {};
    }
    return [&err, last = -1](double f) mutable {
        const int pct = static_cast<int>(f * 100.0);
        if (pct / 10 != last / 10)
        {
            err << fmt::format("progress {:3d}%\n", pct);
            last = pct;
        }
    };
}

std::vector<VariableEntry> selected_variables(const Store& store, const Options& o)
{
    if (o.vars.empty())
    {
        return store.list_variables(SimulationId{o.sim});
    }
    std::vector<VariableEntry> out;
    for (const auto& v : o.vars)
    {
        out.push_back(resolve_variable(store, SimulationId{o.sim}, v));
    }
    return out;
}

int cmd_synth(const Options& o, std::ostream& out)
{
    FixtureSpec spec = FixtureSpec::small_office(o.seed);
    spec.n_zones = o.zones;
    spec.days = o.days;
    spec.resolution = o.resolution;
    spec.year = o.year;
    const std::filesystem::path dir = o.out_dir;
    const FixtureData data = generate_fixture(spec, dir);
    const Json j = {
        {"dir", dir.string()},
        {"idf", (dir / "model.idf").string()},
        {"eio", (dir / "eplusout.eio").string()},
        {"csv", (dir / "eplusout.csv").string()},
        {"steps", data.timestamps.size()},
        {"series", data.table.series.size()},
    };
    if (o.json)
    {
        print_json(out, j);
    }
    else
    {
        out << fmt::format("wrote {} ({} steps x {} series)\n", dir.string(), data.timestamps.size(),
                           data.table.series.size());
    }
    return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err)
{
    Store store = Store::open(o.store);
    store.init_schema();
    IngestResult result;
    if (!o.archive.empty())
    {
        result = ingest_archive(store, read_nested(o.archive), building_of(o), o.weather, o.schedule);
    }
    else
    {
        if (o.idf.empty() || o.csv.empty())
        {
            fail(ErrorCode::InvalidRecord, "ingest needs --idf and --csv, or --archive");
        }
        IngestRequest request;
        request.idf = o.idf;
        if (!o.eio.empty())
        {
            request.eio = o.eio;
        }
        request.output = o.csv;
        request.building = building_of(o);
        request.attributes = attributes_of(o);
        request.weather_file_location = o.weather;
        request.schedule_name = o.schedule;
        request.year = o.year;
        request.batch_size = o.batch_size;
        result = ingest_files(store, request, progress_printer(o, err));
    }
    if (o.json)
    {
        print_json(out, json_of(result));
    }
    else
    {
        out << fmt::format("simulation {}: {} steps, {} series, {} rows, {} zones\n", result.simulation.value,
                           result.steps, result.series, result.rows, result.zones);
    }
    return kExitOk;
}

int cmd_aggregate(const Options& o, std::ostream& out, std::ostream& err)
{
    AggregateRequest request;
    request.simulation = SimulationId{o.sim};
    request.spec.method = parse_aggregation_method(o.method);
    for (const auto& g : o.groups)
    {
        const auto eq = g.find('=');
        if (eq == std::string::npos)
        {
            fail(ErrorCode::InvalidRecord, fmt::format("--group expects Name=zone,zone,..., got '{}'", g));
        }
        request.spec.groups.push_back(
            {std::string(trim(std::string_view(g).substr(0, eq))), split(std::string_view(g).substr(eq + 1), ',')});
    }
    for (const auto& v : o.vars)
    {
        request.selection.push_back({v, Combine::mean});
    }
    for (const auto& v : o.sum_vars)
    {
        request.selection.push_back({v, Combine::sum});
    }
    request.batch_size = o.batch_size;
    Store store = Store::open(o.store);
    const AggregateResult result = aggregate_simulation(store, request, progress_printer(o, err));
    for (const auto& w : result.warnings)
    {
        err << fmt::format("warning: {}: {}\n", to_string(w.code), w.message);
    }
    if (o.json)
    {
        print_json(out, json_of(result));
    }
    else
    {
        for (const auto& [name, id] : result.aggregated_zones)
        {
            out << fmt::format("aggregated zone {} -> zone {}\n", name, id.value);
        }
        out << fmt::format("{} variables, {} rows ({})\n", result.variables.size(), result.rows,
                           to_string(result.dataset.method));
    }
    return kExitOk;
}

int cmd_catalog(const Options& o, std::ostream& out)
{
    const Store store = Store::open(o.store, true);
    if (o.sim == 0)
    {
        Json j = Json::array();
        for (const auto& s : store.list_simulations())
        {
            Json row = json_of(s);
            row["samples"] = store.sample_count(s.simulation_id);
            j.push_back(std::move(row));
        }
        if (o.json)
        {
            print_json(out, j);
            return kExitOk;
        }
        for (const auto& row : j)
        {
            out << fmt::format("{}\tbuilding {}\t{} min\t{}\t{} samples\n", row["simulation_id"].get<int>(),
                               row["building_id"].get<int>(), row["time_resolution"].get<int>(),
                               row["weather_file_location"].get<std::string>(), row["samples"].get<std::size_t>());
        }
        return kExitOk;
    }
    if (!store.get_simulation(SimulationId{o.sim}))
    {
        fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", o.sim));
    }
    const auto variables = store.list_variables(SimulationId{o.sim});
    if (o.json)
    {
        Json j = Json::array();
        for (const auto& v : variables)
        {
            j.push_back(json_of(v));
        }
        print_json(out, j);
        return kExitOk;
    }
    for (const auto& v : variables)
    {
        out << fmt::format("{}\t{}\t{}\n", v.variable_id.value, to_string(v.descriptor.kind), v.descriptor.header());
    }
    return kExitOk;
}

int cmd_query(const Options& o, std::ostream& out)
{
    const TimeRange range = selected_range(o);
    const Store store = Store::open(o.store, true);
    if (!store.get_simulation(SimulationId{o.sim}))
    {
        fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", o.sim));
    }
    const auto variables = selected_variables(store, o);
    std::vector<VariableId> ids;
    for (const auto& v : variables)
    {
        ids.push_back(v.variable_id);
    }
    const auto tables = store.query_series(SimulationId{o.sim}, ids, range);
    if (o.json)
    {
        Json series = Json::array();
        for (const auto& v : variables)
        {
            const auto it = tables.find(v.variable_id);
            series.push_back(series_json(v, it == tables.end() ? VariableTable{} : it->second));
        }
        print_json(out, {{"simulation_id", o.sim},
                         {"start", format_iso(range.start)},
                         {"end", format_iso(range.end)},
                         {"series", series}});
        return kExitOk;
    }
    // Wide CSV over the union calendar, one column per series.
    std::set<Instant> calendar;
    for (const auto& [id, table] : tables)
    {
        calendar.insert(table.timestamps.begin(), table.timestamps.end());
    }
    std::string text = "timestamp";
    for (const auto& v : variables)
    {
        text += ',';
        text += v.descriptor.header();
    }
    text += '\n';
    std::vector<std::size_t> cursor(variables.size(), 0);
    for (Instant t : calendar)
    {
        text += format_iso(t);
        for (std::size_t i = 0; i < variables.size(); ++i)
        {
            text += ',';
            const auto it = tables.find(variables[i].variable_id);
            if (it == tables.end())
            {
                continue;
            }
            const auto& ts = it->second.timestamps;
            if (cursor[i] < ts.size() && ts[cursor[i]] == t)
            {
                text += format_double(it->second.columns.begin()->second[cursor[i]]);
                ++cursor[i];
            }
        }
        text += '\n';
    }
    if (!o.out_file.empty())
    {
        write_text_file(o.out_file, text);
    }
    else
    {
        out << text;
    }
    return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out)
{
    const TimeRange range = selected_range(o);
    const Store store = Store::open(o.store, true);
    const SimulationId sim{o.sim};
    if (!o.x.empty() || !o.y.empty())
    {
        if (o.x.empty() || o.y.empty())
        {
            fail(ErrorCode::InvalidRecord, "scatter needs both --x and --y");
        }
        const auto xv = resolve_variable(store, sim, o.x);
        const auto yv = resolve_variable(store, sim, o.y);
        const ScatterPayload payload = scatter(stored_series(store, sim, xv, range), stored_series(store, sim, yv, range));
        if (o.json)
        {
            Json j = json_of(payload);
            j["x_variable"] = json_of(xv);
            j["y_variable"] = json_of(yv);
            print_json(out, j);
            return kExitOk;
        }
        out << fmt::format("timestamp,{},{}\n", payload.x_label, payload.y_label);
        for (std::size_t i = 0; i < payload.x.size(); ++i)
        {
            out << fmt::format("{},{},{}\n", format_iso(payload.timestamps[i]), format_double(payload.x[i]),
                               format_double(payload.y[i]));
        }
        return kExitOk;
    }
    if (o.vars.size() != 1)
    {
        fail(ErrorCode::InvalidRecord, "distribution needs exactly one --var (or --x and --y for a scatter)");
    }
    const auto variable = resolve_variable(store, sim, o.vars.front());
    const DistributionSummary summary =
        describe(stored_series(store, sim, variable, range).values,
                 o.bins == 0 ? std::nullopt : std::optional<std::size_t>(o.bins));
    if (o.json)
    {
        Json j = json_of(summary);
        j["variable"] = json_of(variable);
        print_json(out, j);
        return kExitOk;
    }
    out << fmt::format("{}\n", variable.descriptor.header());
    out << fmt::format("count    {}\ndropped  {}\nmean     {}\nvariance {}\nmin      {}\nmax      {}\nrange    {}\n",
                       summary.count, summary.dropped, format_double(summary.mean), format_double(summary.variance),
                       format_double(summary.min), format_double(summary.max), format_double(summary.range));
    for (const auto& b : summary.histogram)
    {
        out << fmt::format("  [{}, {}) {}\n", format_double(b.lower), format_double(b.upper), b.count);
    }
    return kExitOk;
}

int cmd_plot(const Options& o, std::ostream& out)
{
    const TimeRange range = selected_range(o);
    const PlotKind kind = parse_plot_kind(o.kind);
    const Store store = Store::open(o.store, true);
    const SimulationId sim{o.sim};
    PlotPayload payload;
    switch (kind)
    {
    case PlotKind::distribution: {
        if (o.vars.size() != 1)
        {
            fail(ErrorCode::InvalidRecord, "a distribution plot needs exactly one --var");
        }
        const auto v = resolve_variable(store, sim, o.vars.front());
        payload = describe(stored_series(store, sim, v, range).values,
                           o.bins == 0 ? std::nullopt : std::optional<std::size_t>(o.bins));
        break;
    }
    case PlotKind::scatter: {
        if (o.x.empty() || o.y.empty())
        {
            fail(ErrorCode::InvalidRecord, "a scatter plot needs --x and --y");
        }
        payload = scatter(stored_series(store, sim, resolve_variable(store, sim, o.x), range),
                          stored_series(store, sim, resolve_variable(store, sim, o.y), range));
        break;
    }
    case PlotKind::timeseries: {
        if (o.vars.empty())
        {
            fail(ErrorCode::InvalidRecord, "a timeseries plot needs at least one --var");
        }
        TimeseriesPayload tables;
        for (const auto& ref : o.vars)
        {
            const auto v = resolve_variable(store, sim, ref);
            const Series s = stored_series(store, sim, v, range);
            VariableTable t;
            t.variable_name = v.descriptor.variable_name;
            t.kind = v.descriptor.kind;
            t.unit = v.descriptor.unit;
            t.frequency = v.descriptor.frequency;
            t.timestamps = s.timestamps;
            t.columns[v.descriptor.entity.value_or("")] = s.values;
            tables[s.label] = std::move(t);
        }
        payload = std::move(tables);
        break;
    }
    }
    if (o.out_file.empty())
    {
        fail(ErrorCode::InvalidRecord, "plot needs --out FILE.png");
    }
    render_static_plot(payload, kind, o.out_file, PlotSize{o.width, o.height});
    if (o.json)
    {
        print_json(out, {{"path", o.out_file}, {"kind", to_string(kind)}, {"width", o.width}, {"height", o.height}});
    }
    else
    {
        out << fmt::format("wrote {}\n", o.out_file);
    }
    return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out)
{
    const Store store = Store::open(o.store, true);
    const SimulationId sim{o.sim};
    const NestedArchive archive = o.method.empty()
                                      ? load_generation_archive(store, sim)
                                      : load_aggregation_archive(store, sim, parse_aggregation_method(o.method));
    const auto leaves = write_nested(archive, o.out_dir);
    const std::size_t bytes = nested_leaf_bytes(archive);
    if (o.json)
    {
        print_json(out, {{"dir", o.out_dir},
                         {"kind", to_string(archive.kind)},
                         {"leaves", leaves.size()},
                         {"leaf_bytes", bytes}});
    }
    else
    {
        out << fmt::format("wrote {} leaves ({} bytes) to {}\n", leaves.size(), bytes, o.out_dir);
    }
    return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out)
{
    Store store = Store::open(o.store, true);
    const StorageReport report =
        store.storage_report(o.compare.empty() ? std::nullopt : std::optional<std::filesystem::path>(o.compare));
    if (o.json)
    {
        print_json(out, json_of(report));
        return kExitOk;
    }
    for (const auto& t : report.tables)
    {
        out << fmt::format("{:<20} {:>10} rows {:>12} bytes\n", t.table, t.rows, t.bytes);
    }
    out << fmt::format("store bytes      {}\nnaive bytes      {}\nreduction factor {:.2f}\n", report.store_bytes,
                       report.naive_bytes, report.reduction_factor);
    return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out)
{
    const Store store = Store::open(o.store, true);
    const std::size_t orphans = store.count_orphan_samples();
    if (o.json)
    {
        print_json(out, {{"orphan_samples", orphans}});
    }
    else
    {
        out << fmt::format("orphan samples {}\n", orphans);
    }
    return orphans == 0 ? kExitOk : kExitValidation;
}

int cmd_serve(const Options& o, std::ostream& out)
{
    ServiceConfig config = ServiceConfig::from_env();
    config.store_path = o.store;
    config.host = o.host;
    if (o.port >= 0)
    {
        config.port = o.port;
    }
    if (!o.static_dir.empty())
    {
        config.static_dir = o.static_dir;
    }
    if (!o.simulator.empty())
    {
        config.simulator = o.simulator;
    }
    if (!o.work_dir.empty())
    {
        config.work_dir = o.work_dir;
    }
    Service service(config);
    const int port = service.bind(config.port);
    out << fmt::format("listening on http://{}:{}\n", config.host, port) << std::flush;
    service.run();
    return kExitOk;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    o.store = default_store();

    CLI::App app{"EnergyPlus output workbench", "epdata"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--store", o.store, "SQLite store file (default $STORE_DSN or epdata.sqlite)");
    app.add_flag("--json", o.json, "machine-readable output");
    app.add_flag("-v,--verbose", o.verbosity, "progress on stderr");
    app.add_option("--year", o.year, "calendar year of the run (stamps carry none)");

    auto* synth = app.add_subcommand("synth", "write a deterministic small-office fixture");
    synth->add_option("--out", o.out_dir, "output directory")->required();
    synth->add_option("--seed", o.seed);
    synth->add_option("--zones", o.zones)->check(CLI::Range(1, 64));
    synth->add_option("--days", o.days)->check(CLI::Range(1, 366));
    synth->add_option("--resolution", o.resolution, "minutes per step");

    auto* ingest = app.add_subcommand("ingest", "load one run (IDF + EIO + CSV) or a nested archive");
    ingest->add_option("--idf", o.idf);
    ingest->add_option("--eio", o.eio);
    ingest->add_option("--csv", o.csv, "eplusout.csv");
    ingest->add_option("--archive", o.archive, "nested archive directory instead of run files");
    ingest->add_option("--kind", o.prototype_kind, "commercial|residential|manufactured");
    ingest->add_option("--prototype", o.prototype_name)->required();
    ingest->add_option("--standard", o.standard);
    ingest->add_option("--climate", o.climate);
    ingest->add_option("--weather", o.weather, "weather file location")->required();
    ingest->add_option("--schedule", o.schedule);
    ingest->add_option("--attr", o.attributes, "prototype attribute key=value (repeatable)");
    ingest->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber);

    auto* aggregate = app.add_subcommand("aggregate", "combine zones into aggregated zones");
    aggregate->add_option("--sim", o.sim)->required();
    aggregate->add_option("--method", o.method, "simple|area_weighted|volume_weighted");
    aggregate->add_option("--group", o.groups, "Name=zone,zone,... (repeatable)")->required();
    aggregate->add_option("--var", o.vars, "zone variable to aggregate as a weighted mean (default: all)");
    aggregate->add_option("--sum", o.sum_vars, "zone variable to aggregate as a plain sum");
    aggregate->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber);

    auto* catalog = app.add_subcommand("catalog", "list simulations, or the variables of --sim");
    catalog->add_option("--sim", o.sim);

    const auto add_window = [&o](CLI::App* cmd) {
        cmd->add_option("--start", o.start, "ISO start, inclusive");
        cmd->add_option("--end", o.end, "ISO end, inclusive");
        cmd->add_option("--range", o.range, "'full' for the whole run");
    };

    auto* query = app.add_subcommand("query", "stored series as CSV (or --json)");
    query->add_option("--sim", o.sim)->required();
    query->add_option("--var", o.vars, "variable id, name or ENTITY:name (default: all)");
    query->add_option("--out", o.out_file, "write CSV here instead of stdout");
    add_window(query);

    auto* stats = app.add_subcommand("stats", "distribution of --var, or scatter of --x against --y");
    stats->add_option("--sim", o.sim)->required();
    stats->add_option("--var", o.vars);
    stats->add_option("--x", o.x);
    stats->add_option("--y", o.y);
    stats->add_option("--bins", o.bins);
    add_window(stats);

    auto* plot = app.add_subcommand("plot", "render a PNG");
    plot->add_option("--sim", o.sim)->required();
    plot->add_option("--kind", o.kind, "distribution|scatter|timeseries")->required();
    plot->add_option("--var", o.vars);
    plot->add_option("--x", o.x);
    plot->add_option("--y", o.y);
    plot->add_option("--bins", o.bins);
    plot->add_option("--out", o.out_file)->required();
    plot->add_option("--width", o.width);
    plot->add_option("--height", o.height);
    add_window(plot);

    auto* exp = app.add_subcommand("export", "write the nested per-variable archive");
    exp->add_option("--sim", o.sim)->required();
    exp->add_option("--out", o.out_dir)->required();
    exp->add_option("--method", o.method, "export aggregated series of this method instead");
    exp->callback([&o, exp] {
        if (exp->count("--method") == 0)
        {
            o.method.clear();
        }
    });

    auto* bench = app.add_subcommand("bench-storage", "store footprint against the nested export");
    bench->add_option("--compare", o.compare, "also measure an existing export directory");

    auto* check = app.add_subcommand("check", "referential integrity of stored samples");

    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    serve->add_option("--host", o.host);
    serve->add_option("--port", o.port, "default $PORT or 8080; 0 picks a free port");
    serve->add_option("--static", o.static_dir, "UI assets served at /");
    serve->add_option("--simulator", o.simulator, "EnergyPlus executable (default $EPLUS_EXE)");
    serve->add_option("--work-dir", o.work_dir);

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (synth->parsed())
        {
            return cmd_synth(o, out);
        }
        if (ingest->parsed())
        {
            return cmd_ingest(o, out, err);
        }
        if (aggregate->parsed())
        {
            return cmd_aggregate(o, out, err);
        }
        if (catalog->parsed())
        {
            return cmd_catalog(o, out);
        }
        if (query->parsed())
        {
            return cmd_query(o, out);
        }
        if (stats->parsed())
        {
            return cmd_stats(o, out);
        }
        if (plot->parsed())
        {
            return cmd_plot(o, out);
        }
        if (exp->parsed())
        {
            return cmd_export(o, out);
        }
        if (bench->parsed())
        {
            return cmd_bench(o, out);
        }
        if (check->parsed())
        {
            return cmd_check(o, out);
        }
        if (serve->parsed())
        {
            return cmd_serve(o, out);
        }
    }
    catch (const epdata::Error& e)
    {
        if (o.json)
        {
            err << json_of(e).dump() << '\n';
        }
        else
        {
            err << fmt::format("error: {}: {}", to_string(e.code()), e.detail());
            if (e.line())
            {
                err << fmt::format(" (line {})", *e.line());
            }
            err << '\n';
        }
        return is_io_error(e.code()) ? kExitIo : kExitValidation;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace epdata
