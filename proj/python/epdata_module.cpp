// Python bindings. Values cross as plain lists and dicts; records reuse the
// JSON shapes of the HTTP API so both front ends describe data the same way.

#include "epdata/aggregation.hpp"
#include "epdata/cli.hpp"
#include "epdata/json_io.hpp"
#include "epdata/parsers.hpp"
#include "epdata/stats.hpp"
#include "epdata/store.hpp"
#include "epdata/synth.hpp"
#include "epdata/workflow.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace epdata;

namespace
{

py::object to_python(const Json& j)
{
    switch (j.type())
    {
    case Json::value_t::null:
        return py::none();
    case Json::value_t::boolean:
        return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
        return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned:
        return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float:
        return py::float_(j.get<double>());
    case Json::value_t::string:
        return py::str(j.get<std::string>());
    case Json::value_t::array: {
        py::list out;
        for (const auto& x : j)
        {
            out.append(to_python(x));
        }
        return out;
    }
    case Json::value_t::object: {
        py::dict out;
        for (const auto& [k, v] : j.items())
        {
            out[py::str(k)] = to_python(v);
        }
        return out;
    }
    default:
        return py::none();
    }
}

TimeRange range_of(const std::optional<std::string>& start, const std::optional<std::string>& end)
{
    return time_range(start, end);
}

BuildingRecord building(const std::string& prototype, const std::string& kind, const std::string& standard,
                        const std::string& climate)
{
    BuildingRecord b;
    b.prototype_kind = parse_prototype_kind(kind);
    b.prototype_name = prototype;
    b.energy_standard = standard;
    b.climate_zone = climate;
    return b;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "EnergyPlus output workbench";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try
        {
            if (p)
            {
                std::rethrow_exception(p);
            }
        }
        catch (const Error& e)
        {
            // args: (code, detail, line)
            py::object line = e.line() ? py::object(py::int_(*e.line())) : py::none();
            PyErr_SetObject(error.ptr(), py::make_tuple(std::string(to_string(e.code())), e.detail(), line).ptr());
        }
    });

    m.def(
        "parse_series_header",
        [](const std::string& header) {
            const auto d = parse_series_header(header);
            py::dict out;
            out["variable_name"] = d.variable_name;
            out["kind"] = std::string(to_string(d.kind));
            out["entity"] = d.entity ? py::object(py::str(*d.entity)) : py::none();
            out["unit"] = d.unit;
            out["frequency"] = d.frequency;
            return out;
        },
        py::arg("header"));

    m.def(
        "build_weights",
        [](const std::vector<std::tuple<std::string, double, double>>& zones, const std::string& method) {
            std::vector<ZoneGeometry> geometry;
            for (const auto& [name, area, volume] : zones)
            {
                geometry.push_back(ZoneGeometry::make(name, area, volume));
            }
            return build_weights(geometry, parse_aggregation_method(method)).weights;
        },
        py::arg("zones"), py::arg("method") = "simple", "zones: [(name, floor_area, volume)]");

    m.def(
        "aggregate_series",
        [](const std::map<std::string, std::vector<double>>& per_zone, const std::map<std::string, double>& weights,
           const std::string& combine) {
            WeightVector w;
            w.weights = weights;
            if (combine != "mean" && combine != "sum")
            {
                throw Error(ErrorCode::InvalidRecord, "combine must be 'mean' or 'sum'");
            }
            return aggregate_series(per_zone, w, combine == "sum" ? Combine::sum : Combine::mean);
        },
        py::arg("per_zone"), py::arg("weights"), py::arg("combine") = "mean");

    m.def(
        "describe",
        [](const std::vector<double>& values, std::optional<std::size_t> bins) {
            return to_python(json_of(describe(values, bins)));
        },
        py::arg("values"), py::arg("bins") = py::none());

    m.def(
        "synth",
        [](const std::filesystem::path& out, std::uint64_t seed, int zones, int days, int resolution) {
            FixtureSpec spec = FixtureSpec::small_office(seed);
            spec.n_zones = zones;
            spec.days = days;
            spec.resolution = resolution;
            const auto data = generate_fixture(spec, out);
            py::dict d;
            d["steps"] = data.table.datetime_column.size();
            d["series"] = data.table.series.size();
            return d;
        },
        py::arg("out"), py::arg("seed") = 7, py::arg("zones") = 5, py::arg("days") = 7, py::arg("resolution") = 5);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_command(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in process; returns (exit_code, stdout, stderr).");

    py::class_<Store>(m, "Store")
        .def(py::init([](const std::filesystem::path& path, bool read_only) {
                 auto s = Store::open(path, read_only);
                 if (!read_only)
                 {
                     s.init_schema();
                 }
                 return s;
             }),
             py::arg("path"), py::arg("read_only") = false)
        .def_property_readonly("path", &Store::path)
        .def(
            "ingest",
            [](Store& s, const std::filesystem::path& idf, const std::filesystem::path& csv,
               std::optional<std::filesystem::path> eio, const std::string& prototype, const std::string& weather,
               const std::string& kind, const std::string& standard, const std::string& climate,
               const std::string& schedule, int year) {
                IngestRequest r;
                r.idf = idf;
                r.output = csv;
                r.eio = std::move(eio);
                r.building = building(prototype, kind, standard, climate);
                r.weather_file_location = weather;
                r.schedule_name = schedule;
                r.year = year;
                IngestResult result;
                {
                    py::gil_scoped_release release;
                    result = ingest_files(s, r);
                }
                return to_python(json_of(result));
            },
            py::arg("idf"), py::arg("csv"), py::arg("eio") = py::none(), py::kw_only(), py::arg("prototype"),
            py::arg("weather"), py::arg("kind") = "commercial", py::arg("standard") = "", py::arg("climate") = "",
            py::arg("schedule") = "default", py::arg("year") = kDefaultYear)
        .def(
            "aggregate",
            [](Store& s, int simulation, const std::map<std::string, std::vector<std::string>>& groups,
               const std::string& method, const std::vector<std::string>& variables) {
                AggregateRequest r;
                r.simulation = SimulationId{simulation};
                r.spec.method = parse_aggregation_method(method);
                for (const auto& [name, zones] : groups)
                {
                    r.spec.groups.push_back({name, zones});
                }
                for (const auto& v : variables)
                {
                    r.selection.push_back({v, Combine::mean});
                }
                return to_python(json_of(aggregate_simulation(s, r)));
            },
            py::arg("simulation"), py::arg("groups"), py::arg("method") = "simple",
            py::arg("variables") = std::vector<std::string>{})
        .def("simulations",
             [](const Store& s) {
                 Json out = Json::array();
                 for (const auto& sim : s.list_simulations())
                 {
                     Json j = json_of(sim);
                     j["samples"] = s.sample_count(sim.simulation_id);
                     out.push_back(j);
                 }
                 return to_python(out);
             })
        .def(
            "variables",
            [](const Store& s, int simulation) {
                Json out = Json::array();
                for (const auto& v : s.list_variables(SimulationId{simulation}))
                {
                    out.push_back(json_of(v));
                }
                return to_python(out);
            },
            py::arg("simulation"))
        .def(
            "series",
            [](const Store& s, int simulation, const std::string& variable, std::optional<std::string> start,
               std::optional<std::string> end) {
                const SimulationId sim{simulation};
                const auto entry = resolve_variable(s, sim, variable);
                const auto tables = s.query_series(sim, std::vector{entry.variable_id}, range_of(start, end));
                const auto it = tables.find(entry.variable_id);
                return to_python(series_json(entry, it == tables.end() ? VariableTable{} : it->second));
            },
            py::arg("simulation"), py::arg("variable"), py::arg("start") = py::none(), py::arg("end") = py::none())
        .def("storage_report", [](Store& s) { return to_python(json_of(s.storage_report())); })
        .def("orphan_samples", &Store::count_orphan_samples)
        .def("count_rows", &Store::count_rows, py::arg("table"));
}
