#include "epdata/service.hpp"

#include "epdata/json_io.hpp"
#include "epdata/workflow.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/core.h>

namespace epdata
{

namespace
{

std::optional<std::string> env(const char* name)
{
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0')
    {
        return std::nullopt;
    }
    return std::string(value);
}

void send_json(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& error)
{
    send_json(res, http_status(error.code()), json_of(error));
}

std::optional<std::string> query_param(const httplib::Request& req, const char* key)
{
    if (!req.has_param(key))
    {
        return std::nullopt;
    }
    return req.get_param_value(key);
}

std::string required_param(const httplib::Request& req, const char* key)
{
    auto value = query_param(req, key);
    if (!value || trim(*value).empty())
    {
        fail(ErrorCode::InvalidRecord, fmt::format("query parameter '{}' is required", key));
    }
    return *value;
}

std::int32_t parse_id(std::string_view text, std::string_view what)
{
    text = trim(text);
    std::int32_t id = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    {
        fail(ErrorCode::InvalidRecord, fmt::format("{} '{}' is not an integer id", what, std::string(text)));
    }
    return id;
}

Json parse_body(const httplib::Request& req)
{
    try
    {
        return Json::parse(req.body);
    }
    catch (const Json::parse_error& e)
    {
        fail(ErrorCode::InvalidRecord, fmt::format("request body is not JSON: {}", e.what()));
    }
}

std::string body_string(const Json& body, const char* key, bool required = true)
{
    if (!body.contains(key) || body.at(key).is_null())
    {
        if (required)
        {
            fail(ErrorCode::InvalidRecord, fmt::format("field '{}' is required", key));
        }
        return {};
    }
    if (!body.at(key).is_string())
    {
        fail(ErrorCode::InvalidRecord, fmt::format("field '{}': expected a string", key));
    }
    return body.at(key).get<std::string>();
}

int body_year(const Json& body)
{
    if (!body.contains("year") || body.at("year").is_null())
    {
        return kDefaultYear;
    }
    if (!body.at("year").is_number_integer())
    {
        fail(ErrorCode::InvalidRecord, "field 'year': expected an integer");
    }
    return body.at("year").get<int>();
}

// Identity of a simulation an accepted ingest will create; used to reject a
// second identical request while the first is still queued.
std::string natural_key(const BuildingRecord& b, const SimulationRecord& s)
{
    return fmt::format("{}|{}|{}|{}|{}|{}|{}", to_string(b.prototype_kind), zone_key(b.prototype_name),
                       zone_key(b.energy_standard), zone_key(b.climate_zone), s.weather_file_location,
                       s.time_resolution, s.schedule_name);
}

struct Job
{
    int id{0};
    std::string kind;
    JobPhase phase{JobPhase::pending};
    double progress{0.0};
    std::optional<Json> error;
    std::optional<Json> result;
    std::string claim; // natural key held while queued or running

    Json to_json() const
    {
        Json j = {{"job_id", id}, {"kind", kind}, {"phase", to_string(phase)}, {"progress", progress}};
        if (error)
        {
            j["error"] = *error;
        }
        if (result)
        {
            j["result"] = *result;
        }
        return j;
    }
};

using Task = std::function<Json(Store&, const ProgressFn&, int job_id)>;

} // namespace

ServiceConfig ServiceConfig::from_env()
{
    ServiceConfig config;
    if (auto dsn = env("STORE_DSN"))
    {
        // sqlite:///path and file paths are both accepted
        std::string path = *dsn;
        if (path.rfind("sqlite://", 0) == 0)
        {
            path = path.substr(9);
        }
        config.store_path = path;
    }
    if (auto exe = env("EPLUS_EXE"))
    {
        config.simulator = *exe;
    }
    if (auto port = env("PORT"))
    {
        config.port = static_cast<int>(parse_id(*port, "PORT"));
    }
    if (auto dir = env("EPDATA_STATIC_DIR"))
    {
        config.static_dir = *dir;
    }
    if (auto file = env("EPDATA_ESSENTIAL_VARS"))
    {
        config.essential_variables = *file;
    }
    if (auto dir = env("EPDATA_WORK_DIR"))
    {
        config.work_dir = *dir;
    }
    return config;
}

int http_status(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::UnknownSimulation:
    case ErrorCode::UnknownVariable:
    case ErrorCode::UnknownBuilding:
        return 404;
    case ErrorCode::DuplicateSimulation:
    case ErrorCode::DuplicateTriple:
    case ErrorCode::DuplicateAggregatedName:
    case ErrorCode::ConstraintViolation:
        return 409;
    case ErrorCode::EmptySeries:
    case ErrorCode::NoOverlap:
    case ErrorCode::EmptyRange:
        return 422;
    case ErrorCode::StorageUnavailable:
    case ErrorCode::SimulatorNotConfigured:
        return 503;
    default:
        return 400;
    }
}

std::string_view to_string(JobPhase phase)
{
    switch (phase)
    {
    case JobPhase::pending:
        return "pending";
    case JobPhase::running:
        return "running";
    case JobPhase::done:
        return "done";
    case JobPhase::failed:
        return "failed";
    }
    return "unknown";
}

struct Service::Impl
{
    ServiceConfig config;
    httplib::Server server;

    std::mutex mu;
    std::condition_variable cv;
    std::map<int, Job> jobs;
    std::deque<std::pair<int, Task>> queue;
    std::set<std::string> claims;
    int next_id{1};
    bool stopping{false};
    std::thread worker;

    explicit Impl(ServiceConfig c) : config(std::move(c))
    {
        // Creating the schema up front lets read endpoints answer on an empty store.
        Store store = Store::open(config.store_path);
        store.init_schema();
        worker = std::thread([this, s = std::move(store)]() mutable { work(s); });
        routes();
    }

    ~Impl()
    {
        server.stop();
        {
            std::lock_guard lock(mu);
            stopping = true;
        }
        cv.notify_all();
        if (worker.joinable())
        {
            worker.join();
        }
    }

    Store reader() const { return Store::open(config.store_path, true); }

    void work(Store& store)
    {
        for (;;)
        {
            std::pair<int, Task> next;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return stopping || !queue.empty(); });
                if (stopping)
                {
                    return;
                }
                next = std::move(queue.front());
                queue.pop_front();
                jobs.at(next.first).phase = JobPhase::running;
            }
            cv.notify_all();
            const int id = next.first;
            const ProgressFn progress = [this, id](double f) {
                std::lock_guard lock(mu);
                Job& job = jobs.at(id);
                job.progress = std::clamp(std::max(job.progress, f), 0.0, 1.0);
            };
            std::optional<Json> result;
            std::optional<Json> error;
            try
            {
                result = next.second(store, progress, id);
            }
            catch (const Error& e)
            {
                error = json_of(e);
            }
            catch (const std::exception& e)
            {
                error = Json{{"error", "InternalError"}, {"detail", e.what()}};
            }
            {
                std::lock_guard lock(mu);
                Job& job = jobs.at(id);
                if (result)
                {
                    job.phase = JobPhase::done;
                    job.progress = 1.0;
                    job.result = std::move(result);
                }
                else
                {
                    job.phase = JobPhase::failed;
                    job.error = std::move(error);
                }
                if (!job.claim.empty())
                {
                    claims.erase(job.claim);
                }
            }
            cv.notify_all();
        }
    }

    Json submit(std::string kind, Task task, std::string claim = {})
    {
        Json snapshot;
        {
            std::lock_guard lock(mu);
            if (!claim.empty() && !claims.insert(claim).second)
            {
                fail(ErrorCode::DuplicateSimulation, "an identical ingest is already queued");
            }
            Job job;
            job.id = next_id++;
            job.kind = std::move(kind);
            job.claim = std::move(claim);
            snapshot = job.to_json();
            queue.emplace_back(job.id, std::move(task));
            jobs.emplace(job.id, std::move(job));
        }
        cv.notify_all();
        return snapshot;
    }

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static Handler guarded(Handler inner)
    {
        return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
            try
            {
                inner(req, res);
            }
            catch (const Error& e)
            {
                send_error(res, e);
            }
            catch (const std::exception& e)
            {
                send_json(res, 500, {{"error", "InternalError"}, {"detail", e.what()}});
            }
        };
    }

    void accepted(httplib::Response& res, const Json& job)
    {
        res.set_header("Location", fmt::format("/api/jobs/{}", job.at("job_id").get<int>()));
        send_json(res, 202, job);
    }

    static SimulationId path_simulation(const httplib::Request& req)
    {
        return SimulationId{parse_id(req.matches[1].str(), "simulation")};
    }

    static SimulationRecord existing_simulation(const Store& store, SimulationId id)
    {
        auto sim = store.get_simulation(id);
        if (!sim)
        {
            fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", id.value));
        }
        return *sim;
    }

    static Json simulation_summary(const Store& store, const SimulationRecord& sim)
    {
        Json j = json_of(sim);
        if (auto building = store.get_building(sim.building_id))
        {
            j["building"] = json_of(*building);
        }
        j["samples"] = store.sample_count(sim.simulation_id);
        return j;
    }

    void routes()
    {
        server.Get("/api/health", guarded([this](const httplib::Request&, httplib::Response& res) {
                       send_json(res, 200, {{"status", "ok"}, {"simulator", config.simulator.has_value()}});
                   }));

        server.Get("/api/simulations", guarded([this](const httplib::Request&, httplib::Response& res) {
                       const Store store = reader();
                       Json out = Json::array();
                       for (const auto& sim : store.list_simulations())
                       {
                           out.push_back(simulation_summary(store, sim));
                       }
                       send_json(res, 200, out);
                   }));

        server.Get(R"(/api/simulations/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const Store store = reader();
                       const auto sim = existing_simulation(store, path_simulation(req));
                       Json j = simulation_summary(store, sim);
                       if (auto range = store.data_range(sim.simulation_id))
                       {
                           j["start"] = format_iso(range->start);
                           j["end"] = format_iso(range->end);
                       }
                       Json methods = Json::array();
                       for (auto m : aggregation_methods(store, sim.simulation_id))
                       {
                           methods.push_back(to_string(m));
                       }
                       j["aggregation_methods"] = methods;
                       send_json(res, 200, j);
                   }));

        server.Get(R"(/api/simulations/(\d+)/variables)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const Store store = reader();
                       const auto sim = existing_simulation(store, path_simulation(req));
                       Json out = Json::array();
                       for (const auto& v : store.list_variables(sim.simulation_id))
                       {
                           out.push_back(json_of(v));
                       }
                       send_json(res, 200, out);
                   }));

        server.Get(R"(/api/simulations/(\d+)/zones)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const Store store = reader();
                       const auto sim = existing_simulation(store, path_simulation(req));
                       Json out = Json::array();
                       for (const auto& z : store.zones_for_building(sim.building_id))
                       {
                           Json j = json_of(z);
                           if (z.is_aggregated)
                           {
                               Json composites = Json::array();
                               for (const auto& link : store.aggregation_links(z.zone_id))
                               {
                                   composites.push_back(link.composite_zone_id.value);
                                   j["method"] = to_string(link.method);
                               }
                               j["composite_zone_ids"] = composites;
                           }
                           out.push_back(std::move(j));
                       }
                       send_json(res, 200, out);
                   }));

        server.Get("/api/jobs", guarded([this](const httplib::Request&, httplib::Response& res) {
                       Json out = Json::array();
                       std::lock_guard lock(mu);
                       for (const auto& [id, job] : jobs)
                       {
                           out.push_back(job.to_json());
                       }
                       send_json(res, 200, out);
                   }));

        server.Get(R"(/api/jobs/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto id = parse_id(req.matches[1].str(), "job");
                       std::lock_guard lock(mu);
                       const auto it = jobs.find(static_cast<int>(id));
                       if (it == jobs.end())
                       {
                           send_json(res, 404, {{"error", "UnknownJob"}, {"detail", fmt::format("job {} does not exist", id)}});
                           return;
                       }
                       send_json(res, 200, it->second.to_json());
                   }));

        server.Post("/api/ingest", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = parse_body(req);
                        IngestRequest request;
                        request.idf = body_string(body, "idf");
                        if (auto eio = body_string(body, "eio", false); !eio.empty())
                        {
                            request.eio = eio;
                        }
                        request.output = body_string(body, "output");
                        request.building = building_from_json(body.value("building", Json::object()));
                        request.attributes = attributes_from_json(body.value("attributes", Json()));
                        request.weather_file_location = body_string(body, "weather_file_location", false);
                        if (auto schedule = body_string(body, "schedule_name", false); !schedule.empty())
                        {
                            request.schedule_name = schedule;
                        }
                        request.year = body_year(body);

                        // Cheap checks before queueing: header parse errors are 400,
                        // an already-populated simulation is 409.
                        require(validate_building(request.building));
                        const SimulationRecord probe = probe_simulation(request);
                        require(validate_simulation(probe));
                        {
                            const Store store = reader();
                            if (auto existing = find_populated_simulation(store, request))
                            {
                                fail(ErrorCode::DuplicateSimulation,
                                     fmt::format("simulation {} already holds these samples", existing->value));
                            }
                        }
                        const Json job = submit(
                            "ingest",
                            [request](Store& store, const ProgressFn& progress, int) {
                                return json_of(ingest_files(store, request, progress));
                            },
                            natural_key(request.building, probe));
                        accepted(res, job);
                    }));

        server.Post("/api/aggregate", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = parse_body(req);
                        if (!body.contains("simulation_id") || !body.at("simulation_id").is_number_integer())
                        {
                            fail(ErrorCode::InvalidRecord, "field 'simulation_id': expected an integer");
                        }
                        AggregateRequest request;
                        request.simulation = SimulationId{body.at("simulation_id").get<std::int32_t>()};
                        request.spec = aggregation_spec_from_json(body.value("spec", Json()));
                        request.selection = selection_from_json(body.value("variables", Json()));
                        {
                            const Store store = reader();
                            const auto sim = existing_simulation(store, request.simulation);
                            std::set<std::string> known;
                            for (const auto& z : store.zones_for_building(sim.building_id))
                            {
                                if (!z.is_aggregated)
                                {
                                    known.insert(z.zone_name);
                                }
                            }
                            require(validate_aggregation_spec(request.spec, known));
                            if (request.spec.method != AggregationMethod::simple)
                            {
                                const auto geometry = building_geometry(store, sim.building_id);
                                for (const auto& group : request.spec.groups)
                                {
                                    (void)weights_for_selection(request.spec.method, geometry,
                                                                group.composite_zone_names);
                                }
                            }
                        }
                        const Json job =
                            submit("aggregate", [request](Store& store, const ProgressFn& progress, int) {
                                return json_of(aggregate_simulation(store, request, progress));
                            });
                        accepted(res, job);
                    }));

        server.Post("/api/simulate", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = parse_body(req);
                        SimulateRequest request;
                        request.overrides = overrides_from_json(body.value("overrides", Json()));
                        validate_overrides(request.overrides);
                        if (!config.simulator)
                        {
                            fail(ErrorCode::SimulatorNotConfigured, "EPLUS_EXE is not set");
                        }
                        request.executable = *config.simulator;
                        if (request.overrides.variables.empty() && config.essential_variables)
                        {
                            request.overrides.variables =
                                parse_variable_list(read_text_file(*config.essential_variables));
                        }
                        request.idf = body_string(body, "idf");
                        request.epw = body_string(body, "epw");
                        request.building = building_from_json(body.value("building", Json::object()));
                        request.attributes = attributes_from_json(body.value("attributes", Json()));
                        if (auto schedule = body_string(body, "schedule_name", false); !schedule.empty())
                        {
                            request.schedule_name = schedule;
                        }
                        request.year = body_year(body);
                        require(validate_building(request.building));
                        const auto work_root = config.work_dir;
                        const Json job = submit("simulate", [request, work_root](Store& store, const ProgressFn& progress,
                                                                  int job_id) {
                            SimulateRequest run = request;
                            run.work_dir = work_root / fmt::format("run_{}", job_id);
                            return json_of(run_simulation(store, run, progress));
                        });
                        accepted(res, job);
                    }));

        server.Get("/api/series", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const SimulationId sim{parse_id(required_param(req, "sim"), "sim")};
                       const TimeRange range = time_range(query_param(req, "start"), query_param(req, "end"));
                       const Store store = reader();
                       existing_simulation(store, sim);
                       std::vector<VariableEntry> selected;
                       if (req.has_param("vars"))
                       {
                           for (std::size_t i = 0; i < req.get_param_value_count("vars"); ++i)
                           {
                               const std::string list = req.get_param_value("vars", i);
                               std::size_t begin = 0;
                               while (begin <= list.size())
                               {
                                   const std::size_t comma = std::min(list.find(',', begin), list.size());
                                   const std::string_view ref = trim(std::string_view(list).substr(begin, comma - begin));
                                   if (!ref.empty())
                                   {
                                       selected.push_back(resolve_variable(store, sim, ref));
                                   }
                                   begin = comma + 1;
                               }
                           }
                       }
                       else
                       {
                           selected = store.list_variables(sim);
                       }
                       std::vector<VariableId> ids;
                       for (const auto& v : selected)
                       {
                           ids.push_back(v.variable_id);
                       }
                       const auto tables = store.query_series(sim, ids, range);
                       Json series = Json::array();
                       std::size_t points = 0;
                       for (const auto& v : selected)
                       {
                           const auto it = tables.find(v.variable_id);
                           const VariableTable empty;
                           const VariableTable& table = it == tables.end() ? empty : it->second;
                           points += table.timestamps.size();
                           series.push_back(series_json(v, table));
                       }
                       if (!selected.empty() && points == 0)
                       {
                           fail(ErrorCode::EmptyRange, "no samples fall inside the requested window");
                       }
                       send_json(res, 200,
                                 {{"simulation_id", sim.value},
                                  {"start", format_iso(range.start)},
                                  {"end", format_iso(range.end)},
                                  {"series", series}});
                   }));

        server.Get("/api/stats/distribution", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const SimulationId sim{parse_id(required_param(req, "sim"), "sim")};
                       const TimeRange range = time_range(query_param(req, "start"), query_param(req, "end"));
                       std::optional<std::size_t> bins;
                       if (auto b = query_param(req, "bins"); b && !trim(*b).empty())
                       {
                           const auto n = parse_id(*b, "bins");
                           if (n <= 0)
                           {
                               fail(ErrorCode::InvalidRecord, "bins must be positive");
                           }
                           bins = static_cast<std::size_t>(n);
                       }
                       const Store store = reader();
                       const VariableEntry variable = resolve_variable(store, sim, required_param(req, "var"));
                       const Series series = stored_series(store, sim, variable, range);
                       Json j = json_of(describe(series.values, bins));
                       j["variable"] = json_of(variable);
                       j["unit"] = variable.descriptor.unit;
                       send_json(res, 200, j);
                   }));

        server.Get("/api/stats/scatter", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const SimulationId sim{parse_id(required_param(req, "sim"), "sim")};
                       const TimeRange range = time_range(query_param(req, "start"), query_param(req, "end"));
                       const Store store = reader();
                       const VariableEntry x = resolve_variable(store, sim, required_param(req, "x"));
                       const VariableEntry y = resolve_variable(store, sim, required_param(req, "y"));
                       const ScatterPayload payload =
                           scatter(stored_series(store, sim, x, range), stored_series(store, sim, y, range));
                       Json j = json_of(payload);
                       j["x_variable"] = json_of(x);
                       j["y_variable"] = json_of(y);
                       send_json(res, 200, j);
                   }));

        if (config.static_dir)
        {
            server.set_mount_point("/", config.static_dir->string());
        }
        else
        {
            server.Get("/", [](const httplib::Request&, httplib::Response& res) {
                res.set_content("<!doctype html><title>epdata</title><p>API under <code>/api</code>. "
                                "Set EPDATA_STATIC_DIR to serve the UI.</p>",
                                "text/html");
            });
        }
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config)))
{
}

Service::~Service() = default;

int Service::bind(int port)
{
    int bound = 0;
    if (port == 0)
    {
        bound = impl_->server.bind_to_any_port(impl_->config.host);
    }
    else
    {
        bound = impl_->server.bind_to_port(impl_->config.host, port) ? port : -1;
    }
    if (bound <= 0)
    {
        fail(ErrorCode::IoFailure, fmt::format("cannot bind {}:{}", impl_->config.host, port));
    }
    return bound;
}

void Service::run()
{
    impl_->server.listen_after_bind();
}

void Service::stop()
{
    impl_->server.stop();
}

std::optional<JobPhase> Service::wait_for_job(int job_id, std::chrono::milliseconds timeout)
{
    std::unique_lock lock(impl_->mu);
    const auto settled = [&] {
        const auto it = impl_->jobs.find(job_id);
        return it != impl_->jobs.end() &&
               (it->second.phase == JobPhase::done || it->second.phase == JobPhase::failed);
    };
    impl_->cv.wait_for(lock, timeout, settled);
    const auto it = impl_->jobs.find(job_id);
    if (it == impl_->jobs.end())
    {
        return std::nullopt;
    }
    return it->second.phase;
}

} // namespace epdata
