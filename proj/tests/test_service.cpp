#include "epdata/service.hpp"

#include "fixture.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <thread>

using namespace epdata;
using Json = nlohmann::json;

namespace
{

// A served workbench on a free port with a generated one-day fixture on disk.
struct Served
{
    testing::TempDir dir;
    FixtureSpec spec;
    std::unique_ptr<Service> service;
    std::thread thread;
    int port{0};
    std::unique_ptr<httplib::Client> client;

    explicit Served(std::optional<std::filesystem::path> simulator = std::nullopt)
    {
        spec = FixtureSpec::small_office();
        spec.days = 1;
        generate_fixture(spec, dir / "run");
        ServiceConfig config;
        config.store_path = dir / "store.sqlite";
        config.simulator = std::move(simulator);
        config.work_dir = dir / "work";
        service = std::make_unique<Service>(config);
        port = service->bind(0);
        thread = std::thread([this] { service->run(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(30, 0);
        // listen_after_bind may not have started yet
        for (int i = 0; i < 200 && !client->Get("/api/health"); ++i)
        {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }

    ~Served()
    {
        service->stop();
        thread.join();
    }

    Json ingest_body() const
    {
        return {{"idf", (dir / "run" / "model.idf").string()},
                {"eio", (dir / "run" / "eplusout.eio").string()},
                {"output", (dir / "run" / "eplusout.csv").string()},
                {"building", {{"prototype_kind", "commercial"}, {"prototype_name", "SmallOffice"},
                              {"energy_standard", "90.1-2019"}, {"climate_zone", "4C"}}},
                {"weather_file_location", "seattle.epw"}};
    }

    std::pair<int, Json> get(const std::string& path)
    {
        const auto r = client->Get(path);
        REQUIRE(r);
        return {r->status, r->body.empty() ? Json() : Json::parse(r->body)};
    }

    std::pair<int, Json> post(const std::string& path, const Json& body)
    {
        const auto r = client->Post(path, body.dump(), "application/json");
        REQUIRE(r);
        return {r->status, Json::parse(r->body)};
    }

    Json finish(const Json& accepted)
    {
        const int id = accepted.at("job_id").get<int>();
        REQUIRE(service->wait_for_job(id, std::chrono::seconds(60)));
        return get("/api/jobs/" + std::to_string(id)).second;
    }

    int ingest()
    {
        const auto [status, job] = post("/api/ingest", ingest_body());
        REQUIRE(status == 202);
        const Json done = finish(job);
        REQUIRE(done.at("phase") == "done");
        return done.at("result").at("simulation_id").get<int>();
    }
};

std::string q(const std::string& s)
{
    return httplib::detail::encode_query_param(s);
}

} // namespace

TEST_CASE("health and an empty catalog")
{
    Served s;
    const auto [status, health] = s.get("/api/health");
    CHECK(status == 200);
    CHECK(health.at("status") == "ok");
    CHECK(health.at("simulator") == false);
    const auto [st, sims] = s.get("/api/simulations");
    CHECK(st == 200);
    CHECK(sims == Json::array());
    CHECK(s.get("/api/jobs").second == Json::array());
    CHECK(s.get("/api/jobs/77").first == 404);
    CHECK(s.get("/api/simulations/5").first == 404);
}

TEST_CASE("ingest is asynchronous and loads steps x series rows")
{
    Served s;
    const auto r = s.client->Post("/api/ingest", s.ingest_body().dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 202);
    CHECK(r->get_header_value("Location").rfind("/api/jobs/", 0) == 0);
    const Json accepted = Json::parse(r->body);
    CHECK((accepted.at("phase") == "pending" || accepted.at("phase") == "running"));
    const Json done = s.finish(accepted);
    REQUIRE(done.at("phase") == "done");
    CHECK(done.at("progress") == 1.0);
    const Json& result = done.at("result");
    CHECK(result.at("steps") == 288);
    CHECK(result.at("series") == 35);
    CHECK(result.at("rows") == 288 * 35);

    const auto [st, sims] = s.get("/api/simulations");
    REQUIRE(sims.size() == 1);
    CHECK(sims[0].at("samples") == 288 * 35);
    CHECK(sims[0].at("building").at("prototype_name") == "SmallOffice");
    const int sim = result.at("simulation_id").get<int>();
    const auto [st2, detail] = s.get("/api/simulations/" + std::to_string(sim));
    CHECK(st2 == 200);
    CHECK(detail.at("start") == "2023-01-01T00:05:00");
    CHECK(detail.at("end") == "2023-01-02T00:00:00");
    CHECK(s.get("/api/simulations/" + std::to_string(sim) + "/variables").second.size() == 35);
    CHECK(s.get("/api/simulations/" + std::to_string(sim) + "/zones").second.size() == 5);
}

TEST_CASE("ingest conflicts and bad input")
{
    Served s;
    s.ingest();
    const auto [status, body] = s.post("/api/ingest", s.ingest_body());
    CHECK(status == 409);
    CHECK(body.at("error") == "DuplicateSimulation");

    auto missing = s.ingest_body();
    missing.erase("output");
    CHECK(s.post("/api/ingest", missing).first == 400);
    auto no_weather = s.ingest_body();
    no_weather["weather_file_location"] = "";
    no_weather["building"]["climate_zone"] = "5A";
    CHECK(s.post("/api/ingest", no_weather).second.at("error") == "MissingWeatherFile");
    const auto r = s.client->Post("/api/ingest", "{oops", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
}

TEST_CASE("a malformed output row fails the job with its line")
{
    Served s;
    auto csv = read_text_file(s.dir / "run" / "eplusout.csv");
    // break row 10 (file line 11), past the rows the probe reads
    std::size_t pos = 0;
    for (int i = 0; i < 10; ++i)
    {
        pos = csv.find('\n', pos) + 1;
    }
    csv.insert(csv.find('\n', pos), ",9,9");
    write_text_file(s.dir / "run" / "eplusout.csv", csv);
    const auto [status, job] = s.post("/api/ingest", s.ingest_body());
    REQUIRE(status == 202);
    const Json done = s.finish(job);
    CHECK(done.at("phase") == "failed");
    CHECK(done.at("error").at("error") == "RaggedRow");
    CHECK(done.at("error").at("line") == 11);
    // parsing precedes registration, so nothing was stored
    CHECK(s.get("/api/simulations").second == Json::array());
}

TEST_CASE("aggregate endpoint validates before queueing")
{
    Served s;
    const int sim = s.ingest();
    const Json zones = {"CORE_ZN", "PERIMETER_ZN_1", "PERIMETER_ZN_2", "PERIMETER_ZN_3", "PERIMETER_ZN_4"};
    CHECK(s.post("/api/aggregate", {{"simulation_id", 99}, {"spec", {{"groups", {{{"name", "A"}, {"zones", zones}}}}}}})
              .first == 404);
    const auto [st, unknown] = s.post(
        "/api/aggregate", {{"simulation_id", sim}, {"spec", {{"groups", {{{"name", "A"}, {"zones", {"Z9"}}}}}}}});
    CHECK(st == 400);
    CHECK(unknown.at("error") == "UnknownZone");
    CHECK(s.post("/api/aggregate", {{"simulation_id", "x"}}).first == 400);

    const Json body = {{"simulation_id", sim},
                       {"spec", {{"method", "area_weighted"}, {"groups", {{{"name", "Agg1"}, {"zones", zones}}}}}},
                       {"variables", {"Zone Mean Air Temperature", {{"name", "Zone Lights Electricity Energy"},
                                                                     {"combine", "sum"}}}}};
    const auto [status, job] = s.post("/api/aggregate", body);
    REQUIRE(status == 202);
    const Json done = s.finish(job);
    REQUIRE(done.at("phase") == "done");
    CHECK(done.at("result").at("rows") == 2 * 288);
    CHECK(done.at("result").at("aggregated_zones").contains("Agg1"));
    const auto [zs, zone_list] = s.get("/api/simulations/" + std::to_string(sim) + "/zones");
    bool found = false;
    for (const auto& z : zone_list)
    {
        if (z.at("zone_name") == "Agg1")
        {
            found = true;
            CHECK(z.at("composite_zone_ids").size() == 5);
            CHECK(z.at("method") == "area_weighted");
        }
    }
    CHECK(found);
    // the same name again conflicts inside the job
    const Json again = s.finish(s.post("/api/aggregate", body).second);
    CHECK(again.at("phase") == "failed");
}

TEST_CASE("series windows")
{
    Served s;
    const int sim = s.ingest();
    const std::string base = "/api/series?sim=" + std::to_string(sim);
    const auto [st, day] = s.get(base + "&vars=" + q("Site Outdoor Air Drybulb Temperature") +
                                 "&start=2023-01-01T00:05:00&end=2023-01-02T00:00:00");
    REQUIRE(st == 200);
    REQUIRE(day.at("series").size() == 1);
    CHECK(day.at("series")[0].at("values").size() == 288);
    CHECK(day.at("series")[0].at("timestamps")[0] == "2023-01-01T00:05:00");

    const auto [st2, two] =
        s.get(base + "&vars=" + q("CORE_ZN:Zone Mean Air Temperature,Site Outdoor Air Relative Humidity"));
    CHECK(st2 == 200);
    CHECK(two.at("series").size() == 2);
    CHECK(s.get(base).second.at("series").size() == 35);

    CHECK(s.get(base + "&start=2023-01-02&end=2023-01-01").first == 400);
    const auto [st3, empty] = s.get(base + "&start=2024-01-01&end=2024-01-02");
    CHECK(st3 == 422);
    CHECK(empty.at("error") == "EmptyRange");
    CHECK(s.get(base + "&vars=Nope").first == 404);
    CHECK(s.get("/api/series").first == 400);
}

TEST_CASE("distribution and scatter statistics")
{
    Served s;
    const int sim = s.ingest();
    const std::string base = "/api/stats/distribution?sim=" + std::to_string(sim);
    const auto [st, d] = s.get(base + "&var=" + q("BLDG_OCC_SCH:Schedule Value") +
                               "&start=2023-01-01T09:00:00&end=2023-01-01T12:00:00");
    REQUIRE(st == 200);
    CHECK(d.at("variance") == 0.0);
    CHECK(d.at("histogram").size() == 1);
    CHECK(d.at("count") == 37);

    const auto [st2, full] = s.get(base + "&var=" + q("Site Outdoor Air Drybulb Temperature") + "&bins=7");
    CHECK(st2 == 200);
    CHECK(full.at("histogram").size() == 7);
    std::size_t total = 0;
    for (const auto& b : full.at("histogram"))
    {
        total += b.at("count").get<std::size_t>();
    }
    CHECK(total == 288);
    CHECK(s.get(base + "&var=" + q("Site Outdoor Air Drybulb Temperature") + "&bins=0").first == 400);

    const auto [st3, sc] = s.get("/api/stats/scatter?sim=" + std::to_string(sim) + "&x=" +
                                 q("Site Outdoor Air Drybulb Temperature") + "&y=" +
                                 q("CORE_ZN:Zone Mean Air Temperature"));
    CHECK(st3 == 200);
    CHECK(sc.at("x").size() == 288);
    CHECK(sc.at("y").size() == 288);
    CHECK(sc.at("x_label") == "Site Outdoor Air Drybulb Temperature [C](TimeStep)");
}

TEST_CASE("simulate without a simulator is unavailable; bad overrides are rejected first")
{
    Served s;
    const Json body = {{"idf", (s.dir / "run" / "model.idf").string()},
                       {"epw", "w.epw"},
                       {"building", {{"prototype_name", "SmallOffice"}}}};
    const auto [st, unavailable] = s.post("/api/simulate", body);
    CHECK(st == 503);
    CHECK(unavailable.at("error") == "SimulatorNotConfigured");
    Json bad = body;
    bad["overrides"] = {{"timestep_minutes", 7}};
    const auto [st2, err] = s.post("/api/simulate", bad);
    CHECK(st2 == 400);
    CHECK(err.at("error") == "InvalidResolution");
}

TEST_CASE("simulate runs the configured executable")
{
    testing::TempDir bin;
    FixtureSpec spec = FixtureSpec::small_office(21);
    spec.days = 1;
    generate_fixture(spec, bin / "canned");
    const auto exe = bin / "fake-energyplus";
    {
        std::ofstream script(exe);
        script << "#!/bin/sh\nwhile [ $# -gt 1 ]; do case \"$1\" in -d) out=\"$2\"; shift 2;; *) shift;; esac; done\n"
                  "cp '"
               << (bin / "canned").string() << "'/eplusout.* \"$out\"/\n";
    }
    std::filesystem::permissions(exe, std::filesystem::perms::owner_all);
    Served s(exe);
    CHECK(s.get("/api/health").second.at("simulator") == true);
    const Json body = {{"idf", (bin / "canned" / "model.idf").string()},
                       {"epw", "w.epw"},
                       {"building", {{"prototype_name", "SmallOffice"}}},
                       {"overrides", {{"timestep_minutes", 5}}}};
    const auto [st, job] = s.post("/api/simulate", body);
    REQUIRE(st == 202);
    const Json done = s.finish(job);
    REQUIRE(done.at("phase") == "done");
    CHECK(done.at("result").at("rows") == 288 * 35);
}

TEST_CASE("status mapping")
{
    CHECK(http_status(ErrorCode::UnknownSimulation) == 404);
    CHECK(http_status(ErrorCode::DuplicateSimulation) == 409);
    CHECK(http_status(ErrorCode::EmptyRange) == 422);
    CHECK(http_status(ErrorCode::StorageUnavailable) == 503);
    CHECK(http_status(ErrorCode::RaggedRow) == 400);
}
