#include "epdata/parsers.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace epdata;

namespace
{

// Header and row layout follow the real EnergyPlus 22.x eplusout.eio.
const char* kEioHeader =
    "! <Zone Information>,Zone Name,North Axis {deg},Origin X-Coordinate {m},Origin Y-Coordinate {m},"
    "Origin Z-Coordinate {m},Centroid X-Coordinate {m},Centroid Y-Coordinate {m},Centroid Z-Coordinate {m},"
    "Type,Zone Multiplier,Zone List Multiplier,Minimum X {m},Maximum X {m},Minimum Y {m},Maximum Y {m},"
    "Minimum Z {m},Maximum Z {m},Ceiling Height {m},Volume {m3},Floor Area {m2},Exterior Gross Wall Area {m2},"
    "Exterior Net Wall Area {m2},Exterior Window Area {m2},Number of Surfaces,Number of SubSurfaces,"
    "Number of Shading SubSurfaces, Part of Total Building Area\n";

std::string eio_row(const std::string& zone, const std::string& volume, const std::string& area)
{
    return " Zone Information, " + zone + ",0.0,0.00,0.00,0.00,13.85,8.31,1.52,1,1,1,4.57,23.13,4.57,12.04,0.00,3.05,3.05," +
           volume + "," + area + ",0.00,0.00,0.00,6,0,0,Yes\n";
}

} // namespace

TEST_CASE("parse_idf reads a zone and ignores the trailing comment")
{
    const IdfModel m = parse_idf("Zone, Core_ZN;  ! comment");
    REQUIRE(m.zones.size() == 1);
    CHECK(m.zones[0] == "Core_ZN");
}

TEST_CASE("parse_idf reads Timestep")
{
    const IdfModel m = parse_idf("Timestep, 12;");
    CHECK(m.timestep_per_hour == 12);
    CHECK(m.time_resolution_minutes() == 5);
}

TEST_CASE("parse_idf of empty input yields defaults")
{
    const IdfModel m = parse_idf("");
    CHECK(m.zones.empty());
    CHECK(m.timestep_per_hour == 6);
    CHECK(m.run_period == RunPeriod{1, 1, 12, 31});
    CHECK(m.requested_output_variables.empty());
}

TEST_CASE("parse_idf handles multi-line objects, case and unknown classes")
{
    const char* text = R"(
  Version,22.1;
  ZONE,
    Perimeter_ZN_1,          !- Name
    0.0000,                  !- Direction of Relative North {deg}
    0.0;                     !- X Origin {m}
  Building, Office, 0, City, 0.04, 0.4, FullExterior, 25, 6;  ! unknown here
  runperiod, Annual, 1, 1, , 3, 31, , Sunday;
  Output:Variable,*,Zone Mean Air Temperature,timestep;
  Output:Variable,CORE_ZN,Zone Air Relative Humidity,Hourly;
  Schedule:Compact,
    BLDG_OCC_SCH,            !- Name
    Fraction,
    Through: 12/31, For: AllDays, Until: 24:00, 0.5;
  Timestep,4;
)";
    const IdfModel m = parse_idf(text);
    REQUIRE(m.zones.size() == 1);
    CHECK(m.zones[0] == "Perimeter_ZN_1");
    CHECK(m.timestep_per_hour == 4);
    CHECK(m.run_period == RunPeriod{1, 1, 3, 31});
    REQUIRE(m.requested_output_variables.size() == 2);
    CHECK(m.requested_output_variables[0].key == "*");
    CHECK(m.requested_output_variables[0].variable_name == "Zone Mean Air Temperature");
    CHECK(m.requested_output_variables[1].frequency == "Hourly");
    REQUIRE(m.schedule_names.size() == 1);
    CHECK(m.schedule_names[0] == "BLDG_OCC_SCH");
}

TEST_CASE("parse_idf reports unterminated objects and empty class names with a line")
{
    CHECK_ERROR(parse_idf("Zone, A;\nZone, B"), ErrorCode::SyntaxError);
    CHECK(testing::error_line([] { parse_idf("Zone, A;\nZone, B"); }) == 2);
    CHECK_ERROR(parse_idf("  , A;"), ErrorCode::SyntaxError);
}

TEST_CASE("parse_idf rejects a timestep that does not divide 60")
{
    CHECK_ERROR(parse_idf("Timestep, 7;"), ErrorCode::SyntaxError);
    CHECK_ERROR(parse_idf("Timestep, 0;"), ErrorCode::SyntaxError);
}

TEST_CASE("scan_idf_objects records byte spans")
{
    const std::string text = "Zone, A;\n  Timestep,6; ! x\n";
    const auto objects = scan_idf_objects(text);
    REQUIRE(objects.size() == 2);
    CHECK(text.substr(objects[0].begin, objects[0].end - objects[0].begin) == "Zone, A;");
    CHECK(text.substr(objects[1].begin, objects[1].end - objects[1].begin) == "Timestep,6;");
    CHECK(objects[1].line == 2);
}

TEST_CASE("parse_eio resolves area and volume by header name")
{
    const auto zones = parse_eio(std::string(kEioHeader) + eio_row("CORE_ZN", "274.0", "91.3"));
    REQUIRE(zones.size() == 1);
    CHECK(zones[0].zone_name == "CORE_ZN");
    CHECK(zones[0].floor_area == 91.3);
    CHECK(zones[0].volume == 274.0);
}

TEST_CASE("parse_eio follows the header when columns move")
{
    const std::string text = "! <Zone Information>,Zone Name,Floor Area {m2},Volume {m3}\n"
                             " Zone Information, A,10.5,30\n"
                             " Zone Information, B,20,60.25\n";
    const auto zones = parse_eio(text);
    REQUIRE(zones.size() == 2);
    CHECK(zones[1].zone_name == "B");
    CHECK(zones[1].floor_area == 20.0);
    CHECK(zones[1].volume == 60.25);
}

TEST_CASE("parse_eio reads a five-zone office")
{
    std::string text = "Program Version,EnergyPlus, Version 22.1.0\n";
    text += kEioHeader;
    for (const char* z : {"CORE_ZN", "PERIMETER_ZN_1", "PERIMETER_ZN_2", "PERIMETER_ZN_3", "PERIMETER_ZN_4"})
    {
        text += eio_row(z, "300", "100");
    }
    text += "! <Zone Internal Gains Nominal>,Zone Name, Floor Area {m2}\n";
    CHECK(parse_eio(text).size() == 5);
}

TEST_CASE("parse_eio without a Zone Information section fails")
{
    CHECK_ERROR(parse_eio("Program Version,EnergyPlus\n! <Version>, Version ID\n"),
                ErrorCode::MissingZoneInformationSection);
    CHECK_ERROR(parse_eio(""), ErrorCode::MissingZoneInformationSection);
}

TEST_CASE("parse_eio rejects non-positive geometry")
{
    CHECK_ERROR(parse_eio(std::string(kEioHeader) + eio_row("A", "0", "10")), ErrorCode::NonPositiveGeometry);
    CHECK_ERROR(parse_eio(std::string(kEioHeader) + eio_row("A", "10", "-1")), ErrorCode::NonPositiveGeometry);
}

TEST_CASE("header grammar: zone variable")
{
    const auto d = parse_series_header("CORE_ZN:Zone Mean Air Temperature [C](TimeStep)");
    CHECK(d.kind == SeriesKind::zone);
    CHECK(d.entity == std::optional<std::string>("CORE_ZN"));
    CHECK(d.variable_name == "Zone Mean Air Temperature");
    CHECK(d.unit == "C");
    CHECK(d.frequency == "TimeStep");
}

TEST_CASE("header grammar: site variable has no entity")
{
    const auto plain = parse_series_header("Site Outdoor Air Drybulb Temperature [C](TimeStep)");
    CHECK(plain.kind == SeriesKind::site);
    CHECK_FALSE(plain.entity.has_value());
    CHECK(plain.variable_name == "Site Outdoor Air Drybulb Temperature");
    const auto env = parse_series_header("Environment:Site Outdoor Air Drybulb Temperature [C](TimeStep)");
    CHECK(env == plain);
}

TEST_CASE("header grammar: the five categories")
{
    CHECK(parse_series_header("PERIMETER_ZN_1_WALL_SOUTH:Surface Inside Face Temperature [C](TimeStep)").kind ==
          SeriesKind::surface);
    const auto node = parse_series_header("PSZ-AC:1 SUPPLY OUTLET NODE:System Node Temperature [C](TimeStep)");
    CHECK(node.kind == SeriesKind::node);
    CHECK(node.entity == std::optional<std::string>("PSZ-AC:1 SUPPLY OUTLET NODE")); // last ':' wins
    const auto sched = parse_series_header("BLDG_OCC_SCH:Schedule Value [](Hourly)");
    CHECK(sched.kind == SeriesKind::schedule);
    CHECK(sched.unit.empty());
    CHECK(sched.frequency == "Hourly");
    CHECK(parse_series_header("Whole Building:Facility Total Electricity Demand Rate [W](TimeStep)").kind ==
          SeriesKind::site);
}

TEST_CASE("header grammar: malformed headers")
{
    CHECK_ERROR(parse_series_header("NoBrackets"), ErrorCode::MalformedHeader);
    CHECK_ERROR(parse_series_header("A:Zone X [C"), ErrorCode::MalformedHeader);
    CHECK_ERROR(parse_series_header("A: [C](TimeStep)"), ErrorCode::MalformedHeader);
    CHECK_ERROR(parse_series_header("Zone Mean Air Temperature [C](TimeStep)"), ErrorCode::MalformedHeader);
    CHECK_ERROR(parse_series_header("A:Zone X [C](TimeStep"), ErrorCode::MalformedHeader);
    CHECK_ERROR(parse_series_header(""), ErrorCode::MalformedHeader);
}

TEST_CASE("output table: minimal two-column file")
{
    const auto t = parse_output_table("Date/Time,Site Outdoor Air Drybulb Temperature [C](TimeStep)\n"
                                      " 01/01  00:05:00,1.5\n 01/01  00:10:00,2\n 01/01  00:15:00,-3.25\n");
    REQUIRE(t.series.size() == 1);
    CHECK(t.datetime_column.size() == 3);
    CHECK(t.series[0].values == std::vector<double>{1.5, 2.0, -3.25});
}

TEST_CASE("output table: a short row is RaggedRow at its line")
{
    const std::string text = "Date/Time,A:Zone X [C](TimeStep),B:Zone X [C](TimeStep)\n"
                             " 01/01  00:05:00,1,2\n"
                             " 01/01  00:10:00,1,2\n"
                             " 01/01  00:15:00,1\n";
    CHECK_ERROR(parse_output_table(text), ErrorCode::RaggedRow);
    CHECK(testing::error_line([&] { parse_output_table(text); }) == 4);
}

TEST_CASE("output table: a bad header reports its column")
{
    const std::string text = "Date/Time,A:Zone X [C](TimeStep),Broken\n 01/01  00:05:00,1,2\n";
    try
    {
        parse_output_table(text);
        FAIL("expected MalformedHeader");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::MalformedHeader);
        CHECK(e.detail().find("column 2") != std::string::npos);
        CHECK(e.line() == 1);
    }
}

TEST_CASE("output table: first column must be Date/Time")
{
    CHECK_ERROR(parse_output_table("Time,A:Zone X [C]\n"), ErrorCode::MalformedHeader);
}

TEST_CASE("output table: empty cells become NaN and bad numbers fail")
{
    const auto t = parse_output_table("Date/Time,A:Zone X [C](TimeStep)\n 01/01  00:05:00,\n 01/01  00:10:00,4\n");
    CHECK(std::isnan(t.series[0].values[0]));
    CHECK(t.series[0].values[1] == 4.0);
    CHECK_ERROR(parse_output_table("Date/Time,A:Zone X [C](TimeStep)\n 01/01  00:05:00,4,5x\n"), ErrorCode::RaggedRow);
    CHECK_ERROR(parse_output_table("Date/Time,A:Zone X [C](TimeStep)\n 01/01  00:05:00,4.5.6\n"), ErrorCode::BadNumber);
}

TEST_CASE("output table: CRLF line endings and trailing commas")
{
    const auto t = parse_output_table("Date/Time,A:Zone X [C](TimeStep),\r\n 01/01  00:05:00,7,\r\n");
    REQUIRE(t.series.size() == 1);
    CHECK(t.series[0].values == std::vector<double>{7.0});
}

TEST_CASE("output table round-trips through write_output_table")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    RawOutputTable table;
    for (int i = 0; i < 50; ++i)
    {
        table.datetime_column.push_back(format_output_datetime(make_instant(2023, 1, 1, 0, 5 * (i + 1))));
    }
    for (const char* h : {"A:Zone X [C](TimeStep)", "Site Y [W](TimeStep)", "N:System Node Z [kg/s](Hourly)"})
    {
        RawSeries s{h, parse_series_header(h), {}};
        for (int i = 0; i < 50; ++i)
        {
            s.values.push_back(i == 7 ? std::numeric_limits<double>::quiet_NaN() : u(rng));
        }
        table.series.push_back(std::move(s));
    }
    const RawOutputTable back = parse_output_table(write_output_table(table));
    REQUIRE(back.series.size() == table.series.size());
    CHECK(back.datetime_column == table.datetime_column);
    for (std::size_t c = 0; c < table.series.size(); ++c)
    {
        CHECK(back.series[c].header == table.series[c].header);
        for (std::size_t i = 0; i < 50; ++i)
        {
            const double a = table.series[c].values[i];
            const double b = back.series[c].values[i];
            CHECK((std::isnan(a) ? std::isnan(b) : std::memcmp(&a, &b, sizeof a) == 0));
        }
    }
}

TEST_CASE("stamps: ordinary and end-of-day")
{
    const Instant a = parse_output_datetime(" 01/01  00:05:00", 2023);
    CHECK(a.time_since_epoch().count() == oracle::epoch_seconds(2023, 1, 1, 0, 5, 0));
    const Instant b = parse_output_datetime(" 01/01  24:00:00", 2023);
    CHECK(b.time_since_epoch().count() == oracle::epoch_seconds(2023, 1, 2, 0, 0, 0));
    CHECK(parse_output_datetime(" 12/31  24:00:00", 2023).time_since_epoch().count() ==
          oracle::epoch_seconds(2024, 1, 1, 0, 0, 0));
    CHECK(parse_output_datetime("02/29 12:00:00", 2024).time_since_epoch().count() ==
          oracle::epoch_seconds(2024, 2, 29, 12, 0, 0));
    CHECK(parse_output_datetime("   03/04   05:06", 2023) == make_instant(2023, 3, 4, 5, 6));
}

TEST_CASE("stamps: garbage is BadStamp")
{
    for (const char* s : {"garbage", "", "13/01  00:00:00", "01/32  00:00:00", "01/01  25:00:00", "01/01  24:30:00",
                          "02/29  00:00:00", "01-01 00:00:00"})
    {
        CHECK_MESSAGE(testing::error_of([&] { parse_output_datetime(s, 2023); }) == ErrorCode::BadStamp, s);
    }
}

TEST_CASE("stamps: formatting writes midnight as 24:00:00 of the previous day")
{
    CHECK(format_output_datetime(make_instant(2023, 1, 2)) == " 01/01  24:00:00");
    CHECK(format_output_datetime(make_instant(2023, 1, 1, 0, 5)) == " 01/01  00:05:00");
    for (int i = 1; i <= 300; ++i)
    {
        const Instant t = make_instant(2023, 1, 1) + std::chrono::minutes(5 * i);
        CHECK(parse_output_datetime(format_output_datetime(t), 2023) == t);
    }
}

TEST_CASE("a year of 5-minute stamps is strictly increasing at 300 s")
{
    std::vector<Instant> stamps;
    Instant t = make_instant(2023, 1, 1);
    for (int i = 0; i < 365 * 288; ++i)
    {
        t += std::chrono::minutes(5);
        stamps.push_back(parse_output_datetime(format_output_datetime(t), 2023));
    }
    bool uniform = true;
    for (std::size_t i = 1; i < stamps.size(); ++i)
    {
        uniform = uniform && (stamps[i] - stamps[i - 1]).count() == 300;
    }
    CHECK(uniform);
    CHECK(infer_resolution_minutes(stamps) == 5);
}

TEST_CASE("to_variable_tables groups entities under one variable")
{
    const std::string text = "Date/Time,A:Zone X [C](TimeStep),B:Zone X [C](TimeStep),Site Y [W](TimeStep)\n"
                             " 01/01  00:30:00,1,2,3\n 01/01  01:00:00,4,5,6\n";
    const auto tables = to_variable_tables(parse_output_table(text));
    REQUIRE(tables.size() == 2);
    const auto& x = tables.at("Zone X");
    CHECK(x.kind == SeriesKind::zone);
    CHECK(x.columns.size() == 2);
    CHECK(x.columns.at("B") == std::vector<double>{2.0, 5.0});
    CHECK(tables.at("Site Y").columns.at("") == std::vector<double>{3.0, 6.0});
    CHECK(infer_resolution_minutes(x.timestamps) == 30);
}

TEST_CASE("to_variable_tables rejects an irregular calendar")
{
    const std::string text = "Date/Time,Site Y [W](TimeStep)\n 01/01  00:30:00,1\n 01/01  01:00:00,4\n"
                             " 01/01  01:10:00,4\n";
    CHECK_ERROR(to_variable_tables(parse_output_table(text)), ErrorCode::NonUniformTimestamps);
}

TEST_CASE("numbers are locale independent and shortest")
{
    CHECK(parse_double("1.5") == 1.5);
    CHECK(parse_double(" -2e-3 ") == -2e-3);
    CHECK_ERROR(parse_double("1,5"), ErrorCode::BadNumber);
    CHECK_ERROR(parse_double(""), ErrorCode::BadNumber);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(100.0) == "100");
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i)
    {
        const std::uint64_t bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v))
        {
            continue;
        }
        const double back = parse_double(format_double(v));
        CHECK(std::memcmp(&v, &back, sizeof v) == 0);
    }
}

TEST_CASE("missing files are IoFailure")
{
    CHECK_ERROR(read_text_file("/nonexistent/definitely/not/here.csv"), ErrorCode::IoFailure);
}
