#include "epdata/synth.hpp"

#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace epdata;

TEST_CASE("small office fixture: 2016 steps by 35 series")
{
    const auto spec = FixtureSpec::small_office();
    const auto data = build_fixture(spec);
    CHECK(data.table.datetime_column.size() == 7 * 24 * 12);
    CHECK(data.table.series.size() == 35);
    CHECK(data.timestamps.size() == 2016);
    CHECK(data.geometry.size() == 5);
    CHECK(data.timestamps.front() == make_instant(2023, 1, 1, 0, 5));
    CHECK(data.timestamps.back() == make_instant(2023, 1, 8));
}

TEST_CASE("fixtures are byte-identical for a seed and differ across seeds")
{
    const auto a = build_fixture(FixtureSpec::small_office(7));
    const auto b = build_fixture(FixtureSpec::small_office(7));
    const auto c = build_fixture(FixtureSpec::small_office(8));
    CHECK(a.csv == b.csv);
    CHECK(a.idf == b.idf);
    CHECK(a.eio == b.eio);
    CHECK(a.csv != c.csv);
}

TEST_CASE("generated files parse with the production parsers")
{
    testing::TempDir dir;
    const auto spec = FixtureSpec::small_office();
    generate_fixture(spec, dir.path());
    const auto model = parse_idf(read_text_file(dir / "model.idf"));
    CHECK(model.zones == fixture_zone_names(5));
    CHECK(model.time_resolution_minutes() == 5);
    const auto geometry = parse_eio(read_text_file(dir / "eplusout.eio"));
    CHECK(geometry.size() == 5);
    const auto table = parse_output_table(read_text_file(dir / "eplusout.csv"));
    CHECK(table.series.size() == 35);
}

TEST_CASE("reference values equal what the parser reads back")
{
    testing::TempDir dir;
    FixtureSpec spec = FixtureSpec::small_office(3);
    spec.days = 2;
    generate_fixture(spec, dir.path());
    const auto parsed = to_variable_tables(parse_output_table(read_text_file(dir / "eplusout.csv")), spec.year);
    const auto expected = reference_values(spec);
    REQUIRE(parsed.size() == expected.size());
    for (const auto& [name, table] : expected)
    {
        REQUIRE(parsed.count(name) == 1);
        CHECK(parsed.at(name).timestamps == table.timestamps);
        CHECK(parsed.at(name).columns == table.columns);
        CHECK(parsed.at(name).unit == table.unit);
    }
}

TEST_CASE("one zone, other resolutions")
{
    FixtureSpec spec = FixtureSpec::small_office();
    spec.n_zones = 1;
    spec.resolution = 15;
    spec.days = 1;
    const auto data = build_fixture(spec);
    CHECK(data.table.datetime_column.size() == 96);
    CHECK(data.table.series.size() == 5 + 3 + 2 + 3 + 2);
    CHECK(data.geometry.size() == 1);
}

TEST_CASE("invalid fixture specs")
{
    FixtureSpec spec = FixtureSpec::small_office();
    spec.n_zones = 0;
    CHECK_ERROR(build_fixture(spec), ErrorCode::InvalidRecord);
    spec = FixtureSpec::small_office();
    spec.resolution = 7;
    CHECK_ERROR(build_fixture(spec), ErrorCode::InvalidResolution);
    spec = FixtureSpec::small_office();
    spec.days = 400;
    CHECK_ERROR(build_fixture(spec), ErrorCode::InvalidRecord);
    spec = FixtureSpec::small_office();
    spec.variables.clear();
    CHECK_ERROR(build_fixture(spec), ErrorCode::InvalidRecord);
}

TEST_CASE("bounded quantities stay within their bounds")
{
    const auto tables = reference_values(FixtureSpec::small_office(11));
    for (const auto& [name, t] : tables)
    {
        for (const auto& [entity, col] : t.columns)
        {
            for (double v : col)
            {
                if (t.unit == "%")
                {
                    CHECK((v >= 0.0 && v <= 100.0));
                }
                if (t.unit == "J" || t.unit == "W/m2" || t.unit == "kg/s")
                {
                    CHECK(v >= 0.0);
                }
            }
        }
    }
}
