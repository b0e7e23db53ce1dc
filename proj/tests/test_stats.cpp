#include "epdata/stats.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace epdata;

namespace
{

Series line(std::string label, int first_minute, int count, double (*f)(double))
{
    Series s{std::move(label), {}, {}};
    for (int i = 0; i < count; ++i)
    {
        s.timestamps.push_back(make_instant(2023, 1, 1) + std::chrono::minutes(5 * (first_minute + i)));
        s.values.push_back(f(double(i)));
    }
    return s;
}

std::size_t histogram_total(const DistributionSummary& s)
{
    std::size_t n = 0;
    for (const auto& b : s.histogram)
    {
        n += b.count;
    }
    return n;
}

} // namespace

TEST_CASE("describe: constant series")
{
    const std::vector<double> v{2, 2, 2, 2};
    const auto s = describe(v);
    CHECK(s.mean == 2.0);
    CHECK(s.variance == 0.0);
    CHECK(s.range == 0.0);
    REQUIRE(s.histogram.size() == 1);
    CHECK(s.histogram[0].count == 4);
}

TEST_CASE("describe: one to five")
{
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto s = describe(v);
    CHECK(s.count == 5);
    CHECK(s.mean == 3.0);
    CHECK(s.variance == 2.5);
    CHECK(s.min == 1.0);
    CHECK(s.max == 5.0);
    CHECK(s.range == 4.0);
    CHECK(s.histogram.size() == oracle::sturges(5));
    CHECK(histogram_total(s) == 5);
}

TEST_CASE("describe: empty and all non-finite inputs")
{
    CHECK_ERROR(describe(std::vector<double>{}), ErrorCode::EmptySeries);
    const std::vector<double> bad{std::nan(""), std::numeric_limits<double>::infinity()};
    CHECK_ERROR(describe(bad), ErrorCode::EmptySeries);
}

TEST_CASE("describe: non-finite values are dropped and counted")
{
    const std::vector<double> v{1, std::nan(""), 3, -std::numeric_limits<double>::infinity()};
    const auto s = describe(v);
    CHECK(s.count == 2);
    CHECK(s.dropped == 2);
    CHECK(s.mean == 2.0);
    CHECK(histogram_total(s) == 2);
}

TEST_CASE("describe: single value has zero variance")
{
    const auto s = describe(std::vector<double>{7.5});
    CHECK(s.variance == 0.0);
    CHECK(s.histogram.size() == 1);
}

TEST_CASE("describe: bins are contiguous, equal width and cover the range")
{
    const std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto s = describe(v, 5);
    REQUIRE(s.histogram.size() == 5);
    CHECK(s.histogram.front().lower == 0.0);
    CHECK(s.histogram.back().upper == 10.0);
    for (std::size_t i = 1; i < 5; ++i)
    {
        CHECK(s.histogram[i].lower == s.histogram[i - 1].upper);
        CHECK((s.histogram[i].upper - s.histogram[i].lower) == doctest::Approx(2.0).epsilon(1e-12));
    }
    // [0,2) [2,4) [4,6) [6,8) [8,10]
    CHECK(s.histogram[0].count == 2);
    CHECK(s.histogram[4].count == 3);
    CHECK_ERROR(describe(v, 0), ErrorCode::InvalidRecord);
}

TEST_CASE("sturges matches the oracle")
{
    for (std::size_t n = 1; n < 5000; n += (n < 64 ? 1 : 37))
    {
        CHECK_MESSAGE(sturges_bins(n) == oracle::sturges(n), n);
    }
}

TEST_CASE("histogram totals equal the finite count for random vectors and bin counts")
{
    std::mt19937_64 rng(100);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> v(1 + rng() % 500);
        for (double& x : v)
        {
            x = u(rng);
        }
        if (trial % 3 == 0)
        {
            v[rng() % v.size()] = std::nan("");
        }
        const std::size_t finite = std::count_if(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        if (finite == 0)
        {
            continue;
        }
        for (std::optional<std::size_t> bins : {std::optional<std::size_t>{}, std::optional<std::size_t>{1},
                                                std::optional<std::size_t>{1 + rng() % 100}})
        {
            const auto s = describe(v, bins);
            CHECK(histogram_total(s) == finite);
            CHECK(s.count == finite);
        }
    }
}

TEST_CASE("describe matches two-pass moments and is permutation invariant")
{
    std::mt19937_64 rng(101);
    std::normal_distribution<double> g(20.0, 5.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<double> v(2 + rng() % 1000);
        for (double& x : v)
        {
            x = g(rng);
        }
        const auto s = describe(v);
        const auto m = oracle::moments(v);
        CHECK(oracle::close_rel(m.mean, s.mean, 1e-12L));
        CHECK(oracle::close_rel(m.variance, s.variance, 1e-10L));
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto t = describe(shuffled);
        CHECK(t.mean == s.mean);
        CHECK(t.variance == s.variance);
        CHECK(t.min == s.min);
        CHECK(t.max == s.max);
        for (std::size_t i = 0; i < s.histogram.size(); ++i)
        {
            CHECK(t.histogram[i].count == s.histogram[i].count);
        }
        // scaling
        const double lambda = -2.75;
        auto scaled = v;
        for (double& x : scaled)
        {
            x *= lambda;
        }
        const auto u = describe(scaled);
        CHECK(oracle::close_rel(lambda * static_cast<long double>(s.mean), u.mean, 1e-9L));
        CHECK(oracle::close_rel(lambda * lambda * static_cast<long double>(s.variance), u.variance, 1e-9L));
    }
}

TEST_CASE("scatter: identical calendars give every pair")
{
    const auto x = line("x", 1, 100, [](double i) { return i; });
    const auto y = line("y", 1, 100, [](double i) { return i * i; });
    const auto p = scatter(x, y);
    CHECK(p.x.size() == 100);
    CHECK(p.x_label == "x");
    CHECK(p.y_label == "y");
}

TEST_CASE("scatter: y = 2x holds exactly")
{
    const auto x = line("x", 1, 300, [](double i) { return 0.1 * i - 7.3; });
    const auto y = line("y", 1, 300, [](double i) { return 2.0 * (0.1 * i - 7.3); });
    const auto p = scatter(x, y);
    REQUIRE(p.x.size() == 300);
    for (std::size_t i = 0; i < p.x.size(); ++i)
    {
        CHECK(p.y[i] == 2.0 * p.x[i]);
    }
}

TEST_CASE("scatter: partial overlap joins on timestamps in order")
{
    const auto x = line("x", 1, 10, [](double i) { return i; });
    const auto y = line("y", 6, 10, [](double i) { return 100 + i; });
    const auto p = scatter(x, y);
    REQUIRE(p.x.size() == 5);
    CHECK(std::is_sorted(p.timestamps.begin(), p.timestamps.end()));
    CHECK(p.x.front() == 5.0);
    CHECK(p.y.front() == 100.0);
}

TEST_CASE("scatter: disjoint calendars")
{
    const auto x = line("x", 1, 10, [](double i) { return i; });
    const auto y = line("y", 100, 10, [](double i) { return i; });
    CHECK_ERROR(scatter(x, y), ErrorCode::NoOverlap);
}

TEST_CASE("scatter: non-finite pairs are dropped; swap transposes")
{
    auto x = line("x", 1, 10, [](double i) { return i; });
    auto y = line("y", 1, 10, [](double i) { return -i; });
    x.values[3] = std::nan("");
    const auto p = scatter(x, y);
    CHECK(p.x.size() == 9);
    const auto q = scatter(y, x);
    CHECK(q.x == p.y);
    CHECK(q.y == p.x);
    CHECK(q.timestamps == p.timestamps);
}

TEST_CASE("timeseries_slice: full, single instant and one day")
{
    VariableTable t;
    t.variable_name = "Site Y";
    for (int i = 1; i <= 2016; ++i)
    {
        t.timestamps.push_back(make_instant(2023, 1, 1) + std::chrono::minutes(5 * i));
        t.columns[""].push_back(double(i));
    }
    const std::map<std::string, VariableTable> tables{{"Site Y", t}};
    const auto full = timeseries_slice(tables, t.timestamps.front(), t.timestamps.back());
    CHECK(full.at("Site Y").timestamps == t.timestamps);
    CHECK(full.at("Site Y").columns == t.columns);

    const auto one = timeseries_slice(tables, t.timestamps[10], t.timestamps[10]);
    CHECK(one.at("Site Y").timestamps.size() == 1);
    CHECK(one.at("Site Y").columns.at("")[0] == 11.0);

    // day 2: (00:00, 24:00] would be 288 stamps; the inclusive window [00:00, 23:55] is too
    const auto day = timeseries_slice(tables, make_instant(2023, 1, 2), make_instant(2023, 1, 2, 23, 55));
    CHECK(day.at("Site Y").timestamps.size() == 24 * 12);
}

TEST_CASE("timeseries_slice: errors")
{
    VariableTable t;
    t.timestamps = {make_instant(2023, 1, 1, 1)};
    t.columns[""] = {1.0};
    const std::map<std::string, VariableTable> tables{{"v", t}};
    CHECK_ERROR(timeseries_slice(tables, make_instant(2023, 1, 2), make_instant(2023, 1, 1)), ErrorCode::InvalidRange);
    CHECK_ERROR(timeseries_slice(tables, make_instant(2023, 2, 1), make_instant(2023, 2, 2)), ErrorCode::EmptyRange);
}

TEST_CASE("column_series picks one entity")
{
    VariableTable t;
    t.variable_name = "Zone T";
    t.timestamps = {make_instant(2023, 1, 1, 1)};
    t.columns["A"] = {1.0};
    t.columns["B"] = {2.0};
    CHECK(column_series(t, "B").values == std::vector<double>{2.0});
    CHECK_ERROR(column_series(t, "C"), ErrorCode::UnknownZoneEntity);
}
