#include "epdata/plot.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace epdata;

namespace
{

const std::uint8_t kPngSignature[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(const std::vector<std::uint8_t>& bytes)
{
    return bytes.size() > 8 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin());
}

ScatterPayload line_payload()
{
    ScatterPayload p;
    p.x_label = "x";
    p.y_label = "y";
    for (int i = 0; i < 50; ++i)
    {
        p.timestamps.push_back(make_instant(2023, 1, 1) + std::chrono::minutes(5 * i));
        p.x.push_back(i);
        p.y.push_back(2.0 * i);
    }
    return p;
}

} // namespace

TEST_CASE("each plot kind renders a PNG")
{
    const std::vector<double> v{1, 2, 2, 3, 3, 3, 4, 4, 5};
    CHECK(is_png(render_png(describe(v), PlotKind::distribution)));
    CHECK(is_png(render_png(line_payload(), PlotKind::scatter)));
    VariableTable t;
    t.variable_name = "Zone T";
    for (int i = 0; i < 100; ++i)
    {
        t.timestamps.push_back(make_instant(2023, 1, 1) + std::chrono::minutes(5 * i));
        t.columns["A"].push_back(std::sin(i / 10.0));
        t.columns["B"].push_back(std::cos(i / 10.0));
    }
    CHECK(is_png(render_png(TimeseriesPayload{{"Zone T", t}}, PlotKind::timeseries)));
}

TEST_CASE("rendering is deterministic")
{
    CHECK(render_png(line_payload(), PlotKind::scatter) == render_png(line_payload(), PlotKind::scatter));
    CHECK(render_png(line_payload(), PlotKind::scatter, {640, 480}) !=
          render_png(line_payload(), PlotKind::scatter, {800, 500}));
}

TEST_CASE("empty or mismatched payloads fail to render")
{
    CHECK_ERROR(render_png(ScatterPayload{}, PlotKind::scatter), ErrorCode::RenderFailure);
    CHECK_ERROR(render_png(DistributionSummary{}, PlotKind::distribution), ErrorCode::RenderFailure);
    CHECK_ERROR(render_png(TimeseriesPayload{}, PlotKind::timeseries), ErrorCode::RenderFailure);
    CHECK_ERROR(render_png(line_payload(), PlotKind::distribution), ErrorCode::RenderFailure);
    CHECK_ERROR(render_png(line_payload(), PlotKind::scatter, {0, 10}), ErrorCode::RenderFailure);
}

TEST_CASE("static plots go to disk")
{
    testing::TempDir dir;
    render_static_plot(line_payload(), PlotKind::scatter, dir / "s.png");
    CHECK(std::filesystem::file_size(dir / "s.png") > 100);
    CHECK_ERROR(render_static_plot(line_payload(), PlotKind::scatter, dir / "no" / "such" / "dir" / "s.png"),
                ErrorCode::IoFailure);
}

TEST_CASE("plot kinds parse")
{
    CHECK(parse_plot_kind("scatter") == PlotKind::scatter);
    CHECK(parse_plot_kind(to_string(PlotKind::timeseries)) == PlotKind::timeseries);
    CHECK_ERROR(parse_plot_kind("pie"), ErrorCode::InvalidRecord);
}
