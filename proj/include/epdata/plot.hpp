#pragma once

#include "epdata/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace epdata
{

enum class PlotKind
{
    distribution,
    scatter,
    timeseries,
};

std::string_view to_string(PlotKind kind);
PlotKind parse_plot_kind(std::string_view text);

using TimeseriesPayload = std::map<std::string, VariableTable>;
using PlotPayload = std::variant<DistributionSummary, ScatterPayload, TimeseriesPayload>;

struct PlotSize
{
    int width{800};
    int height{500};
};

/// PNG bytes; deterministic for a fixed payload and size. Throws
/// RenderFailure for an empty payload or a payload/kind mismatch.
std::vector<std::uint8_t> render_png(const PlotPayload& payload, PlotKind kind, PlotSize size = {});

/// render_png written to `path` (IoFailure when the write fails).
void render_static_plot(const PlotPayload& payload, PlotKind kind, const std::filesystem::path& path,
                        PlotSize size = {});

} // namespace epdata
