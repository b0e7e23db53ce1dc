#pragma once

#include "epdata/domain.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epdata
{

struct HistogramBin
{
    double lower{0.0};
    double upper{0.0};
    std::size_t count{0};
};

struct DistributionSummary
{
    std::size_t count{0};   // finite values
    std::size_t dropped{0}; // NaN / inf excluded before any statistic
    double mean{0.0};
    double variance{0.0}; // sample (n - 1); 0 for a single value
    double min{0.0};
    double max{0.0};
    double range{0.0};
    std::vector<HistogramBin> histogram;
};

/// One plotted line: a label and aligned (timestamp, value) points.
struct Series
{
    std::string label;
    std::vector<Instant> timestamps;
    std::vector<double> values;
};

struct ScatterPayload
{
    std::string x_label;
    std::string y_label;
    std::vector<Instant> timestamps;
    std::vector<double> x;
    std::vector<double> y;
};

/// ceil(log2 n) + 1
std::size_t sturges_bins(std::size_t n);

/// Throws EmptySeries when no finite value remains. A zero range yields one
/// bin regardless of `bins`.
DistributionSummary describe(std::span<const double> values, std::optional<std::size_t> bins = std::nullopt);

/// Inner join on timestamps, ascending; pairs with a non-finite side are
/// dropped. Throws NoOverlap when nothing remains.
ScatterPayload scatter(const Series& x, const Series& y);

/// Column `entity` of a table ("" for site variables). Throws UnknownZoneEntity.
Series column_series(const VariableTable& table, std::string_view entity, std::string label = {});

/// Restricts every table to [start, end] inclusive. Throws InvalidRange when
/// start > end and EmptyRange when no table keeps a point.
std::map<std::string, VariableTable> timeseries_slice(const std::map<std::string, VariableTable>& tables,
                                                      Instant start, Instant end);

} // namespace epdata
