#pragma once

#include "epdata/domain.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace epdata
{

// ---------------------------------------------------------------------------
// IDF (targeted subset)
// ---------------------------------------------------------------------------

/// One `;`-terminated IDF object with its byte span in the source text.
struct IdfObject
{
    std::string class_name;
    std::vector<std::string> fields; // trimmed, comments removed; excludes the class name
    long line{0};                    // 1-based line of the class name
    std::size_t begin{0};            // offset of the first character of the class name
    std::size_t end{0};              // offset one past the terminating ';'
};

/// Tokenizes every object; unknown classes are kept intact. Throws SyntaxError.
std::vector<IdfObject> scan_idf_objects(std::string_view text);

struct RunPeriod
{
    unsigned begin_month{1};
    unsigned begin_day{1};
    unsigned end_month{12};
    unsigned end_day{31};

    friend bool operator==(const RunPeriod&, const RunPeriod&) = default;
};

struct OutputVariableRequest
{
    std::string key; // entity name or "*"
    std::string variable_name;
    std::string frequency;
};

struct IdfModel
{
    std::vector<std::string> zones;
    int timestep_per_hour{6};
    RunPeriod run_period;
    std::vector<OutputVariableRequest> requested_output_variables;
    std::vector<std::string> schedule_names;

    int time_resolution_minutes() const { return 60 / timestep_per_hour; }
};

IdfModel parse_idf(std::string_view text);

// ---------------------------------------------------------------------------
// EIO zone geometry
// ---------------------------------------------------------------------------

std::vector<ZoneGeometry> parse_eio(std::string_view text);

// ---------------------------------------------------------------------------
// Tabular output (eplusout.csv)
// ---------------------------------------------------------------------------

SeriesDescriptor parse_series_header(std::string_view header);

struct RawSeries
{
    std::string header;
    SeriesDescriptor descriptor;
    std::vector<double> values;
};

struct RawOutputTable
{
    std::vector<std::string> datetime_column;
    std::vector<RawSeries> series;
};

RawOutputTable parse_output_table(std::string_view text);

/// Inverse of parse_output_table for well-formed tables (values written in
/// shortest round-trip form, NaN as an empty cell).
std::string write_output_table(const RawOutputTable& table);

/// Parses ` MM/DD  HH:MM:SS`; `24:00:00` becomes midnight of the following day.
Instant parse_output_datetime(std::string_view stamp, int year = kDefaultYear);

/// EnergyPlus stamp convention: midnight is written as `24:00:00` of the previous day.
std::string format_output_datetime(Instant t);

/// Regroups a raw table into one VariableTable per variable name, with
/// normalized instants. Throws NonUniformTimestamps for irregular calendars.
std::map<std::string, VariableTable> to_variable_tables(const RawOutputTable& table, int year = kDefaultYear);

/// Spacing of a uniform calendar in minutes; 0 for fewer than two instants.
int infer_resolution_minutes(const std::vector<Instant>& timestamps);

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

/// Shortest text that parses back to the same double.
std::string format_double(double value);
/// Locale-independent; throws BadNumber.
double parse_double(std::string_view text);

/// Throws IoFailure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace epdata
