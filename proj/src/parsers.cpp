#include "epdata/parsers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/core.h>

namespace epdata
{

namespace
{

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool istarts_with(std::string_view text, std::string_view prefix)
{
    return text.size() >= prefix.size() && iequals(text.substr(0, prefix.size()), prefix);
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos)
        {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Lines without their terminator; a trailing '\r' is dropped.
std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines = split(text, '\n');
    for (auto& line : lines)
    {
        if (!line.empty() && line.back() == '\r')
        {
            line.remove_suffix(1);
        }
    }
    while (!lines.empty() && trim(lines.back()).empty())
    {
        lines.pop_back();
    }
    return lines;
}

bool parse_int(std::string_view text, int& out)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
    {
        text.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return !text.empty() && ec == std::errc{} && ptr == text.data() + text.size();
}

unsigned days_in_month(int year, unsigned month)
{
    using namespace std::chrono;
    const year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
    return static_cast<unsigned>(last.day());
}

} // namespace

// ---------------------------------------------------------------------------
// IDF
// ---------------------------------------------------------------------------

std::vector<IdfObject> scan_idf_objects(std::string_view text)
{
    std::vector<IdfObject> objects;
    IdfObject current;
    std::string token;
    bool open = false; // current object has at least one token boundary
    long line = 1;
    long token_line = 1;
    std::size_t token_begin = 0;
    bool token_started = false;

    const auto flush_token = [&](std::size_t pos) {
        std::string value(trim(token));
        if (!open)
        {
            if (value.empty())
            {
                fail(ErrorCode::SyntaxError, "empty class name", line);
            }
            current = IdfObject{};
            current.class_name = std::move(value);
            current.line = token_line;
            current.begin = token_started ? token_begin : pos;
            open = true;
        }
        else
        {
            current.fields.push_back(std::move(value));
        }
        token.clear();
        token_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i)
    {
        const char c = text[i];
        if (c == '!')
        {
            while (i < text.size() && text[i] != '\n')
            {
                ++i;
            }
            if (i < text.size())
            {
                ++line;
            }
            continue;
        }
        if (c == ',' || c == ';')
        {
            flush_token(i);
            if (c == ';')
            {
                current.end = i + 1;
                objects.push_back(std::move(current));
                current = IdfObject{};
                open = false;
            }
            continue;
        }
        if (c == '\n')
        {
            ++line;
        }
        if (!token_started && !std::isspace(static_cast<unsigned char>(c)))
        {
            token_started = true;
            token_begin = i;
            token_line = line;
        }
        token.push_back(c);
    }
    if (open || !trim(token).empty())
    {
        fail(ErrorCode::SyntaxError, "unterminated object at end of input", open ? current.line : token_line);
    }
    return objects;
}

namespace
{

RunPeriod parse_run_period(const IdfObject& object)
{
    const auto& f = object.fields;
    const auto field_int = [&](std::size_t index, int& out) {
        return index < f.size() && parse_int(f[index], out);
    };
    int bm = 0;
    int bd = 0;
    int em = 0;
    int ed = 0;
    int third = 0;
    // Current layout: Name, Begin Month, Begin Day, Begin Year, End Month, End Day, ...
    // Pre-9.0 layout:  Name, Begin Month, Begin Day, End Month, End Day, ...
    const bool legacy = field_int(3, third) && third >= 1 && third <= 12;
    const bool ok = legacy ? (field_int(1, bm) && field_int(2, bd) && field_int(3, em) && field_int(4, ed))
                           : (field_int(1, bm) && field_int(2, bd) && field_int(4, em) && field_int(5, ed));
    if (!ok)
    {
        fail(ErrorCode::SyntaxError, "RunPeriod needs numeric begin/end month and day", object.line);
    }
    const auto valid_day = [](int month, int day) {
        return month >= 1 && month <= 12 && day >= 1 &&
               static_cast<unsigned>(day) <= days_in_month(2024, static_cast<unsigned>(month));
    };
    if (!valid_day(bm, bd) || !valid_day(em, ed) || std::pair(bm, bd) > std::pair(em, ed))
    {
        fail(ErrorCode::SyntaxError,
             fmt::format("RunPeriod {}/{} to {}/{} is not an ordered range within one year", bm, bd, em, ed),
             object.line);
    }
    return RunPeriod{static_cast<unsigned>(bm), static_cast<unsigned>(bd), static_cast<unsigned>(em),
                     static_cast<unsigned>(ed)};
}

} // namespace

IdfModel parse_idf(std::string_view text)
{
    IdfModel model;
    for (const IdfObject& object : scan_idf_objects(text))
    {
        const std::string_view cls = object.class_name;
        const auto first_field = [&]() -> const std::string& {
            if (object.fields.empty() || object.fields.front().empty())
            {
                fail(ErrorCode::SyntaxError, fmt::format("{} object without a name", cls), object.line);
            }
            return object.fields.front();
        };
        if (iequals(cls, "Zone"))
        {
            model.zones.push_back(first_field());
        }
        else if (iequals(cls, "Timestep"))
        {
            int per_hour = 0;
            if (object.fields.empty() || !parse_int(object.fields.front(), per_hour) || per_hour < 1 ||
                per_hour > 60 || 60 % per_hour != 0)
            {
                fail(ErrorCode::SyntaxError, "Timestep must be an integer in 1..60 dividing 60", object.line);
            }
            model.timestep_per_hour = per_hour;
        }
        else if (iequals(cls, "RunPeriod"))
        {
            model.run_period = parse_run_period(object);
        }
        else if (iequals(cls, "Output:Variable"))
        {
            const auto& f = object.fields;
            OutputVariableRequest request;
            request.key = !f.empty() && !f[0].empty() ? f[0] : "*";
            if (f.size() < 2 || f[1].empty())
            {
                fail(ErrorCode::SyntaxError, "Output:Variable without a variable name", object.line);
            }
            request.variable_name = f[1];
            request.frequency = f.size() > 2 && !f[2].empty() ? f[2] : "Hourly";
            model.requested_output_variables.push_back(std::move(request));
        }
        else if (iequals(cls, "Schedule:Compact"))
        {
            model.schedule_names.push_back(first_field());
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// EIO
// ---------------------------------------------------------------------------

std::vector<ZoneGeometry> parse_eio(std::string_view text)
{
    const auto lines = split_lines(text);
    std::optional<std::size_t> name_col;
    std::optional<std::size_t> area_col;
    std::optional<std::size_t> volume_col;
    bool have_header = false;
    std::vector<ZoneGeometry> zones;

    for (std::size_t n = 0; n < lines.size(); ++n)
    {
        const std::string_view line = trim(lines[n]);
        const long line_no = static_cast<long>(n + 1);
        if (!have_header && istarts_with(line, "! <Zone Information>"))
        {
            const auto columns = split(line, ',');
            for (std::size_t i = 0; i < columns.size(); ++i)
            {
                const std::string_view column = trim(columns[i]);
                if (!name_col && iequals(column, "Zone Name"))
                {
                    name_col = i;
                }
                else if (!area_col && istarts_with(column, "Floor Area"))
                {
                    area_col = i;
                }
                else if (!volume_col && istarts_with(column, "Volume"))
                {
                    volume_col = i;
                }
            }
            if (!area_col || !volume_col)
            {
                fail(ErrorCode::MissingZoneInformationSection,
                     "Zone Information header lacks Floor Area or Volume columns", line_no);
            }
            name_col = name_col.value_or(1);
            have_header = true;
            continue;
        }
        if (have_header && istarts_with(line, "Zone Information,"))
        {
            const auto fields = split(line, ',');
            const std::size_t needed = std::max({*name_col, *area_col, *volume_col}) + 1;
            if (fields.size() < needed)
            {
                fail(ErrorCode::SyntaxError,
                     fmt::format("Zone Information row has {} fields, header needs {}", fields.size(), needed),
                     line_no);
            }
            const std::string name(trim(fields[*name_col]));
            const double area = parse_double(fields[*area_col]);
            const double volume = parse_double(fields[*volume_col]);
            if (!(area > 0.0) || !(volume > 0.0))
            {
                fail(ErrorCode::NonPositiveGeometry,
                     fmt::format("zone '{}' has floor area {} and volume {}", name, area, volume), line_no);
            }
            zones.push_back(ZoneGeometry::make(name, area, volume));
        }
    }
    if (!have_header)
    {
        fail(ErrorCode::MissingZoneInformationSection, "no '! <Zone Information>' header in EIO text");
    }
    return zones;
}

// ---------------------------------------------------------------------------
// Output table
// ---------------------------------------------------------------------------

namespace
{

SeriesKind classify_variable(std::string_view name)
{
    if (istarts_with(name, "Zone "))
    {
        return SeriesKind::zone;
    }
    if (istarts_with(name, "Surface "))
    {
        return SeriesKind::surface;
    }
    if (istarts_with(name, "System Node "))
    {
        return SeriesKind::node;
    }
    if (istarts_with(name, "Schedule "))
    {
        return SeriesKind::schedule;
    }
    return SeriesKind::site;
}

bool is_building_level_qualifier(std::string_view entity)
{
    static constexpr std::array<std::string_view, 4> qualifiers{"ENVIRONMENT", "WHOLE BUILDING", "FACILITY",
                                                                "BUILDING"};
    const std::string key = zone_key(entity);
    return std::find(qualifiers.begin(), qualifiers.end(), key) != qualifiers.end();
}

} // namespace

SeriesDescriptor parse_series_header(std::string_view header)
{
    const std::string_view text = trim(header);
    const std::size_t open_bracket = text.find('[');
    const std::size_t close_bracket =
        open_bracket == std::string_view::npos ? std::string_view::npos : text.find(']', open_bracket);
    if (close_bracket == std::string_view::npos)
    {
        fail(ErrorCode::MalformedHeader, fmt::format("no [unit] in header '{}'", text));
    }
    const std::string_view qualified = text.substr(0, open_bracket);
    const std::size_t colon = qualified.rfind(':');
    std::string_view entity;
    std::string_view name = qualified;
    if (colon != std::string_view::npos)
    {
        entity = trim(qualified.substr(0, colon));
        name = qualified.substr(colon + 1);
    }
    name = trim(name);
    if (name.empty())
    {
        fail(ErrorCode::MalformedHeader, fmt::format("no variable name in header '{}'", text));
    }
    const std::string unit(trim(text.substr(open_bracket + 1, close_bracket - open_bracket - 1)));

    std::string frequency;
    const std::string_view tail = text.substr(close_bracket + 1);
    const std::size_t open_paren = tail.find('(');
    if (open_paren != std::string_view::npos)
    {
        const std::size_t close_paren = tail.find(')', open_paren);
        if (close_paren == std::string_view::npos)
        {
            fail(ErrorCode::MalformedHeader, fmt::format("unclosed (frequency) in header '{}'", text));
        }
        frequency = trim(tail.substr(open_paren + 1, close_paren - open_paren - 1));
    }

    const SeriesKind kind = classify_variable(name);
    if (kind == SeriesKind::site)
    {
        if (entity.empty() || is_building_level_qualifier(entity))
        {
            return SeriesDescriptor{std::string(name), kind, std::nullopt, unit, frequency};
        }
        return SeriesDescriptor{fmt::format("{}:{}", entity, name), kind, std::nullopt, unit, frequency};
    }
    if (entity.empty())
    {
        fail(ErrorCode::MalformedHeader,
             fmt::format("{} variable without an entity qualifier in header '{}'", to_string(kind), text));
    }
    return SeriesDescriptor{std::string(name), kind, std::string(entity), unit, frequency};
}

RawOutputTable parse_output_table(std::string_view text)
{
    const auto lines = split_lines(text);
    if (lines.empty())
    {
        fail(ErrorCode::MalformedHeader, "empty output table; expected a Date/Time header", 1);
    }
    auto headers = split(lines.front(), ',');
    bool trailing_comma = false;
    if (headers.size() > 1 && trim(headers.back()).empty())
    {
        headers.pop_back();
        trailing_comma = true;
    }
    if (!iequals(trim(headers.front()), "Date/Time"))
    {
        fail(ErrorCode::MalformedHeader,
             fmt::format("column 0: first header must be Date/Time, got '{}'", trim(headers.front())), 1);
    }

    RawOutputTable table;
    for (std::size_t col = 1; col < headers.size(); ++col)
    {
        try
        {
            table.series.push_back(RawSeries{std::string(trim(headers[col])), parse_series_header(headers[col]), {}});
        }
        catch (const Error& e)
        {
            fail(e.code(), fmt::format("column {}: {}", col, e.detail()), 1);
        }
    }

    const std::size_t width = headers.size();
    for (std::size_t n = 1; n < lines.size(); ++n)
    {
        const long line_no = static_cast<long>(n + 1);
        auto fields = split(lines[n], ',');
        if (trailing_comma && fields.size() == width + 1 && trim(fields.back()).empty())
        {
            fields.pop_back();
        }
        if (fields.size() != width)
        {
            fail(ErrorCode::RaggedRow, fmt::format("expected {} fields, found {}", width, fields.size()), line_no);
        }
        table.datetime_column.emplace_back(fields.front());
        for (std::size_t col = 1; col < width; ++col)
        {
            const std::string_view cell = trim(fields[col]);
            double value = std::numeric_limits<double>::quiet_NaN();
            if (!cell.empty())
            {
                try
                {
                    value = parse_double(cell);
                }
                catch (const Error& e)
                {
                    fail(ErrorCode::BadNumber, fmt::format("column {}: {}", col, e.detail()), line_no);
                }
            }
            table.series[col - 1].values.push_back(value);
        }
    }
    return table;
}

std::string write_output_table(const RawOutputTable& table)
{
    std::string out = "Date/Time";
    for (const auto& series : table.series)
    {
        out += ',';
        out += series.header.empty() ? series.descriptor.header() : series.header;
    }
    out += '\n';
    for (std::size_t row = 0; row < table.datetime_column.size(); ++row)
    {
        out += table.datetime_column[row];
        for (const auto& series : table.series)
        {
            out += ',';
            const double value = series.values.at(row);
            if (!std::isnan(value))
            {
                out += format_double(value);
            }
        }
        out += '\n';
    }
    return out;
}

Instant parse_output_datetime(std::string_view stamp, int year)
{
    const std::string_view text = trim(stamp);
    const auto bad = [&]() -> Instant { fail(ErrorCode::BadStamp, fmt::format("unparseable stamp '{}'", stamp)); };

    // MM/DD<spaces>HH:MM[:SS]
    const std::size_t slash = text.find('/');
    const std::size_t space = text.find(' ');
    if (slash == std::string_view::npos || space == std::string_view::npos || slash > space)
    {
        return bad();
    }
    int month = 0;
    int day = 0;
    if (!parse_int(text.substr(0, slash), month) || !parse_int(text.substr(slash + 1, space - slash - 1), day))
    {
        return bad();
    }
    const auto clock = split(trim(text.substr(space)), ':');
    if (clock.size() != 2 && clock.size() != 3)
    {
        return bad();
    }
    int hour = 0;
    int minute = 0;
    int second = 0;
    if (!parse_int(clock[0], hour) || !parse_int(clock[1], minute) ||
        (clock.size() == 3 && !parse_int(clock[2], second)))
    {
        return bad();
    }
    const bool date_ok =
        month >= 1 && month <= 12 && day >= 1 && static_cast<unsigned>(day) <= days_in_month(year, month);
    const bool time_ok = hour >= 0 && minute >= 0 && minute <= 59 && second >= 0 && second <= 59 &&
                         (hour < 24 || (hour == 24 && minute == 0 && second == 0));
    if (!date_ok || !time_ok)
    {
        return bad();
    }
    return make_instant(year, static_cast<unsigned>(month), static_cast<unsigned>(day), hour, minute, second);
}

std::string format_output_datetime(Instant t)
{
    using namespace std::chrono;
    auto day_start = floor<days>(t);
    auto since_midnight = t - day_start;
    if (since_midnight == seconds{0})
    {
        day_start -= days{1};
        since_midnight = hours{24};
    }
    const year_month_day ymd{day_start};
    const auto total = since_midnight.count();
    return fmt::format(" {:02d}/{:02d}  {:02d}:{:02d}:{:02d}", static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()), total / 3600, (total / 60) % 60, total % 60);
}

int infer_resolution_minutes(const std::vector<Instant>& timestamps)
{
    if (timestamps.size() < 2)
    {
        return 0;
    }
    const auto step = timestamps[1] - timestamps[0];
    for (std::size_t i = 1; i < timestamps.size(); ++i)
    {
        const auto delta = timestamps[i] - timestamps[i - 1];
        if (delta <= std::chrono::seconds{0})
        {
            fail(ErrorCode::NonMonotonicInput, fmt::format("timestamps not strictly increasing at row {}", i));
        }
        if (delta != step)
        {
            fail(ErrorCode::NonUniformTimestamps,
                 fmt::format("spacing changes from {} s to {} s at row {}", step.count(), delta.count(), i));
        }
    }
    if (step.count() % 60 != 0)
    {
        fail(ErrorCode::NonUniformTimestamps, fmt::format("spacing of {} s is not whole minutes", step.count()));
    }
    return static_cast<int>(step.count() / 60);
}

std::map<std::string, VariableTable> to_variable_tables(const RawOutputTable& table, int year)
{
    std::vector<Instant> instants;
    instants.reserve(table.datetime_column.size());
    for (const auto& stamp : table.datetime_column)
    {
        instants.push_back(parse_output_datetime(stamp, year));
    }
    infer_resolution_minutes(instants);

    std::map<std::string, VariableTable> tables;
    for (const auto& series : table.series)
    {
        const SeriesDescriptor& d = series.descriptor;
        auto [it, inserted] = tables.try_emplace(d.variable_name);
        VariableTable& vt = it->second;
        if (inserted)
        {
            vt.variable_name = d.variable_name;
            vt.kind = d.kind;
            vt.unit = d.unit;
            vt.frequency = d.frequency;
            vt.timestamps = instants;
        }
        const std::string column = d.entity.value_or("");
        if (!vt.columns.emplace(column, series.values).second)
        {
            fail(ErrorCode::MalformedHeader, fmt::format("duplicate column '{}'", series.header));
        }
    }
    return tables;
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

std::string format_double(double value)
{
    std::array<char, 32> buffer{};
    auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

double parse_double(std::string_view text)
{
    std::string_view t = trim(text);
    if (!t.empty() && t.front() == '+')
    {
        t.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    {
        fail(ErrorCode::BadNumber, fmt::format("not a number: '{}'", text));
    }
    return value;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        fail(ErrorCode::IoFailure, fmt::format("cannot read '{}'", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        fail(ErrorCode::IoFailure, fmt::format("cannot write '{}'", path.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
    {
        fail(ErrorCode::IoFailure, fmt::format("write to '{}' failed", path.string()));
    }
}

} // namespace epdata
