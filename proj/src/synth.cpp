#include "epdata/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/core.h>

namespace epdata
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

// mt19937_64 is fully specified by the standard; the std distributions are
// not, so draws are taken straight from the engine's bits.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

struct Signal
{
    double offset{0.0};
    double amplitude{0.0};
    double noise{0.0};
    double phase{0.0};
    double lo{-kInf};
    double hi{kInf};
    bool rectified{false}; // negative half-waves clipped (solar)
    bool occupancy{false}; // piecewise-constant schedule
};

Signal signal_for(const SeriesDescriptor& d, Rng& rng)
{
    Signal s;
    s.phase = rng.uniform(-0.5, 0.5);
    const std::string& unit = d.unit;
    if (d.kind == SeriesKind::schedule)
    {
        s.occupancy = true;
        return s;
    }
    if (unit == "C")
    {
        const bool outdoor = d.kind == SeriesKind::site;
        s.offset = outdoor ? rng.uniform(5.0, 15.0) : rng.uniform(18.0, 24.0);
        s.amplitude = outdoor ? rng.uniform(4.0, 8.0) : rng.uniform(0.5, 3.0);
        s.noise = outdoor ? 0.8 : 0.3;
    }
    else if (unit == "%")
    {
        s.offset = rng.uniform(35.0, 60.0);
        s.amplitude = rng.uniform(5.0, 15.0);
        s.noise = 3.0;
        s.lo = 0.0;
        s.hi = 100.0;
    }
    else if (unit == "J")
    {
        s.offset = rng.uniform(1e5, 6e5);
        s.amplitude = s.offset * rng.uniform(0.6, 1.2);
        s.noise = s.offset * 0.1;
        s.lo = 0.0;
    }
    else if (unit == "W/m2")
    {
        s.amplitude = rng.uniform(400.0, 850.0);
        s.noise = 15.0;
        s.rectified = true;
        s.lo = 0.0;
    }
    else if (unit == "kg/s")
    {
        s.offset = rng.uniform(0.3, 0.9);
        s.amplitude = s.offset * 0.3;
        s.noise = 0.02;
        s.lo = 0.0;
    }
    else
    {
        s.offset = rng.uniform(0.0, 100.0);
        s.amplitude = rng.uniform(1.0, 20.0);
        s.noise = 1.0;
    }
    return s;
}

double sample(const Signal& s, Instant t, Rng& rng)
{
    const auto seconds = t.time_since_epoch().count();
    const double day_fraction = static_cast<double>(((seconds % 86400) + 86400) % 86400) / 86400.0;
    if (s.occupancy)
    {
        const double hour = day_fraction * 24.0;
        return hour > 8.0 && hour <= 18.0 ? 0.95 : 0.05;
    }
    double wave = std::sin(2.0 * std::numbers::pi * (day_fraction + s.phase));
    if (s.rectified)
    {
        wave = std::max(wave, 0.0);
    }
    const double v = s.offset + s.amplitude * wave + s.noise * (rng.uniform() - 0.5) * 2.0;
    return std::round(std::clamp(v, s.lo, s.hi) * 1e4) / 1e4;
}

struct Column
{
    SeriesDescriptor descriptor;
    std::string header;
};

std::vector<Column> expand_columns(const FixtureSpec& spec, const std::vector<std::string>& zones)
{
    std::vector<Column> out;
    for (const auto& t : spec.variables)
    {
        const std::string suffix = fmt::format(" [{}]({})", t.unit, t.frequency);
        if (t.kind == SeriesKind::zone && !t.entity)
        {
            for (const auto& zone : zones)
            {
                const std::string key = zone_key(zone);
                SeriesDescriptor d = SeriesDescriptor::make(t.variable_name, t.kind, key, t.unit, t.frequency);
                out.push_back({d, fmt::format("{}:{}{}", key, t.variable_name, suffix)});
            }
        }
        else if (t.kind == SeriesKind::site)
        {
            out.push_back({t, fmt::format("Environment:{}{}", t.variable_name, suffix)});
        }
        else
        {
            out.push_back({t, fmt::format("{}:{}{}", *t.entity, t.variable_name, suffix)});
        }
    }
    return out;
}

void validate(const FixtureSpec& spec)
{
    if (spec.n_zones < 1)
    {
        fail(ErrorCode::InvalidRecord, "fixture needs at least one zone");
    }
    if (!is_valid_resolution(spec.resolution))
    {
        fail(ErrorCode::InvalidResolution, fmt::format("{} minutes does not divide an hour", spec.resolution));
    }
    if (spec.year < 1 || spec.year > 9999)
    {
        fail(ErrorCode::InvalidRecord, fmt::format("year {} out of range", spec.year));
    }
    const auto first = std::chrono::sys_days{std::chrono::year{spec.year} / 1 / 1};
    const auto last = std::chrono::sys_days{std::chrono::year{spec.year} / 12 / 31};
    if (spec.days < 1 || spec.days > (last - first).count() + 1)
    {
        fail(ErrorCode::InvalidRecord, fmt::format("{} days do not fit in {}", spec.days, spec.year));
    }
    if (spec.variables.empty())
    {
        fail(ErrorCode::InvalidRecord, "fixture needs at least one variable template");
    }
    for (const auto& t : spec.variables)
    {
        if (t.kind != SeriesKind::zone && t.kind != SeriesKind::site && !t.entity)
        {
            fail(ErrorCode::InvalidRecord, fmt::format("template '{}' needs an entity", t.variable_name));
        }
    }
}

std::string render_idf(const FixtureSpec& spec, const std::vector<std::string>& zones)
{
    const auto first = std::chrono::sys_days{std::chrono::year{spec.year} / 1 / 1};
    const std::chrono::year_month_day end{first + std::chrono::days{spec.days - 1}};
    std::string out;
    out += "!- Synthetic small-office model\n\n";
    out += "Version,\n    9.6;                     !- Version Identifier\n\n";
    out += "Building,\n    Synthetic Office,        !- Name\n    0,                       !- North Axis {deg}\n"
           "    City,                    !- Terrain\n    0.04,                    !- Loads Convergence Tolerance Value\n"
           "    0.4,                     !- Temperature Convergence Tolerance Value {deltaC}\n"
           "    FullInteriorAndExterior, !- Solar Distribution\n    25,                      !- Maximum Number of Warmup Days\n"
           "    6;                       !- Minimum Number of Warmup Days\n\n";
    out += fmt::format("Timestep,\n    {};                      !- Number of Timesteps per Hour\n\n",
                       60 / spec.resolution);
    out += fmt::format("RunPeriod,\n    Run Period 1,            !- Name\n    1,                       !- Begin Month\n"
                       "    1,                       !- Begin Day of Month\n    {},                    !- Begin Year\n"
                       "    {},                       !- End Month\n    {},                       !- End Day of Month\n"
                       "    {},                    !- End Year\n    Sunday,                  !- Day of Week for Start Day\n"
                       "    No,                      !- Use Weather File Holidays and Special Days\n"
                       "    No;                      !- Use Weather File Daylight Saving Period\n\n",
                       spec.year, static_cast<unsigned>(end.month()), static_cast<unsigned>(end.day()), spec.year);
    for (const auto& zone : zones)
    {
        out += fmt::format("Zone,\n    {},{}!- Name\n    0,                       !- Direction of Relative North {{deg}}\n"
                           "    0,                       !- X Origin {{m}}\n    0,                       !- Y Origin {{m}}\n"
                           "    0,                       !- Z Origin {{m}}\n    1,                       !- Type\n"
                           "    1;                       !- Multiplier\n\n",
                           zone, std::string(std::max<std::size_t>(1, 24 - zone.size()), ' '));
    }
    std::vector<std::string> schedules;
    for (const auto& t : spec.variables)
    {
        if (t.kind == SeriesKind::schedule && t.entity &&
            std::find(schedules.begin(), schedules.end(), *t.entity) == schedules.end())
        {
            schedules.push_back(*t.entity);
        }
    }
    for (const auto& name : schedules)
    {
        out += fmt::format("Schedule:Compact,\n    {},\n    Fraction,\n    Through: 12/31,\n    For: AllDays,\n"
                           "    Until: 08:00, 0.05,\n    Until: 18:00, 0.95,\n    Until: 24:00, 0.05;\n\n",
                           name);
    }
    for (const auto& t : spec.variables)
    {
        const std::string key = t.kind == SeriesKind::zone || t.kind == SeriesKind::site || !t.entity ? "*" : *t.entity;
        out += fmt::format("Output:Variable,{},{},{};\n", key, t.variable_name, t.frequency);
    }
    return out;
}

std::string render_eio(const std::vector<ZoneGeometry>& zones)
{
    std::string out = "Program Version,EnergyPlus, Version 9.6.0-f420c06a69, YMD=2023.01.01 00:00\n";
    out += "! <Building Information>, Building Name,North Axis {deg},Terrain,  Loads Convergence Tolerance "
           "Value,Temperature Convergence Tolerance Value {deltaC},  Solar Distribution,Maximum Number of Warmup "
           "Days,Minimum Number of Warmup Days\n";
    out += " Building Information,Synthetic Office,0.000,City,0.04000,0.40000,FullInteriorAndExterior,25,6\n";
    out += "! <Zone Summary>, Number of Zones, Number of Zone Surfaces, Number of SubSurfaces\n";
    out += fmt::format(" Zone Summary,{},{},{}\n", zones.size(), zones.size() * 6, 0);
    out += "! <Zone Information>,Zone Name,North Axis {deg},Origin X-Coordinate {m},Origin Y-Coordinate {m},Origin "
           "Z-Coordinate {m},Centroid X-Coordinate {m},Centroid Y-Coordinate {m},Centroid Z-Coordinate "
           "{m},Type,Zone Multiplier,Zone List Multiplier,Minimum X {m},Maximum X {m},Minimum Y {m},Maximum Y "
           "{m},Minimum Z {m},Maximum Z {m},Ceiling Height {m},Volume {m3},Zone Inside Convection Algorithm "
           "{Simple-Detailed-CeilingDiffuser-TrombeWall},Zone Outside Convection Algorithm "
           "{Simple-Detailed-Tarp-MoWitt-DOE-2-BLAST}, Floor Area {m2},Exterior Gross Wall Area {m2},Exterior Net "
           "Wall Area {m2},Exterior Window Area {m2}, Number of Surfaces, Number of SubSurfaces, Number of Shading "
           "SubSurfaces,  Part of Total Building Area\n";
    for (const auto& z : zones)
    {
        const double side = std::sqrt(z.floor_area);
        out += fmt::format(" Zone Information, {},0.0,0.00,0.00,0.00,{:.2f},{:.2f},1.52,1,1,1,0.00,{:.2f},0.00,"
                           "{:.2f},0.00,3.05,3.05,{},TARP,DOE-2,{},{:.2f},{:.2f},0.00,6,0,0,Yes\n",
                           z.zone_name, side / 2, side / 2, side, side, format_double(z.volume),
                           format_double(z.floor_area), side * 3.05, side * 3.05);
    }
    out += "! <Zone Internal Gains Nominal>,Zone Name, Floor Area {m2},# Occupants\n";
    for (const auto& z : zones)
    {
        out += fmt::format(" Zone Internal Gains Nominal,{},{},{:.2f}\n", z.zone_name, format_double(z.floor_area),
                           z.floor_area / 18.6);
    }
    out += "End of Data\n";
    return out;
}

} // namespace

FixtureSpec FixtureSpec::small_office(std::uint64_t seed)
{
    FixtureSpec spec;
    spec.seed = seed;
    spec.variables = default_variable_templates();
    return spec;
}

std::vector<std::string> fixture_zone_names(int n_zones)
{
    std::vector<std::string> out{"Core_ZN"};
    for (int i = 1; i < n_zones; ++i)
    {
        out.push_back(fmt::format("Perimeter_ZN_{}", i));
    }
    return out;
}

std::vector<SeriesDescriptor> default_variable_templates()
{
    const auto zone = [](std::string name, std::string unit) {
        return SeriesDescriptor{std::move(name), SeriesKind::zone, std::nullopt, std::move(unit), "TimeStep"};
    };
    const auto keyed = [](SeriesKind kind, std::string entity, std::string name, std::string unit) {
        return SeriesDescriptor::make(std::move(name), kind, std::move(entity), std::move(unit), "TimeStep");
    };
    const auto site = [](std::string name, std::string unit) {
        return SeriesDescriptor::make(std::move(name), SeriesKind::site, std::nullopt, std::move(unit), "TimeStep");
    };
    return {
        site("Site Outdoor Air Drybulb Temperature", "C"),
        site("Site Outdoor Air Relative Humidity", "%"),
        site("Site Direct Solar Radiation Rate per Area", "W/m2"),
        zone("Zone Mean Air Temperature", "C"),
        zone("Zone Air Relative Humidity", "%"),
        zone("Zone Air System Sensible Heating Energy", "J"),
        zone("Zone Air System Sensible Cooling Energy", "J"),
        zone("Zone Lights Electricity Energy", "J"),
        keyed(SeriesKind::surface, "PERIMETER_ZN_1_WALL_SOUTH", "Surface Inside Face Temperature", "C"),
        keyed(SeriesKind::surface, "PERIMETER_ZN_1_WALL_SOUTH", "Surface Outside Face Temperature", "C"),
        keyed(SeriesKind::surface, "CORE_ZN_ROOF", "Surface Outside Face Temperature", "C"),
        keyed(SeriesKind::node, "PSZ-AC:1 SUPPLY OUTLET NODE", "System Node Temperature", "C"),
        keyed(SeriesKind::node, "PSZ-AC:1 SUPPLY OUTLET NODE", "System Node Mass Flow Rate", "kg/s"),
        keyed(SeriesKind::schedule, "BLDG_OCC_SCH", "Schedule Value", ""),
        keyed(SeriesKind::schedule, "BLDG_LIGHT_SCH", "Schedule Value", ""),
    };
}

FixtureData build_fixture(const FixtureSpec& spec)
{
    validate(spec);
    Rng rng(spec.seed);
    const auto zones = fixture_zone_names(spec.n_zones);

    FixtureData data;
    for (const auto& zone : zones)
    {
        const double area = std::round(rng.uniform(20.0, 200.0) * 100.0) / 100.0;
        const double volume = std::round(area * 3.05 * 100.0) / 100.0;
        data.geometry.push_back(ZoneGeometry::make(zone_key(zone), area, volume));
    }

    const Instant start = make_instant(spec.year, 1, 1);
    const auto steps = static_cast<std::size_t>(spec.days) * 24 * 60 / static_cast<std::size_t>(spec.resolution);
    data.timestamps.reserve(steps);
    data.table.datetime_column.reserve(steps);
    for (std::size_t k = 1; k <= steps; ++k)
    {
        data.timestamps.push_back(start + std::chrono::minutes{static_cast<long>(k) * spec.resolution});
        data.table.datetime_column.push_back(format_output_datetime(data.timestamps.back()));
    }

    for (const auto& column : expand_columns(spec, zones))
    {
        const Signal signal = signal_for(column.descriptor, rng);
        RawSeries series;
        series.header = column.header;
        series.descriptor = column.descriptor;
        series.values.reserve(steps);
        for (Instant t : data.timestamps)
        {
            series.values.push_back(sample(signal, t, rng));
        }
        data.table.series.push_back(std::move(series));
    }

    data.idf = render_idf(spec, zones);
    data.eio = render_eio(data.geometry);
    data.csv = write_output_table(data.table);
    return data;
}

FixtureData generate_fixture(const FixtureSpec& spec, const std::filesystem::path& dir)
{
    FixtureData data = build_fixture(spec);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        fail(ErrorCode::IoFailure, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
    write_text_file(dir / "model.idf", data.idf);
    write_text_file(dir / "eplusout.eio", data.eio);
    write_text_file(dir / "eplusout.csv", data.csv);
    return data;
}

std::map<std::string, VariableTable> reference_values(const FixtureSpec& spec)
{
    const FixtureData data = build_fixture(spec);
    std::map<std::string, VariableTable> out;
    for (const auto& series : data.table.series)
    {
        const auto& d = series.descriptor;
        auto& table = out[d.variable_name];
        if (table.variable_name.empty())
        {
            table.variable_name = d.variable_name;
            table.kind = d.kind;
            table.unit = d.unit;
            table.frequency = d.frequency;
            table.timestamps = data.timestamps;
        }
        table.columns[d.entity.value_or("")] = series.values;
    }
    return out;
}

} // namespace epdata
