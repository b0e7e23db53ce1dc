#pragma once

#include "epdata/domain.hpp"
#include "epdata/parsers.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace epdata
{

/// A zone-kind template without an entity expands to one series per zone;
/// every other template is emitted once, as given.
struct FixtureSpec
{
    std::uint64_t seed{7};
    int n_zones{5};
    std::vector<SeriesDescriptor> variables;
    int resolution{5}; // minutes
    int days{7};
    int year{kDefaultYear};

    /// Small-office style: 5 zone templates, 3 site, 2 node, 3 surface and 2
    /// schedule series (35 series for 5 zones).
    static FixtureSpec small_office(std::uint64_t seed = 7);
};

/// `Core_ZN`, `Perimeter_ZN_1`, ... as written in the IDF.
std::vector<std::string> fixture_zone_names(int n_zones);
std::vector<SeriesDescriptor> default_variable_templates();

struct FixtureData
{
    std::string idf;
    std::string eio;
    std::string csv;
    std::vector<ZoneGeometry> geometry; // zone names as EnergyPlus reports them (upper case)
    RawOutputTable table;
    std::vector<Instant> timestamps;
};

/// Throws InvalidRecord for an invalid spec.
FixtureData build_fixture(const FixtureSpec& spec);

/// Writes model.idf, eplusout.eio and eplusout.csv into `dir`.
FixtureData generate_fixture(const FixtureSpec& spec, const std::filesystem::path& dir);

/// The exact tables generate_fixture writes, keyed by variable name.
std::map<std::string, VariableTable> reference_values(const FixtureSpec& spec);

} // namespace epdata
