#pragma once

// A store holding one ingested synthetic small-office week.

#include "epdata/synth.hpp"
#include "epdata/workflow.hpp"

#include "support.hpp"

namespace testing
{

inline epdata::BuildingRecord small_office_building()
{
    epdata::BuildingRecord b;
    b.prototype_kind = epdata::PrototypeKind::commercial;
    b.prototype_name = "SmallOffice";
    b.energy_standard = "90.1-2019";
    b.climate_zone = "4C";
    return b;
}

inline epdata::IngestRequest fixture_request(const std::filesystem::path& dir, bool with_eio = true)
{
    epdata::IngestRequest r;
    r.idf = dir / "model.idf";
    if (with_eio)
    {
        r.eio = dir / "eplusout.eio";
    }
    r.output = dir / "eplusout.csv";
    r.building = small_office_building();
    r.weather_file_location = "USA_WA_Seattle-Tacoma.Intl.AP.727930_TMY3.epw";
    return r;
}

struct IngestedFixture
{
    TempDir dir;
    epdata::FixtureSpec spec;
    epdata::FixtureData data;
    epdata::Store store;
    epdata::IngestResult ingest;

    explicit IngestedFixture(epdata::FixtureSpec s = epdata::FixtureSpec::small_office(), bool with_eio = true)
        : spec(std::move(s)), data(epdata::generate_fixture(spec, dir / "run")),
          store(epdata::Store::open(dir / "store.sqlite"))
    {
        store.init_schema();
        ingest = epdata::ingest_files(store, fixture_request(dir / "run", with_eio));
    }
};

} // namespace testing
