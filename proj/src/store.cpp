#include "epdata/store.hpp"

#include "epdata/codec.hpp"
#include "epdata/nested_export.hpp"
#include "sqlite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <new>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>
#include <json.hpp>

namespace epdata
{

namespace
{

constexpr std::size_t kChunkCapacity = 2048;

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS buildings (
    building_id     INTEGER PRIMARY KEY,
    prototype_kind  TEXT NOT NULL CHECK (prototype_kind IN ('commercial', 'residential', 'manufactured')),
    energy_standard TEXT NOT NULL,
    climate_zone    TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS commercial_prototypes (
    prototype_id INTEGER PRIMARY KEY,
    name         TEXT NOT NULL UNIQUE,
    attributes   TEXT NOT NULL DEFAULT '{}'
);
CREATE TABLE IF NOT EXISTS residential_prototypes (
    prototype_id INTEGER PRIMARY KEY,
    name         TEXT NOT NULL UNIQUE,
    attributes   TEXT NOT NULL DEFAULT '{}'
);
CREATE TABLE IF NOT EXISTS manufactured_prototypes (
    prototype_id INTEGER PRIMARY KEY,
    name         TEXT NOT NULL UNIQUE,
    attributes   TEXT NOT NULL DEFAULT '{}'
);
CREATE TABLE IF NOT EXISTS building_commercial_prototypes (
    building_id  INTEGER NOT NULL REFERENCES buildings (building_id),
    prototype_id INTEGER NOT NULL REFERENCES commercial_prototypes (prototype_id),
    PRIMARY KEY (building_id, prototype_id)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS building_residential_prototypes (
    building_id  INTEGER NOT NULL REFERENCES buildings (building_id),
    prototype_id INTEGER NOT NULL REFERENCES residential_prototypes (prototype_id),
    PRIMARY KEY (building_id, prototype_id)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS building_manufactured_prototypes (
    building_id  INTEGER NOT NULL REFERENCES buildings (building_id),
    prototype_id INTEGER NOT NULL REFERENCES manufactured_prototypes (prototype_id),
    PRIMARY KEY (building_id, prototype_id)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS simulations (
    simulation_id         INTEGER PRIMARY KEY,
    building_id           INTEGER NOT NULL REFERENCES buildings (building_id),
    weather_file_location TEXT NOT NULL CHECK (weather_file_location <> ''),
    time_resolution       INTEGER NOT NULL CHECK (time_resolution > 0 AND 60 % time_resolution = 0),
    schedule_name         TEXT NOT NULL,
    UNIQUE (building_id, weather_file_location, time_resolution, schedule_name)
);
CREATE TABLE IF NOT EXISTS zones (
    zone_id       INTEGER PRIMARY KEY,
    zone_name     TEXT NOT NULL,
    floor_area    REAL CHECK (floor_area IS NULL OR floor_area > 0),
    volume        REAL CHECK (volume IS NULL OR volume > 0),
    is_aggregated INTEGER NOT NULL DEFAULT 0 CHECK (is_aggregated IN (0, 1))
);
CREATE INDEX IF NOT EXISTS zones_by_name ON zones (zone_name COLLATE NOCASE);
CREATE TABLE IF NOT EXISTS building_zones (
    building_id INTEGER NOT NULL REFERENCES buildings (building_id),
    zone_id     INTEGER NOT NULL REFERENCES zones (zone_id),
    PRIMARY KEY (building_id, zone_id)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS variables (
    variable_id      INTEGER PRIMARY KEY,
    variable_name    TEXT NOT NULL,
    variable_kind    TEXT NOT NULL CHECK (variable_kind IN ('zone', 'surface', 'node', 'schedule', 'site')),
    entity_qualifier TEXT,
    zone_id          INTEGER REFERENCES zones (zone_id),
    unit             TEXT NOT NULL DEFAULT '',
    frequency        TEXT NOT NULL DEFAULT '',
    CHECK ((variable_kind = 'site') = (entity_qualifier IS NULL))
);
CREATE UNIQUE INDEX IF NOT EXISTS variables_natural_key
    ON variables (variable_name, variable_kind, ifnull(entity_qualifier, ''), ifnull(zone_id, 0));
CREATE TABLE IF NOT EXISTS aggregation_zones (
    aggregated_zone_id INTEGER NOT NULL REFERENCES zones (zone_id),
    composite_zone_id  INTEGER NOT NULL REFERENCES zones (zone_id),
    method             TEXT NOT NULL CHECK (method IN ('simple', 'area_weighted', 'volume_weighted')),
    PRIMARY KEY (aggregated_zone_id, composite_zone_id, method)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS datetimes (
    datetime_id INTEGER PRIMARY KEY,
    timestamp   INTEGER NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS timeseries_chunks (
    simulation_id     INTEGER NOT NULL REFERENCES simulations (simulation_id),
    variable_id       INTEGER NOT NULL REFERENCES variables (variable_id),
    first_datetime_id INTEGER NOT NULL,
    last_datetime_id  INTEGER NOT NULL,
    row_count         INTEGER NOT NULL CHECK (row_count > 0),
    datetime_ids      BLOB NOT NULL,
    samples           BLOB NOT NULL,
    PRIMARY KEY (simulation_id, variable_id, first_datetime_id)
) WITHOUT ROWID;
)sql";

// ---------------------------------------------------------------------------
// `timeseries` virtual table: the logical (simulation_id, variable_id,
// datetime_id, value) relation, decoded on the fly from timeseries_chunks.
// ---------------------------------------------------------------------------

struct ChunkTable
{
    sqlite3_vtab base{};
    sqlite3* db{nullptr};
};

struct ChunkCursor
{
    sqlite3_vtab_cursor base{};
    sqlite3* db{nullptr};
    sqlite3_stmt* stmt{nullptr};
    std::int64_t simulation{0};
    std::int64_t variable{0};
    std::vector<std::int32_t> ids;
    std::vector<double> values;
    std::size_t pos{0};
    bool eof{true};
    sqlite3_int64 rowid{0};
};

enum : int
{
    kBySimulation = 1,
    kByVariable = 2,
};

int set_error(sqlite3_vtab* vtab, const char* message)
{
    sqlite3_free(vtab->zErrMsg);
    vtab->zErrMsg = sqlite3_mprintf("%s", message);
    return SQLITE_CORRUPT;
}

int vt_connect(sqlite3* db, void*, int, const char* const*, sqlite3_vtab** out, char**)
{
    const int rc = sqlite3_declare_vtab(
        db, "CREATE TABLE x(simulation_id INTEGER, variable_id INTEGER, datetime_id INTEGER, value REAL)");
    if (rc != SQLITE_OK)
    {
        return rc;
    }
    auto* table = new (std::nothrow) ChunkTable{};
    if (table == nullptr)
    {
        return SQLITE_NOMEM;
    }
    table->db = db;
    *out = &table->base;
    return SQLITE_OK;
}

int vt_disconnect(sqlite3_vtab* vtab)
{
    delete reinterpret_cast<ChunkTable*>(vtab);
    return SQLITE_OK;
}

int vt_best_index(sqlite3_vtab*, sqlite3_index_info* info)
{
    int simulation = -1;
    int variable = -1;
    for (int i = 0; i < info->nConstraint; ++i)
    {
        const auto& c = info->aConstraint[i];
        if (c.usable == 0 || c.op != SQLITE_INDEX_CONSTRAINT_EQ)
        {
            continue;
        }
        if (c.iColumn == 0)
        {
            simulation = i;
        }
        else if (c.iColumn == 1)
        {
            variable = i;
        }
    }
    int argv = 1;
    info->idxNum = 0;
    if (simulation >= 0)
    {
        info->aConstraintUsage[simulation].argvIndex = argv++;
        info->aConstraintUsage[simulation].omit = 1;
        info->idxNum |= kBySimulation;
    }
    if (variable >= 0)
    {
        info->aConstraintUsage[variable].argvIndex = argv++;
        info->aConstraintUsage[variable].omit = 1;
        info->idxNum |= kByVariable;
    }
    switch (info->idxNum)
    {
    case kBySimulation | kByVariable: info->estimatedCost = 10.0; break;
    case kBySimulation: info->estimatedCost = 1e3; break;
    case kByVariable: info->estimatedCost = 1e4; break;
    default: info->estimatedCost = 1e6; break;
    }
    return SQLITE_OK;
}

int vt_open(sqlite3_vtab* vtab, sqlite3_vtab_cursor** out)
{
    auto* cursor = new (std::nothrow) ChunkCursor{};
    if (cursor == nullptr)
    {
        return SQLITE_NOMEM;
    }
    cursor->db = reinterpret_cast<ChunkTable*>(vtab)->db;
    *out = &cursor->base;
    return SQLITE_OK;
}

int vt_close(sqlite3_vtab_cursor* base)
{
    auto* cursor = reinterpret_cast<ChunkCursor*>(base);
    sqlite3_finalize(cursor->stmt);
    delete cursor;
    return SQLITE_OK;
}

int load_next_chunk(ChunkCursor* cursor)
{
    while (true)
    {
        const int rc = sqlite3_step(cursor->stmt);
        if (rc == SQLITE_DONE)
        {
            cursor->eof = true;
            return SQLITE_OK;
        }
        if (rc != SQLITE_ROW)
        {
            return rc;
        }
        cursor->simulation = sqlite3_column_int64(cursor->stmt, 0);
        cursor->variable = sqlite3_column_int64(cursor->stmt, 1);
        const auto count = static_cast<std::size_t>(sqlite3_column_int64(cursor->stmt, 2));
        const auto* ids = static_cast<const std::uint8_t*>(sqlite3_column_blob(cursor->stmt, 3));
        const auto ids_size = static_cast<std::size_t>(sqlite3_column_bytes(cursor->stmt, 3));
        const auto* samples = static_cast<const std::uint8_t*>(sqlite3_column_blob(cursor->stmt, 4));
        const auto samples_size = static_cast<std::size_t>(sqlite3_column_bytes(cursor->stmt, 4));
        try
        {
            cursor->ids = codec::decode_ids({ids, ids_size}, count);
            cursor->values = codec::decode_values({samples, samples_size}, count);
        }
        catch (const std::exception& e)
        {
            return set_error(cursor->base.pVtab, e.what());
        }
        cursor->pos = 0;
        if (!cursor->ids.empty())
        {
            cursor->eof = false;
            return SQLITE_OK;
        }
    }
}

int vt_filter(sqlite3_vtab_cursor* base, int idx_num, const char*, int argc, sqlite3_value** argv)
{
    auto* cursor = reinterpret_cast<ChunkCursor*>(base);
    sqlite3_finalize(cursor->stmt);
    cursor->stmt = nullptr;
    std::string sql = "SELECT simulation_id, variable_id, row_count, datetime_ids, samples FROM timeseries_chunks";
    if (idx_num == (kBySimulation | kByVariable))
    {
        sql += " WHERE simulation_id = ?1 AND variable_id = ?2";
    }
    else if (idx_num == kBySimulation)
    {
        sql += " WHERE simulation_id = ?1";
    }
    else if (idx_num == kByVariable)
    {
        sql += " WHERE variable_id = ?1";
    }
    sql += " ORDER BY simulation_id, variable_id, first_datetime_id";
    int rc = sqlite3_prepare_v2(cursor->db, sql.c_str(), -1, &cursor->stmt, nullptr);
    if (rc != SQLITE_OK)
    {
        return rc;
    }
    for (int i = 0; i < argc; ++i)
    {
        sqlite3_bind_value(cursor->stmt, i + 1, argv[i]);
    }
    cursor->rowid = 0;
    cursor->eof = false;
    return load_next_chunk(cursor);
}

int vt_next(sqlite3_vtab_cursor* base)
{
    auto* cursor = reinterpret_cast<ChunkCursor*>(base);
    ++cursor->rowid;
    if (++cursor->pos < cursor->ids.size())
    {
        return SQLITE_OK;
    }
    return load_next_chunk(cursor);
}

int vt_eof(sqlite3_vtab_cursor* base)
{
    return reinterpret_cast<ChunkCursor*>(base)->eof ? 1 : 0;
}

int vt_column(sqlite3_vtab_cursor* base, sqlite3_context* ctx, int column)
{
    const auto* cursor = reinterpret_cast<ChunkCursor*>(base);
    switch (column)
    {
    case 0: sqlite3_result_int64(ctx, cursor->simulation); break;
    case 1: sqlite3_result_int64(ctx, cursor->variable); break;
    case 2: sqlite3_result_int64(ctx, cursor->ids[cursor->pos]); break;
    default: sqlite3_result_double(ctx, cursor->values[cursor->pos]); break;
    }
    return SQLITE_OK;
}

int vt_rowid(sqlite3_vtab_cursor* base, sqlite3_int64* rowid)
{
    *rowid = reinterpret_cast<ChunkCursor*>(base)->rowid;
    return SQLITE_OK;
}

const sqlite3_module& timeseries_module()
{
    static const sqlite3_module module = [] {
        sqlite3_module m{};
        m.iVersion = 0;
        m.xCreate = nullptr; // eponymous-only
        m.xConnect = vt_connect;
        m.xBestIndex = vt_best_index;
        m.xDisconnect = vt_disconnect;
        m.xDestroy = vt_disconnect;
        m.xOpen = vt_open;
        m.xClose = vt_close;
        m.xFilter = vt_filter;
        m.xNext = vt_next;
        m.xEof = vt_eof;
        m.xColumn = vt_column;
        m.xRowid = vt_rowid;
        return m;
    }();
    return module;
}

// ---------------------------------------------------------------------------

std::string prototype_table(PrototypeKind kind)
{
    return fmt::format("{}_prototypes", to_string(kind));
}

std::string link_table(PrototypeKind kind)
{
    return fmt::format("building_{}_prototypes", to_string(kind));
}

std::int64_t seconds_of(Instant t)
{
    return t.time_since_epoch().count();
}

Instant instant_of(std::int64_t s)
{
    return Instant{std::chrono::seconds{s}};
}

struct TripleHash
{
    std::size_t operator()(const std::tuple<std::int32_t, std::int32_t, std::int32_t>& t) const noexcept
    {
        const auto [a, b, c] = t;
        std::uint64_t h = static_cast<std::uint32_t>(a);
        h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(b);
        h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(c);
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

std::string describe(const SampleTriple& row)
{
    return fmt::format("(simulation {}, variable {}, datetime {})", row.simulation_id.value, row.variable_id.value,
                       row.datetime_id.value);
}

bool exists(sqlite3* db, const char* sql, std::int64_t id)
{
    sql::Statement st(db, sql);
    st.bind(1, id);
    return st.step();
}

} // namespace

TimeRange TimeRange::all()
{
    // Far enough out for any calendar, small enough to stay exact as epoch seconds.
    return TimeRange{make_instant(-9999, 1, 1), make_instant(9999, 12, 31, 23, 59, 59)};
}

void Store::Closer::operator()(sqlite3* db) const noexcept
{
    sqlite3_close_v2(db);
}

Store::Store(std::unique_ptr<sqlite3, Closer> db, std::filesystem::path path, bool read_only)
    : db_(std::move(db)), path_(std::move(path)), read_only_(read_only)
{
}

Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;
Store::~Store() = default;

Store Store::open(const std::filesystem::path& path, bool read_only)
{
    std::error_code ec;
    if (read_only && !std::filesystem::exists(path, ec))
    {
        fail(ErrorCode::StorageUnavailable, fmt::format("store '{}' does not exist", path.string()));
    }
    sqlite3* raw = nullptr;
    const int flags = read_only ? SQLITE_OPEN_READONLY : (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    const int rc = sqlite3_open_v2(path.string().c_str(), &raw, flags, nullptr);
    std::unique_ptr<sqlite3, Closer> db(raw);
    if (rc != SQLITE_OK)
    {
        fail(ErrorCode::StorageUnavailable,
             fmt::format("cannot open store '{}': {}", path.string(), raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc)));
    }
    sqlite3_busy_timeout(db.get(), 10'000);
    sqlite3_extended_result_codes(db.get(), 1);
    try
    {
        sql::exec(db.get(), "PRAGMA foreign_keys = ON");
        if (!read_only)
        {
            // Only takes effect on a new file. Most tables hold a handful of
            // rows, so small pages keep their fixed per-table cost down.
            sql::exec(db.get(), "PRAGMA page_size = 1024");
            sql::exec(db.get(), "PRAGMA journal_mode = WAL");
        }
        else
        {
            sql::exec(db.get(), "SELECT count(*) FROM sqlite_master");
        }
    }
    catch (const Error& e)
    {
        fail(ErrorCode::StorageUnavailable, fmt::format("store '{}' is not usable: {}", path.string(), e.detail()));
    }
    if (sqlite3_create_module_v2(db.get(), "timeseries", &timeseries_module(), nullptr, nullptr) != SQLITE_OK)
    {
        fail(ErrorCode::StorageUnavailable, "cannot register the timeseries module");
    }
    return Store(std::move(db), path, read_only);
}

void Store::init_schema()
{
    try
    {
        sql::Transaction tx(db_.get());
        sql::exec(db_.get(), kSchema);
        tx.commit();
    }
    catch (const Error& e)
    {
        fail(ErrorCode::StorageUnavailable, fmt::format("cannot create schema: {}", e.detail()));
    }
}

const std::vector<std::string>& Store::table_names()
{
    static const std::vector<std::string> names{
        "buildings",
        "commercial_prototypes",
        "residential_prototypes",
        "manufactured_prototypes",
        "building_commercial_prototypes",
        "building_residential_prototypes",
        "building_manufactured_prototypes",
        "simulations",
        "variables",
        "zones",
        "building_zones",
        "aggregation_zones",
        "datetimes",
        "timeseries",
    };
    return names;
}

std::vector<std::string> Store::existing_tables() const
{
    std::vector<std::string> out;
    sql::Statement st(db_.get(), "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name");
    while (st.step())
    {
        out.push_back(st.text(0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Buildings & simulations
// ---------------------------------------------------------------------------

BuildingId Store::upsert_building(const BuildingRecord& record, const PrototypeAttributes& attributes)
{
    const BuildingRecord valid = require(validate_building(record));
    sqlite3* db = db_.get();
    sql::Transaction tx(db);

    const std::string prototypes = prototype_table(valid.prototype_kind);
    std::int64_t prototype_id = 0;
    {
        sql::Statement find(db, fmt::format("SELECT prototype_id FROM {} WHERE name = ?1", prototypes));
        find.bind(1, std::string_view(valid.prototype_name));
        if (find.step())
        {
            prototype_id = find.int64(0);
        }
    }
    const std::string attributes_json = nlohmann::json(attributes).dump();
    if (prototype_id == 0)
    {
        sql::Statement insert(db, fmt::format("INSERT INTO {} (name, attributes) VALUES (?1, ?2)", prototypes));
        insert.bind(1, std::string_view(valid.prototype_name)).bind(2, std::string_view(attributes_json));
        insert.run();
        prototype_id = sqlite3_last_insert_rowid(db);
    }
    else if (!attributes.empty())
    {
        sql::Statement update(db, fmt::format("UPDATE {} SET attributes = ?2 WHERE prototype_id = ?1", prototypes));
        update.bind(1, prototype_id).bind(2, std::string_view(attributes_json));
        update.run();
    }

    const std::string links = link_table(valid.prototype_kind);
    std::int64_t building_id = 0;
    if (const auto found = find_building(valid))
    {
        building_id = found->value;
    }
    if (building_id == 0)
    {
        sql::Statement insert(
            db, "INSERT INTO buildings (prototype_kind, energy_standard, climate_zone) VALUES (?1, ?2, ?3)");
        insert.bind(1, to_string(valid.prototype_kind))
            .bind(2, std::string_view(valid.energy_standard))
            .bind(3, std::string_view(valid.climate_zone));
        insert.run();
        building_id = sqlite3_last_insert_rowid(db);
        sql::Statement link(db, fmt::format("INSERT INTO {} (building_id, prototype_id) VALUES (?1, ?2)", links));
        link.bind(1, building_id).bind(2, prototype_id);
        link.run();
    }
    tx.commit();
    return BuildingId{static_cast<std::int32_t>(building_id)};
}

std::optional<BuildingId> Store::find_building(const BuildingRecord& record) const
{
    sql::Statement st(db_.get(), fmt::format("SELECT b.building_id FROM buildings b JOIN {} l ON l.building_id = "
                                             "b.building_id JOIN {} p ON p.prototype_id = l.prototype_id WHERE p.name = "
                                             "?1 AND b.prototype_kind = ?2 AND b.energy_standard = ?3 AND "
                                             "b.climate_zone = ?4",
                                             link_table(record.prototype_kind), prototype_table(record.prototype_kind)));
    st.bind(1, std::string_view(record.prototype_name))
        .bind(2, to_string(record.prototype_kind))
        .bind(3, std::string_view(record.energy_standard))
        .bind(4, std::string_view(record.climate_zone));
    if (!st.step())
    {
        return std::nullopt;
    }
    return BuildingId{st.int32(0)};
}

std::optional<BuildingRecord> Store::get_building(BuildingId id) const
{
    sql::Statement st(db_.get(),
                      "SELECT prototype_kind, energy_standard, climate_zone FROM buildings WHERE building_id = ?1");
    st.bind(1, id.value);
    if (!st.step())
    {
        return std::nullopt;
    }
    BuildingRecord record;
    record.building_id = id;
    record.prototype_kind = parse_prototype_kind(st.text(0));
    record.energy_standard = st.text(1);
    record.climate_zone = st.text(2);
    sql::Statement name(db_.get(), fmt::format("SELECT p.name FROM {} p JOIN {} l ON l.prototype_id = p.prototype_id "
                                               "WHERE l.building_id = ?1",
                                               prototype_table(record.prototype_kind),
                                               link_table(record.prototype_kind)));
    name.bind(1, id.value);
    if (name.step())
    {
        record.prototype_name = name.text(0);
    }
    return record;
}

PrototypeAttributes Store::prototype_attributes(BuildingId id) const
{
    const auto building = get_building(id);
    if (!building)
    {
        fail(ErrorCode::UnknownBuilding, fmt::format("building {} does not exist", id.value));
    }
    sql::Statement st(db_.get(), fmt::format("SELECT p.attributes FROM {} p JOIN {} l ON l.prototype_id = "
                                             "p.prototype_id WHERE l.building_id = ?1",
                                             prototype_table(building->prototype_kind),
                                             link_table(building->prototype_kind)));
    st.bind(1, id.value);
    if (!st.step())
    {
        return {};
    }
    return nlohmann::json::parse(st.text(0)).get<PrototypeAttributes>();
}

std::optional<SimulationId> Store::find_simulation(const SimulationRecord& record) const
{
    sql::Statement st(db_.get(), "SELECT simulation_id FROM simulations WHERE building_id = ?1 AND "
                                 "weather_file_location = ?2 AND time_resolution = ?3 AND schedule_name = ?4");
    st.bind(1, record.building_id.value)
        .bind(2, std::string_view(record.weather_file_location))
        .bind(3, record.time_resolution)
        .bind(4, std::string_view(record.schedule_name));
    if (!st.step())
    {
        return std::nullopt;
    }
    return SimulationId{st.int32(0)};
}

SimulationId Store::upsert_simulation(const SimulationRecord& record)
{
    const SimulationRecord valid = require(validate_simulation(record));
    sqlite3* db = db_.get();
    sql::Transaction tx(db);
    if (!exists(db, "SELECT 1 FROM buildings WHERE building_id = ?1", valid.building_id.value))
    {
        fail(ErrorCode::UnknownBuilding, fmt::format("building {} does not exist", valid.building_id.value));
    }
    if (auto found = find_simulation(valid))
    {
        return *found;
    }
    sql::Statement insert(db, "INSERT INTO simulations (building_id, weather_file_location, time_resolution, "
                              "schedule_name) VALUES (?1, ?2, ?3, ?4)");
    insert.bind(1, valid.building_id.value)
        .bind(2, std::string_view(valid.weather_file_location))
        .bind(3, valid.time_resolution)
        .bind(4, std::string_view(valid.schedule_name));
    insert.run();
    const auto id = static_cast<std::int32_t>(sqlite3_last_insert_rowid(db));
    tx.commit();
    return SimulationId{id};
}

std::optional<SimulationRecord> Store::get_simulation(SimulationId id) const
{
    sql::Statement st(db_.get(), "SELECT building_id, weather_file_location, time_resolution, schedule_name FROM "
                                 "simulations WHERE simulation_id = ?1");
    st.bind(1, id.value);
    if (!st.step())
    {
        return std::nullopt;
    }
    return SimulationRecord{id, BuildingId{st.int32(0)}, st.text(1), static_cast<int>(st.int64(2)), st.text(3)};
}

std::vector<SimulationRecord> Store::list_simulations() const
{
    std::vector<SimulationRecord> out;
    sql::Statement st(db_.get(), "SELECT simulation_id, building_id, weather_file_location, time_resolution, "
                                 "schedule_name FROM simulations ORDER BY simulation_id");
    while (st.step())
    {
        out.push_back(SimulationRecord{SimulationId{st.int32(0)}, BuildingId{st.int32(1)}, st.text(2),
                                       static_cast<int>(st.int64(3)), st.text(4)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Zones
// ---------------------------------------------------------------------------

namespace
{

std::int64_t find_or_insert_zone(sqlite3* db, const std::string& name, std::optional<double> area,
                                 std::optional<double> volume, bool aggregated)
{
    sql::Statement find(db, "SELECT zone_id FROM zones WHERE zone_name = ?1 COLLATE NOCASE AND floor_area IS ?2 AND "
                            "volume IS ?3 AND is_aggregated = ?4 ORDER BY zone_id LIMIT 1");
    find.bind(1, std::string_view(name)).bind(2, area).bind(3, volume).bind(4, aggregated ? 1 : 0);
    if (find.step())
    {
        return find.int64(0);
    }
    sql::Statement insert(db,
                          "INSERT INTO zones (zone_name, floor_area, volume, is_aggregated) VALUES (?1, ?2, ?3, ?4)");
    insert.bind(1, std::string_view(name)).bind(2, area).bind(3, volume).bind(4, aggregated ? 1 : 0);
    insert.run();
    return sqlite3_last_insert_rowid(db);
}

// An aggregated zone is identified by its name, its building and the method
// that produced it, so two methods over the same group keep separate series.
std::int64_t find_or_insert_aggregated_zone(sqlite3* db, const std::string& name, std::optional<double> area,
                                            std::optional<double> volume, BuildingId building,
                                            AggregationMethod method)
{
    sql::Statement find(db, "SELECT z.zone_id FROM zones z JOIN building_zones bz ON bz.zone_id = z.zone_id WHERE "
                            "bz.building_id = ?1 AND z.is_aggregated = 1 AND z.zone_name = ?2 COLLATE NOCASE AND "
                            "EXISTS (SELECT 1 FROM aggregation_zones a WHERE a.aggregated_zone_id = z.zone_id AND "
                            "a.method = ?3) ORDER BY z.zone_id LIMIT 1");
    find.bind(1, building.value).bind(2, std::string_view(name)).bind(3, to_string(method));
    if (find.step())
    {
        return find.int64(0);
    }
    sql::Statement insert(db, "INSERT INTO zones (zone_name, floor_area, volume, is_aggregated) VALUES (?1, ?2, ?3, 1)");
    insert.bind(1, std::string_view(name)).bind(2, area).bind(3, volume);
    insert.run();
    return sqlite3_last_insert_rowid(db);
}

void link_zone(sqlite3* db, BuildingId building, std::int64_t zone)
{
    sql::Statement link(db, "INSERT OR IGNORE INTO building_zones (building_id, zone_id) VALUES (?1, ?2)");
    link.bind(1, building.value).bind(2, zone);
    link.run();
}

} // namespace

std::map<std::string, ZoneId> Store::register_zones(std::span<const ZoneGeometry> geometry, BuildingId building)
{
    sqlite3* db = db_.get();
    sql::Transaction tx(db);
    if (!exists(db, "SELECT 1 FROM buildings WHERE building_id = ?1", building.value))
    {
        fail(ErrorCode::UnknownBuilding, fmt::format("building {} does not exist", building.value));
    }
    std::map<std::string, ZoneId> out;
    for (const auto& zone : geometry)
    {
        const ZoneGeometry valid = ZoneGeometry::make(std::string(trim(zone.zone_name)), zone.floor_area, zone.volume);
        const std::int64_t id = find_or_insert_zone(db, valid.zone_name, valid.floor_area, valid.volume, false);
        link_zone(db, building, id);
        out[zone.zone_name] = ZoneId{static_cast<std::int32_t>(id)};
    }
    tx.commit();
    return out;
}

std::map<std::string, ZoneId> Store::register_zone_names(std::span<const std::string> names, BuildingId building)
{
    sqlite3* db = db_.get();
    sql::Transaction tx(db);
    if (!exists(db, "SELECT 1 FROM buildings WHERE building_id = ?1", building.value))
    {
        fail(ErrorCode::UnknownBuilding, fmt::format("building {} does not exist", building.value));
    }
    std::map<std::string, ZoneId> out;
    for (const auto& name : names)
    {
        const std::string clean(trim(name));
        if (clean.empty())
        {
            fail(ErrorCode::InvalidRecord, "zone name is empty");
        }
        const std::int64_t id = find_or_insert_zone(db, clean, std::nullopt, std::nullopt, false);
        link_zone(db, building, id);
        out[name] = ZoneId{static_cast<std::int32_t>(id)};
    }
    tx.commit();
    return out;
}

std::map<std::string, ZoneId> Store::register_aggregation(const AggregationSpec& spec,
                                                          const std::map<std::string, ZoneId>& zone_ids,
                                                          std::span<const AggregatedZone> aggregated,
                                                          BuildingId building)
{
    std::map<std::string, ZoneId> composites;
    for (const auto& [name, id] : zone_ids)
    {
        composites.emplace(zone_key(name), id);
    }
    std::map<std::string, const AggregatedZone*> geometry;
    for (const auto& zone : aggregated)
    {
        geometry.emplace(zone_key(zone.name), &zone);
    }

    sqlite3* db = db_.get();
    sql::Transaction tx(db);
    if (!exists(db, "SELECT 1 FROM buildings WHERE building_id = ?1", building.value))
    {
        fail(ErrorCode::UnknownBuilding, fmt::format("building {} does not exist", building.value));
    }
    std::map<std::string, ZoneId> out;
    for (const auto& group : spec.groups)
    {
        std::vector<ZoneId> members;
        for (const auto& composite : group.composite_zone_names)
        {
            const auto it = composites.find(zone_key(composite));
            if (it == composites.end() ||
                !exists(db, "SELECT 1 FROM zones WHERE zone_id = ?1", it->second.value))
            {
                fail(ErrorCode::UnknownZone, fmt::format("composite zone '{}' has no zone row", composite));
            }
            members.push_back(it->second);
        }
        std::optional<double> area;
        std::optional<double> volume;
        if (const auto it = geometry.find(zone_key(group.aggregated_zone_name)); it != geometry.end())
        {
            area = it->second->floor_area;
            volume = it->second->volume;
        }
        const std::string name(trim(group.aggregated_zone_name));
        const std::int64_t id = find_or_insert_aggregated_zone(db, name, area, volume, building, spec.method);
        link_zone(db, building, id);
        for (ZoneId member : members)
        {
            sql::Statement link(db, "INSERT OR IGNORE INTO aggregation_zones (aggregated_zone_id, composite_zone_id, "
                                    "method) VALUES (?1, ?2, ?3)");
            link.bind(1, id).bind(2, member.value).bind(3, to_string(spec.method));
            link.run();
        }
        out[group.aggregated_zone_name] = ZoneId{static_cast<std::int32_t>(id)};
    }
    tx.commit();
    return out;
}

std::vector<ZoneEntry> Store::zones_for_building(BuildingId building) const
{
    std::vector<ZoneEntry> out;
    sql::Statement st(db_.get(), "SELECT z.zone_id, z.zone_name, z.floor_area, z.volume, z.is_aggregated FROM zones z "
                                 "JOIN building_zones bz ON bz.zone_id = z.zone_id WHERE bz.building_id = ?1 "
                                 "ORDER BY z.zone_id");
    st.bind(1, building.value);
    while (st.step())
    {
        out.push_back(ZoneEntry{ZoneId{st.int32(0)}, st.text(1), st.optional_real(2), st.optional_real(3),
                                st.int64(4) != 0});
    }
    return out;
}

std::optional<ZoneEntry> Store::get_zone(ZoneId id) const
{
    sql::Statement st(db_.get(), "SELECT zone_id, zone_name, floor_area, volume, is_aggregated FROM zones WHERE "
                                 "zone_id = ?1");
    st.bind(1, id.value);
    if (!st.step())
    {
        return std::nullopt;
    }
    return ZoneEntry{ZoneId{st.int32(0)}, st.text(1), st.optional_real(2), st.optional_real(3), st.int64(4) != 0};
}

std::vector<AggregationLink> Store::aggregation_links(ZoneId aggregated_zone) const
{
    std::vector<AggregationLink> out;
    sql::Statement st(db_.get(), "SELECT composite_zone_id, method FROM aggregation_zones WHERE aggregated_zone_id = "
                                 "?1 ORDER BY composite_zone_id");
    st.bind(1, aggregated_zone.value);
    while (st.step())
    {
        out.push_back(AggregationLink{aggregated_zone, ZoneId{st.int32(0)}, parse_aggregation_method(st.text(1))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variables & datetimes
// ---------------------------------------------------------------------------

std::vector<VariableId> Store::register_variables(std::span<const SeriesDescriptor> descriptors, BuildingId building,
                                                  const std::map<std::string, ZoneId>& zone_ids)
{
    std::map<std::string, std::int32_t> zones;
    if (zone_ids.empty())
    {
        for (const auto& zone : zones_for_building(building))
        {
            if (!zone.is_aggregated)
            {
                zones[zone_key(zone.zone_name)] = zone.zone_id.value; // later rows win
            }
        }
    }
    for (const auto& [name, id] : zone_ids)
    {
        zones[zone_key(name)] = id.value;
    }

    sqlite3* db = db_.get();
    sql::Transaction tx(db);
    sql::Statement find(db, "SELECT variable_id FROM variables WHERE variable_name = ?1 AND variable_kind = ?2 AND "
                            "ifnull(entity_qualifier, '') = ifnull(?3, '') AND ifnull(zone_id, 0) = ifnull(?4, 0)");
    sql::Statement insert(db, "INSERT INTO variables (variable_name, variable_kind, entity_qualifier, zone_id, unit, "
                              "frequency) VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
    std::vector<VariableId> out;
    out.reserve(descriptors.size());
    for (const auto& d : descriptors)
    {
        const SeriesDescriptor valid = SeriesDescriptor::make(d.variable_name, d.kind, d.entity, d.unit, d.frequency);
        std::optional<std::int32_t> zone;
        if (valid.kind == SeriesKind::zone)
        {
            const auto it = zones.find(zone_key(*valid.entity));
            if (it == zones.end())
            {
                fail(ErrorCode::UnknownZoneEntity,
                     fmt::format("zone '{}' of '{}' is not registered for building {}", *valid.entity,
                                 valid.variable_name, building.value));
            }
            zone = it->second;
        }
        const auto bind_key = [&](sql::Statement& st) {
            st.bind(1, std::string_view(valid.variable_name)).bind(2, to_string(valid.kind)).bind(3, valid.entity);
            if (zone)
            {
                st.bind(4, *zone);
            }
            else
            {
                st.bind_null(4);
            }
        };
        bind_key(find);
        if (find.step())
        {
            out.push_back(VariableId{find.int32(0)});
            find.reset();
            continue;
        }
        find.reset();
        bind_key(insert);
        insert.bind(5, std::string_view(valid.unit)).bind(6, std::string_view(valid.frequency));
        insert.run();
        out.push_back(VariableId{static_cast<std::int32_t>(sqlite3_last_insert_rowid(db))});
    }
    tx.commit();
    return out;
}

namespace
{

VariableEntry read_variable(const sql::Statement& st)
{
    VariableEntry entry;
    entry.variable_id = VariableId{st.int32(0)};
    entry.descriptor.variable_name = st.text(1);
    entry.descriptor.kind = parse_series_kind(st.text(2));
    entry.descriptor.entity = st.optional_text(3);
    if (!st.is_null(4))
    {
        entry.zone_id = ZoneId{st.int32(4)};
    }
    entry.descriptor.unit = st.text(5);
    entry.descriptor.frequency = st.text(6);
    return entry;
}

} // namespace

std::optional<VariableEntry> Store::get_variable(VariableId id) const
{
    sql::Statement st(db_.get(), "SELECT variable_id, variable_name, variable_kind, entity_qualifier, zone_id, unit, "
                                 "frequency FROM variables WHERE variable_id = ?1");
    st.bind(1, id.value);
    if (!st.step())
    {
        return std::nullopt;
    }
    return read_variable(st);
}

std::vector<VariableEntry> Store::list_variables(SimulationId simulation) const
{
    std::vector<VariableEntry> out;
    sql::Statement st(db_.get(), "SELECT v.variable_id, v.variable_name, v.variable_kind, v.entity_qualifier, "
                                 "v.zone_id, v.unit, v.frequency FROM variables v WHERE v.variable_id IN (SELECT "
                                 "DISTINCT variable_id FROM timeseries_chunks WHERE simulation_id = ?1) ORDER BY "
                                 "v.variable_id");
    st.bind(1, simulation.value);
    while (st.step())
    {
        out.push_back(read_variable(st));
    }
    return out;
}

std::vector<DatetimeId> Store::intern_datetimes(std::span<const Instant> timestamps)
{
    for (std::size_t i = 1; i < timestamps.size(); ++i)
    {
        if (timestamps[i] <= timestamps[i - 1])
        {
            fail(ErrorCode::NonMonotonicInput,
                 fmt::format("instant {} ({}) does not follow {}", i, format_iso(timestamps[i]),
                             format_iso(timestamps[i - 1])));
        }
    }
    std::vector<DatetimeId> out;
    if (timestamps.empty())
    {
        return out;
    }
    sqlite3* db = db_.get();
    sql::Transaction tx(db);
    std::unordered_map<std::int64_t, std::int32_t> known;
    {
        sql::Statement st(db, "SELECT timestamp, datetime_id FROM datetimes WHERE timestamp BETWEEN ?1 AND ?2");
        st.bind(1, seconds_of(timestamps.front())).bind(2, seconds_of(timestamps.back()));
        while (st.step())
        {
            known.emplace(st.int64(0), st.int32(1));
        }
    }
    sql::Statement insert(db, "INSERT INTO datetimes (timestamp) VALUES (?1)");
    out.reserve(timestamps.size());
    for (Instant t : timestamps)
    {
        const std::int64_t s = seconds_of(t);
        if (const auto it = known.find(s); it != known.end())
        {
            out.push_back(DatetimeId{it->second});
            continue;
        }
        insert.bind(1, s);
        insert.run();
        out.push_back(DatetimeId{static_cast<std::int32_t>(sqlite3_last_insert_rowid(db))});
    }
    tx.commit();
    return out;
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

std::size_t Store::bulk_insert_samples(std::span<const SampleTriple> rows, const InsertOptions& options)
{
    const std::size_t batch = std::max<std::size_t>(options.batch_size, 1);
    std::size_t committed = 0;
    while (committed < rows.size())
    {
        const std::size_t n = std::min(batch, rows.size() - committed);
        try
        {
            committed += insert_batch(rows.subspan(committed, n));
        }
        catch (const Error& e)
        {
            fail(e.code(), fmt::format("{}; {} rows committed, resume from row {}", e.detail(), committed, committed));
        }
        if (options.on_batch)
        {
            options.on_batch(committed);
        }
    }
    return committed;
}

std::size_t Store::bulk_insert_samples(const std::function<bool(SampleTriple&)>& next, const InsertOptions& options)
{
    const std::size_t batch = std::max<std::size_t>(options.batch_size, 1);
    std::vector<SampleTriple> buffer;
    buffer.reserve(batch);
    std::size_t committed = 0;
    bool more = true;
    while (more)
    {
        buffer.clear();
        SampleTriple row;
        while (buffer.size() < batch && (more = next(row)))
        {
            buffer.push_back(row);
        }
        if (buffer.empty())
        {
            break;
        }
        try
        {
            committed += insert_batch(buffer);
        }
        catch (const Error& e)
        {
            fail(e.code(), fmt::format("{}; {} rows committed, resume from row {}", e.detail(), committed, committed));
        }
        if (options.on_batch)
        {
            options.on_batch(committed);
        }
    }
    return committed;
}

std::size_t Store::insert_batch(std::span<const SampleTriple> rows)
{
    if (rows.empty())
    {
        return 0;
    }
    sqlite3* db = db_.get();
    sql::Transaction tx(db);

    // Finite values, unique triples within the batch (first offender in stream order).
    std::unordered_set<std::tuple<std::int32_t, std::int32_t, std::int32_t>, TripleHash> seen;
    seen.reserve(rows.size());
    for (const auto& row : rows)
    {
        if (!std::isfinite(row.value))
        {
            fail(ErrorCode::NonFiniteValue, fmt::format("non-finite value at {}", describe(row)));
        }
        if (!seen.emplace(row.simulation_id.value, row.variable_id.value, row.datetime_id.value).second)
        {
            fail(ErrorCode::DuplicateTriple, fmt::format("{} repeated within the input", describe(row)));
        }
    }

    // Foreign keys.
    {
        std::set<std::int32_t> simulations;
        std::set<std::int32_t> variables;
        std::set<std::int32_t> datetimes;
        for (const auto& row : rows)
        {
            simulations.insert(row.simulation_id.value);
            variables.insert(row.variable_id.value);
            datetimes.insert(row.datetime_id.value);
        }
        const auto first_row_with = [&](auto pred) {
            return *std::find_if(rows.begin(), rows.end(), pred);
        };
        for (std::int32_t id : simulations)
        {
            if (!exists(db, "SELECT 1 FROM simulations WHERE simulation_id = ?1", id))
            {
                fail(ErrorCode::ForeignKeyViolation,
                     fmt::format("unknown simulation at {}",
                                 describe(first_row_with([&](const auto& r) { return r.simulation_id.value == id; }))));
            }
        }
        for (std::int32_t id : variables)
        {
            if (!exists(db, "SELECT 1 FROM variables WHERE variable_id = ?1", id))
            {
                fail(ErrorCode::ForeignKeyViolation,
                     fmt::format("unknown variable at {}",
                                 describe(first_row_with([&](const auto& r) { return r.variable_id.value == id; }))));
            }
        }
        const std::int32_t lo = *datetimes.begin();
        const std::int32_t hi = *datetimes.rbegin();
        sql::Statement dense(db, "SELECT count(*) FROM datetimes WHERE datetime_id BETWEEN ?1 AND ?2");
        dense.bind(1, lo).bind(2, hi);
        dense.step();
        if (dense.int64(0) != static_cast<std::int64_t>(hi) - lo + 1)
        {
            sql::Statement one(db, "SELECT 1 FROM datetimes WHERE datetime_id = ?1");
            for (std::int32_t id : datetimes)
            {
                one.bind(1, id);
                const bool found = one.step();
                one.reset();
                if (!found)
                {
                    fail(ErrorCode::ForeignKeyViolation,
                         fmt::format("unknown datetime at {}", describe(first_row_with([&](const auto& r) {
                                                                    return r.datetime_id.value == id;
                                                                }))));
                }
            }
        }
    }

    // Group per series; remember stream positions for conflict reporting.
    struct Entry
    {
        std::int32_t datetime;
        double value;
        std::size_t row;
    };
    std::map<std::pair<std::int32_t, std::int32_t>, std::vector<Entry>> series;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto& r = rows[i];
        series[{r.simulation_id.value, r.variable_id.value}].push_back({r.datetime_id.value, r.value, i});
    }

    sql::Statement overlapping(db, "SELECT row_count, datetime_ids FROM timeseries_chunks WHERE simulation_id = ?1 AND "
                                   "variable_id = ?2 AND first_datetime_id <= ?4 AND last_datetime_id >= ?3");
    std::optional<std::size_t> conflict;
    for (auto& [key, entries] : series)
    {
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.datetime < b.datetime; });
        overlapping.bind(1, key.first).bind(2, key.second).bind(3, entries.front().datetime).bind(4,
                                                                                              entries.back().datetime);
        while (overlapping.step())
        {
            const auto stored = codec::decode_ids(overlapping.blob(1), static_cast<std::size_t>(overlapping.int64(0)));
            for (const auto& e : entries)
            {
                if (std::binary_search(stored.begin(), stored.end(), e.datetime))
                {
                    conflict = std::min(conflict.value_or(e.row), e.row);
                }
            }
        }
        overlapping.reset();
    }
    if (conflict)
    {
        fail(ErrorCode::DuplicateTriple, fmt::format("{} already stored", describe(rows[*conflict])));
    }

    sql::Statement insert(db, "INSERT INTO timeseries_chunks (simulation_id, variable_id, first_datetime_id, "
                              "last_datetime_id, row_count, datetime_ids, samples) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)");
    std::vector<std::int32_t> ids;
    std::vector<double> values;
    for (const auto& [key, entries] : series)
    {
        for (std::size_t start = 0; start < entries.size(); start += kChunkCapacity)
        {
            const std::size_t end = std::min(entries.size(), start + kChunkCapacity);
            ids.clear();
            values.clear();
            for (std::size_t i = start; i < end; ++i)
            {
                ids.push_back(entries[i].datetime);
                values.push_back(entries[i].value);
            }
            const auto id_bytes = codec::encode_ids(ids);
            const auto value_bytes = codec::encode_values(values);
            insert.bind(1, key.first)
                .bind(2, key.second)
                .bind(3, ids.front())
                .bind(4, ids.back())
                .bind(5, static_cast<std::int64_t>(ids.size()))
                .bind(6, std::span<const std::uint8_t>(id_bytes))
                .bind(7, std::span<const std::uint8_t>(value_bytes));
            insert.run();
        }
    }
    tx.commit();
    return rows.size();
}

std::map<VariableId, VariableTable> Store::query_series(SimulationId simulation, std::span<const VariableId> variables,
                                                        const TimeRange& range) const
{
    sqlite3* db = db_.get();
    if (!get_simulation(simulation))
    {
        fail(ErrorCode::UnknownSimulation, fmt::format("simulation {} does not exist", simulation.value));
    }
    std::vector<VariableEntry> entries;
    for (VariableId id : variables)
    {
        auto entry = get_variable(id);
        if (!entry)
        {
            fail(ErrorCode::UnknownVariable, fmt::format("variable {} does not exist", id.value));
        }
        entries.push_back(std::move(*entry));
    }

    std::unordered_map<std::int32_t, std::int64_t> instants;
    {
        sql::Statement st(db, "SELECT datetime_id, timestamp FROM datetimes WHERE timestamp BETWEEN ?1 AND ?2");
        st.bind(1, seconds_of(range.start)).bind(2, seconds_of(range.end));
        while (st.step())
        {
            instants.emplace(st.int32(0), st.int64(1));
        }
    }

    std::map<VariableId, VariableTable> out;
    sql::Statement chunks(db, "SELECT row_count, datetime_ids, samples FROM timeseries_chunks WHERE simulation_id = ?1 "
                              "AND variable_id = ?2 ORDER BY first_datetime_id");
    for (const auto& entry : entries)
    {
        std::vector<std::pair<std::int64_t, double>> points;
        chunks.bind(1, simulation.value).bind(2, entry.variable_id.value);
        while (chunks.step())
        {
            const auto count = static_cast<std::size_t>(chunks.int64(0));
            const auto ids = codec::decode_ids(chunks.blob(1), count);
            const auto values = codec::decode_values(chunks.blob(2), count);
            for (std::size_t i = 0; i < count; ++i)
            {
                if (const auto it = instants.find(ids[i]); it != instants.end())
                {
                    points.emplace_back(it->second, values[i]);
                }
            }
        }
        chunks.reset();
        std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

        VariableTable table;
        table.variable_name = entry.descriptor.variable_name;
        table.kind = entry.descriptor.kind;
        table.unit = entry.descriptor.unit;
        table.frequency = entry.descriptor.frequency;
        std::vector<double> column;
        table.timestamps.reserve(points.size());
        column.reserve(points.size());
        for (const auto& [t, v] : points)
        {
            table.timestamps.push_back(instant_of(t));
            column.push_back(v);
        }
        table.columns.emplace(entry.descriptor.entity.value_or(""), std::move(column));
        out.emplace(entry.variable_id, std::move(table));
    }
    return out;
}

std::optional<TimeRange> Store::data_range(SimulationId simulation) const
{
    sql::Statement st(db_.get(), "SELECT min(d.timestamp), max(d.timestamp) FROM datetimes d WHERE d.datetime_id IN "
                                 "(SELECT datetime_id FROM timeseries WHERE simulation_id = ?1)");
    st.bind(1, simulation.value);
    if (!st.step() || st.is_null(0))
    {
        return std::nullopt;
    }
    return TimeRange{instant_of(st.int64(0)), instant_of(st.int64(1))};
}

std::size_t Store::count_rows(const std::string& table) const
{
    const auto& names = table_names();
    if (std::find(names.begin(), names.end(), table) == names.end())
    {
        fail(ErrorCode::InvalidRecord, fmt::format("'{}' is not a store table", table));
    }
    const std::string sql = table == "timeseries" ? "SELECT ifnull(sum(row_count), 0) FROM timeseries_chunks"
                                                  : fmt::format("SELECT count(*) FROM {}", table);
    sql::Statement st(db_.get(), sql);
    st.step();
    return static_cast<std::size_t>(st.int64(0));
}

std::size_t Store::sample_count(SimulationId simulation) const
{
    sql::Statement st(db_.get(), "SELECT ifnull(sum(row_count), 0) FROM timeseries_chunks WHERE simulation_id = ?1");
    st.bind(1, simulation.value);
    st.step();
    return static_cast<std::size_t>(st.int64(0));
}

std::size_t Store::count_orphan_samples() const
{
    sql::Statement st(db_.get(), "SELECT count(*) FROM timeseries t "
                                 "WHERE NOT EXISTS (SELECT 1 FROM simulations s WHERE s.simulation_id = t.simulation_id) "
                                 "OR NOT EXISTS (SELECT 1 FROM variables v WHERE v.variable_id = t.variable_id) "
                                 "OR NOT EXISTS (SELECT 1 FROM datetimes d WHERE d.datetime_id = t.datetime_id)");
    st.step();
    return static_cast<std::size_t>(st.int64(0));
}

void Store::compact()
{
    sqlite3* db = db_.get();
    {
        sql::Transaction tx(db);
        std::vector<std::pair<std::int32_t, std::int32_t>> fragmented;
        {
            sql::Statement st(db, "SELECT simulation_id, variable_id FROM timeseries_chunks GROUP BY simulation_id, "
                                  "variable_id HAVING count(*) > 1 AND min(row_count) < ?1");
            st.bind(1, static_cast<std::int64_t>(kChunkCapacity));
            while (st.step())
            {
                fragmented.emplace_back(st.int32(0), st.int32(1));
            }
        }
        sql::Statement read(db, "SELECT row_count, datetime_ids, samples FROM timeseries_chunks WHERE simulation_id = "
                                "?1 AND variable_id = ?2");
        sql::Statement erase(db, "DELETE FROM timeseries_chunks WHERE simulation_id = ?1 AND variable_id = ?2");
        sql::Statement insert(db, "INSERT INTO timeseries_chunks (simulation_id, variable_id, first_datetime_id, "
                                  "last_datetime_id, row_count, datetime_ids, samples) VALUES (?1, ?2, ?3, ?4, ?5, ?6, "
                                  "?7)");
        for (const auto& [sim, var] : fragmented)
        {
            std::vector<std::pair<std::int32_t, double>> points;
            read.bind(1, sim).bind(2, var);
            while (read.step())
            {
                const auto count = static_cast<std::size_t>(read.int64(0));
                const auto ids = codec::decode_ids(read.blob(1), count);
                const auto values = codec::decode_values(read.blob(2), count);
                for (std::size_t i = 0; i < count; ++i)
                {
                    points.emplace_back(ids[i], values[i]);
                }
            }
            read.reset();
            std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            erase.bind(1, sim).bind(2, var);
            erase.run();
            for (std::size_t start = 0; start < points.size(); start += kChunkCapacity)
            {
                const std::size_t end = std::min(points.size(), start + kChunkCapacity);
                std::vector<std::int32_t> ids;
                std::vector<double> values;
                for (std::size_t i = start; i < end; ++i)
                {
                    ids.push_back(points[i].first);
                    values.push_back(points[i].second);
                }
                const auto id_bytes = codec::encode_ids(ids);
                const auto value_bytes = codec::encode_values(values);
                insert.bind(1, sim)
                    .bind(2, var)
                    .bind(3, ids.front())
                    .bind(4, ids.back())
                    .bind(5, static_cast<std::int64_t>(ids.size()))
                    .bind(6, std::span<const std::uint8_t>(id_bytes))
                    .bind(7, std::span<const std::uint8_t>(value_bytes));
                insert.run();
            }
        }
        tx.commit();
    }
    sql::exec(db, "VACUUM");
    sql::exec(db, "PRAGMA wal_checkpoint(TRUNCATE)");
}

StorageReport Store::storage_report(const std::optional<std::filesystem::path>& comparison)
{
    sqlite3* db = db_.get();
    if (!read_only_)
    {
        sql::exec(db, "PRAGMA wal_checkpoint(TRUNCATE)");
    }
    StorageReport report;
    {
        sql::Statement size(db, "SELECT page_count * page_size FROM pragma_page_count(), pragma_page_size()");
        size.step();
        report.store_bytes = static_cast<std::size_t>(size.int64(0));
    }

    std::map<std::string, std::size_t> bytes;
    {
        // dbstat reports b-tree names; fold indexes into their table.
        sql::Statement st(db, "SELECT ifnull(m.tbl_name, s.name), sum(s.pgsize) FROM dbstat s LEFT JOIN sqlite_master "
                              "m ON m.name = s.name GROUP BY 1");
        while (st.step())
        {
            std::string name = st.text(0);
            if (name == "timeseries_chunks")
            {
                name = "timeseries";
            }
            bytes[name] += static_cast<std::size_t>(st.int64(1));
        }
    }
    for (const auto& table : table_names())
    {
        const auto it = bytes.find(table);
        report.tables.push_back(TableUsage{table, count_rows(table), it == bytes.end() ? 0 : it->second});
        if (it != bytes.end())
        {
            bytes.erase(it);
        }
    }
    for (const auto& [name, size] : bytes)
    {
        report.tables.push_back(TableUsage{name, 0, size}); // sqlite_schema and other overhead
    }

    if (comparison)
    {
        std::error_code ec;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(*comparison, ec))
        {
            if (entry.is_regular_file())
            {
                report.naive_bytes += static_cast<std::size_t>(entry.file_size());
            }
        }
        if (ec)
        {
            fail(ErrorCode::IoFailure, fmt::format("cannot scan '{}': {}", comparison->string(), ec.message()));
        }
    }
    else
    {
        report.naive_bytes = naive_export_bytes();
    }
    if (report.store_bytes > 0 && report.naive_bytes > 0)
    {
        report.reduction_factor = static_cast<double>(report.naive_bytes) / static_cast<double>(report.store_bytes);
    }
    return report;
}

std::size_t Store::naive_export_bytes() const
{
    std::size_t total = 0;
    for (const auto& simulation : list_simulations())
    {
        total += nested_leaf_bytes(load_generation_archive(*this, simulation.simulation_id));
        for (AggregationMethod method : aggregation_methods(*this, simulation.simulation_id))
        {
            total += nested_leaf_bytes(load_aggregation_archive(*this, simulation.simulation_id, method));
        }
    }
    return total;
}

} // namespace epdata
