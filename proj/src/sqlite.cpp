#include "sqlite.hpp"

#include <utility>

#include <fmt/core.h>

namespace epdata::sql
{

void raise(sqlite3* db, int rc, std::string_view context)
{
    const std::string message =
        fmt::format("{}: {} ({})", context, db != nullptr ? sqlite3_errmsg(db) : sqlite3_errstr(rc), rc);
    if ((rc & 0xff) == SQLITE_CONSTRAINT)
    {
        fail(ErrorCode::ConstraintViolation, message);
    }
    fail(ErrorCode::StorageUnavailable, message);
}

void exec(sqlite3* db, const std::string& sql)
{
    char* error = nullptr;
    const int rc = sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &error);
    if (rc != SQLITE_OK)
    {
        std::string text = error != nullptr ? error : sqlite3_errstr(rc);
        sqlite3_free(error);
        raise(nullptr, rc, text);
    }
}

Statement::Statement(sqlite3* db, std::string_view sql) : db_(db)
{
    const int rc = sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr);
    if (rc != SQLITE_OK)
    {
        raise(db, rc, fmt::format("prepare '{}'", sql));
    }
}

Statement::Statement(Statement&& other) noexcept
    : db_(other.db_), stmt_(std::exchange(other.stmt_, nullptr)), rc_(other.rc_)
{
}

Statement& Statement::operator=(Statement&& other) noexcept
{
    if (this != &other)
    {
        sqlite3_finalize(stmt_);
        db_ = other.db_;
        stmt_ = std::exchange(other.stmt_, nullptr);
        rc_ = other.rc_;
    }
    return *this;
}

Statement::~Statement()
{
    sqlite3_finalize(stmt_);
}

Statement& Statement::bind(int index, std::int64_t value)
{
    sqlite3_bind_int64(stmt_, index, value);
    return *this;
}

Statement& Statement::bind(int index, double value)
{
    sqlite3_bind_double(stmt_, index, value);
    return *this;
}

Statement& Statement::bind(int index, std::string_view value)
{
    sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
    return *this;
}

Statement& Statement::bind(int index, const std::optional<std::string>& value)
{
    return value ? bind(index, std::string_view(*value)) : bind_null(index);
}

Statement& Statement::bind(int index, const std::optional<double>& value)
{
    return value ? bind(index, *value) : bind_null(index);
}

Statement& Statement::bind(int index, std::span<const std::uint8_t> blob)
{
    sqlite3_bind_blob(stmt_, index, blob.data(), static_cast<int>(blob.size()), SQLITE_TRANSIENT);
    return *this;
}

Statement& Statement::bind_null(int index)
{
    sqlite3_bind_null(stmt_, index);
    return *this;
}

bool Statement::step()
{
    rc_ = sqlite3_step(stmt_);
    if (rc_ == SQLITE_ROW)
    {
        return true;
    }
    if (rc_ == SQLITE_DONE)
    {
        return false;
    }
    raise(db_, rc_, fmt::format("step '{}'", sqlite3_sql(stmt_)));
}

void Statement::run()
{
    while (step())
    {
    }
    reset();
}

void Statement::reset()
{
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
}

std::string Statement::text(int col) const
{
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p != nullptr ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string{};
}

std::optional<std::string> Statement::optional_text(int col) const
{
    if (is_null(col))
    {
        return std::nullopt;
    }
    return text(col);
}

std::optional<double> Statement::optional_real(int col) const
{
    if (is_null(col))
    {
        return std::nullopt;
    }
    return real(col);
}

std::span<const std::uint8_t> Statement::blob(int col) const
{
    const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt_, col));
    return {p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))};
}

Transaction::Transaction(sqlite3* db) : db_(db)
{
    exec(db_, "BEGIN IMMEDIATE");
}

Transaction::~Transaction()
{
    if (!done_)
    {
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
}

void Transaction::commit()
{
    exec(db_, "COMMIT");
    done_ = true;
}

} // namespace epdata::sql
