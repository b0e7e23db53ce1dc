#pragma once

// Thin RAII layer over the SQLite C API, private to the store.

#include "epdata/errors.hpp"

#include <sqlite3.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epdata::sql
{

struct DbCloser
{
    void operator()(sqlite3* db) const noexcept { sqlite3_close_v2(db); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;

[[noreturn]] void raise(sqlite3* db, int rc, std::string_view context);

void exec(sqlite3* db, const std::string& sql);

class Statement
{
public:
    Statement(sqlite3* db, std::string_view sql);
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    Statement(Statement&& other) noexcept;
    Statement& operator=(Statement&& other) noexcept;
    ~Statement();

    Statement& bind(int index, std::int64_t value);
    Statement& bind(int index, int value) { return bind(index, static_cast<std::int64_t>(value)); }
    Statement& bind(int index, double value);
    Statement& bind(int index, std::string_view value);
    Statement& bind(int index, const std::optional<std::string>& value);
    Statement& bind(int index, const std::optional<double>& value);
    Statement& bind(int index, std::span<const std::uint8_t> blob);
    Statement& bind_null(int index);

    /// True while a row is available.
    bool step();
    /// Executes to completion, expecting no rows.
    void run();
    void reset();

    std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }
    std::int32_t int32(int col) const { return static_cast<std::int32_t>(sqlite3_column_int64(stmt_, col)); }
    double real(int col) const { return sqlite3_column_double(stmt_, col); }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::string text(int col) const;
    std::optional<std::string> optional_text(int col) const;
    std::optional<double> optional_real(int col) const;
    std::span<const std::uint8_t> blob(int col) const;

    int last_rc() const { return rc_; }

private:
    sqlite3* db_{nullptr};
    sqlite3_stmt* stmt_{nullptr};
    int rc_{SQLITE_OK};
};

/// BEGIN IMMEDIATE ... COMMIT, rolled back unless commit() is reached.
class Transaction
{
public:
    explicit Transaction(sqlite3* db);
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;
    ~Transaction();

    void commit();

private:
    sqlite3* db_;
    bool done_{false};
};

} // namespace epdata::sql
