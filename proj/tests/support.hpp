#pragma once

#include "epdata/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <unistd.h>

namespace testing
{

// Scratch directory removed on scope exit.
class TempDir
{
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("epdata-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Code of the epdata::Error thrown by f, or nullopt if it returned normally.
// Any other exception type escapes and fails the test.
template <class F>
std::optional<epdata::ErrorCode> error_of(F&& f)
{
    try
    {
        f();
    }
    catch (const epdata::Error& e)
    {
        return e.code();
    }
    return std::nullopt;
}

template <class F>
std::optional<long> error_line(F&& f)
{
    try
    {
        f();
    }
    catch (const epdata::Error& e)
    {
        return e.line();
    }
    return std::nullopt;
}

} // namespace testing

#define CHECK_ERROR(expr, code) CHECK(::testing::error_of([&] { (void)(expr); }) == std::optional(code))
#define REQUIRE_ERROR(expr, code) REQUIRE(::testing::error_of([&] { (void)(expr); }) == std::optional(code))
