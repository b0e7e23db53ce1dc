#pragma once

#include "epdata/errors.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace epdata
{

struct ServiceConfig
{
    std::filesystem::path store_path{"epdata.sqlite"};
    std::optional<std::filesystem::path> simulator; // EnergyPlus executable; /api/simulate answers 503 without it
    std::optional<std::filesystem::path> static_dir; // UI assets served at /
    /// Output:Variable list used by /api/simulate when a request names none.
    std::optional<std::filesystem::path> essential_variables;
    std::filesystem::path work_dir{std::filesystem::temp_directory_path() / "epdata-runs"};
    std::string host{"127.0.0.1"};
    int port{8080};

    /// STORE_DSN, EPLUS_EXE, PORT, EPDATA_STATIC_DIR, EPDATA_WORK_DIR, EPDATA_ESSENTIAL_VARS.
    static ServiceConfig from_env();
};

/// HTTP status for a workbench error.
int http_status(ErrorCode code);

enum class JobPhase
{
    pending,
    running,
    done,
    failed,
};

std::string_view to_string(JobPhase phase);

/// JSON API under /api; write jobs run one at a time on a dedicated worker
/// that owns the only writable connection.
class Service
{
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds to config.host; port 0 picks a free port. Returns the bound port.
    int bind(int port);
    /// Serves until stop(); call after bind().
    void run();
    void stop();

    /// Blocks until the job leaves pending/running or the timeout elapses.
    std::optional<JobPhase> wait_for_job(int job_id, std::chrono::milliseconds timeout);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace epdata
