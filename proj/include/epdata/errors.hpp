#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epdata
{

enum class ErrorCode
{
    // domain validation
    InvalidResolution,
    MissingWeatherFile,
    InvalidRecord,
    UnknownZone,
    EmptyGroup,
    DuplicateAggregatedName,
    ReservedName,
    OverlappingGroups,
    NonFiniteValue,
    // parsers
    SyntaxError,
    MissingZoneInformationSection,
    NonPositiveGeometry,
    MalformedHeader,
    RaggedRow,
    BadNumber,
    BadStamp,
    NonUniformTimestamps,
    // aggregation
    EmptyZoneList,
    MissingGeometry,
    KeyMismatch,
    LengthMismatch,
    UnknownVariable,
    // store
    StorageUnavailable,
    ConstraintViolation,
    UnknownBuilding,
    UnknownZoneEntity,
    NonMonotonicInput,
    DuplicateTriple,
    ForeignKeyViolation,
    UnknownSimulation,
    DuplicateSimulation,
    // stats
    EmptySeries,
    NoOverlap,
    EmptyRange,
    InvalidRange,
    RenderFailure,
    // io / service
    IoFailure,
    SimulatorNotConfigured,
};

std::string_view to_string(ErrorCode code);

/// True for failures caused by the environment (files, storage) rather than
/// by the content of the inputs. Drives CLI exit codes and HTTP statuses.
bool is_io_error(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, std::string detail, std::optional<long> line = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    std::optional<long> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::string detail_;
    std::optional<long> line_;
};

[[noreturn]] void fail(ErrorCode code, std::string detail, std::optional<long> line = {});

} // namespace epdata
