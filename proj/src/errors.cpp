#include "epdata/errors.hpp"

#include <fmt/core.h>

namespace epdata
{

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::MissingWeatherFile: return "MissingWeatherFile";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::UnknownZone: return "UnknownZone";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::DuplicateAggregatedName: return "DuplicateAggregatedName";
    case ErrorCode::ReservedName: return "ReservedName";
    case ErrorCode::OverlappingGroups: return "OverlappingGroups";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MissingZoneInformationSection: return "MissingZoneInformationSection";
    case ErrorCode::NonPositiveGeometry: return "NonPositiveGeometry";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::BadNumber: return "BadNumber";
    case ErrorCode::BadStamp: return "BadStamp";
    case ErrorCode::NonUniformTimestamps: return "NonUniformTimestamps";
    case ErrorCode::EmptyZoneList: return "EmptyZoneList";
    case ErrorCode::MissingGeometry: return "MissingGeometry";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::StorageUnavailable: return "StorageUnavailable";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::UnknownBuilding: return "UnknownBuilding";
    case ErrorCode::UnknownZoneEntity: return "UnknownZoneEntity";
    case ErrorCode::NonMonotonicInput: return "NonMonotonicInput";
    case ErrorCode::DuplicateTriple: return "DuplicateTriple";
    case ErrorCode::ForeignKeyViolation: return "ForeignKeyViolation";
    case ErrorCode::UnknownSimulation: return "UnknownSimulation";
    case ErrorCode::DuplicateSimulation: return "DuplicateSimulation";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::RenderFailure: return "RenderFailure";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SimulatorNotConfigured: return "SimulatorNotConfigured";
    }
    return "Unknown";
}

bool is_io_error(ErrorCode code)
{
    return code == ErrorCode::IoFailure || code == ErrorCode::StorageUnavailable ||
           code == ErrorCode::SimulatorNotConfigured;
}

namespace
{

std::string compose(ErrorCode code, const std::string& detail, std::optional<long> line)
{
    if (line)
    {
        return fmt::format("{} (line {}): {}", to_string(code), *line, detail);
    }
    return fmt::format("{}: {}", to_string(code), detail);
}

} // namespace

Error::Error(ErrorCode code, std::string detail, std::optional<long> line)
    : std::runtime_error(compose(code, detail, line)), code_(code), detail_(std::move(detail)), line_(line)
{
}

void fail(ErrorCode code, std::string detail, std::optional<long> line)
{
    throw Error(code, std::move(detail), line);
}

} // namespace epdata
