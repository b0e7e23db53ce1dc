#pragma once

// JSON shapes shared by the HTTP API and the CLI's --json output.

#include "epdata/stats.hpp"
#include "epdata/store.hpp"
#include "epdata/workflow.hpp"

#include <json.hpp>

namespace epdata
{

using Json = nlohmann::json;

/// Non-finite numbers become null.
Json number_or_null(double value);

Json json_of(const BuildingRecord& building);
Json json_of(const SimulationRecord& simulation);
Json json_of(const VariableEntry& variable);
Json json_of(const ZoneEntry& zone);
Json json_of(const DistributionSummary& summary);
Json json_of(const ScatterPayload& payload);
Json json_of(const StorageReport& report);
Json json_of(const IngestResult& result);
Json json_of(const AggregateResult& result);
Json json_of(const Issue& issue);
Json json_of(const Error& error);

/// One stored series: descriptor, ISO timestamps and values.
Json series_json(const VariableEntry& variable, const VariableTable& table);

// Request bodies. All throw InvalidRecord naming the offending field.
BuildingRecord building_from_json(const Json& j);
PrototypeAttributes attributes_from_json(const Json& j);
/// {"method": "...", "groups": [{"name": "...", "zones": ["..."]}]}
AggregationSpec aggregation_spec_from_json(const Json& j);
/// ["name", ...] or [{"name": "...", "combine": "mean|sum"}, ...]
std::vector<VariableSelection> selection_from_json(const Json& j);
SimulationOverrides overrides_from_json(const Json& j);

} // namespace epdata
