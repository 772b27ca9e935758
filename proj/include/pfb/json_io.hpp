#pragma once

#include <string>

#include <json.hpp>

#include "pfb/types.hpp"

namespace pfb {

// External JSON formats. Job indices are 1-based on the wire (matching the
// usual J_1..J_n convention) and 0-based in memory. Serialization is
// deterministic, so round trips are byte-identical.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);
nlohmann::json result_to_json(const SolveResult& r);
SolveResult result_from_json(const nlohmann::json& j);

std::string dump_json(const nlohmann::json& j);

Instance load_instance_file(const std::string& path);
Schedule load_schedule_file(const std::string& path);

}  // namespace pfb
