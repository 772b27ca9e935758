#include "pfb/json_io.hpp"

#include <algorithm>
#include <fstream>

#include "pfb/errors.hpp"

namespace pfb {

using nlohmann::json;

namespace {

std::int64_t require_nonneg_int(const json& j, const char* field, const std::string& where) {
    if (!j.contains(field))
        throw ConfigError(where + ": missing field \"" + field + "\"");
    const json& v = j.at(field);
    if (!v.is_number_integer())
        throw ConfigError(where + ": field \"" + field + "\" must be an integer");
    return v.get<std::int64_t>();
}

}  // namespace

json instance_to_json(const Instance& inst) {
    json machines = json::array();
    for (const MachineConfig& m : inst.machines) machines.push_back({{"p", m.p}, {"b", m.b}});
    json jobs = json::array();
    for (const Job& job : inst.jobs) {
        json o{{"r", job.r}};
        if (job.d) o["d"] = *job.d;
        if (job.w) o["w"] = *job.w;
        jobs.push_back(std::move(o));
    }
    return json{{"machines", std::move(machines)}, {"jobs", std::move(jobs)}};
}

Instance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("machines") || !j.contains("jobs"))
        throw ConfigError("instance JSON must be an object with \"machines\" and \"jobs\"");
    Instance inst;
    int idx = 0;
    for (const json& mj : j.at("machines")) {
        const std::string where = "machine " + std::to_string(++idx);
        MachineConfig m;
        m.p = require_nonneg_int(mj, "p", where);
        m.b = static_cast<int>(require_nonneg_int(mj, "b", where));
        inst.machines.push_back(m);
    }
    idx = 0;
    for (const json& jj : j.at("jobs")) {
        const std::string where = "job " + std::to_string(++idx);
        Job job;
        job.r = require_nonneg_int(jj, "r", where);
        if (jj.contains("d")) job.d = require_nonneg_int(jj, "d", where);
        if (jj.contains("w")) job.w = require_nonneg_int(jj, "w", where);
        inst.jobs.push_back(job);
    }
    return inst;
}

json schedule_to_json(const Schedule& s) {
    json machines = json::array();
    for (const auto& machine : s.machines) {
        json batches = json::array();
        for (const Batch& b : machine) {
            json jobs = json::array();
            for (int j : b.jobs) jobs.push_back(j + 1);
            batches.push_back({{"start", b.start}, {"jobs", std::move(jobs)}});
        }
        machines.push_back(std::move(batches));
    }
    return json{{"machines", std::move(machines)}};
}

Schedule schedule_from_json(const json& j) {
    if (!j.is_object() || !j.contains("machines"))
        throw ConfigError("schedule JSON must be an object with \"machines\"");
    Schedule s;
    for (const json& mj : j.at("machines")) {
        std::vector<Batch> batches;
        for (const json& bj : mj) {
            Batch b;
            if (!bj.contains("start") || !bj.at("start").is_number_integer())
                throw ConfigError("schedule batch needs an integer \"start\"");
            b.start = bj.at("start").get<Time>();
            if (!bj.contains("jobs") || !bj.at("jobs").is_array())
                throw ConfigError("schedule batch needs a \"jobs\" array");
            for (const json& job : bj.at("jobs")) {
                if (!job.is_number_integer() || job.get<std::int64_t>() < 1)
                    throw ConfigError("schedule job indices are 1-based integers");
                b.jobs.push_back(static_cast<int>(job.get<std::int64_t>()) - 1);
            }
            std::sort(b.jobs.begin(), b.jobs.end());
            batches.push_back(std::move(b));
        }
        s.machines.push_back(std::move(batches));
    }
    return s;
}

json result_to_json(const SolveResult& r) {
    return json{{"value", r.value},
                {"exact", r.exact},
                {"schedule", schedule_to_json(r.schedule)},
                {"stats",
                 {{"states", r.stats.states},
                  {"stages", r.stats.stages},
                  {"state_bound", r.stats.state_space_bound},
                  {"wall_ms", r.stats.wall_ms}}}};
}

SolveResult result_from_json(const json& j) {
    if (!j.is_object() || !j.contains("value") || !j.contains("exact") || !j.contains("schedule"))
        throw ConfigError("result JSON needs \"value\", \"exact\" and \"schedule\"");
    SolveResult r;
    r.value = j.at("value").get<Value>();
    r.exact = j.at("exact").get<bool>();
    r.schedule = schedule_from_json(j.at("schedule"));
    if (j.contains("stats")) {
        const json& s = j.at("stats");
        r.stats.states = s.value("states", std::uint64_t{0});
        r.stats.stages = s.value("stages", std::uint64_t{0});
        r.stats.state_space_bound = s.value("state_bound", std::uint64_t{0});
        r.stats.wall_ms = s.value("wall_ms", 0.0);
    }
    return r;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return instance_from_json(j);
}

Schedule load_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schedule file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    // Accept either a bare schedule or a solve result wrapping one.
    if (j.is_object() && j.contains("schedule")) return schedule_from_json(j.at("schedule"));
    return schedule_from_json(j);
}

}  // namespace pfb
