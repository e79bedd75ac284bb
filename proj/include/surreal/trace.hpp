#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <surreal/actions.hpp>
#include <surreal/world_sim.hpp>

namespace surreal {

inline constexpr int kTraceSchemaVersion = 1;

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

class TraceError : public std::runtime_error {
public:
    explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

/// The trace was produced by an incompatible schema revision.
class TraceVersionError : public TraceError {
public:
    explicit TraceVersionError(const std::string& what) : TraceError(what) {}
};

struct TraceHeader {
    int schema_version = kTraceSchemaVersion;
    std::uint64_t seed = 0;
    std::string condition = "D";
    nlohmann::json config;  // the full run configuration document
    std::string config_digest;
    double start_time = 0.0;  // simulation clock at the first record
};

struct MemorySnapshotEntry {
    std::int64_t tick = 0;
    AtomicAction proposed = AtomicAction::MaintainSpeed;
    AtomicAction final_action = AtomicAction::MaintainSpeed;
    bool overridden = false;
};

struct TraceRecord {
    std::int64_t tick = 0;
    std::string ego_lane;
    double ego_offset = 0.0;
    double ego_speed = 0.0;
    double ego_advance = 0.0;  // meters covered during this tick
    nlohmann::json scene;
    AtomicAction proposed = AtomicAction::MaintainSpeed;
    AtomicAction final_action = AtomicAction::MaintainSpeed;
    bool overridden = false;
    bool decided = false;  // true on decision ticks, false while holding
    bool reasoner_failure = false;
    bool degraded = false;  // lane change without a neighbor, downgraded
    std::vector<CollisionEvent> collisions;
    std::vector<MemorySnapshotEntry> memory;
};

struct TraceFooter {
    double total_distance_m = 0.0;
    double total_time_s = 0.0;
    std::vector<CollisionEvent> collisions;
    int ego_collision_count = 0;
    int destinations_reached = 0;
    bool aborted = false;
};

struct EpisodeTrace {
    TraceHeader header;
    std::vector<TraceRecord> records;
    TraceFooter footer;
};

inline nlohmann::json collision_to_json(const CollisionEvent& e) {
    return {{"tick", e.tick},        {"sim_time", e.sim_time_s},
            {"kind", std::string(collision_kind_name(e.kind))},
            {"entity_a", e.entity_a}, {"entity_b", e.entity_b},
            {"lane", e.lane},         {"ego_involved", e.ego_involved}};
}

inline CollisionEvent collision_from_json(const nlohmann::json& j) {
    CollisionEvent e;
    e.tick = j.at("tick").get<std::int64_t>();
    e.sim_time_s = j.at("sim_time").get<double>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "leading") e.kind = CollisionKind::Leading;
    else if (kind == "lateral") e.kind = CollisionKind::Lateral;
    else if (kind == "pedestrian") e.kind = CollisionKind::Pedestrian;
    else throw TraceError("unknown collision kind \"" + kind + "\"");
    e.entity_a = j.at("entity_a").get<std::string>();
    e.entity_b = j.at("entity_b").get<std::string>();
    e.lane = j.at("lane").get<std::string>();
    e.ego_involved = j.at("ego_involved").get<bool>();
    return e;
}

inline nlohmann::json header_to_json(const TraceHeader& h) {
    return {{"type", "header"},
            {"schema_version", h.schema_version},
            {"seed", h.seed},
            {"condition", h.condition},
            {"config", h.config},
            {"config_digest", h.config_digest},
            {"start_time", h.start_time}};
}

inline nlohmann::json record_to_json(const TraceRecord& r) {
    nlohmann::json j;
    j["type"] = "record";
    j["tick"] = r.tick;
    j["ego"] = {{"lane", r.ego_lane},
                {"offset", r.ego_offset},
                {"speed", r.ego_speed},
                {"advance", r.ego_advance}};
    j["scene"] = r.scene;
    j["proposed"] = std::string(action_name(r.proposed));
    j["final"] = std::string(action_name(r.final_action));
    j["overridden"] = r.overridden;
    j["decided"] = r.decided;
    j["reasoner_failure"] = r.reasoner_failure;
    j["degraded"] = r.degraded;
    j["collisions"] = nlohmann::json::array();
    for (const CollisionEvent& e : r.collisions) j["collisions"].push_back(collision_to_json(e));
    j["memory"] = nlohmann::json::array();
    for (const MemorySnapshotEntry& m : r.memory) {
        j["memory"].push_back({{"tick", m.tick},
                               {"proposed", std::string(action_name(m.proposed))},
                               {"final", std::string(action_name(m.final_action))},
                               {"overridden", m.overridden}});
    }
    return j;
}

inline nlohmann::json footer_to_json(const TraceFooter& f) {
    nlohmann::json j;
    j["type"] = "footer";
    j["total_distance"] = f.total_distance_m;
    j["total_time"] = f.total_time_s;
    j["collisions"] = nlohmann::json::array();
    for (const CollisionEvent& e : f.collisions) j["collisions"].push_back(collision_to_json(e));
    j["ego_collision_count"] = f.ego_collision_count;
    j["destinations_reached"] = f.destinations_reached;
    j["aborted"] = f.aborted;
    return j;
}

namespace detail {

inline AtomicAction action_field(const nlohmann::json& j, const char* key) {
    auto a = action_from_name(j.at(key).get<std::string>());
    if (!a) throw TraceError(std::string("unknown action in trace field \"") + key + "\"");
    return *a;
}

} // namespace detail

inline TraceHeader header_from_json(const nlohmann::json& j) {
    TraceHeader h;
    h.schema_version = j.at("schema_version").get<int>();
    if (h.schema_version != kTraceSchemaVersion) {
        throw TraceVersionError("trace schema version " + std::to_string(h.schema_version) +
                                " is not supported (this build reads version " +
                                std::to_string(kTraceSchemaVersion) + ")");
    }
    h.seed = j.at("seed").get<std::uint64_t>();
    h.condition = j.at("condition").get<std::string>();
    h.config = j.at("config");
    h.config_digest = j.at("config_digest").get<std::string>();
    h.start_time = j.at("start_time").get<double>();
    return h;
}

inline TraceRecord record_from_json(const nlohmann::json& j) {
    TraceRecord r;
    r.tick = j.at("tick").get<std::int64_t>();
    const auto& ego = j.at("ego");
    r.ego_lane = ego.at("lane").get<std::string>();
    r.ego_offset = ego.at("offset").get<double>();
    r.ego_speed = ego.at("speed").get<double>();
    r.ego_advance = ego.at("advance").get<double>();
    r.scene = j.at("scene");
    r.proposed = detail::action_field(j, "proposed");
    r.final_action = detail::action_field(j, "final");
    r.overridden = j.at("overridden").get<bool>();
    r.decided = j.at("decided").get<bool>();
    r.reasoner_failure = j.at("reasoner_failure").get<bool>();
    r.degraded = j.at("degraded").get<bool>();
    for (const auto& je : j.at("collisions")) r.collisions.push_back(collision_from_json(je));
    for (const auto& jm : j.at("memory")) {
        MemorySnapshotEntry m;
        m.tick = jm.at("tick").get<std::int64_t>();
        m.proposed = detail::action_field(jm, "proposed");
        m.final_action = detail::action_field(jm, "final");
        m.overridden = jm.at("overridden").get<bool>();
        r.memory.push_back(m);
    }
    return r;
}

inline TraceFooter footer_from_json(const nlohmann::json& j) {
    TraceFooter f;
    f.total_distance_m = j.at("total_distance").get<double>();
    f.total_time_s = j.at("total_time").get<double>();
    for (const auto& je : j.at("collisions")) f.collisions.push_back(collision_from_json(je));
    f.ego_collision_count = j.at("ego_collision_count").get<int>();
    f.destinations_reached = j.at("destinations_reached").get<int>();
    f.aborted = j.at("aborted").get<bool>();
    return f;
}

/// One JSON object per line: header, records in tick order, footer.
inline std::string trace_to_jsonl(const EpisodeTrace& t) {
    std::string out = header_to_json(t.header).dump() + "\n";
    for (const TraceRecord& r : t.records) out += record_to_json(r).dump() + "\n";
    out += footer_to_json(t.footer).dump() + "\n";
    return out;
}

inline EpisodeTrace trace_from_jsonl(std::istream& in) {
    EpisodeTrace t;
    std::string line;
    bool have_header = false, have_footer = false;
    std::int64_t last_tick = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw TraceError("trace line is not valid JSON");
        std::string type = j.value("type", "");
        if (type == "header") {
            if (have_header) throw TraceError("duplicate trace header");
            t.header = header_from_json(j);
            have_header = true;
        } else if (type == "record") {
            if (!have_header) throw TraceError("trace record before header");
            if (have_footer) throw TraceError("trace record after footer");
            TraceRecord r = record_from_json(j);
            if (r.tick <= last_tick) throw TraceError("trace records out of tick order");
            last_tick = r.tick;
            t.records.push_back(std::move(r));
        } else if (type == "footer") {
            if (!have_header) throw TraceError("trace footer before header");
            if (have_footer) throw TraceError("duplicate trace footer");
            t.footer = footer_from_json(j);
            have_footer = true;
        } else {
            throw TraceError("unknown trace line type \"" + type + "\"");
        }
    }
    if (!have_header) throw TraceError("trace has no header");
    if (!have_footer) throw TraceError("trace has no footer");
    return t;
}

inline EpisodeTrace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open trace file: " + path);
    return trace_from_jsonl(in);
}

inline void save_trace_file(const std::string& path, const EpisodeTrace& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write trace file: " + path);
    out << trace_to_jsonl(t);
}

inline std::string config_digest(const nlohmann::json& config) {
    return hex64(fnv1a64(config.dump()));
}

} // namespace surreal
