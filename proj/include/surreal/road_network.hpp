#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace surreal {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class SignalState { Red, Green, Yellow };

inline constexpr std::string_view signal_state_name(SignalState s) {
    switch (s) {
    case SignalState::Red: return "red";
    case SignalState::Green: return "green";
    case SignalState::Yellow: return "yellow";
    }
    return "red";
}

inline SignalState signal_state_from_name(const std::string& name) {
    if (name == "red") return SignalState::Red;
    if (name == "green") return SignalState::Green;
    if (name == "yellow") return SignalState::Yellow;
    throw std::invalid_argument("unknown signal state \"" + name + "\"");
}

/// The cycle is fixed: red -> green -> yellow -> red.
inline constexpr SignalState next_signal_state(SignalState s) {
    switch (s) {
    case SignalState::Red: return SignalState::Green;
    case SignalState::Green: return SignalState::Yellow;
    case SignalState::Yellow: return SignalState::Red;
    }
    return SignalState::Red;
}

/// A directed lane segment. Offsets run from 0 at the start of the polyline
/// to `length` at its end; left/right are relative to the travel direction.
struct Lane {
    std::string id;
    std::vector<Vec2> polyline;
    double length = 0.0;
    std::string left;   // neighbor lane id, empty if none
    std::string right;  // neighbor lane id, empty if none
    std::vector<std::string> successors;

    bool has_left() const { return !left.empty(); }
    bool has_right() const { return !right.empty(); }
};

/// One lane's span through a junction box.
struct ConflictSpan {
    std::string lane;
    double begin = 0.0;
    double end = 0.0;
};

/// A set of mutually crossing lane spans. Two vehicles inside the same cell
/// on different member lanes are in collision.
struct ConflictCell {
    std::string id;
    std::vector<ConflictSpan> members;
};

/// Static timing of a signal head guarding the end of an approach lane.
/// The stop line sits `stop_margin_m` before the lane end; the span beyond
/// it belongs to the junction and is never a legal place to wait.
struct SignalTiming {
    SignalState initial_state = SignalState::Green;
    double red_s = 23.0;
    double green_s = 20.0;
    double yellow_s = 3.0;
    double initial_elapsed_s = 0.0;  // time already spent in the initial state
    double stop_margin_m = 0.0;

    double duration_of(SignalState s) const {
        switch (s) {
        case SignalState::Red: return red_s;
        case SignalState::Green: return green_s;
        case SignalState::Yellow: return yellow_s;
        }
        return red_s;
    }
};

inline double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        len += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    }
    return len;
}

/// Directed lane graph with junction conflict cells and signal timings,
/// keyed by approach lane.
struct RoadNetwork {
    std::vector<Lane> lanes;
    std::vector<ConflictCell> conflict_cells;
    std::map<std::string, SignalTiming> signals;  // approach lane id -> timing

    const Lane* find(const std::string& id) const {
        for (const Lane& l : lanes) {
            if (l.id == id) return &l;
        }
        return nullptr;
    }

    const Lane& at(const std::string& id) const {
        const Lane* l = find(id);
        if (!l) throw std::invalid_argument("unknown lane \"" + id + "\"");
        return *l;
    }

    bool has_signal(const std::string& lane_id) const { return signals.count(lane_id) > 0; }

    /// Offset of the stop line on a signalled approach lane.
    double stop_line_offset(const std::string& lane_id) const {
        return at(lane_id).length - signals.at(lane_id).stop_margin_m;
    }

    /// Conflict cells that include the given lane.
    std::vector<const ConflictCell*> cells_of(const std::string& lane_id) const {
        std::vector<const ConflictCell*> out;
        for (const ConflictCell& c : conflict_cells) {
            for (const ConflictSpan& m : c.members) {
                if (m.lane == lane_id) {
                    out.push_back(&c);
                    break;
                }
            }
        }
        return out;
    }

    void validate() const;
    nlohmann::json to_json() const;
    static RoadNetwork from_json(const nlohmann::json& j);

    /// The built-in town: a two-lane rectangular ring with two one-lane
    /// crossbars through the middle, signalized where they merge back in.
    static RoadNetwork default_town();
};

inline void RoadNetwork::validate() const {
    if (lanes.empty()) throw std::invalid_argument("network has no lanes");
    std::map<std::string, const Lane*> by_id;
    for (const Lane& l : lanes) {
        if (l.id.empty()) throw std::invalid_argument("lane with empty id");
        if (!by_id.emplace(l.id, &l).second) {
            throw std::invalid_argument("duplicate lane id \"" + l.id + "\"");
        }
        if (!(l.length > 0.0)) {
            throw std::invalid_argument("lane \"" + l.id + "\" has non-positive length");
        }
    }
    auto require = [&](const std::string& id, const std::string& context) -> const Lane& {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw std::invalid_argument(context + " references unknown lane \"" + id + "\"");
        }
        return *it->second;
    };
    for (const Lane& l : lanes) {
        if (l.has_left()) {
            const Lane& n = require(l.left, "lane \"" + l.id + "\" left neighbor");
            if (n.right != l.id) {
                throw std::invalid_argument("neighbor relation not symmetric between \"" + l.id +
                                            "\" and \"" + n.id + "\"");
            }
        }
        if (l.has_right()) {
            const Lane& n = require(l.right, "lane \"" + l.id + "\" right neighbor");
            if (n.left != l.id) {
                throw std::invalid_argument("neighbor relation not symmetric between \"" + l.id +
                                            "\" and \"" + n.id + "\"");
            }
        }
        for (const std::string& s : l.successors) require(s, "lane \"" + l.id + "\" successor");
    }
    for (const ConflictCell& c : conflict_cells) {
        if (c.members.size() < 2) {
            throw std::invalid_argument("conflict cell \"" + c.id + "\" references fewer than 2 lanes");
        }
        for (const ConflictSpan& m : c.members) {
            const Lane& l = require(m.lane, "conflict cell \"" + c.id + "\"");
            if (m.begin < 0.0 || m.end > l.length || m.begin >= m.end) {
                throw std::invalid_argument("conflict cell \"" + c.id + "\" span out of range on \"" +
                                            m.lane + "\"");
            }
        }
    }
    for (const auto& [lane_id, timing] : signals) {
        const Lane& approach = require(lane_id, "signal approach");
        if (timing.red_s <= 0.0 || timing.green_s <= 0.0 || timing.yellow_s <= 0.0) {
            throw std::invalid_argument("signal on \"" + lane_id + "\" has non-positive phase duration");
        }
        if (timing.initial_elapsed_s < 0.0 ||
            timing.initial_elapsed_s >= timing.duration_of(timing.initial_state)) {
            throw std::invalid_argument("signal on \"" + lane_id + "\" initial elapsed out of range");
        }
        if (timing.stop_margin_m < 0.0 || timing.stop_margin_m >= approach.length) {
            throw std::invalid_argument("signal on \"" + lane_id + "\" stop margin out of range");
        }
    }
}

inline nlohmann::json RoadNetwork::to_json() const {
    nlohmann::json j;
    j["lanes"] = nlohmann::json::array();
    for (const Lane& l : lanes) {
        nlohmann::json jl;
        jl["id"] = l.id;
        jl["length"] = l.length;
        nlohmann::json pts = nlohmann::json::array();
        for (const Vec2& p : l.polyline) pts.push_back({p.x, p.y});
        jl["polyline"] = pts;
        if (l.has_left()) jl["left"] = l.left;
        if (l.has_right()) jl["right"] = l.right;
        jl["successors"] = l.successors;
        j["lanes"].push_back(jl);
    }
    j["conflict_cells"] = nlohmann::json::array();
    for (const ConflictCell& c : conflict_cells) {
        nlohmann::json jc;
        jc["id"] = c.id;
        jc["members"] = nlohmann::json::array();
        for (const ConflictSpan& m : c.members) {
            jc["members"].push_back({{"lane", m.lane}, {"begin", m.begin}, {"end", m.end}});
        }
        j["conflict_cells"].push_back(jc);
    }
    j["signals"] = nlohmann::json::object();
    for (const auto& [lane_id, t] : signals) {
        j["signals"][lane_id] = {{"initial_state", std::string(signal_state_name(t.initial_state))},
                                 {"red_s", t.red_s},
                                 {"green_s", t.green_s},
                                 {"yellow_s", t.yellow_s},
                                 {"initial_elapsed_s", t.initial_elapsed_s},
                                 {"stop_margin_m", t.stop_margin_m}};
    }
    return j;
}

inline RoadNetwork RoadNetwork::from_json(const nlohmann::json& j) {
    RoadNetwork net;
    if (!j.contains("lanes") || !j["lanes"].is_array()) {
        throw std::invalid_argument("network json: missing \"lanes\" array");
    }
    for (const auto& jl : j["lanes"]) {
        Lane l;
        l.id = jl.at("id").get<std::string>();
        if (jl.contains("polyline")) {
            for (const auto& p : jl["polyline"]) {
                l.polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            }
        }
        l.length = jl.contains("length") ? jl["length"].get<double>() : polyline_length(l.polyline);
        if (jl.contains("left")) l.left = jl["left"].get<std::string>();
        if (jl.contains("right")) l.right = jl["right"].get<std::string>();
        if (jl.contains("successors")) {
            l.successors = jl["successors"].get<std::vector<std::string>>();
        }
        net.lanes.push_back(std::move(l));
    }
    if (j.contains("conflict_cells")) {
        for (const auto& jc : j["conflict_cells"]) {
            ConflictCell c;
            c.id = jc.at("id").get<std::string>();
            for (const auto& m : jc.at("members")) {
                c.members.push_back({m.at("lane").get<std::string>(), m.at("begin").get<double>(),
                                     m.at("end").get<double>()});
            }
            net.conflict_cells.push_back(std::move(c));
        }
    }
    if (j.contains("signals")) {
        for (const auto& [lane_id, jt] : j["signals"].items()) {
            SignalTiming t;
            if (jt.contains("initial_state")) {
                t.initial_state = signal_state_from_name(jt["initial_state"].get<std::string>());
            }
            if (jt.contains("red_s")) t.red_s = jt["red_s"].get<double>();
            if (jt.contains("green_s")) t.green_s = jt["green_s"].get<double>();
            if (jt.contains("yellow_s")) t.yellow_s = jt["yellow_s"].get<double>();
            if (jt.contains("initial_elapsed_s")) {
                t.initial_elapsed_s = jt["initial_elapsed_s"].get<double>();
            }
            if (jt.contains("stop_margin_m")) t.stop_margin_m = jt["stop_margin_m"].get<double>();
            net.signals[lane_id] = t;
        }
    }
    net.validate();
    return net;
}

inline RoadNetwork RoadNetwork::default_town() {
    RoadNetwork net;
    auto add_pair = [&](const std::string& base, Vec2 a, Vec2 b,
                        const std::string& succ_r, const std::string& succ_l) {
        double len = std::hypot(b.x - a.x, b.y - a.y);
        Lane r{base + "_r", {a, b}, len, base + "_l", "", {succ_r}};
        Lane l{base + "_l", {a, b}, len, "", base + "_r", {succ_l}};
        net.lanes.push_back(r);
        net.lanes.push_back(l);
    };

    // Counterclockwise rectangular ring, 300 x 200 m, split at mid-bottom and
    // mid-top where the crossbars meet it. "_r" is the outer lane.
    const Vec2 p0{0, 0}, p1{300, 0}, p2{300, 200}, p3{0, 200};
    const Vec2 mb{150, 0}, mt{150, 200};
    add_pair("bottom1", p0, mb, "bottom2_r", "bottom2_l");
    add_pair("bottom2", mb, p1, "right_r", "right_l");
    add_pair("right", p1, p2, "top1_r", "top1_l");
    add_pair("top1", p2, mt, "top2_r", "top2_l");
    add_pair("top2", mt, p3, "left_r", "left_l");
    add_pair("left", p3, p0, "bottom1_r", "bottom1_l");

    // One-lane crossbars through the middle. cross_up leaves the bottom road
    // at mb, cross_down leaves the top road at mt; each merges into the far
    // side of the ring.
    net.lanes.push_back(Lane{"cross_down", {mt, mb}, 200.0, "", "", {"bottom2_r"}});
    net.lanes.push_back(Lane{"cross_up", {mb, mt}, 200.0, "", "", {"top2_r"}});
    for (Lane& l : net.lanes) {
        if (l.id == "bottom1_r") l.successors = {"bottom2_r", "cross_up"};
        if (l.id == "top1_r") l.successors = {"top2_r", "cross_down"};
    }

    // Junction boxes: the last 10 m of each approach conflict pairwise with
    // the merging crossbar's last 10 m.
    auto box = [](const std::string& lane, double len) { return ConflictSpan{lane, len - 10.0, len}; };
    net.conflict_cells.push_back({"mb_outer", {box("bottom1_r", 150.0), box("cross_down", 200.0)}});
    net.conflict_cells.push_back({"mb_inner", {box("bottom1_l", 150.0), box("cross_down", 200.0)}});
    net.conflict_cells.push_back({"mt_outer", {box("top1_r", 150.0), box("cross_up", 200.0)}});
    net.conflict_cells.push_back({"mt_inner", {box("top1_l", 150.0), box("cross_up", 200.0)}});

    // Ring approaches run green while the crossbar approach holds red, and
    // vice versa (ring green 20 + yellow 3 == crossbar red 23). Stop lines
    // sit at the junction box edge, 10 m before each lane end.
    SignalTiming ring_timing{SignalState::Green, 23.0, 20.0, 3.0, 0.0, 10.0};
    SignalTiming cross_timing{SignalState::Red, 23.0, 20.0, 3.0, 0.0, 10.0};
    net.signals["bottom1_r"] = ring_timing;
    net.signals["bottom1_l"] = ring_timing;
    net.signals["cross_down"] = cross_timing;
    net.signals["top1_r"] = ring_timing;
    net.signals["top1_l"] = ring_timing;
    net.signals["cross_up"] = cross_timing;

    net.validate();
    return net;
}

} // namespace surreal
