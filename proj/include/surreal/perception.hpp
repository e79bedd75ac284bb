#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <surreal/routing.hpp>
#include <surreal/world.hpp>

namespace surreal {

inline constexpr double kDefaultHorizon = 100.0;

struct LeadVehicle {
    double distance = 0.0;  // bumper to bumper
    double speed = 0.0;
};

struct ScenePedestrian {
    double distance = 0.0;  // from the ego front bumper
    bool crossing = false;
};

struct SceneSignal {
    SignalState state = SignalState::Green;
    double distance = 0.0;  // front bumper to stop line
};

struct SideGap {
    double rear = 0.0;   // clear space behind, bumper to bumper
    double front = 0.0;  // clear space ahead, bumper to bumper
};

/// Ego-centric snapshot of everything within the sensing horizon, measured
/// along the lane graph. Optional fields are present iff the referent exists
/// within the horizon.
struct AtomicScene {
    std::int64_t tick = 0;
    std::string lane;
    bool has_left_neighbor = false;
    bool has_right_neighbor = false;
    double ego_speed = 0.0;
    std::optional<LeadVehicle> lead_vehicle;
    std::optional<ScenePedestrian> nearest_pedestrian;
    std::optional<SceneSignal> signal;
    std::optional<double> intersection_distance;
    std::optional<SideGap> left_gap;   // present iff a left lane exists
    std::optional<SideGap> right_gap;  // present iff a right lane exists
    double destination_distance = 0.0;
    // Present iff a destination is set and changing lanes is strictly
    // cheaper than continuing; never Continue.
    std::optional<RouteMove> route_move;
    double horizon = kDefaultHorizon;
};

namespace detail {

/// The lanes the ego will traverse, in order, far enough to cover the
/// horizon. Follows the route-preferred successor at each boundary.
inline std::vector<std::string> forward_path(const WorldState& w, double horizon) {
    std::vector<std::string> path{w.ego().lane};
    std::map<std::string, double> g;
    if (w.has_destination) g = route_costs(w.net, w.dest_lane, w.dest_offset);
    double covered = w.net.at(w.ego().lane).length - w.ego().offset;
    while (covered < horizon && path.size() < 16) {
        const Lane& lane = w.net.at(path.back());
        if (lane.successors.empty()) break;
        std::string next = lane.successors.front();
        if (w.has_destination) {
            double best = kUnreachable;
            for (const std::string& s : lane.successors) {
                auto it = g.find(s);
                if (it != g.end() && it->second < best) {
                    best = it->second;
                    next = s;
                }
            }
        }
        path.push_back(next);
        covered += w.net.at(next).length;
    }
    return path;
}

} // namespace detail

/// Builds the scene for the current world. Pure: consumes no RNG, mutates
/// nothing.
inline AtomicScene observe(const WorldState& w, double horizon = kDefaultHorizon) {
    const VehicleState& ego = w.ego();
    const Lane& ego_lane = w.net.at(ego.lane);
    AtomicScene s;
    s.tick = w.tick;
    s.lane = ego.lane;
    s.has_left_neighbor = ego_lane.has_left();
    s.has_right_neighbor = ego_lane.has_right();
    s.ego_speed = ego.speed;
    s.horizon = horizon;

    std::vector<std::string> path = detail::forward_path(w, horizon);
    double half_len = 0.5 * ego.length;

    // Center-to-center path distance from the ego to (lane, offset), or
    // nothing when the point is not ahead on the walked path.
    auto along_path = [&](const std::string& lane_id, double offset) -> std::optional<double> {
        std::optional<double> best;
        double start_of_lane = -ego.offset;  // path distance to the start of path[i]
        for (const std::string& id : path) {
            if (id == lane_id) {
                double d = start_of_lane + offset;
                if (d >= 0.0 && (!best || d < *best)) best = d;
            }
            start_of_lane += w.net.at(id).length;
        }
        return best;
    };

    for (const VehicleState& v : w.vehicles) {
        if (v.id == ego.id) continue;
        auto d = along_path(v.lane, v.offset);
        if (!d) continue;
        double gap = *d - half_len - 0.5 * v.length;
        if (gap < 0.0) gap = 0.0;
        if (gap > horizon) continue;
        if (!s.lead_vehicle || gap < s.lead_vehicle->distance) {
            s.lead_vehicle = LeadVehicle{gap, v.speed};
        }
    }

    for (const PedestrianState& p : w.pedestrians) {
        auto d = along_path(p.lane, p.offset);
        if (!d) continue;
        double dist = *d - half_len;
        if (dist < 0.0) dist = 0.0;
        if (dist > horizon) continue;
        if (!s.nearest_pedestrian || dist < s.nearest_pedestrian->distance) {
            s.nearest_pedestrian = ScenePedestrian{dist, p.crossing()};
        }
    }

    // First head whose stop line is still ahead of the front bumper; a head
    // already passed is a commitment, not an obligation.
    double end_of_lane = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Lane& lane = w.net.at(path[i]);
        end_of_lane += (i == 0) ? (lane.length - ego.offset) : lane.length;
        if (!s.signal && w.net.has_signal(lane.id)) {
            double dist = end_of_lane - w.net.signals.at(lane.id).stop_margin_m - half_len;
            if (dist >= 0.0 && dist <= horizon) {
                s.signal = SceneSignal{w.signal_state(lane.id), dist};
            }
        }
    }

    for (std::size_t i = 0; i < path.size(); ++i) {
        const Lane& lane = w.net.at(path[i]);
        for (const ConflictCell* cell : w.net.cells_of(lane.id)) {
            for (const ConflictSpan& m : cell->members) {
                if (m.lane != lane.id) continue;
                std::optional<double> d;
                if (i == 0 && ego.offset >= m.begin && ego.offset <= m.end) {
                    d = 0.0;  // already inside the junction box
                } else {
                    d = along_path(lane.id, m.begin);
                    if (d) {
                        *d -= half_len;
                        if (*d < 0.0) *d = 0.0;
                    }
                }
                if (!d || *d > horizon) continue;
                if (!s.intersection_distance || *d < *s.intersection_distance) {
                    s.intersection_distance = *d;
                }
            }
        }
    }

    auto side_gap = [&](const std::string& neighbor) -> SideGap {
        SideGap g{horizon, horizon};
        for (const VehicleState& v : w.vehicles) {
            if (v.lane != neighbor) continue;
            double margin = half_len + 0.5 * v.length;
            if (v.offset >= ego.offset) {
                double front = std::max(0.0, v.offset - ego.offset - margin);
                g.front = std::min(g.front, front);
            } else {
                double rear = std::max(0.0, ego.offset - v.offset - margin);
                g.rear = std::min(g.rear, rear);
            }
        }
        return g;
    };
    if (ego_lane.has_left()) s.left_gap = side_gap(ego_lane.left);
    if (ego_lane.has_right()) s.right_gap = side_gap(ego_lane.right);

    if (w.has_destination) {
        auto g = route_costs(w.net, w.dest_lane, w.dest_offset);
        RouteHint hint = route_hint(w.net, g, ego.lane, ego.offset, w.dest_lane, w.dest_offset);
        s.destination_distance = hint.distance == kUnreachable ? 0.0 : hint.distance;
        if (hint.distance != kUnreachable && hint.move != RouteMove::Continue) {
            s.route_move = hint.move;
        }
    }
    return s;
}

inline std::string format_1dp(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

/// Deterministic natural-language rendering of a scene. Same scene, same
/// bytes.
inline std::string render_scene_text(const AtomicScene& s) {
    std::string out;
    out += "You are in lane " + s.lane + ", traveling at " + format_1dp(s.ego_speed) + " m/s.\n";
    if (s.lead_vehicle) {
        out += "There is a vehicle " + format_1dp(s.lead_vehicle->distance) +
               " meters ahead moving at " + format_1dp(s.lead_vehicle->speed) + " m/s.\n";
    }
    if (s.nearest_pedestrian) {
        if (s.nearest_pedestrian->crossing) {
            out += "A pedestrian is crossing the road " +
                   format_1dp(s.nearest_pedestrian->distance) + " meters ahead.\n";
        } else {
            out += "A pedestrian is standing at the roadside " +
                   format_1dp(s.nearest_pedestrian->distance) + " meters ahead.\n";
        }
    }
    if (!s.lead_vehicle && !s.nearest_pedestrian) {
        out += "There are no vehicles or pedestrians nearby.\n";
    }
    if (s.signal) {
        out += "The traffic light ahead is " + std::string(signal_state_name(s.signal->state)) +
               ", " + format_1dp(s.signal->distance) + " meters away.\n";
    }
    if (s.intersection_distance) {
        out += "An intersection begins " + format_1dp(*s.intersection_distance) +
               " meters ahead.\n";
    }
    if (s.left_gap) {
        out += "Left lane clear space: " + format_1dp(s.left_gap->rear) + " meters behind, " +
               format_1dp(s.left_gap->front) + " meters ahead.\n";
    } else {
        out += "There is no left lane.\n";
    }
    if (s.right_gap) {
        out += "Right lane clear space: " + format_1dp(s.right_gap->rear) + " meters behind, " +
               format_1dp(s.right_gap->front) + " meters ahead.\n";
    } else {
        out += "There is no right lane.\n";
    }
    out += "Your destination is " + format_1dp(s.destination_distance) +
           " meters ahead along the route.\n";
    if (s.route_move) {
        out += std::string("Your route continues in the ") +
               (*s.route_move == RouteMove::Left ? "left" : "right") + " lane.\n";
    }
    return out;
}

inline nlohmann::json scene_to_json(const AtomicScene& s) {
    nlohmann::json j;
    j["tick"] = s.tick;
    j["lane"] = s.lane;
    j["has_left"] = s.has_left_neighbor;
    j["has_right"] = s.has_right_neighbor;
    j["ego_speed"] = s.ego_speed;
    j["destination_distance"] = s.destination_distance;
    if (s.lead_vehicle) {
        j["lead"] = {{"distance", s.lead_vehicle->distance}, {"speed", s.lead_vehicle->speed}};
    }
    if (s.nearest_pedestrian) {
        j["pedestrian"] = {{"distance", s.nearest_pedestrian->distance},
                           {"crossing", s.nearest_pedestrian->crossing}};
    }
    if (s.signal) {
        j["signal"] = {{"state", std::string(signal_state_name(s.signal->state))},
                       {"distance", s.signal->distance}};
    }
    if (s.intersection_distance) j["intersection_distance"] = *s.intersection_distance;
    if (s.left_gap) j["left_gap"] = {{"rear", s.left_gap->rear}, {"front", s.left_gap->front}};
    if (s.right_gap) j["right_gap"] = {{"rear", s.right_gap->rear}, {"front", s.right_gap->front}};
    if (s.route_move) j["route_move"] = *s.route_move == RouteMove::Left ? "left" : "right";
    return j;
}

/// One-line summary for memory records and logs.
inline std::string scene_digest(const AtomicScene& s) {
    std::string d = "lane=" + s.lane + " v=" + format_1dp(s.ego_speed);
    if (s.lead_vehicle) d += " lead=" + format_1dp(s.lead_vehicle->distance);
    if (s.nearest_pedestrian && s.nearest_pedestrian->crossing) {
        d += " ped=" + format_1dp(s.nearest_pedestrian->distance);
    }
    if (s.signal && s.signal->state == SignalState::Red) {
        d += " red=" + format_1dp(s.signal->distance);
    }
    return d;
}

} // namespace surreal
