#pragma once

#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <surreal/road_network.hpp>
#include <surreal/world.hpp>

namespace surreal {

inline constexpr double kLaneChangeRouteCost = 8.0;
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Shortest travel cost from the START of each lane to the destination
/// point. Following a lane costs its length, moving to a parallel neighbor
/// costs a flat penalty.
inline std::map<std::string, double> route_costs(const RoadNetwork& net,
                                                 const std::string& dest_lane,
                                                 double dest_offset) {
    std::map<std::string, std::vector<std::pair<std::string, double>>> rev;
    for (const Lane& l : net.lanes) {
        for (const std::string& s : l.successors) rev[s].push_back({l.id, l.length});
        if (l.has_left()) rev[l.left].push_back({l.id, kLaneChangeRouteCost});
        if (l.has_right()) rev[l.right].push_back({l.id, kLaneChangeRouteCost});
    }
    std::map<std::string, double> g;
    for (const Lane& l : net.lanes) g[l.id] = kUnreachable;
    using Item = std::pair<double, std::string>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    g[net.at(dest_lane).id] = dest_offset;
    pq.push({dest_offset, dest_lane});
    while (!pq.empty()) {
        auto [d, id] = pq.top();
        pq.pop();
        if (d > g[id]) continue;
        for (const auto& [prev, w] : rev[id]) {
            double nd = d + w;
            if (nd < g[prev]) {
                g[prev] = nd;
                pq.push({nd, prev});
            }
        }
    }
    return g;
}

enum class RouteMove { Continue, Left, Right };

struct RouteHint {
    double distance = kUnreachable;
    RouteMove move = RouteMove::Continue;
    std::string next_lane;  // successor to take when move == Continue
};

namespace detail {

/// Remaining cost when staying in `lane` from `offset` onward.
inline std::pair<double, std::string> continue_cost(const RoadNetwork& net,
                                                    const std::map<std::string, double>& g,
                                                    const std::string& lane_id, double offset,
                                                    const std::string& dest_lane,
                                                    double dest_offset) {
    const Lane& l = net.at(lane_id);
    double best = kUnreachable;
    std::string best_succ;
    if (lane_id == dest_lane && offset <= dest_offset) {
        best = dest_offset - offset;
    }
    for (const std::string& s : l.successors) {
        auto it = g.find(s);
        if (it == g.end() || it->second == kUnreachable) continue;
        double c = (l.length - offset) + it->second;
        if (c < best) {
            best = c;
            best_succ = s;
        }
    }
    return {best, best_succ};
}

} // namespace detail

/// Best move from a lane position toward the destination. Prefers staying in
/// lane on ties; a lane change is suggested only when strictly cheaper.
inline RouteHint route_hint(const RoadNetwork& net, const std::map<std::string, double>& g,
                            const std::string& lane_id, double offset,
                            const std::string& dest_lane, double dest_offset) {
    const Lane& l = net.at(lane_id);
    RouteHint hint;
    auto [cont, succ] = detail::continue_cost(net, g, lane_id, offset, dest_lane, dest_offset);
    hint.distance = cont;
    hint.move = RouteMove::Continue;
    hint.next_lane = succ;
    auto consider_neighbor = [&](const std::string& nb, RouteMove move) {
        if (nb.empty()) return;
        auto [c, _] = detail::continue_cost(net, g, nb, offset, dest_lane, dest_offset);
        if (c == kUnreachable) return;
        double total = kLaneChangeRouteCost + c;
        if (total < hint.distance) {
            hint.distance = total;
            hint.move = move;
            hint.next_lane = nb;
        }
    };
    consider_neighbor(l.left, RouteMove::Left);
    consider_neighbor(l.right, RouteMove::Right);
    return hint;
}

/// Remaining route distance from a lane position to the world's current
/// destination, or infinity when none is set or reachable.
inline double route_distance(const WorldState& w, const std::string& lane_id, double offset) {
    if (!w.has_destination) return kUnreachable;
    auto g = route_costs(w.net, w.dest_lane, w.dest_offset);
    return route_hint(w.net, g, lane_id, offset, w.dest_lane, w.dest_offset).distance;
}

/// Lanes reachable from `start` by driving forward or changing lanes.
inline std::set<std::string> reachable_lanes(const RoadNetwork& net, const std::string& start) {
    std::set<std::string> seen;
    std::vector<std::string> stack{start};
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) continue;
        const Lane& l = net.at(id);
        for (const std::string& s : l.successors) stack.push_back(s);
        if (l.has_left()) stack.push_back(l.left);
        if (l.has_right()) stack.push_back(l.right);
    }
    return seen;
}

/// Draws a fresh destination for the ego from the reachable part of the
/// network. Nearby points on the current lane are rejected so a destination
/// always requires actual driving.
inline void assign_next_destination(WorldState& w) {
    const VehicleState& ego = w.ego();
    std::vector<std::string> candidates;
    for (const std::string& id : reachable_lanes(w.net, ego.lane)) candidates.push_back(id);
    if (candidates.empty()) throw std::runtime_error("no lanes reachable from the ego lane");
    for (int attempt = 0; attempt < 16; ++attempt) {
        const Lane& l = w.net.at(candidates[w.route_rng.uniform_index(candidates.size())]);
        if (l.length <= 4.0) continue;
        double off = w.route_rng.uniform(2.0, l.length - 2.0);
        if (l.id == ego.lane && std::abs(off - ego.offset) < 5.0) continue;
        w.has_destination = true;
        w.dest_lane = l.id;
        w.dest_offset = off;
        return;
    }
    throw std::runtime_error("could not draw a destination; network too small or disconnected");
}

/// True when the ego sits within the arrival window of its destination.
inline bool at_destination(const WorldState& w) {
    if (!w.has_destination) return false;
    const VehicleState& ego = w.ego();
    return ego.lane == w.dest_lane && std::abs(ego.offset - w.dest_offset) < 2.0;
}

} // namespace surreal
