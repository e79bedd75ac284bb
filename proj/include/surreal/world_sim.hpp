#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <surreal/actions.hpp>
#include <surreal/routing.hpp>
#include <surreal/world.hpp>

namespace surreal {

enum class CollisionKind { Leading, Lateral, Pedestrian };

inline constexpr std::string_view collision_kind_name(CollisionKind k) {
    switch (k) {
    case CollisionKind::Leading: return "leading";
    case CollisionKind::Lateral: return "lateral";
    case CollisionKind::Pedestrian: return "pedestrian";
    }
    return "leading";
}

struct CollisionEvent {
    std::int64_t tick = 0;
    double sim_time_s = 0.0;
    CollisionKind kind = CollisionKind::Leading;
    std::string entity_a;  // "vehicle:<id>" or "pedestrian:<id>", a < b
    std::string entity_b;
    std::string lane;
    bool ego_involved = false;
};

struct StepResult {
    std::vector<CollisionEvent> collisions;
    bool ego_action_degraded = false;
    double ego_advance = 0.0;
};

namespace detail {

inline std::string vehicle_key(int id) { return "vehicle:" + std::to_string(id); }
inline std::string pedestrian_key(int id) { return "pedestrian:" + std::to_string(id); }

/// Exact constant-acceleration update over one tick, clamped to [0, v_max].
/// Returns {new_speed, distance_advanced}.
inline std::pair<double, double> integrate_speed(double v0, double a, double dt, double v_max) {
    if (a < 0.0) {
        double t_stop = v0 / -a;
        if (t_stop >= dt) {
            return {v0 + a * dt, v0 * dt + 0.5 * a * dt * dt};
        }
        return {0.0, 0.5 * v0 * t_stop};
    }
    if (a > 0.0) {
        double t_cap = (v_max - v0) / a;
        if (t_cap >= dt) {
            return {v0 + a * dt, v0 * dt + 0.5 * a * dt * dt};
        }
        double adv = v0 * t_cap + 0.5 * a * t_cap * t_cap + v_max * (dt - t_cap);
        return {v_max, adv};
    }
    return {v0, v0 * dt};
}

inline double accel_of(AtomicAction a, const SimConfig& cfg) {
    switch (a) {
    case AtomicAction::Accelerate: return cfg.accel_mps2;
    case AtomicAction::Decelerate:
    case AtomicAction::Stop: return -cfg.decel_mps2;
    default: return 0.0;
    }
}

/// Bumper-to-bumper gap to the nearest vehicle ahead of `self`, looking
/// along its lane and into each successor. Negative means overlap.
struct LeadInfo {
    bool found = false;
    double gap = 0.0;
    double lead_speed = 0.0;
};

inline LeadInfo find_lead(const WorldState& w, const VehicleState& self) {
    const Lane& lane = w.net.at(self.lane);
    LeadInfo best;
    auto consider = [&](double center_gap, const VehicleState& other) {
        double gap = center_gap - 0.5 * (self.length + other.length);
        if (!best.found || gap < best.gap) {
            best.found = true;
            best.gap = gap;
            best.lead_speed = other.speed;
        }
    };
    for (const VehicleState& v : w.vehicles) {
        if (v.id == self.id) continue;
        if (v.lane == self.lane && v.offset >= self.offset) {
            consider(v.offset - self.offset, v);
        }
    }
    for (const std::string& succ : lane.successors) {
        for (const VehicleState& v : w.vehicles) {
            if (v.id == self.id || v.lane != succ) continue;
            consider((lane.length - self.offset) + v.offset, v);
        }
    }
    return best;
}

/// Distance from `self`'s front bumper to the nearest pedestrian crossing
/// ahead in its lane or the immediate successor.
inline std::optional<double> crossing_pedestrian_ahead(const WorldState& w,
                                                       const VehicleState& self) {
    const Lane& lane = w.net.at(self.lane);
    std::optional<double> best;
    auto consider = [&](double center_gap) {
        double d = center_gap - 0.5 * self.length;
        if (d < 0.0) return;
        if (!best || d < *best) best = d;
    };
    for (const PedestrianState& p : w.pedestrians) {
        if (!p.crossing()) continue;
        if (p.lane == self.lane && p.offset >= self.offset) {
            consider(p.offset - self.offset);
        }
        for (const std::string& succ : lane.successors) {
            if (p.lane == succ) consider((lane.length - self.offset) + p.offset);
        }
    }
    return best;
}

} // namespace detail

/// Scripted decision rule for background traffic. Consumes `w.env_rng`; the
/// draw pattern is a fixed function of the world state, so replaying the
/// same seed reproduces the same traffic.
inline AtomicAction npc_policy(WorldState& w, VehicleState& v) {
    const SimConfig& cfg = w.config;
    const BehaviorProfile& prof = cfg.profile;
    const Lane& lane = w.net.at(v.lane);
    bool signalled = w.net.has_signal(v.lane);
    double front_to_line =
        (signalled ? w.net.stop_line_offset(v.lane) : lane.length) - v.offset - 0.5 * v.length;

    // Entering a signalled approach settles once whether this driver will
    // honor a red there.
    if (signalled && front_to_line <= 25.0 && v.signal_resolve == SignalResolve::Undecided) {
        v.signal_resolve = w.env_rng.bernoulli(prof.p_run_red) ? SignalResolve::Run
                                                               : SignalResolve::Obey;
    }

    // The abrupt-swerve draw happens every decision so the stream position
    // does not depend on lane layout.
    bool abrupt = w.env_rng.bernoulli(prof.p_abrupt_lane_change);
    if (abrupt && v.speed >= 1.0 && !v.lane_change.active) {
        bool has_l = lane.has_left();
        bool has_r = lane.has_right();
        if (has_l && has_r) {
            return w.env_rng.uniform_index(2) == 0 ? AtomicAction::LaneChangeLeft
                                                   : AtomicAction::LaneChangeRight;
        }
        if (has_l) return AtomicAction::LaneChangeLeft;
        if (has_r) return AtomicAction::LaneChangeRight;
    }

    if (signalled && v.signal_resolve != SignalResolve::Run &&
        w.signal_state(v.lane) == SignalState::Red) {
        double envelope = v.speed * v.speed / (2.0 * cfg.decel_mps2) + v.speed * cfg.dt_s + 2.0;
        if (front_to_line >= 0.0 && front_to_line <= envelope) return AtomicAction::Stop;
    }

    if (auto ped = detail::crossing_pedestrian_ahead(w, v)) {
        if (*ped < 4.0) return AtomicAction::Stop;
        if (*ped < prof.following_gap_m) return AtomicAction::Decelerate;
    }

    detail::LeadInfo lead = detail::find_lead(w, v);
    double brake_gap = std::max(prof.following_gap_m,
                                v.speed * v.speed / (2.0 * cfg.decel_mps2) + 2.0);
    if (lead.found && lead.gap >= 0.0 && lead.gap < brake_gap) {
        return AtomicAction::Decelerate;
    }

    if (v.speed < v.desired_speed - 0.3) return AtomicAction::Accelerate;
    if (v.speed > v.desired_speed + 0.3) return AtomicAction::Decelerate;
    return AtomicAction::MaintainSpeed;
}

/// Recomputes the set of overlapping entity pairs and reports the pairs
/// that were separated last tick. `w.active_overlaps` is updated in place.
inline std::vector<CollisionEvent> detect_collisions(WorldState& w) {
    using Pair = std::pair<std::string, std::string>;
    struct Hit {
        Pair key;
        CollisionKind kind;
        std::string lane;
    };
    std::vector<Hit> hits;
    auto add = [&](std::string a, std::string b, CollisionKind kind, const std::string& lane) {
        if (b < a) std::swap(a, b);
        hits.push_back({{a, b}, kind, lane});
    };

    for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
        for (std::size_t j = i + 1; j < w.vehicles.size(); ++j) {
            const VehicleState& a = w.vehicles[i];
            const VehicleState& b = w.vehicles[j];
            if (a.lane != b.lane) continue;
            if (std::abs(a.offset - b.offset) < 0.5 * (a.length + b.length)) {
                CollisionKind kind = (a.changed_lane_this_tick || b.changed_lane_this_tick)
                                         ? CollisionKind::Lateral
                                         : CollisionKind::Leading;
                add(detail::vehicle_key(a.id), detail::vehicle_key(b.id), kind, a.lane);
            }
        }
    }

    for (const VehicleState& v : w.vehicles) {
        for (const PedestrianState& p : w.pedestrians) {
            if (!p.crossing() || p.lane != v.lane) continue;
            if (std::abs(v.offset - p.offset) < 0.5 * v.length + w.config.pedestrian_radius_m) {
                add(detail::vehicle_key(v.id), detail::pedestrian_key(p.id),
                    CollisionKind::Pedestrian, v.lane);
            }
        }
    }

    for (const ConflictCell& cell : w.net.conflict_cells) {
        for (std::size_t i = 0; i < cell.members.size(); ++i) {
            for (std::size_t j = i + 1; j < cell.members.size(); ++j) {
                const ConflictSpan& ma = cell.members[i];
                const ConflictSpan& mb = cell.members[j];
                for (const VehicleState& a : w.vehicles) {
                    if (a.lane != ma.lane || a.offset < ma.begin || a.offset > ma.end) continue;
                    for (const VehicleState& b : w.vehicles) {
                        if (b.lane != mb.lane || b.offset < mb.begin || b.offset > mb.end) continue;
                        add(detail::vehicle_key(a.id), detail::vehicle_key(b.id),
                            CollisionKind::Lateral, ma.lane);
                    }
                }
            }
        }
    }

    std::set<Pair> current;
    std::vector<CollisionEvent> events;
    for (const Hit& h : hits) {
        if (!current.insert(h.key).second) continue;  // cell + same-lane double report
        if (w.active_overlaps.count(h.key)) continue; // still the same contact
        CollisionEvent e;
        e.tick = w.tick;
        e.sim_time_s = w.sim_time_s();
        e.kind = h.kind;
        e.entity_a = h.key.first;
        e.entity_b = h.key.second;
        e.lane = h.lane;
        e.ego_involved = h.key.first == "vehicle:0" || h.key.second == "vehicle:0";
        events.push_back(e);
    }
    w.active_overlaps = std::move(current);
    return events;
}

/// Advances the world by one tick. `ego_action` is the ego command held for
/// this tick; everything else is simulated. The update order is fixed:
/// pedestrians, traffic decisions, lane-change bookkeeping, motion, signal
/// phases, collision detection.
inline StepResult step(WorldState& w, AtomicAction ego_action) {
    const SimConfig& cfg = w.config;
    StepResult result;

    for (VehicleState& v : w.vehicles) v.changed_lane_this_tick = false;

    for (PedestrianState& p : w.pedestrians) {
        switch (p.phase) {
        case PedestrianPhase::Idle:
            if (w.ped_rng.bernoulli(cfg.p_begin_cross)) {
                p.phase = PedestrianPhase::Crossing;
                p.ticks_remaining = cfg.cross_duration_ticks;
            }
            break;
        case PedestrianPhase::Crossing:
            if (--p.ticks_remaining <= 0) {
                p.phase = PedestrianPhase::Cooldown;
                p.ticks_remaining = cfg.cross_cooldown_ticks;
            }
            break;
        case PedestrianPhase::Cooldown:
            if (--p.ticks_remaining <= 0) p.phase = PedestrianPhase::Idle;
            break;
        }
    }

    if (cfg.npc_decision_period_ticks > 0 && w.tick % cfg.npc_decision_period_ticks == 0) {
        for (VehicleState& v : w.vehicles) {
            if (!v.is_ego) v.current_action = npc_policy(w, v);
        }
    }
    w.ego().current_action = ego_action;

    for (VehicleState& v : w.vehicles) {
        if (v.lane_change.active || !is_lane_change(v.current_action)) continue;
        const Lane& lane = w.net.at(v.lane);
        const std::string& target =
            v.current_action == AtomicAction::LaneChangeLeft ? lane.left : lane.right;
        if (target.empty()) {
            v.current_action = AtomicAction::MaintainSpeed;
            if (v.is_ego) result.ego_action_degraded = true;
            continue;
        }
        v.lane_change.active = true;
        v.lane_change.ticks_remaining = std::max(1, cfg.lane_change_duration_ticks);
        v.lane_change.target_lane = target;
    }

    for (VehicleState& v : w.vehicles) {
        double a = detail::accel_of(v.current_action, cfg);
        auto [v1, adv] = detail::integrate_speed(v.speed, a, cfg.dt_s, cfg.v_max_mps);
        v.speed = v1;
        v.offset += adv;
        if (v.is_ego) result.ego_advance = adv;

        while (v.offset > w.net.at(v.lane).length) {
            const Lane& lane = w.net.at(v.lane);
            if (lane.successors.empty()) {
                v.offset = lane.length;
                v.speed = 0.0;
                break;
            }
            std::string next;
            if (v.is_ego) {
                next = lane.successors.front();
                if (w.has_destination) {
                    auto g = route_costs(w.net, w.dest_lane, w.dest_offset);
                    double best = kUnreachable;
                    for (const std::string& s : lane.successors) {
                        auto it = g.find(s);
                        if (it != g.end() && it->second < best) {
                            best = it->second;
                            next = s;
                        }
                    }
                }
            } else {
                next = lane.successors[w.env_rng.uniform_index(lane.successors.size())];
            }
            v.offset -= lane.length;
            v.lane = next;
            v.signal_resolve = SignalResolve::Undecided;
            v.lane_change.active = false;  // the geometry it targeted is gone
        }
    }

    for (VehicleState& v : w.vehicles) {
        if (!v.lane_change.active) continue;
        if (--v.lane_change.ticks_remaining > 0) continue;
        v.lane = v.lane_change.target_lane;
        v.lane_change.active = false;
        v.changed_lane_this_tick = true;
        v.signal_resolve = SignalResolve::Undecided;
    }

    for (auto& [lane_id, rt] : w.signals) {
        const SignalTiming& timing = w.net.signals.at(lane_id);
        if (++rt.ticks_in_state >= detail::phase_ticks(timing, rt.state, cfg.dt_s)) {
            rt.state = next_signal_state(rt.state);
            rt.ticks_in_state = 0;
        }
    }

    result.collisions = detect_collisions(w);
    ++w.tick;
    return result;
}

} // namespace surreal
