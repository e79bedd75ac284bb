#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <surreal/actions.hpp>
#include <surreal/rng.hpp>
#include <surreal/road_network.hpp>

namespace surreal {

/// Stochastic traits shared by the scripted traffic participants.
struct BehaviorProfile {
    double p_run_red = 0.05;            // per approach, decided once when entering the zone
    double p_abrupt_lane_change = 0.02; // per decision, when a neighbor lane exists
    double desired_speed_mps = 6.0;
    double desired_speed_jitter = 0.25; // per-vehicle multiplicative spread, +/- fraction
    double following_gap_m = 12.0;
};

struct PedestrianPost {
    std::string lane;
    double offset = 0.0;
};

struct SimConfig {
    double dt_s = 0.1;
    double v_max_mps = 15.0;
    double accel_mps2 = 2.0;
    double decel_mps2 = 3.0;
    int lane_change_duration_ticks = 10;
    double episode_duration_s = 300.0;
    std::uint64_t seed = 1;

    double vehicle_length_m = 4.5;
    double pedestrian_radius_m = 0.3;

    int npc_count = 8;
    int pedestrian_count = 4;
    double p_begin_cross = 0.004;   // per pedestrian per tick while idle
    int cross_duration_ticks = 60;
    int cross_cooldown_ticks = 150;
    int npc_decision_period_ticks = 5;
    double min_spawn_spacing_m = 15.0;
    double spawn_ego_clearance_m = 40.0;

    std::string ego_start_lane = "bottom1_r";
    double ego_start_offset = 20.0;

    BehaviorProfile profile;
    std::vector<PedestrianPost> pedestrian_posts = {
        {"bottom2_r", 15.0}, {"bottom2_l", 15.0}, {"top2_r", 15.0}, {"top2_l", 15.0}};

    std::int64_t episode_ticks() const {
        return static_cast<std::int64_t>(episode_duration_s / dt_s + 0.5);
    }
};

/// How a vehicle resolved an upcoming red light. Decided once per approach,
/// reset when the vehicle moves on to the next lane.
enum class SignalResolve { Undecided, Obey, Run };

struct LaneChangeState {
    bool active = false;
    int ticks_remaining = 0;
    std::string target_lane;
};

struct VehicleState {
    int id = 0;
    std::string lane;
    double offset = 0.0;  // center position along the lane
    double speed = 0.0;
    double length = 4.5;
    bool is_ego = false;

    AtomicAction current_action = AtomicAction::MaintainSpeed;
    LaneChangeState lane_change;
    bool changed_lane_this_tick = false;
    SignalResolve signal_resolve = SignalResolve::Undecided;
    double desired_speed = 6.0;  // per-vehicle target, jittered at spawn
};

enum class PedestrianPhase { Idle, Crossing, Cooldown };

/// A pedestrian tied to a roadside post. While crossing it occupies the
/// roadway of its post's lane at the post offset.
struct PedestrianState {
    int id = 0;
    std::string lane;
    double offset = 0.0;
    PedestrianPhase phase = PedestrianPhase::Idle;
    int ticks_remaining = 0;

    bool crossing() const { return phase == PedestrianPhase::Crossing; }
};

struct SignalRuntime {
    SignalState state = SignalState::Green;
    std::int64_t ticks_in_state = 0;
};

struct WorldState {
    RoadNetwork net;
    SimConfig config;
    std::int64_t tick = 0;
    std::vector<VehicleState> vehicles;  // index 0 is the ego
    std::vector<PedestrianState> pedestrians;
    std::map<std::string, SignalRuntime> signals;  // approach lane -> runtime

    // Separate draw streams: traffic decisions, pedestrian crossings, and
    // ego destinations each consume their own generator, so under a fixed
    // seed the pedestrian schedule is identical across agent variants and
    // the traffic stream shifts only through genuine interaction.
    Rng env_rng;
    Rng ped_rng;
    Rng route_rng;

    // Entity pairs currently overlapping; a collision is reported only on
    // the tick the overlap begins.
    std::set<std::pair<std::string, std::string>> active_overlaps;

    bool has_destination = false;
    std::string dest_lane;
    double dest_offset = 0.0;
    int destinations_reached = 0;

    double sim_time_s() const { return static_cast<double>(tick) * config.dt_s; }

    VehicleState& ego() { return vehicles.front(); }
    const VehicleState& ego() const { return vehicles.front(); }

    SignalState signal_state(const std::string& approach_lane) const {
        auto it = signals.find(approach_lane);
        return it == signals.end() ? SignalState::Green : it->second.state;
    }

    /// World position of a point along a lane, by arclength interpolation.
    Vec2 position_of(const std::string& lane_id, double offset) const {
        const Lane& l = net.at(lane_id);
        if (l.polyline.size() < 2) return l.polyline.empty() ? Vec2{} : l.polyline.front();
        double remaining = std::clamp(offset, 0.0, l.length);
        for (std::size_t i = 1; i < l.polyline.size(); ++i) {
            const Vec2& a = l.polyline[i - 1];
            const Vec2& b = l.polyline[i];
            double seg = std::hypot(b.x - a.x, b.y - a.y);
            if (remaining <= seg || i + 1 == l.polyline.size()) {
                double t = seg > 0.0 ? remaining / seg : 0.0;
                return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
            }
            remaining -= seg;
        }
        return l.polyline.back();
    }
};

namespace detail {

inline std::int64_t phase_ticks(const SignalTiming& t, SignalState s, double dt) {
    return static_cast<std::int64_t>(t.duration_of(s) / dt + 0.5);
}

} // namespace detail

/// Builds the initial world: ego at its configured start, traffic placed on
/// evenly spaced candidate slots away from the ego, pedestrians at their
/// posts, signals at their initial phases.
inline WorldState make_world(RoadNetwork net, const SimConfig& config) {
    net.validate();
    WorldState w;
    w.net = std::move(net);
    w.config = config;
    w.env_rng = Rng(config.seed);
    w.ped_rng = Rng(config.seed ^ 0xD1B54A32D192ED03ULL);
    w.route_rng = Rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

    for (const auto& [lane_id, timing] : w.net.signals) {
        SignalRuntime rt;
        rt.state = timing.initial_state;
        rt.ticks_in_state = static_cast<std::int64_t>(timing.initial_elapsed_s / config.dt_s + 0.5);
        w.signals[lane_id] = rt;
    }

    VehicleState ego;
    ego.id = 0;
    ego.is_ego = true;
    ego.lane = config.ego_start_lane;
    ego.offset = config.ego_start_offset;
    ego.length = config.vehicle_length_m;
    ego.speed = 0.0;
    ego.desired_speed = config.profile.desired_speed_mps;
    w.net.at(ego.lane);  // throws on a bad start lane
    w.vehicles.push_back(ego);

    // Candidate slots are fixed by the network and spacing, so the only
    // randomness in traffic placement is which slots get drawn.
    struct Slot {
        std::string lane;
        double offset;
    };
    std::vector<Slot> slots;
    Vec2 ego_pos = w.position_of(ego.lane, ego.offset);
    for (const Lane& l : w.net.lanes) {
        for (double off = 10.0; off <= l.length - 10.0; off += config.min_spawn_spacing_m) {
            if (l.id == ego.lane && std::abs(off - ego.offset) < config.spawn_ego_clearance_m) {
                continue;
            }
            Vec2 p = w.position_of(l.id, off);
            if (std::hypot(p.x - ego_pos.x, p.y - ego_pos.y) < config.spawn_ego_clearance_m) {
                continue;
            }
            slots.push_back({l.id, off});
        }
    }
    int to_place = std::min<int>(config.npc_count, static_cast<int>(slots.size()));
    for (int i = 0; i < to_place; ++i) {
        std::size_t pick = w.env_rng.uniform_index(slots.size());
        Slot s = slots[pick];
        slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(pick));
        VehicleState v;
        v.id = i + 1;
        v.lane = s.lane;
        v.offset = s.offset;
        v.length = config.vehicle_length_m;
        double jitter = 1.0 + config.profile.desired_speed_jitter * (2.0 * w.env_rng.uniform() - 1.0);
        v.desired_speed = config.profile.desired_speed_mps * jitter;
        v.speed = v.desired_speed * 0.5;
        w.vehicles.push_back(v);
    }

    for (int i = 0; i < config.pedestrian_count && !config.pedestrian_posts.empty(); ++i) {
        const PedestrianPost& post =
            config.pedestrian_posts[static_cast<std::size_t>(i) % config.pedestrian_posts.size()];
        PedestrianState p;
        p.id = i;
        p.lane = post.lane;
        p.offset = post.offset;
        w.net.at(p.lane);
        w.pedestrians.push_back(p);
    }

    return w;
}

} // namespace surreal
