#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <surreal/actions.hpp>
#include <surreal/perception.hpp>

namespace surreal {

struct SafetyConfig {
    double mandatory_stop_distance_m = 10.0;
    double advisory_decel_distance_m = 20.0;
    double min_moving_gap_m = 1.0;
    double intersection_slow_speed_mps = 5.0;
    bool red_light_stop = true;

    // Needed by the red-light braking envelope; kept in sync with the
    // simulation's deceleration and tick length by the config loader.
    double brake_decel_mps2 = 3.0;
    double tick_seconds = 0.1;

    void validate() const {
        if (!(mandatory_stop_distance_m < advisory_decel_distance_m)) {
            throw std::invalid_argument("mandatory stop distance must be below advisory distance");
        }
        if (!(min_moving_gap_m > 0.0)) {
            throw std::invalid_argument("min moving gap must be positive");
        }
        if (!(brake_decel_mps2 > 0.0) || !(tick_seconds > 0.0)) {
            throw std::invalid_argument("brake decel and tick length must be positive");
        }
    }
};

struct Advisory {
    std::string tag;
    AtomicAction suggested = AtomicAction::Decelerate;
};

struct SafetyVerdict {
    std::optional<AtomicAction> mandatory;  // tier 1; Stop when present
    std::vector<Advisory> advisories;       // tier 2, never forced
    std::vector<std::string> triggered_rules;

    bool empty() const { return !mandatory && advisories.empty(); }
};

/// Worst-case distance covered before the vehicle can be standing still:
/// one tick of reaction travel plus the braking arc.
inline double braking_envelope(double speed, const SafetyConfig& cfg) {
    return speed * speed / (2.0 * cfg.brake_decel_mps2) + speed * cfg.tick_seconds;
}

/// Applies both tiers to a scene. Tier 1 demands Stop for close forward
/// hazards (same-lane vehicle, crossing pedestrian) and for a red signal
/// within the braking envelope. Tier 2 recommends.
inline SafetyVerdict evaluate_safety(const AtomicScene& s, const SafetyConfig& cfg) {
    SafetyVerdict v;
    auto trigger = [&](const std::string& rule) { v.triggered_rules.push_back(rule); };
    auto mandatory_stop = [&] { v.mandatory = AtomicAction::Stop; };

    if (s.lead_vehicle && s.lead_vehicle->distance < cfg.mandatory_stop_distance_m) {
        mandatory_stop();
        trigger("stop_vehicle_close");
    }
    bool ped_hazard = s.nearest_pedestrian && s.nearest_pedestrian->crossing;
    if (ped_hazard && s.nearest_pedestrian->distance < cfg.mandatory_stop_distance_m) {
        mandatory_stop();
        trigger("stop_pedestrian_close");
    }
    if (cfg.red_light_stop && s.signal && s.signal->state == SignalState::Red &&
        s.signal->distance <= braking_envelope(s.ego_speed, cfg)) {
        mandatory_stop();
        trigger("stop_red_light");
    }

    if (s.lead_vehicle && s.lead_vehicle->distance < cfg.advisory_decel_distance_m) {
        v.advisories.push_back({"vehicle_near", AtomicAction::Decelerate});
        trigger("decelerate_vehicle_near");
    }
    if (ped_hazard && s.nearest_pedestrian->distance < cfg.advisory_decel_distance_m) {
        v.advisories.push_back({"pedestrian_near", AtomicAction::Decelerate});
        trigger("decelerate_pedestrian_near");
    }
    if (s.intersection_distance && *s.intersection_distance < cfg.advisory_decel_distance_m &&
        s.ego_speed > cfg.intersection_slow_speed_mps) {
        v.advisories.push_back({"intersection_fast", AtomicAction::Decelerate});
        trigger("decelerate_intersection");
    }
    if (s.lead_vehicle && s.lead_vehicle->speed > 0.1 &&
        s.lead_vehicle->distance < cfg.min_moving_gap_m) {
        v.advisories.push_back({"min_moving_gap", AtomicAction::Stop});
        trigger("min_moving_gap");
    }
    return v;
}

/// Tier-1 filter. A present mandate replaces the proposal; advisories pass
/// everything through.
inline std::pair<AtomicAction, bool> enforce(const SafetyVerdict& v, AtomicAction proposed) {
    if (v.mandatory) return {*v.mandatory, proposed != *v.mandatory};
    return {proposed, false};
}

/// Prompt lines describing what the safety layer currently demands or
/// recommends, rendered deterministically.
inline std::string render_safety_text(const SafetyVerdict& v) {
    if (v.empty()) return "Safety check: no hazards flagged.\n";
    std::string out = "Safety check:\n";
    if (v.mandatory) {
        out += "- MANDATORY: " + std::string(action_name(*v.mandatory)) +
               " (a hard safety rule has triggered)\n";
    }
    for (const Advisory& a : v.advisories) {
        out += "- advisory [" + a.tag + "]: consider " + std::string(action_name(a.suggested)) +
               "\n";
    }
    return out;
}

} // namespace surreal
