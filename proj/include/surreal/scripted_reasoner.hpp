#pragma once

#include <string>

#include <surreal/agent.hpp>
#include <surreal/context.hpp>

namespace surreal {

/// Tunable priority-rule policy driving the scripted reasoner. The four
/// ablation variants differ only in these numbers and flags, so every
/// comparison in the metrics report traces back to an explicit knob.
struct PolicyTable {
    bool use_safety_hints = true;   // obey tier-1/tier-2 input when present
    bool respect_guidelines = true; // adopt coached caution when guidelines exist

    double target_speed_mps = 8.0;
    double follow_buffer_m = 3.0;        // own gap rule: speed * 0.8 + buffer
    double change_front_margin_m = 8.0;  // clear space needed to change lanes
    double change_rear_margin_m = 6.0;
    double ped_stop_distance_m = 6.0;   // own pedestrian rule, shield or not
    double red_margin_m = 4.0;          // own red rule: envelope + margin
    double own_brake_decel_mps2 = 3.0;  // assumed by the own red rule
    double memory_caution_factor = 0.7; // speed factor after a recent incident
    double guideline_speed_factor = 0.85;

    static PolicyTable for_condition(char condition) {
        PolicyTable p;
        switch (condition) {
        case 'A':
            // No safety layer input; drives faster, accepts thin margins,
            // and overestimates its own brakes, so late reds get run.
            p.use_safety_hints = false;
            p.respect_guidelines = false;
            p.target_speed_mps = 9.0;
            p.follow_buffer_m = 1.0;
            p.change_front_margin_m = 4.0;
            p.change_rear_margin_m = 2.0;
            p.red_margin_m = 0.0;
            p.own_brake_decel_mps2 = 6.0;
            break;
        case 'B':
        case 'C':
            // Memory reaches the reasoner through the context, so B and C
            // share one table; C differs only in what the agent feeds it.
            p.respect_guidelines = false;
            break;
        case 'D':
            break;
        default:
            throw std::invalid_argument("unknown ablation condition");
        }
        return p;
    }
};

/// Deterministic stand-in for an LLM driver: a fixed priority cascade over
/// the same context an LLM would see. Pure function of (ctx, policy).
inline Proposal scripted_reason(const AgentContext& ctx, const PolicyTable& policy) {
    const AtomicScene& s = ctx.scene;

    if (policy.use_safety_hints && ctx.safety.mandatory) {
        return {*ctx.safety.mandatory, "the safety layer demands it"};
    }

    double target = policy.target_speed_mps;
    double follow_extra = 0.0;
    if (policy.respect_guidelines && !ctx.guidelines.empty()) {
        target *= policy.guideline_speed_factor;
        follow_extra += 2.0;
    }
    bool recent_incident = false;
    for (const DecisionRecord& r : ctx.memory) {
        if (r.overridden || r.reasoner_failure || r.final_action == AtomicAction::Stop) {
            recent_incident = true;
        }
    }
    if (recent_incident) {
        target *= policy.memory_caution_factor;
        follow_extra += 2.0;
    }

    if (s.nearest_pedestrian && s.nearest_pedestrian->crossing &&
        s.nearest_pedestrian->distance < policy.ped_stop_distance_m) {
        return {AtomicAction::Stop, "a pedestrian is crossing just ahead"};
    }

    if (s.signal && s.signal->state == SignalState::Red) {
        double envelope = s.ego_speed * s.ego_speed / (2.0 * policy.own_brake_decel_mps2) +
                          s.ego_speed * 0.1;
        if (s.signal->distance < envelope + policy.red_margin_m) {
            if (s.ego_speed > 2.0) return {AtomicAction::Decelerate, "braking for the red light"};
            return {AtomicAction::Stop, "holding at the red light"};
        }
    }

    if (policy.use_safety_hints) {
        for (const Advisory& a : ctx.safety.advisories) {
            if (a.tag == "vehicle_near") return {a.suggested, "keeping distance from the vehicle ahead"};
            if (a.tag == "pedestrian_near") return {a.suggested, "slowing near a pedestrian"};
            if (a.tag == "intersection_fast") return {a.suggested, "slowing for the intersection"};
            if (a.tag == "min_moving_gap") return {a.suggested, "dangerously close to a moving car"};
        }
    }

    if (s.lead_vehicle &&
        s.lead_vehicle->distance < s.ego_speed * 0.8 + policy.follow_buffer_m + follow_extra) {
        return {AtomicAction::Decelerate, "closing in on the vehicle ahead"};
    }

    if (s.route_move && s.ego_speed >= 1.0) {
        bool left = *s.route_move == RouteMove::Left;
        const std::optional<SideGap>& gap = left ? s.left_gap : s.right_gap;
        if (gap && gap->front > policy.change_front_margin_m &&
            gap->rear > policy.change_rear_margin_m) {
            if (left) return {AtomicAction::LaneChangeLeft, "the route continues in the left lane"};
            return {AtomicAction::LaneChangeRight, "the route continues in the right lane"};
        }
    }

    if (recent_incident) {
        // No acceleration while an incident is still in memory: cover the
        // trouble spot at whatever speed the hazard rules left us.
        if (s.ego_speed > target + 0.3) return {AtomicAction::Decelerate, "easing off after an incident"};
        return {AtomicAction::MaintainSpeed, "resuming carefully after an incident"};
    }
    if (s.ego_speed < target - 0.3) return {AtomicAction::Accelerate, "below the comfortable speed"};
    if (s.ego_speed > target + 0.3) return {AtomicAction::Decelerate, "above the comfortable speed"};
    return {AtomicAction::MaintainSpeed, "holding a steady speed"};
}

/// Reasoner wrapper so the agent can swap the scripted policy for a remote
/// model without caring which is which.
class ScriptedReasoner final : public Reasoner {
public:
    explicit ScriptedReasoner(PolicyTable policy = PolicyTable{}) : policy_(policy) {}

    Proposal propose(const AgentContext& ctx) override { return scripted_reason(ctx, policy_); }
    std::string name() const override { return "scripted"; }

    PolicyTable& policy() { return policy_; }
    const PolicyTable& policy() const { return policy_; }

private:
    PolicyTable policy_;
};

} // namespace surreal
