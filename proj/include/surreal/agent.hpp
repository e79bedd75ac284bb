#pragma once

#include <string>
#include <vector>

#include <surreal/context.hpp>
#include <surreal/memory.hpp>
#include <surreal/perception.hpp>
#include <surreal/safety.hpp>

namespace surreal {

struct AgentConfig {
    int decision_period_ticks = 5;  // one decision per half second at dt 0.1
    std::size_t memory_capacity = 5;
    int retry_budget = 3;     // parse-failure retries before the Stop fallback
    int failure_budget = 20;  // consecutive fallbacks before the episode aborts
    double horizon_m = kDefaultHorizon;

    // Ablation toggles. Off means the corresponding input is withheld from
    // the reasoner (and, for safety, enforcement is skipped entirely).
    bool safety_enabled = true;
    bool memory_enabled = true;
    bool guidelines_enabled = true;
};

/// The in-loop decision maker: assembles context, queries the reasoner,
/// applies the safety filter, and remembers what happened.
class Agent {
public:
    Agent(Reasoner& reasoner, SafetyConfig safety_cfg, AgentConfig cfg)
        : reasoner_(reasoner),
          safety_cfg_(std::move(safety_cfg)),
          cfg_(cfg),
          memory_(cfg.memory_capacity) {}

    AgentConfig& config() { return cfg_; }
    const AgentConfig& config() const { return cfg_; }
    const SafetyConfig& safety_config() const { return safety_cfg_; }

    MemoryBuffer& memory() { return memory_; }
    GuidelineStore& guidelines() { return guidelines_; }
    const GuidelineStore& guidelines() const { return guidelines_; }
    void set_guidelines(GuidelineStore store) { guidelines_ = std::move(store); }

    std::vector<Demonstration>& demonstrations() { return demonstrations_; }

    int consecutive_failures() const { return consecutive_failures_; }

    bool is_decision_tick(std::int64_t tick) const {
        return cfg_.decision_period_ticks <= 1 || tick % cfg_.decision_period_ticks == 0;
    }

    /// One full decision: returns the record that the harness writes to the
    /// trace and holds as the ego command until the next decision tick.
    /// Never throws; every reasoner failure degrades to the Stop fallback.
    DecisionRecord decide(const AtomicScene& scene) {
        SafetyVerdict verdict;
        if (cfg_.safety_enabled) verdict = evaluate_safety(scene, safety_cfg_);

        AgentContext ctx;
        ctx.scene = scene;
        if (cfg_.memory_enabled) ctx.memory = memory_;
        if (cfg_.guidelines_enabled) ctx.guidelines = guidelines_;
        ctx.safety = verdict;
        ctx.demonstrations = demonstrations_;

        Proposal proposal;
        bool failed = false;
        int parse_attempts = 0;
        for (;;) {
            try {
                proposal = reasoner_.propose(ctx);
                break;
            } catch (const ParseError&) {
                if (++parse_attempts >= cfg_.retry_budget) {
                    failed = true;
                    break;
                }
            } catch (const ReasonerUnavailable&) {
                failed = true;
                break;
            }
        }
        if (failed) proposal = {AtomicAction::Stop, "fallback"};
        consecutive_failures_ = failed ? consecutive_failures_ + 1 : 0;

        // A lane change with no lane to change into must never survive to
        // the executed action.
        AtomicAction candidate = proposal.action;
        if ((candidate == AtomicAction::LaneChangeLeft && !scene.has_left_neighbor) ||
            (candidate == AtomicAction::LaneChangeRight && !scene.has_right_neighbor)) {
            candidate = AtomicAction::MaintainSpeed;
        }

        AtomicAction final_action = candidate;
        if (cfg_.safety_enabled) final_action = enforce(verdict, candidate).first;

        DecisionRecord record;
        record.tick = scene.tick;
        record.scene_digest = scene_digest(scene);
        record.proposed = proposal.action;
        record.final_action = final_action;
        record.overridden = final_action != proposal.action;
        record.rationale = proposal.rationale;
        record.reasoner_failure = failed;
        if (cfg_.memory_enabled) memory_.push(record);
        return record;
    }

private:
    Reasoner& reasoner_;
    SafetyConfig safety_cfg_;
    AgentConfig cfg_;
    MemoryBuffer memory_;
    GuidelineStore guidelines_;
    std::vector<Demonstration> demonstrations_;
    int consecutive_failures_ = 0;
};

} // namespace surreal
