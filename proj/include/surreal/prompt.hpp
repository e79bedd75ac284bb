#pragma once

#include <string>

#include <surreal/context.hpp>

namespace surreal {

inline constexpr std::string_view kActionVocabularyLine =
    "stop, maintain_speed, accelerate, decelerate, lane_change_left, lane_change_right";

inline const std::string kCommandSchemaText =
    "Reply with exactly one JSON object of the form\n"
    "{\"action\": \"<one of: stop, maintain_speed, accelerate, decelerate, "
    "lane_change_left, lane_change_right>\", \"rationale\": \"<one short sentence>\"}\n"
    "and nothing else.\n";

/// Assembled chain-of-thought prompt. Section order is fixed and rendering
/// is byte-deterministic; golden tests pin the output.
struct PromptDocument {
    std::string system;
    std::string demonstrations;
    std::string guidelines;
    std::string memory;
    std::string scene;
    std::string output_instructions;

    /// The user-role message: everything after the system section.
    std::string user_message() const {
        return "## Demonstrations\n" + demonstrations + "\n## Guidelines\n" + guidelines +
               "\n## Recent actions\n" + memory + "\n## Current scene\n" + scene +
               "\n## Output\n" + output_instructions;
    }

    std::string full_text() const { return "## System\n" + system + "\n" + user_message(); }
};

inline std::string render_demonstrations_text(const std::vector<Demonstration>& demos) {
    if (demos.empty()) return "";
    std::string out;
    for (const Demonstration& d : demos) {
        out += "Situation: " + d.situation + "\n";
        out += "Reasoning: " + d.reasoning + "\n";
        out += "Action: " + std::string(action_name(d.action)) + "\n\n";
    }
    return out;
}

inline std::string render_system_text(const SafetyConfig& cfg) {
    std::string out;
    out += "You are an experienced, careful urban driver controlling a vehicle through\n";
    out += "discrete commands. Each turn you receive the current scene and must pick one\n";
    out += "atomic action from: " + std::string(kActionVocabularyLine) + ".\n";
    out += "Safety criteria you must respect:\n";
    out += "- Stop if a vehicle or pedestrian is within " +
           format_1dp(cfg.mandatory_stop_distance_m) + " meters, or at a red traffic light.\n";
    out += "- Decelerate when nearing vehicles or pedestrians within " +
           format_1dp(cfg.advisory_decel_distance_m) + " meters.\n";
    out += "- Slow down when approaching intersections; keep a minimum distance of " +
           format_1dp(cfg.min_moving_gap_m) + " meter from moving cars.\n";
    out += "- Optimize energy use by avoiding unnecessary speed changes.\n";
    return out;
}

/// Builds the full prompt for one decision. Pure function of its inputs.
inline PromptDocument build_prompt(const AgentContext& ctx,
                                   const std::vector<Demonstration>& demos,
                                   const std::string& schema_text = kCommandSchemaText,
                                   const SafetyConfig& safety_cfg = SafetyConfig{}) {
    PromptDocument doc;
    doc.system = render_system_text(safety_cfg);
    doc.demonstrations = render_demonstrations_text(demos);
    doc.guidelines = render_guidelines_text(ctx.guidelines);
    doc.memory = render_memory_text(ctx.memory);
    doc.scene = render_scene_text(ctx.scene) + render_safety_text(ctx.safety);
    doc.output_instructions = schema_text;
    return doc;
}

} // namespace surreal
