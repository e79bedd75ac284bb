#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace surreal {

/// The closed vocabulary of driving commands an agent may emit.
enum class AtomicAction {
    Stop,
    MaintainSpeed,
    Accelerate,
    Decelerate,
    LaneChangeLeft,
    LaneChangeRight,
};

inline constexpr std::array<AtomicAction, 6> kAllActions = {
    AtomicAction::Stop,          AtomicAction::MaintainSpeed,
    AtomicAction::Accelerate,    AtomicAction::Decelerate,
    AtomicAction::LaneChangeLeft, AtomicAction::LaneChangeRight,
};

inline constexpr std::string_view action_name(AtomicAction a) {
    switch (a) {
    case AtomicAction::Stop: return "stop";
    case AtomicAction::MaintainSpeed: return "maintain_speed";
    case AtomicAction::Accelerate: return "accelerate";
    case AtomicAction::Decelerate: return "decelerate";
    case AtomicAction::LaneChangeLeft: return "lane_change_left";
    case AtomicAction::LaneChangeRight: return "lane_change_right";
    }
    return "maintain_speed";
}

inline constexpr bool is_lane_change(AtomicAction a) {
    return a == AtomicAction::LaneChangeLeft || a == AtomicAction::LaneChangeRight;
}

/// Case-insensitive lookup; returns nullopt for anything outside the vocabulary.
inline std::optional<AtomicAction> action_from_name(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (AtomicAction a : kAllActions) {
        if (lower == action_name(a)) return a;
    }
    return std::nullopt;
}

/// Raised when a reasoner reply cannot be turned into an action.
class ParseError : public std::runtime_error {
public:
    enum class Kind { NoJsonObject, MissingActionKey, UnknownAction };

    ParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct ParsedCommand {
    AtomicAction action;
    std::string rationale;
};

/// Canonical wire form of a command: {"action":"<name>","rationale":"<text>"}.
inline std::string encode_action(AtomicAction a, std::string_view rationale = "") {
    nlohmann::json j;
    j["action"] = std::string(action_name(a));
    j["rationale"] = std::string(rationale);
    return j.dump();
}

namespace detail {

// Finds the end (one past the closing brace) of a balanced {...} span starting
// at `start`, honoring JSON string quoting and escapes. Returns npos if the
// text ends before the braces balance.
inline std::size_t balanced_object_end(std::string_view text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') { in_string = true; continue; }
        if (c == '{') ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return i + 1;
            if (depth < 0) return std::string_view::npos;
        }
    }
    return std::string_view::npos;
}

} // namespace detail

/// Extracts the first well-formed JSON object embedded in a reasoner reply
/// (replies may wrap the command in prose) and maps it to an action.
/// Never aborts: any input yields a ParsedCommand or throws ParseError.
inline ParsedCommand parse_action_command(std::string_view reply) {
    for (std::size_t pos = reply.find('{'); pos != std::string_view::npos;
         pos = reply.find('{', pos + 1)) {
        std::size_t end = detail::balanced_object_end(reply, pos);
        if (end == std::string_view::npos) continue;
        nlohmann::json j = nlohmann::json::parse(reply.substr(pos, end - pos), nullptr,
                                                 /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) continue;

        // First well-formed object is the command; judge it as found.
        if (!j.contains("action") || !j["action"].is_string()) {
            throw ParseError(ParseError::Kind::MissingActionKey,
                             "reply object has no \"action\" key");
        }
        std::string name = j["action"].get<std::string>();
        auto action = action_from_name(name);
        if (!action) {
            throw ParseError(ParseError::Kind::UnknownAction, "unknown action \"" + name + "\"");
        }
        std::string rationale;
        if (j.contains("rationale") && j["rationale"].is_string()) {
            rationale = j["rationale"].get<std::string>();
        }
        return ParsedCommand{*action, rationale};
    }
    throw ParseError(ParseError::Kind::NoJsonObject, "no JSON object found in reply");
}

} // namespace surreal
