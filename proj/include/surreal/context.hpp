#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <surreal/actions.hpp>
#include <surreal/guidelines.hpp>
#include <surreal/memory.hpp>
#include <surreal/perception.hpp>
#include <surreal/safety.hpp>

namespace surreal {

/// An expert driving example in situation / reasoning / action form,
/// shipped as fixture data and rendered into every prompt.
struct Demonstration {
    std::string situation;
    std::string reasoning;
    AtomicAction action = AtomicAction::MaintainSpeed;
};

/// Reads a JSON array of {situation, reasoning, action} objects. Order is
/// preserved; the first bad entry is reported by index.
inline std::vector<Demonstration> load_demonstrations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open demonstrations file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw std::runtime_error("demonstrations file is not a JSON array: " + path);
    }
    std::vector<Demonstration> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("demonstration " + std::to_string(i) + ": " + why);
        };
        if (!e.is_object()) fail("not an object");
        Demonstration d;
        d.situation = e.value("situation", "");
        d.reasoning = e.value("reasoning", "");
        std::string action = e.value("action", "");
        if (d.situation.empty()) fail("missing or empty \"situation\"");
        if (d.reasoning.empty()) fail("missing or empty \"reasoning\"");
        auto parsed = action_from_name(action);
        if (!parsed) fail("unknown action \"" + action + "\"");
        d.action = *parsed;
        out.push_back(std::move(d));
    }
    return out;
}

/// Everything the reasoner may look at for one decision: immutable
/// snapshots taken at the decision tick.
struct AgentContext {
    AtomicScene scene;
    MemoryBuffer memory;
    GuidelineStore guidelines;
    SafetyVerdict safety;
    std::vector<Demonstration> demonstrations;
};

struct Proposal {
    AtomicAction action = AtomicAction::MaintainSpeed;
    std::string rationale;
};

/// Transport-level reasoner failure (timeout, connection refused). Parse
/// failures are ParseError instead; the agent retries those.
class ReasonerUnavailable : public std::runtime_error {
public:
    explicit ReasonerUnavailable(const std::string& what) : std::runtime_error(what) {}
};

/// A pluggable decision backend.
class Reasoner {
public:
    virtual ~Reasoner() = default;
    virtual Proposal propose(const AgentContext& ctx) = 0;
    virtual std::string name() const = 0;
};

} // namespace surreal
