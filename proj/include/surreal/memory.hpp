#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>

#include <surreal/actions.hpp>

namespace surreal {

/// One decision, as made: what the reasoner proposed, what actually went to
/// the controls, and why.
struct DecisionRecord {
    std::int64_t tick = 0;
    std::string scene_digest;
    AtomicAction proposed = AtomicAction::MaintainSpeed;
    AtomicAction final_action = AtomicAction::MaintainSpeed;
    bool overridden = false;  // true iff final_action differs from proposed
    std::string rationale;
    bool reasoner_failure = false;  // proposal came from the safe fallback
};

/// Fixed-capacity FIFO of recent decisions, oldest first. Evicts exactly the
/// oldest record on overflow.
class MemoryBuffer {
public:
    explicit MemoryBuffer(std::size_t capacity = 5) : capacity_(capacity) {}

    void push(DecisionRecord record) {
        if (!records_.empty() && record.tick <= records_.back().tick) {
            throw std::invalid_argument("memory records must be pushed in increasing tick order");
        }
        records_.push_back(std::move(record));
        while (records_.size() > capacity_) records_.pop_front();
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    void clear() { records_.clear(); }

    const std::deque<DecisionRecord>& records() const { return records_; }

    auto begin() const { return records_.begin(); }
    auto end() const { return records_.end(); }

private:
    std::size_t capacity_;
    std::deque<DecisionRecord> records_;
};

/// Chronological rendering for prompts, one line per record.
inline std::string render_memory_text(const MemoryBuffer& buffer) {
    if (buffer.empty()) return "no recent actions\n";
    std::string out;
    for (const DecisionRecord& r : buffer) {
        out += "tick " + std::to_string(r.tick) + ": proposed " +
               std::string(action_name(r.proposed)) + ", executed " +
               std::string(action_name(r.final_action));
        if (r.overridden) out += " (overridden by the safety layer)";
        if (!r.scene_digest.empty()) out += " [" + r.scene_digest + "]";
        out += "\n";
    }
    return out;
}

} // namespace surreal
