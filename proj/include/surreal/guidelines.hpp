#pragma once

#include <cctype>
#include <deque>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace surreal {

/// A persistent driving rule produced by the coach and injected into every
/// later prompt.
struct Guideline {
    std::string id;  // assigned by the store on acceptance
    std::string text;
    std::string source_finding;
    int created_at = 0;  // episode index
};

/// Case-folded, whitespace-collapsed form used for deduplication.
inline std::string normalize_guideline_text(const std::string& text) {
    std::string out;
    bool in_space = true;  // swallows leading whitespace
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

/// Ordered, bounded, deduplicated guideline list. Oldest entries give way
/// when the store is full.
class GuidelineStore {
public:
    explicit GuidelineStore(std::size_t max_size = 20) : max_size_(max_size) {}

    bool contains_text(const std::string& text) const {
        std::string norm = normalize_guideline_text(text);
        for (const Guideline& g : guidelines_) {
            if (normalize_guideline_text(g.text) == norm) return true;
        }
        return false;
    }

    /// Appends the guideline unless its normalized text is already stored.
    /// Returns true when accepted.
    bool merge_one(Guideline g) {
        if (g.text.empty() || contains_text(g.text)) return false;
        g.id = "g" + std::to_string(next_id_++);
        guidelines_.push_back(std::move(g));
        while (guidelines_.size() > max_size_) guidelines_.pop_front();
        return true;
    }

    void merge(const std::vector<Guideline>& batch) {
        for (const Guideline& g : batch) merge_one(g);
    }

    std::size_t size() const { return guidelines_.size(); }
    bool empty() const { return guidelines_.empty(); }
    std::size_t max_size() const { return max_size_; }

    const std::deque<Guideline>& guidelines() const { return guidelines_; }
    auto begin() const { return guidelines_.begin(); }
    auto end() const { return guidelines_.end(); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["max_size"] = max_size_;
        j["next_id"] = next_id_;
        j["guidelines"] = nlohmann::json::array();
        for (const Guideline& g : guidelines_) {
            j["guidelines"].push_back({{"id", g.id},
                                       {"text", g.text},
                                       {"source_finding", g.source_finding},
                                       {"created_at", g.created_at}});
        }
        return j;
    }

    static GuidelineStore from_json(const nlohmann::json& j) {
        GuidelineStore store(j.value("max_size", std::size_t{20}));
        store.next_id_ = j.value("next_id", 1);
        if (j.contains("guidelines")) {
            for (const auto& jg : j["guidelines"]) {
                Guideline g;
                g.id = jg.value("id", "");
                g.text = jg.at("text").get<std::string>();
                g.source_finding = jg.value("source_finding", "");
                g.created_at = jg.value("created_at", 0);
                store.guidelines_.push_back(std::move(g));
            }
        }
        return store;
    }

    static GuidelineStore load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) return GuidelineStore();
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) return GuidelineStore();
        return from_json(j);
    }

    /// Merges this store's guidelines into whatever the file already holds,
    /// so concurrent or resumed runs never lose earlier coaching.
    void save_merged(const std::string& path) const {
        GuidelineStore base = load_file(path);
        if (base.empty() && base.next_id_ == 1) base.max_size_ = max_size_;
        for (const Guideline& g : guidelines_) {
            Guideline copy = g;
            base.merge_one(std::move(copy));
        }
        std::ofstream out(path);
        out << base.to_json().dump(2) << "\n";
    }

private:
    std::size_t max_size_;
    int next_id_ = 1;
    std::deque<Guideline> guidelines_;
};

/// Numbered list rendering for prompts.
inline std::string render_guidelines_text(const GuidelineStore& store) {
    if (store.empty()) return "no guidelines yet\n";
    std::string out;
    int n = 1;
    for (const Guideline& g : store) {
        out += std::to_string(n++) + ". " + g.text + "\n";
    }
    return out;
}

} // namespace surreal
