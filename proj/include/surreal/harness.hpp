#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <surreal/agent.hpp>
#include <surreal/coach.hpp>
#include <surreal/config.hpp>
#include <surreal/perception.hpp>
#include <surreal/remote_reasoner.hpp>
#include <surreal/routing.hpp>
#include <surreal/scripted_reasoner.hpp>
#include <surreal/trace.hpp>
#include <surreal/world_sim.hpp>

namespace surreal {

/// One ablation condition: which framework pieces the agent gets.
struct ConditionSpec {
    char id = 'D';
    bool safety_enabled = true;
    bool memory_enabled = true;
    bool guidelines_enabled = true;

    static ConditionSpec from_id(char id) {
        switch (id) {
        case 'A': return {'A', false, false, false};
        case 'B': return {'B', true, false, false};
        case 'C': return {'C', true, true, false};
        case 'D': return {'D', true, true, true};
        default: throw std::invalid_argument("ablation condition must be A, B, C or D");
        }
    }

    static std::array<ConditionSpec, 4> all() {
        return {from_id('A'), from_id('B'), from_id('C'), from_id('D')};
    }

    std::string label() const {
        switch (id) {
        case 'A': return "w/o safety, w/o memory, w/o guidelines";
        case 'B': return "safety criteria only";
        case 'C': return "safety criteria + short-term memory";
        default: return "full framework";
        }
    }
};

struct EpisodeOptions {
    ConditionSpec condition = ConditionSpec::from_id('D');
    std::uint64_t seed = 1;
    double duration_s = 300.0;
};

/// Runs one lock-step episode: observe, decide at the configured cadence,
/// step the world with the held action, record every tick. The guideline
/// store, when given, is read at the start and left untouched (coaching
/// between episodes is the suite's job).
inline EpisodeTrace run_episode(const RunConfig& cfg, const EpisodeOptions& opt,
                                Reasoner& reasoner,
                                const GuidelineStore* guideline_store = nullptr,
                                const std::vector<Demonstration>* demos = nullptr,
                                const RoadNetwork* network = nullptr) {
    RunConfig effective = cfg;
    effective.sim.seed = opt.seed;
    effective.sim.episode_duration_s = opt.duration_s;
    effective.normalize();

    WorldState w = make_world(network ? *network : RoadNetwork::default_town(), effective.sim);
    assign_next_destination(w);

    AgentConfig agent_cfg = effective.agent;
    agent_cfg.safety_enabled = opt.condition.safety_enabled;
    agent_cfg.memory_enabled = opt.condition.memory_enabled;
    agent_cfg.guidelines_enabled = opt.condition.guidelines_enabled;
    Agent agent(reasoner, effective.safety, agent_cfg);
    if (guideline_store && opt.condition.guidelines_enabled) {
        agent.set_guidelines(*guideline_store);
    }
    if (demos) agent.demonstrations() = *demos;

    EpisodeTrace trace;
    trace.header.schema_version = kTraceSchemaVersion;
    trace.header.seed = opt.seed;
    trace.header.condition = std::string(1, opt.condition.id);
    trace.header.config = effective.to_json();
    trace.header.config_digest = config_digest(trace.header.config);
    trace.header.start_time = 0.0;

    const std::int64_t total_ticks = effective.sim.episode_ticks();
    DecisionRecord held;
    held.final_action = AtomicAction::Stop;  // never used: tick 0 always decides
    held.proposed = AtomicAction::Stop;

    for (std::int64_t i = 0; i < total_ticks; ++i) {
        if (at_destination(w)) {
            ++w.destinations_reached;
            assign_next_destination(w);
        }
        AtomicScene scene = observe(w, agent_cfg.horizon_m);
        bool decided = agent.is_decision_tick(w.tick);
        if (decided) {
            held = agent.decide(scene);
            if (agent.consecutive_failures() >= agent_cfg.failure_budget) {
                trace.footer.aborted = true;
                break;
            }
        }

        TraceRecord rec;
        rec.tick = w.tick;
        rec.ego_lane = w.ego().lane;
        rec.ego_offset = w.ego().offset;
        rec.ego_speed = w.ego().speed;
        rec.scene = scene_to_json(scene);
        rec.proposed = held.proposed;
        rec.final_action = held.final_action;
        rec.overridden = held.overridden;
        rec.decided = decided;
        rec.reasoner_failure = held.reasoner_failure;
        for (const DecisionRecord& r : agent.memory()) {
            rec.memory.push_back({r.tick, r.proposed, r.final_action, r.overridden});
        }

        StepResult sr = step(w, held.final_action);
        rec.ego_advance = sr.ego_advance;
        rec.degraded = sr.ego_action_degraded;
        rec.collisions = sr.collisions;
        trace.records.push_back(std::move(rec));
    }

    for (const TraceRecord& r : trace.records) {
        trace.footer.total_distance_m += r.ego_advance;
        for (const CollisionEvent& e : r.collisions) {
            trace.footer.collisions.push_back(e);
            if (e.ego_involved) ++trace.footer.ego_collision_count;
        }
    }
    trace.footer.total_time_s = static_cast<double>(trace.records.size()) * effective.sim.dt_s;
    trace.footer.destinations_reached = w.destinations_reached;
    return trace;
}

struct CollisionRates {
    double per_meter = 0.0;
    double per_second = 0.0;
};

/// Pooled rates: summed ego-involved collisions over summed denominators.
inline CollisionRates collision_rates(const std::vector<const TraceFooter*>& footers) {
    double dist = 0.0, time = 0.0;
    long long count = 0;
    for (const TraceFooter* f : footers) {
        dist += f->total_distance_m;
        time += f->total_time_s;
        count += f->ego_collision_count;
    }
    if (dist <= 0.0) throw std::invalid_argument("collision rate needs positive total distance");
    if (time <= 0.0) throw std::invalid_argument("collision rate needs positive total time");
    return {static_cast<double>(count) / dist, static_cast<double>(count) / time};
}

inline CollisionRates collision_rates(const EpisodeTrace& trace) {
    return collision_rates(std::vector<const TraceFooter*>{&trace.footer});
}

/// 100 * (1 - improved/baseline). The caller formats for display.
inline double percent_reduction(double baseline, double improved) {
    if (baseline <= 0.0) throw std::invalid_argument("percent reduction needs a positive baseline");
    return 100.0 * (1.0 - improved / baseline);
}

struct ConditionResult {
    char condition = 'A';
    std::string label;
    int episodes = 0;
    int aborted_episodes = 0;
    double total_distance_m = 0.0;
    double total_time_s = 0.0;
    long long ego_collisions = 0;
    CollisionRates rates;
};

struct Reduction {
    char baseline = 'A';
    char improved = 'D';
    double by_distance_pct = 0.0;
    double by_time_pct = 0.0;
};

struct MetricsReport {
    std::vector<ConditionResult> rows;  // A, B, C, D in order
    std::vector<Reduction> reductions;  // all improving pairs
    int seed_count = 0;

    const ConditionResult& row(char id) const {
        for (const ConditionResult& r : rows) {
            if (r.condition == id) return r;
        }
        throw std::invalid_argument("report has no such condition row");
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["seed_count"] = seed_count;
        j["conditions"] = nlohmann::json::array();
        for (const ConditionResult& r : rows) {
            j["conditions"].push_back({{"condition", std::string(1, r.condition)},
                                       {"label", r.label},
                                       {"episodes", r.episodes},
                                       {"aborted_episodes", r.aborted_episodes},
                                       {"total_distance_m", r.total_distance_m},
                                       {"total_time_s", r.total_time_s},
                                       {"ego_collisions", r.ego_collisions},
                                       {"rate_by_distance", r.rates.per_meter},
                                       {"rate_by_time", r.rates.per_second}});
        }
        j["reductions"] = nlohmann::json::array();
        for (const Reduction& d : reductions) {
            j["reductions"].push_back({{"baseline", std::string(1, d.baseline)},
                                       {"improved", std::string(1, d.improved)},
                                       {"by_distance_pct", d.by_distance_pct},
                                       {"by_time_pct", d.by_time_pct}});
        }
        return j;
    }
};

/// Four condition rows, two rate columns, pairwise reductions below.
inline std::string render_metrics_report(const MetricsReport& report) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-45s  %-22s  %-22s\n", "Condition",
                  "Rate by Distance (/m)", "Rate by Time (/s)");
    out += buf;
    for (const ConditionResult& r : report.rows) {
        std::string name = std::string(1, r.condition) + ": " + r.label;
        std::snprintf(buf, sizeof(buf), "%-45s  %-22.9f  %-22.9f\n", name.c_str(),
                      r.rates.per_meter, r.rates.per_second);
        out += buf;
        if (r.aborted_episodes > 0) {
            std::snprintf(buf, sizeof(buf), "    (%d of %d episodes aborted)\n",
                          r.aborted_episodes, r.episodes);
            out += buf;
        }
    }
    out += "\nPairwise reductions (baseline -> improved):\n";
    for (const Reduction& d : report.reductions) {
        std::snprintf(buf, sizeof(buf), "  %c -> %c: %6.2f%% by distance, %6.2f%% by time\n",
                      d.baseline, d.improved, d.by_distance_pct, d.by_time_pct);
        out += buf;
    }
    return out;
}

struct AblationOptions {
    std::vector<std::uint64_t> seeds;
    double duration_s = 300.0;
    std::string reasoner_kind = "scripted";
};

namespace detail {

/// Scripted suites get the per-condition policy table; remote suites talk
/// to the configured endpoint for every condition.
inline std::unique_ptr<Reasoner> make_suite_reasoner(const RunConfig& cfg,
                                                     const std::string& kind, char condition) {
    if (kind == "scripted") {
        return std::make_unique<ScriptedReasoner>(PolicyTable::for_condition(condition));
    }
    if (kind == "remote") {
        return std::make_unique<RemoteReasoner>(cfg.reasoner, cfg.safety);
    }
    throw std::invalid_argument("reasoner kind must be \"scripted\" or \"remote\"");
}

} // namespace detail

/// The four-condition suite over paired seeds. Every condition sees the same
/// seeds (and thus the same worlds); condition D chains its guideline store
/// through the rule-based coach between episodes.
inline MetricsReport run_ablation_suite(const RunConfig& cfg, const AblationOptions& opt,
                                        const std::vector<Demonstration>* demos = nullptr,
                                        const RoadNetwork* network = nullptr) {
    if (opt.seeds.empty()) throw std::invalid_argument("ablation needs at least one seed");
    MetricsReport report;
    report.seed_count = static_cast<int>(opt.seeds.size());

    for (const ConditionSpec& cond : ConditionSpec::all()) {
        ConditionResult row;
        row.condition = cond.id;
        row.label = cond.label();
        GuidelineStore store;  // carried across condition-D episodes
        int episode_index = 0;
        for (std::uint64_t seed : opt.seeds) {
            auto reasoner = detail::make_suite_reasoner(cfg, opt.reasoner_kind, cond.id);
            EpisodeOptions ep;
            ep.condition = cond;
            ep.seed = seed;
            ep.duration_s = opt.duration_s;
            EpisodeTrace trace = run_episode(cfg, ep, *reasoner,
                                             cond.guidelines_enabled ? &store : nullptr, demos,
                                             network);
            ++row.episodes;
            if (trace.footer.aborted) ++row.aborted_episodes;
            row.total_distance_m += trace.footer.total_distance_m;
            row.total_time_s += trace.footer.total_time_s;
            row.ego_collisions += trace.footer.ego_collision_count;
            if (cond.guidelines_enabled) {
                coach_episode(trace, cfg.coach, store, episode_index);
            }
            ++episode_index;
        }
        row.rates.per_meter = row.total_distance_m > 0.0
                                  ? static_cast<double>(row.ego_collisions) / row.total_distance_m
                                  : 0.0;
        row.rates.per_second = row.total_time_s > 0.0
                                   ? static_cast<double>(row.ego_collisions) / row.total_time_s
                                   : 0.0;
        report.rows.push_back(std::move(row));
    }

    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < report.rows.size(); ++j) {
            const ConditionResult& base = report.rows[i];
            const ConditionResult& better = report.rows[j];
            if (base.rates.per_meter <= 0.0 || base.rates.per_second <= 0.0) continue;
            Reduction d;
            d.baseline = base.condition;
            d.improved = better.condition;
            d.by_distance_pct = percent_reduction(base.rates.per_meter, better.rates.per_meter);
            d.by_time_pct = percent_reduction(base.rates.per_second, better.rates.per_second);
            report.reductions.push_back(d);
        }
    }
    return report;
}

/// Replays the recorded proposals against a fresh simulation of the traced
/// world. Bytes must match; the reasoner itself is bypassed.
class RecordedReasoner final : public Reasoner {
public:
    struct Entry {
        AtomicAction proposed;
        bool failure;
    };

    explicit RecordedReasoner(std::vector<Entry> entries) : entries_(std::move(entries)) {}

    Proposal propose(const AgentContext&) override {
        if (index_ >= entries_.size()) {
            throw ReasonerUnavailable("trace has no more recorded decisions");
        }
        const Entry& e = entries_[index_++];
        if (e.failure) throw ReasonerUnavailable("recorded decision was a fallback");
        return {e.proposed, ""};
    }

    std::string name() const override { return "recorded"; }

private:
    std::vector<Entry> entries_;
    std::size_t index_ = 0;
};

struct ReplayResult {
    bool ok = false;
    std::int64_t divergence_line = -1;  // 1-based line in the trace file
    std::string message;
};

/// Re-simulates a trace file from its header and compares line by line.
inline ReplayResult replay(const std::string& path,
                           const RoadNetwork* network = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot open trace file: " + path);
    std::vector<std::string> original_lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) original_lines.push_back(line);
    }
    in.clear();
    in.seekg(0);
    EpisodeTrace original = trace_from_jsonl(in);

    RunConfig cfg = RunConfig::from_json(original.header.config);
    EpisodeOptions opt;
    opt.condition = ConditionSpec::from_id(original.header.condition.at(0));
    opt.seed = original.header.seed;
    opt.duration_s = cfg.sim.episode_duration_s;

    std::vector<RecordedReasoner::Entry> entries;
    for (const TraceRecord& r : original.records) {
        if (r.decided) entries.push_back({r.proposed, r.reasoner_failure});
    }
    RecordedReasoner reasoner(std::move(entries));

    std::vector<Demonstration> demos;
    if (!cfg.demonstrations_file.empty()) demos = load_demonstrations(cfg.demonstrations_file);
    EpisodeTrace regenerated = run_episode(cfg, opt, reasoner, nullptr, &demos, network);

    std::string regen_text = trace_to_jsonl(regenerated);
    std::vector<std::string> regen_lines;
    std::size_t start = 0;
    while (start < regen_text.size()) {
        std::size_t end = regen_text.find('\n', start);
        if (end == std::string::npos) end = regen_text.size();
        if (end > start) regen_lines.push_back(regen_text.substr(start, end - start));
        start = end + 1;
    }

    ReplayResult result;
    std::size_t n = std::min(original_lines.size(), regen_lines.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (original_lines[i] != regen_lines[i]) {
            result.divergence_line = static_cast<std::int64_t>(i) + 1;
            result.message = "line " + std::to_string(i + 1) + " differs from the re-simulation";
            return result;
        }
    }
    if (original_lines.size() != regen_lines.size()) {
        result.divergence_line = static_cast<std::int64_t>(n) + 1;
        result.message = "trace length differs from the re-simulation";
        return result;
    }
    result.ok = true;
    result.message = "replay verified " + std::to_string(original_lines.size()) + " lines";
    return result;
}

} // namespace surreal
