// Command-line front end: single episodes, the four-condition ablation
// suite, trace replay verification, and offline coaching of a saved trace.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <surreal/surreal.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitEpisodeAbort = 3;
constexpr int kExitReplayDivergence = 4;

struct SharedFlags {
    std::string config_file;
    std::string network_file;
    std::string demos_file;
    std::string guideline_store_file;
    std::string reasoner_kind;
};

// Returns the run configuration with file, then flag, overrides applied.
surreal::RunConfig load_config(const SharedFlags& shared) {
    surreal::RunConfig cfg;
    if (!shared.config_file.empty()) cfg = surreal::RunConfig::load_file(shared.config_file);
    if (!shared.network_file.empty()) cfg.network_file = shared.network_file;
    if (!shared.demos_file.empty()) cfg.demonstrations_file = shared.demos_file;
    if (!shared.guideline_store_file.empty()) {
        cfg.guideline_store_file = shared.guideline_store_file;
    }
    if (!shared.reasoner_kind.empty()) cfg.reasoner.kind = shared.reasoner_kind;
    return cfg;
}

surreal::RoadNetwork load_network(const surreal::RunConfig& cfg) {
    if (cfg.network_file.empty()) return surreal::RoadNetwork::default_town();
    std::ifstream in(cfg.network_file);
    if (!in) throw std::runtime_error("cannot open network file: " + cfg.network_file);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw std::runtime_error("network file is not valid JSON: " + cfg.network_file);
    }
    return surreal::RoadNetwork::from_json(j);
}

std::vector<surreal::Demonstration> load_demos(const surreal::RunConfig& cfg) {
    if (cfg.demonstrations_file.empty()) return {};
    return surreal::load_demonstrations(cfg.demonstrations_file);
}

std::unique_ptr<surreal::Reasoner> make_reasoner(const surreal::RunConfig& cfg, char condition) {
    if (cfg.reasoner.kind == "remote") {
        return std::make_unique<surreal::RemoteReasoner>(cfg.reasoner, cfg.safety);
    }
    return std::make_unique<surreal::ScriptedReasoner>(
        surreal::PolicyTable::for_condition(condition));
}

int cmd_run(const SharedFlags& shared, const std::string& condition_str, std::uint64_t seed,
            double duration, bool no_safety, const std::string& trace_out,
            const surreal::SimConfig& overrides, const std::vector<std::string>& set_flags) {
    surreal::RunConfig cfg = load_config(shared);

    // Flags the user actually passed win over the config file.
    const surreal::SimConfig defaults;
    auto passed = [&](const std::string& name) {
        for (const std::string& f : set_flags) {
            if (f == name) return true;
        }
        return false;
    };
    if (passed("--dt")) cfg.sim.dt_s = overrides.dt_s;
    if (passed("--v-max")) cfg.sim.v_max_mps = overrides.v_max_mps;
    if (passed("--accel")) cfg.sim.accel_mps2 = overrides.accel_mps2;
    if (passed("--decel")) cfg.sim.decel_mps2 = overrides.decel_mps2;
    if (passed("--lane-change-ticks")) {
        cfg.sim.lane_change_duration_ticks = overrides.lane_change_duration_ticks;
    }
    if (passed("--npc-count")) cfg.sim.npc_count = overrides.npc_count;
    if (passed("--pedestrian-count")) cfg.sim.pedestrian_count = overrides.pedestrian_count;
    if (passed("--p-run-red")) cfg.sim.profile.p_run_red = overrides.profile.p_run_red;
    if (passed("--p-abrupt")) {
        cfg.sim.profile.p_abrupt_lane_change = overrides.profile.p_abrupt_lane_change;
    }
    if (passed("--desired-speed")) {
        cfg.sim.profile.desired_speed_mps = overrides.profile.desired_speed_mps;
    }
    if (passed("--following-gap")) {
        cfg.sim.profile.following_gap_m = overrides.profile.following_gap_m;
    }
    if (passed("--ego-start-lane")) cfg.sim.ego_start_lane = overrides.ego_start_lane;
    if (passed("--ego-start-offset")) cfg.sim.ego_start_offset = overrides.ego_start_offset;
    cfg.normalize();

    surreal::EpisodeOptions opt;
    opt.condition = surreal::ConditionSpec::from_id(condition_str.at(0));
    if (no_safety) opt.condition.safety_enabled = false;
    opt.seed = seed;
    opt.duration_s = duration;

    surreal::RoadNetwork net = load_network(cfg);
    std::vector<surreal::Demonstration> demos = load_demos(cfg);
    auto reasoner = make_reasoner(cfg, opt.condition.id);

    surreal::GuidelineStore store;
    bool persist_store =
        !cfg.guideline_store_file.empty() && opt.condition.guidelines_enabled;
    if (persist_store) store = surreal::GuidelineStore::load_file(cfg.guideline_store_file);

    surreal::EpisodeTrace trace =
        surreal::run_episode(cfg, opt, *reasoner, &store, &demos, &net);

    if (persist_store) {
        surreal::coach_episode(trace, cfg.coach, store);
        store.save_merged(cfg.guideline_store_file);
    }
    if (!trace_out.empty()) surreal::save_trace_file(trace_out, trace);

    std::printf("condition %c seed %llu: %.1f m in %.1f s, %d ego collision(s), "
                "%d destination(s) reached\n",
                opt.condition.id, static_cast<unsigned long long>(opt.seed),
                trace.footer.total_distance_m, trace.footer.total_time_s,
                trace.footer.ego_collision_count, trace.footer.destinations_reached);
    // An aborted episode may have covered no distance, which makes the
    // per-meter rate undefined; report the abort before touching rates.
    if (trace.footer.aborted) {
        std::fprintf(stderr, "episode aborted: reasoner failure budget exhausted\n");
        return kExitEpisodeAbort;
    }
    surreal::CollisionRates rates = surreal::collision_rates(trace);
    std::printf("rate by distance: %.9f /m, rate by time: %.9f /s\n", rates.per_meter,
                rates.per_second);
    return kExitOk;
}

int cmd_ablation(const SharedFlags& shared, int seed_count, double duration,
                 const std::string& report_file) {
    surreal::RunConfig cfg = load_config(shared);
    cfg.normalize();
    surreal::AblationOptions opt;
    for (int i = 1; i <= seed_count; ++i) opt.seeds.push_back(static_cast<std::uint64_t>(i));
    opt.duration_s = duration;
    opt.reasoner_kind = cfg.reasoner.kind;

    surreal::RoadNetwork net = load_network(cfg);
    std::vector<surreal::Demonstration> demos = load_demos(cfg);
    surreal::MetricsReport report = surreal::run_ablation_suite(cfg, opt, &demos, &net);
    std::fputs(surreal::render_metrics_report(report).c_str(), stdout);
    if (!report_file.empty()) {
        std::ofstream out(report_file);
        if (!out) throw std::runtime_error("cannot write report file: " + report_file);
        out << report.to_json().dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_replay(const std::string& trace_file) {
    surreal::ReplayResult result = surreal::replay(trace_file);
    if (result.ok) {
        std::printf("%s\n", result.message.c_str());
        return kExitOk;
    }
    std::fprintf(stderr, "replay divergence: %s\n", result.message.c_str());
    return kExitReplayDivergence;
}

int cmd_coach(const SharedFlags& shared, const std::string& trace_file) {
    surreal::RunConfig cfg = load_config(shared);
    surreal::EpisodeTrace trace = surreal::load_trace_file(trace_file);
    surreal::Assessment a = surreal::assess_episode(trace, cfg.coach);
    std::fputs(surreal::render_assessment_text(a).c_str(), stdout);
    for (const surreal::Guideline& g : surreal::generate_guidelines(a)) {
        std::printf("guideline: %s\n", g.text.c_str());
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic urban-driving agent simulator"};
    app.require_subcommand(1);

    SharedFlags shared;
    std::string condition = "D";
    std::uint64_t seed = 1;
    double duration = 300.0;
    bool no_safety = false;
    std::string trace_out;
    surreal::SimConfig overrides;

    CLI::App* run = app.add_subcommand("run", "run one episode");
    run->add_option("--condition", condition, "ablation condition A|B|C|D")
        ->check(CLI::IsMember({"A", "B", "C", "D"}));
    run->add_option("--seed", seed, "world seed");
    run->add_option("--duration", duration, "episode length in seconds");
    run->add_option("--reasoner", shared.reasoner_kind, "scripted|remote")
        ->check(CLI::IsMember({"scripted", "remote"}));
    run->add_option("--config", shared.config_file, "JSON config file");
    run->add_option("--trace-out", trace_out, "write the episode trace here");
    run->add_flag("--no-safety", no_safety, "disable the safety layer");
    run->add_option("--network", shared.network_file, "road network JSON file");
    run->add_option("--demos", shared.demos_file, "demonstrations JSON file");
    run->add_option("--guideline-store", shared.guideline_store_file,
                    "guideline persistence file");
    run->add_option("--dt", overrides.dt_s, "seconds per tick");
    run->add_option("--v-max", overrides.v_max_mps, "speed cap m/s");
    run->add_option("--accel", overrides.accel_mps2, "acceleration m/s^2");
    run->add_option("--decel", overrides.decel_mps2, "deceleration m/s^2");
    run->add_option("--lane-change-ticks", overrides.lane_change_duration_ticks,
                    "lane change duration in ticks");
    run->add_option("--npc-count", overrides.npc_count, "background vehicles");
    run->add_option("--pedestrian-count", overrides.pedestrian_count, "pedestrians");
    run->add_option("--p-run-red", overrides.profile.p_run_red,
                    "red-light-running probability per approach");
    run->add_option("--p-abrupt", overrides.profile.p_abrupt_lane_change,
                    "abrupt lane change probability per decision");
    run->add_option("--desired-speed", overrides.profile.desired_speed_mps,
                    "background desired speed m/s");
    run->add_option("--following-gap", overrides.profile.following_gap_m,
                    "background following gap m");
    run->add_option("--ego-start-lane", overrides.ego_start_lane, "ego start lane id");
    run->add_option("--ego-start-offset", overrides.ego_start_offset, "ego start offset m");

    int seed_count = 20;
    std::string report_file;
    CLI::App* ablation = app.add_subcommand("ablation", "run the four-condition suite");
    ablation->add_option("--seeds", seed_count, "number of paired seeds")
        ->check(CLI::PositiveNumber);
    ablation->add_option("--duration", duration, "episode length in seconds");
    ablation->add_option("--reasoner", shared.reasoner_kind, "scripted|remote")
        ->check(CLI::IsMember({"scripted", "remote"}));
    ablation->add_option("--config", shared.config_file, "JSON config file");
    ablation->add_option("--report", report_file, "write the JSON report here");
    ablation->add_option("--network", shared.network_file, "road network JSON file");
    ablation->add_option("--demos", shared.demos_file, "demonstrations JSON file");

    std::string trace_file;
    CLI::App* replay_cmd = app.add_subcommand("replay", "verify a trace against re-simulation");
    replay_cmd->add_option("trace", trace_file, "trace file")->required();

    std::string coach_trace;
    CLI::App* coach_cmd = app.add_subcommand("coach", "assess a saved trace");
    coach_cmd->add_option("trace", coach_trace, "trace file")->required();
    coach_cmd->add_option("--config", shared.config_file, "JSON config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::vector<std::string> set_flags;
            for (const auto* o : run->get_options()) {
                if (o->count() > 0) set_flags.push_back(o->get_name());
            }
            return cmd_run(shared, condition, seed, duration, no_safety, trace_out, overrides,
                           set_flags);
        }
        if (ablation->parsed()) return cmd_ablation(shared, seed_count, duration, report_file);
        if (replay_cmd->parsed()) return cmd_replay(trace_file);
        if (coach_cmd->parsed()) return cmd_coach(shared, coach_trace);
    } catch (const surreal::TraceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    }
    return kExitOk;
}
