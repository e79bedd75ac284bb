#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>
#include <surreal/agent.hpp>
#include <surreal/remote_reasoner.hpp>
#include <surreal/safety.hpp>
#include <surreal/world.hpp>

namespace surreal {

struct CoachThresholds {
    double stop_frequency_per_s = 0.1;
    double speed_change_frequency_per_s = 0.2;
    double override_rate = 0.2;
    int collision_count = 0;  // anything above this is a finding
};

/// Everything one run needs, loadable from a single JSON file. Every field
/// has a default so an empty document is a valid config.
struct RunConfig {
    SimConfig sim;
    SafetyConfig safety;
    AgentConfig agent;
    ReasonerConfig reasoner;
    CoachThresholds coach;
    std::string network_file;          // empty: built-in town
    std::string demonstrations_file;   // empty: run without demonstrations
    std::string guideline_store_file;  // empty: in-memory store only

    /// Keeps derived safety fields consistent with the simulation knobs.
    void normalize() {
        safety.brake_decel_mps2 = sim.decel_mps2;
        safety.tick_seconds = sim.dt_s;
        safety.validate();
        if (sim.dt_s <= 0.0) throw std::invalid_argument("dt must be positive");
        if (sim.accel_mps2 <= 0.0 || sim.decel_mps2 <= 0.0) {
            throw std::invalid_argument("accel and decel must be positive");
        }
        if (sim.profile.p_run_red < 0.0 || sim.profile.p_run_red > 1.0 ||
            sim.profile.p_abrupt_lane_change < 0.0 || sim.profile.p_abrupt_lane_change > 1.0) {
            throw std::invalid_argument("behavior probabilities must lie in [0,1]");
        }
        if (sim.profile.desired_speed_mps > sim.v_max_mps) {
            throw std::invalid_argument("desired speed must not exceed v_max");
        }
    }

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load_file(const std::string& path);
};

inline nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["sim"] = {{"dt_s", sim.dt_s},
                {"v_max_mps", sim.v_max_mps},
                {"accel_mps2", sim.accel_mps2},
                {"decel_mps2", sim.decel_mps2},
                {"lane_change_duration_ticks", sim.lane_change_duration_ticks},
                {"episode_duration_s", sim.episode_duration_s},
                {"seed", sim.seed},
                {"vehicle_length_m", sim.vehicle_length_m},
                {"pedestrian_radius_m", sim.pedestrian_radius_m},
                {"npc_count", sim.npc_count},
                {"pedestrian_count", sim.pedestrian_count},
                {"p_begin_cross", sim.p_begin_cross},
                {"cross_duration_ticks", sim.cross_duration_ticks},
                {"cross_cooldown_ticks", sim.cross_cooldown_ticks},
                {"npc_decision_period_ticks", sim.npc_decision_period_ticks},
                {"min_spawn_spacing_m", sim.min_spawn_spacing_m},
                {"spawn_ego_clearance_m", sim.spawn_ego_clearance_m},
                {"ego_start_lane", sim.ego_start_lane},
                {"ego_start_offset", sim.ego_start_offset}};
    j["sim"]["profile"] = {{"p_run_red", sim.profile.p_run_red},
                           {"p_abrupt_lane_change", sim.profile.p_abrupt_lane_change},
                           {"desired_speed_mps", sim.profile.desired_speed_mps},
                           {"desired_speed_jitter", sim.profile.desired_speed_jitter},
                           {"following_gap_m", sim.profile.following_gap_m}};
    j["sim"]["pedestrian_posts"] = nlohmann::json::array();
    for (const PedestrianPost& p : sim.pedestrian_posts) {
        j["sim"]["pedestrian_posts"].push_back({{"lane", p.lane}, {"offset", p.offset}});
    }
    j["safety"] = {{"mandatory_stop_distance_m", safety.mandatory_stop_distance_m},
                   {"advisory_decel_distance_m", safety.advisory_decel_distance_m},
                   {"min_moving_gap_m", safety.min_moving_gap_m},
                   {"intersection_slow_speed_mps", safety.intersection_slow_speed_mps},
                   {"red_light_stop", safety.red_light_stop}};
    j["agent"] = {{"decision_period_ticks", agent.decision_period_ticks},
                  {"memory_capacity", agent.memory_capacity},
                  {"retry_budget", agent.retry_budget},
                  {"failure_budget", agent.failure_budget},
                  {"horizon_m", agent.horizon_m}};
    j["reasoner"] = {{"kind", reasoner.kind},
                     {"endpoint", reasoner.endpoint},
                     {"model", reasoner.model},
                     {"timeout_s", reasoner.timeout_s},
                     {"max_reply_length", reasoner.max_reply_length},
                     {"temperature", reasoner.temperature}};
    j["coach"] = {{"stop_frequency_per_s", coach.stop_frequency_per_s},
                  {"speed_change_frequency_per_s", coach.speed_change_frequency_per_s},
                  {"override_rate", coach.override_rate},
                  {"collision_count", coach.collision_count}};
    j["network_file"] = network_file;
    j["demonstrations_file"] = demonstrations_file;
    j["guideline_store_file"] = guideline_store_file;
    return j;
}

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("sim")) {
        const auto& s = j["sim"];
        c.sim.dt_s = s.value("dt_s", c.sim.dt_s);
        c.sim.v_max_mps = s.value("v_max_mps", c.sim.v_max_mps);
        c.sim.accel_mps2 = s.value("accel_mps2", c.sim.accel_mps2);
        c.sim.decel_mps2 = s.value("decel_mps2", c.sim.decel_mps2);
        c.sim.lane_change_duration_ticks =
            s.value("lane_change_duration_ticks", c.sim.lane_change_duration_ticks);
        c.sim.episode_duration_s = s.value("episode_duration_s", c.sim.episode_duration_s);
        c.sim.seed = s.value("seed", c.sim.seed);
        c.sim.vehicle_length_m = s.value("vehicle_length_m", c.sim.vehicle_length_m);
        c.sim.pedestrian_radius_m = s.value("pedestrian_radius_m", c.sim.pedestrian_radius_m);
        c.sim.npc_count = s.value("npc_count", c.sim.npc_count);
        c.sim.pedestrian_count = s.value("pedestrian_count", c.sim.pedestrian_count);
        c.sim.p_begin_cross = s.value("p_begin_cross", c.sim.p_begin_cross);
        c.sim.cross_duration_ticks = s.value("cross_duration_ticks", c.sim.cross_duration_ticks);
        c.sim.cross_cooldown_ticks = s.value("cross_cooldown_ticks", c.sim.cross_cooldown_ticks);
        c.sim.npc_decision_period_ticks =
            s.value("npc_decision_period_ticks", c.sim.npc_decision_period_ticks);
        c.sim.min_spawn_spacing_m = s.value("min_spawn_spacing_m", c.sim.min_spawn_spacing_m);
        c.sim.spawn_ego_clearance_m =
            s.value("spawn_ego_clearance_m", c.sim.spawn_ego_clearance_m);
        c.sim.ego_start_lane = s.value("ego_start_lane", c.sim.ego_start_lane);
        c.sim.ego_start_offset = s.value("ego_start_offset", c.sim.ego_start_offset);
        if (s.contains("profile")) {
            const auto& p = s["profile"];
            c.sim.profile.p_run_red = p.value("p_run_red", c.sim.profile.p_run_red);
            c.sim.profile.p_abrupt_lane_change =
                p.value("p_abrupt_lane_change", c.sim.profile.p_abrupt_lane_change);
            c.sim.profile.desired_speed_mps =
                p.value("desired_speed_mps", c.sim.profile.desired_speed_mps);
            c.sim.profile.desired_speed_jitter =
                p.value("desired_speed_jitter", c.sim.profile.desired_speed_jitter);
            c.sim.profile.following_gap_m =
                p.value("following_gap_m", c.sim.profile.following_gap_m);
        }
        if (s.contains("pedestrian_posts")) {
            c.sim.pedestrian_posts.clear();
            for (const auto& jp : s["pedestrian_posts"]) {
                c.sim.pedestrian_posts.push_back(
                    {jp.at("lane").get<std::string>(), jp.at("offset").get<double>()});
            }
        }
    }
    if (j.contains("safety")) {
        const auto& s = j["safety"];
        c.safety.mandatory_stop_distance_m =
            s.value("mandatory_stop_distance_m", c.safety.mandatory_stop_distance_m);
        c.safety.advisory_decel_distance_m =
            s.value("advisory_decel_distance_m", c.safety.advisory_decel_distance_m);
        c.safety.min_moving_gap_m = s.value("min_moving_gap_m", c.safety.min_moving_gap_m);
        c.safety.intersection_slow_speed_mps =
            s.value("intersection_slow_speed_mps", c.safety.intersection_slow_speed_mps);
        c.safety.red_light_stop = s.value("red_light_stop", c.safety.red_light_stop);
    }
    if (j.contains("agent")) {
        const auto& a = j["agent"];
        c.agent.decision_period_ticks =
            a.value("decision_period_ticks", c.agent.decision_period_ticks);
        c.agent.memory_capacity = a.value("memory_capacity", c.agent.memory_capacity);
        c.agent.retry_budget = a.value("retry_budget", c.agent.retry_budget);
        c.agent.failure_budget = a.value("failure_budget", c.agent.failure_budget);
        c.agent.horizon_m = a.value("horizon_m", c.agent.horizon_m);
    }
    if (j.contains("reasoner")) {
        const auto& r = j["reasoner"];
        c.reasoner.kind = r.value("kind", c.reasoner.kind);
        c.reasoner.endpoint = r.value("endpoint", c.reasoner.endpoint);
        c.reasoner.model = r.value("model", c.reasoner.model);
        c.reasoner.timeout_s = r.value("timeout_s", c.reasoner.timeout_s);
        c.reasoner.max_reply_length = r.value("max_reply_length", c.reasoner.max_reply_length);
        c.reasoner.temperature = r.value("temperature", c.reasoner.temperature);
    }
    if (j.contains("coach")) {
        const auto& t = j["coach"];
        c.coach.stop_frequency_per_s =
            t.value("stop_frequency_per_s", c.coach.stop_frequency_per_s);
        c.coach.speed_change_frequency_per_s =
            t.value("speed_change_frequency_per_s", c.coach.speed_change_frequency_per_s);
        c.coach.override_rate = t.value("override_rate", c.coach.override_rate);
        c.coach.collision_count = t.value("collision_count", c.coach.collision_count);
    }
    c.network_file = j.value("network_file", "");
    c.demonstrations_file = j.value("demonstrations_file", "");
    c.guideline_store_file = j.value("guideline_store_file", "");
    c.normalize();
    return c;
}

inline RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("config file is not valid JSON: " + path);
    return from_json(j);
}

} // namespace surreal
