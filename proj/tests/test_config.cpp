#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include <surreal/config.hpp>

using namespace surreal;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string tmp_path(const std::string& name) {
    return std::string(TEST_TMP_DIR) + "/" + name;
}

std::string write_tmp(const std::string& name, const std::string& text) {
    std::string path = tmp_path(name);
    std::ofstream out(path);
    out << text;
    return path;
}

} // namespace

TEST_CASE("an empty document yields the defaults") {
    RunConfig c = RunConfig::from_json(nlohmann::json::object());
    RunConfig d;
    CHECK(c.sim.dt_s == d.sim.dt_s);
    CHECK(c.sim.npc_count == d.sim.npc_count);
    CHECK(c.sim.profile.desired_speed_mps == d.sim.profile.desired_speed_mps);
    CHECK(c.sim.pedestrian_posts.size() == d.sim.pedestrian_posts.size());
    CHECK(c.agent.decision_period_ticks == d.agent.decision_period_ticks);
    CHECK(c.reasoner.kind == "scripted");
    CHECK(c.network_file.empty());
    // normalize() ran: derived safety fields follow the sim knobs.
    CHECK(c.safety.brake_decel_mps2 == c.sim.decel_mps2);
    CHECK(c.safety.tick_seconds == c.sim.dt_s);
}

TEST_CASE("full round trip preserves every field") {
    RunConfig a;
    a.sim.dt_s = 0.05;
    a.sim.v_max_mps = 20.0;
    a.sim.accel_mps2 = 2.5;
    a.sim.decel_mps2 = 4.5;
    a.sim.lane_change_duration_ticks = 14;
    a.sim.episode_duration_s = 120.0;
    a.sim.seed = 777;
    a.sim.vehicle_length_m = 4.2;
    a.sim.pedestrian_radius_m = 0.4;
    a.sim.npc_count = 11;
    a.sim.pedestrian_count = 2;
    a.sim.p_begin_cross = 0.01;
    a.sim.cross_duration_ticks = 80;
    a.sim.cross_cooldown_ticks = 99;
    a.sim.npc_decision_period_ticks = 3;
    a.sim.min_spawn_spacing_m = 12.0;
    a.sim.spawn_ego_clearance_m = 33.0;
    a.sim.ego_start_lane = "top1_r";
    a.sim.ego_start_offset = 55.0;
    a.sim.profile.p_run_red = 0.2;
    a.sim.profile.p_abrupt_lane_change = 0.07;
    a.sim.profile.desired_speed_mps = 9.0;
    a.sim.profile.desired_speed_jitter = 0.1;
    a.sim.profile.following_gap_m = 8.0;
    a.sim.pedestrian_posts = {{"left_r", 70.0}, {"right_l", 10.0}};
    a.safety.mandatory_stop_distance_m = 12.0;
    a.safety.advisory_decel_distance_m = 25.0;
    a.safety.min_moving_gap_m = 1.5;
    a.safety.intersection_slow_speed_mps = 4.0;
    a.safety.red_light_stop = false;
    a.agent.decision_period_ticks = 2;
    a.agent.memory_capacity = 7;
    a.agent.retry_budget = 5;
    a.agent.failure_budget = 9;
    a.agent.horizon_m = 80.0;
    a.reasoner.kind = "remote";
    a.reasoner.endpoint = "http://127.0.0.1:9999/v1";
    a.reasoner.model = "test-model";
    a.reasoner.timeout_s = 2.5;
    a.reasoner.max_reply_length = 512;
    a.reasoner.temperature = 0.7;
    a.coach.stop_frequency_per_s = 0.3;
    a.coach.speed_change_frequency_per_s = 0.4;
    a.coach.override_rate = 0.5;
    a.coach.collision_count = 2;
    a.network_file = "net.json";
    a.demonstrations_file = "demos.json";
    a.guideline_store_file = "store.json";

    RunConfig b = RunConfig::from_json(a.to_json());
    CHECK(b.to_json() == a.to_json());
    CHECK(b.sim.seed == 777);
    CHECK(b.sim.ego_start_lane == "top1_r");
    REQUIRE(b.sim.pedestrian_posts.size() == 2);
    CHECK(b.sim.pedestrian_posts[1].lane == "right_l");
    CHECK(b.sim.pedestrian_posts[1].offset == 10.0);
    CHECK(b.reasoner.endpoint == "http://127.0.0.1:9999/v1");
    CHECK(b.safety.red_light_stop == false);
    CHECK(b.coach.collision_count == 2);
    // Derived fields track the round-tripped sim values.
    CHECK(b.safety.brake_decel_mps2 == 4.5);
    CHECK(b.safety.tick_seconds == 0.05);
}

TEST_CASE("partial documents override only what they mention") {
    RunConfig c = RunConfig::from_json(nlohmann::json::parse(R"({
        "sim": {"npc_count": 3, "profile": {"p_run_red": 0.5}},
        "agent": {"memory_capacity": 9}
    })"));
    RunConfig d;
    CHECK(c.sim.npc_count == 3);
    CHECK(c.sim.profile.p_run_red == 0.5);
    CHECK(c.sim.profile.following_gap_m == d.sim.profile.following_gap_m);
    CHECK(c.sim.dt_s == d.sim.dt_s);
    CHECK(c.agent.memory_capacity == 9);
    CHECK(c.agent.retry_budget == d.agent.retry_budget);
}

TEST_CASE("an explicit empty post list clears the default posts") {
    RunConfig c = RunConfig::from_json(nlohmann::json::parse(
        R"({"sim": {"pedestrian_posts": []}})"));
    CHECK(c.sim.pedestrian_posts.empty());
    RunConfig untouched = RunConfig::from_json(nlohmann::json::object());
    CHECK_FALSE(untouched.sim.pedestrian_posts.empty());
}

TEST_CASE("validation rejects unusable documents") {
    auto parse = [](const std::string& text) {
        return RunConfig::from_json(nlohmann::json::parse(text));
    };
    CHECK_THROWS_AS(parse(R"({"sim": {"dt_s": 0.0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"sim": {"dt_s": -0.1}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"sim": {"accel_mps2": 0.0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"sim": {"decel_mps2": -3.0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"sim": {"profile": {"p_run_red": 1.5}}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"sim": {"profile": {"p_abrupt_lane_change": -0.1}}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"sim": {"v_max_mps": 5.0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"safety": {"mandatory_stop_distance_m": 25.0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"safety": {"advisory_decel_distance_m": 5.0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"safety": {"min_moving_gap_m": 0.0}})"), std::invalid_argument);
}

TEST_CASE("load_file reads a document and reports bad files") {
    SECTION("missing file") {
        CHECK_THROWS_MATCHES(RunConfig::load_file(tmp_path("no_such_config.json")),
                             std::runtime_error,
                             Catch::Matchers::MessageMatches(ContainsSubstring("cannot open")));
    }
    SECTION("invalid json") {
        std::string path = write_tmp("bad_config.json", "{ definitely not json");
        CHECK_THROWS_MATCHES(RunConfig::load_file(path), std::runtime_error,
                             Catch::Matchers::MessageMatches(ContainsSubstring("not valid JSON")));
        std::remove(path.c_str());
    }
    SECTION("valid file") {
        std::string path = write_tmp("good_config.json",
                                     R"({"sim": {"seed": 424242}, "network_file": "town.json"})");
        RunConfig c = RunConfig::load_file(path);
        CHECK(c.sim.seed == 424242);
        CHECK(c.network_file == "town.json");
        std::remove(path.c_str());
    }
}

TEST_CASE("the shipped example config loads cleanly") {
    RunConfig c = RunConfig::load_file(std::string(TEST_DATA_DIR) + "/example_config.json");
    CHECK(c.sim.npc_count == 8);
    CHECK(c.sim.profile.desired_speed_mps == 6.0);
    CHECK(c.reasoner.kind == "scripted");
    CHECK(c.demonstrations_file == "data/demonstrations.json");
    CHECK_NOTHROW(c.normalize());
}
