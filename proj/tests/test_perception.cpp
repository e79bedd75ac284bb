#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <surreal/perception.hpp>
#include <surreal/rng.hpp>
#include <surreal/world.hpp>

using namespace surreal;

namespace {

WorldState bare_world(const std::string& ego_lane = "bottom1_r", double ego_offset = 20.0,
                      double ego_speed = 0.0) {
    SimConfig cfg;
    cfg.npc_count = 0;
    cfg.pedestrian_count = 0;
    cfg.ego_start_lane = ego_lane;
    cfg.ego_start_offset = ego_offset;
    WorldState w = make_world(RoadNetwork::default_town(), cfg);
    w.ego().speed = ego_speed;
    return w;
}

VehicleState other(int id, const std::string& lane, double offset, double speed = 0.0) {
    VehicleState v;
    v.id = id;
    v.lane = lane;
    v.offset = offset;
    v.speed = speed;
    return v;
}

} // namespace

TEST_CASE("empty road reports only the ego") {
    WorldState w = bare_world("right_r", 50.0, 3.5);
    AtomicScene s = observe(w);
    CHECK(s.lane == "right_r");
    CHECK(s.ego_speed == 3.5);
    CHECK_FALSE(s.lead_vehicle.has_value());
    CHECK_FALSE(s.nearest_pedestrian.has_value());
    CHECK_FALSE(s.signal.has_value());
    CHECK_FALSE(s.intersection_distance.has_value());
    CHECK(s.has_left_neighbor);
    CHECK_FALSE(s.route_move.has_value());
    CHECK(s.destination_distance == 0.0);
}

TEST_CASE("lead vehicle distance is bumper to bumper") {
    WorldState w = bare_world("bottom1_r", 20.0);
    // Centers 19.5 m apart, both 4.5 m long: 15.0 m of clear space.
    w.vehicles.push_back(other(1, "bottom1_r", 39.5, 2.0));
    AtomicScene s = observe(w);
    REQUIRE(s.lead_vehicle.has_value());
    CHECK(s.lead_vehicle->distance == Catch::Approx(15.0));
    CHECK(s.lead_vehicle->speed == Catch::Approx(2.0));
}

TEST_CASE("lead vehicle is seen across the lane boundary") {
    WorldState w = bare_world("bottom1_r", 140.0);
    w.vehicles.push_back(other(1, "bottom2_r", 30.0));
    AtomicScene s = observe(w);
    REQUIRE(s.lead_vehicle.has_value());
    // 10 m to the lane end plus 30 m, minus two half-lengths.
    CHECK(s.lead_vehicle->distance == Catch::Approx(10.0 + 30.0 - 4.5));
}

TEST_CASE("vehicles beyond the horizon are not reported") {
    WorldState w = bare_world("right_r", 10.0);
    w.vehicles.push_back(other(1, "right_r", 150.0));
    AtomicScene s = observe(w, 100.0);
    CHECK_FALSE(s.lead_vehicle.has_value());
    s = observe(w, 160.0);
    CHECK(s.lead_vehicle.has_value());
}

TEST_CASE("vehicles behind the ego are ignored") {
    WorldState w = bare_world("right_r", 100.0);
    w.vehicles.push_back(other(1, "right_r", 50.0));
    AtomicScene s = observe(w);
    CHECK_FALSE(s.lead_vehicle.has_value());
}

TEST_CASE("overlapping lead clamps to zero distance") {
    WorldState w = bare_world("right_r", 100.0);
    w.vehicles.push_back(other(1, "right_r", 102.0));
    AtomicScene s = observe(w);
    REQUIRE(s.lead_vehicle.has_value());
    CHECK(s.lead_vehicle->distance == 0.0);
}

TEST_CASE("lead distance matches a graph-walk oracle") {
    RoadNetwork net = RoadNetwork::default_town();
    std::vector<std::string> pool;
    for (const Lane& l : net.lanes) pool.push_back(l.id);

    Rng rng(999);
    for (int iter = 0; iter < 800; ++iter) {
        SimConfig cfg;
        cfg.npc_count = 0;
        cfg.pedestrian_count = 0;
        cfg.ego_start_lane = pool[rng.uniform_index(pool.size())];
        cfg.ego_start_offset = rng.uniform(0.0, net.at(cfg.ego_start_lane).length);
        WorldState w = make_world(net, cfg);
        int n = 1 + static_cast<int>(rng.uniform_index(5));
        for (int i = 0; i < n; ++i) {
            const std::string& lane = pool[rng.uniform_index(pool.size())];
            w.vehicles.push_back(other(i + 1, lane, rng.uniform(0.0, net.at(lane).length)));
        }

        // Oracle: walk the first-successor chain far enough to cover the
        // horizon, collecting center distances as it goes.
        const double horizon = 100.0;
        double best = std::numeric_limits<double>::infinity();
        std::string lane = w.ego().lane;
        double start = -w.ego().offset;
        double covered = w.net.at(lane).length - w.ego().offset;
        for (int depth = 0; depth < 16; ++depth) {
            for (std::size_t i = 1; i < w.vehicles.size(); ++i) {
                const VehicleState& v = w.vehicles[i];
                if (v.lane != lane) continue;
                double center = start + v.offset;
                if (center < 0.0) continue;
                double gap = std::max(0.0, center - 4.5);
                if (gap <= horizon && gap < best) best = gap;
            }
            const Lane& l = w.net.at(lane);
            if (covered >= horizon || l.successors.empty()) break;
            start += l.length;
            lane = l.successors.front();
            covered += w.net.at(lane).length;
        }

        AtomicScene s = observe(w, horizon);
        if (std::isinf(best)) {
            CHECK_FALSE(s.lead_vehicle.has_value());
        } else {
            REQUIRE(s.lead_vehicle.has_value());
            CHECK(std::abs(s.lead_vehicle->distance - best) < 1e-6);
        }
    }
}

TEST_CASE("observation is pure") {
    SimConfig cfg;
    cfg.seed = 8;
    WorldState w = make_world(RoadNetwork::default_town(), cfg);
    Rng env_before = w.env_rng, ped_before = w.ped_rng, route_before = w.route_rng;
    AtomicScene a = observe(w);
    AtomicScene b = observe(w);
    CHECK(w.env_rng == env_before);
    CHECK(w.ped_rng == ped_before);
    CHECK(w.route_rng == route_before);
    CHECK(render_scene_text(a) == render_scene_text(b));
    CHECK(scene_to_json(a).dump() == scene_to_json(b).dump());
}

TEST_CASE("pedestrians report distance and crossing state") {
    WorldState w = bare_world("bottom2_r", 5.0);
    PedestrianState p;
    p.id = 0;
    p.lane = "bottom2_r";
    p.offset = 15.0;
    p.phase = PedestrianPhase::Idle;
    w.pedestrians.push_back(p);

    AtomicScene s = observe(w);
    REQUIRE(s.nearest_pedestrian.has_value());
    CHECK(s.nearest_pedestrian->distance == Catch::Approx(10.0 - 2.25));
    CHECK_FALSE(s.nearest_pedestrian->crossing);

    w.pedestrians[0].phase = PedestrianPhase::Crossing;
    s = observe(w);
    REQUIRE(s.nearest_pedestrian.has_value());
    CHECK(s.nearest_pedestrian->crossing);
}

TEST_CASE("nearest of several pedestrians wins") {
    WorldState w = bare_world("bottom2_r", 5.0);
    for (int i = 0; i < 3; ++i) {
        PedestrianState p;
        p.id = i;
        p.lane = "bottom2_r";
        p.offset = 20.0 + 10.0 * i;
        w.pedestrians.push_back(p);
    }
    AtomicScene s = observe(w);
    REQUIRE(s.nearest_pedestrian.has_value());
    CHECK(s.nearest_pedestrian->distance == Catch::Approx(15.0 - 2.25));
}

TEST_CASE("red signal distance is measured to the stop line") {
    // cross_up's stop line sits at 190, ten meters before the lane end.
    WorldState w = bare_world("cross_up", 167.75);
    AtomicScene s = observe(w);
    REQUIRE(s.signal.has_value());
    CHECK(s.signal->state == SignalState::Red);
    CHECK(s.signal->distance == Catch::Approx(20.0));
}

TEST_CASE("a head behind the front bumper no longer binds") {
    WorldState w = bare_world("cross_up", 192.0);
    AtomicScene s = observe(w);
    CHECK_FALSE(s.signal.has_value());
}

TEST_CASE("unsignalled stretch sees the next head down the path") {
    // right_r has no signal; the first head on the walked path guards top1_r.
    // The default horizon is too short to reach it, a wider one is not.
    WorldState w = bare_world("right_r", 150.0);
    CHECK_FALSE(observe(w).signal.has_value());

    AtomicScene s = observe(w, 250.0);
    REQUIRE(s.signal.has_value());
    // 50 m to the lane end + 140 m to top1_r's stop line, minus the half-length.
    CHECK(s.signal->distance == Catch::Approx(50.0 + 140.0 - 2.25));
    CHECK(s.signal->state == SignalState::Green);
}

TEST_CASE("intersection distance tracks the junction box") {
    WorldState w = bare_world("bottom1_r", 100.0);
    AtomicScene s = observe(w);
    REQUIRE(s.intersection_distance.has_value());
    CHECK(*s.intersection_distance == Catch::Approx(140.0 - 100.0 - 2.25));

    w.ego().offset = 145.0;  // inside the box
    s = observe(w);
    REQUIRE(s.intersection_distance.has_value());
    CHECK(*s.intersection_distance == 0.0);
}

TEST_CASE("side gaps measure clear space in the neighbor lane") {
    WorldState w = bare_world("bottom1_r", 50.0);
    w.vehicles.push_back(other(1, "bottom1_l", 70.0));
    w.vehicles.push_back(other(2, "bottom1_l", 45.0));
    AtomicScene s = observe(w);
    REQUIRE(s.left_gap.has_value());
    CHECK(s.left_gap->front == Catch::Approx(20.0 - 4.5));
    CHECK(s.left_gap->rear == Catch::Approx(5.0 - 4.5));
    CHECK_FALSE(s.right_gap.has_value());  // outer ring lane

    // Empty neighbor lane reads as fully clear.
    w.vehicles.resize(1);
    s = observe(w);
    CHECK(s.left_gap->front == Catch::Approx(s.horizon));
    CHECK(s.left_gap->rear == Catch::Approx(s.horizon));
}

TEST_CASE("destination fields appear once a destination is set") {
    WorldState w = bare_world("bottom1_r", 20.0);
    w.has_destination = true;
    w.dest_lane = "bottom1_l";
    w.dest_offset = 100.0;
    AtomicScene s = observe(w);
    CHECK(s.destination_distance == Catch::Approx(88.0));
    REQUIRE(s.route_move.has_value());
    CHECK(*s.route_move == RouteMove::Left);

    w.dest_lane = "bottom2_r";
    w.dest_offset = 50.0;
    s = observe(w);
    CHECK(s.destination_distance == Catch::Approx(130.0 + 50.0));
    CHECK_FALSE(s.route_move.has_value());
}

TEST_CASE("scene text contains the expected phrasings") {
    AtomicScene s;
    s.lane = "bottom1_r";
    s.ego_speed = 4.25;
    s.lead_vehicle = LeadVehicle{7.0, 3.0};
    std::string text = render_scene_text(s);
    CHECK(text.find("vehicle 7.0 meters ahead") != std::string::npos);
    CHECK(text.find("traveling at 4.2 m/s") != std::string::npos);
    CHECK(text.find("There is no left lane.") != std::string::npos);
    CHECK(text.find("There is no right lane.") != std::string::npos);

    AtomicScene empty;
    empty.lane = "right_r";
    std::string empty_text = render_scene_text(empty);
    CHECK(empty_text.find("no vehicles or pedestrians nearby") != std::string::npos);
    CHECK(render_scene_text(empty) == empty_text);
}

TEST_CASE("scene text covers signals, pedestrians, and the route") {
    AtomicScene s;
    s.lane = "cross_up";
    s.ego_speed = 6.0;
    s.nearest_pedestrian = ScenePedestrian{12.5, true};
    s.signal = SceneSignal{SignalState::Red, 30.0};
    s.intersection_distance = 22.0;
    s.left_gap = SideGap{3.0, 40.0};
    s.destination_distance = 250.0;
    s.route_move = RouteMove::Left;
    std::string text = render_scene_text(s);
    CHECK(text.find("A pedestrian is crossing the road 12.5 meters ahead.") != std::string::npos);
    CHECK(text.find("The traffic light ahead is red, 30.0 meters away.") != std::string::npos);
    CHECK(text.find("An intersection begins 22.0 meters ahead.") != std::string::npos);
    CHECK(text.find("Left lane clear space: 3.0 meters behind, 40.0 meters ahead.") !=
          std::string::npos);
    CHECK(text.find("Your destination is 250.0 meters ahead along the route.") !=
          std::string::npos);
    CHECK(text.find("Your route continues in the left lane.") != std::string::npos);

    s.nearest_pedestrian->crossing = false;
    CHECK(render_scene_text(s).find("standing at the roadside") != std::string::npos);
}

TEST_CASE("scene json mirrors optional presence") {
    AtomicScene s;
    s.tick = 12;
    s.lane = "right_r";
    s.ego_speed = 5.0;
    nlohmann::json j = scene_to_json(s);
    CHECK(j.at("tick") == 12);
    CHECK_FALSE(j.contains("lead"));
    CHECK_FALSE(j.contains("pedestrian"));
    CHECK_FALSE(j.contains("signal"));
    CHECK_FALSE(j.contains("route_move"));

    s.lead_vehicle = LeadVehicle{9.5, 1.0};
    s.signal = SceneSignal{SignalState::Yellow, 18.0};
    s.route_move = RouteMove::Right;
    j = scene_to_json(s);
    CHECK(j.at("lead").at("distance") == 9.5);
    CHECK(j.at("signal").at("state") == "yellow");
    CHECK(j.at("route_move") == "right");
}

TEST_CASE("scene digest highlights hazards only") {
    AtomicScene s;
    s.lane = "top1_r";
    s.ego_speed = 7.0;
    CHECK(scene_digest(s) == "lane=top1_r v=7.0");
    s.lead_vehicle = LeadVehicle{11.0, 4.0};
    s.nearest_pedestrian = ScenePedestrian{9.0, false};
    s.signal = SceneSignal{SignalState::Green, 25.0};
    // Idle pedestrians and green lights stay out of the digest.
    CHECK(scene_digest(s) == "lane=top1_r v=7.0 lead=11.0");
    s.nearest_pedestrian->crossing = true;
    s.signal->state = SignalState::Red;
    CHECK(scene_digest(s) == "lane=top1_r v=7.0 lead=11.0 ped=9.0 red=25.0");
}
