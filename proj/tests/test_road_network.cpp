#include <catch_amalgamated.hpp>

#include <surreal/road_network.hpp>

using namespace surreal;

TEST_CASE("signal states cycle red, green, yellow") {
    CHECK(next_signal_state(SignalState::Red) == SignalState::Green);
    CHECK(next_signal_state(SignalState::Green) == SignalState::Yellow);
    CHECK(next_signal_state(SignalState::Yellow) == SignalState::Red);
    for (SignalState s : {SignalState::Red, SignalState::Green, SignalState::Yellow}) {
        CHECK(signal_state_from_name(std::string(signal_state_name(s))) == s);
    }
    CHECK_THROWS_AS(signal_state_from_name("blue"), std::invalid_argument);
}

TEST_CASE("polyline length sums segment lengths") {
    CHECK(polyline_length({}) == 0.0);
    CHECK(polyline_length({{0, 0}}) == 0.0);
    CHECK(polyline_length({{0, 0}, {3, 4}}) == Catch::Approx(5.0));
    CHECK(polyline_length({{0, 0}, {3, 0}, {3, 4}}) == Catch::Approx(7.0));
}

TEST_CASE("built-in town is well formed") {
    RoadNetwork net = RoadNetwork::default_town();
    REQUIRE_NOTHROW(net.validate());
    CHECK(net.lanes.size() == 14);
    CHECK(net.conflict_cells.size() == 4);
    CHECK(net.signals.size() == 6);

    // Ring pairs are symmetric neighbors; crossbars stand alone.
    for (const Lane& l : net.lanes) {
        if (l.id == "cross_up" || l.id == "cross_down") {
            CHECK_FALSE(l.has_left());
            CHECK_FALSE(l.has_right());
            continue;
        }
        if (l.has_left()) CHECK(net.at(l.left).right == l.id);
        if (l.has_right()) CHECK(net.at(l.right).left == l.id);
        CHECK((l.has_left() || l.has_right()));
    }

    // The outer bottom approach can continue along the ring or turn onto the
    // crossbar; the inner one cannot turn.
    const Lane& b1r = net.at("bottom1_r");
    REQUIRE(b1r.successors.size() == 2);
    CHECK(b1r.successors[0] == "bottom2_r");
    CHECK(b1r.successors[1] == "cross_up");
    CHECK(net.at("bottom1_l").successors == std::vector<std::string>{"bottom2_l"});

    // Every lane is reachable: walk successors from bottom1_r.
    std::set<std::string> seen{"bottom1_r"};
    std::vector<std::string> frontier{"bottom1_r"};
    while (!frontier.empty()) {
        std::string id = frontier.back();
        frontier.pop_back();
        const Lane& l = net.at(id);
        for (const std::string& nxt : l.successors) {
            if (seen.insert(nxt).second) frontier.push_back(nxt);
        }
        for (const std::string& nb : {l.left, l.right}) {
            if (!nb.empty() && seen.insert(nb).second) frontier.push_back(nb);
        }
    }
    CHECK(seen.size() == net.lanes.size());
}

TEST_CASE("town signal phases are complementary at the merge points") {
    RoadNetwork net = RoadNetwork::default_town();
    const SignalTiming& ring = net.signals.at("bottom1_r");
    const SignalTiming& cross = net.signals.at("cross_up");
    CHECK(ring.initial_state == SignalState::Green);
    CHECK(cross.initial_state == SignalState::Red);
    // While the ring runs green then yellow, the crossbar holds red.
    CHECK(ring.green_s + ring.yellow_s == Catch::Approx(cross.red_s));
    CHECK(cross.green_s + cross.yellow_s == Catch::Approx(ring.red_s));
}

TEST_CASE("lane lookup") {
    RoadNetwork net = RoadNetwork::default_town();
    CHECK(net.find("no_such_lane") == nullptr);
    CHECK_THROWS_AS(net.at("no_such_lane"), std::invalid_argument);
    CHECK(net.at("right_r").length == Catch::Approx(200.0));

    auto cells = net.cells_of("cross_up");
    REQUIRE(cells.size() == 2);
    CHECK(net.cells_of("right_r").empty());
}

TEST_CASE("validation rejects malformed networks") {
    auto town = [] { return RoadNetwork::default_town(); };

    SECTION("duplicate lane id") {
        RoadNetwork net = town();
        net.lanes.push_back(net.lanes.front());
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("non-positive lane length") {
        RoadNetwork net = town();
        net.lanes.front().length = 0.0;
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("asymmetric neighbor relation") {
        RoadNetwork net = town();
        for (Lane& l : net.lanes) {
            if (l.id == "right_l") l.right = "";
        }
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("unknown successor") {
        RoadNetwork net = town();
        net.lanes.front().successors.push_back("ghost");
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("conflict cell with one member") {
        RoadNetwork net = town();
        net.conflict_cells.push_back({"solo", {{"right_r", 0.0, 5.0}}});
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("conflict span out of range") {
        RoadNetwork net = town();
        net.conflict_cells.front().members.front().end = 1e6;
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("signal on unknown lane") {
        RoadNetwork net = town();
        net.signals["ghost"] = SignalTiming{};
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("non-positive signal phase") {
        RoadNetwork net = town();
        net.signals["bottom1_r"].yellow_s = 0.0;
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("initial elapsed beyond the phase") {
        RoadNetwork net = town();
        net.signals["bottom1_r"].initial_elapsed_s = 100.0;
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("stop margin swallowing the whole lane") {
        RoadNetwork net = town();
        net.signals["bottom1_r"].stop_margin_m = net.at("bottom1_r").length;
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
    SECTION("negative stop margin") {
        RoadNetwork net = town();
        net.signals["bottom1_r"].stop_margin_m = -1.0;
        CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    }
}

TEST_CASE("stop lines sit at the junction box edge") {
    RoadNetwork net = RoadNetwork::default_town();
    CHECK(net.stop_line_offset("bottom1_r") == Catch::Approx(140.0));
    CHECK(net.stop_line_offset("cross_up") == Catch::Approx(190.0));
    CHECK_THROWS_AS(net.stop_line_offset("right_r"), std::out_of_range);
}

TEST_CASE("network json round-trip is lossless") {
    RoadNetwork net = RoadNetwork::default_town();
    nlohmann::json j = net.to_json();
    RoadNetwork back = RoadNetwork::from_json(j);
    CHECK(back.to_json().dump() == j.dump());
}

TEST_CASE("lane length falls back to the polyline when absent") {
    nlohmann::json j;
    j["lanes"] = nlohmann::json::array();
    j["lanes"].push_back({{"id", "a"}, {"polyline", {{0.0, 0.0}, {3.0, 4.0}}}});
    RoadNetwork net = RoadNetwork::from_json(j);
    CHECK(net.at("a").length == Catch::Approx(5.0));
}
