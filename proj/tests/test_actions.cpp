#include <catch_amalgamated.hpp>

#include <string>

#include <surreal/actions.hpp>
#include <surreal/rng.hpp>

using namespace surreal;

TEST_CASE("every action round-trips through the wire form") {
    for (AtomicAction a : kAllActions) {
        std::string wire = encode_action(a, "because");
        ParsedCommand cmd = parse_action_command(wire);
        CHECK(cmd.action == a);
        CHECK(cmd.rationale == "because");
    }
}

TEST_CASE("name lookup is a bijection over the vocabulary") {
    for (AtomicAction a : kAllActions) {
        auto back = action_from_name(action_name(a));
        REQUIRE(back.has_value());
        CHECK(*back == a);
    }
    CHECK_FALSE(action_from_name("turn_left").has_value());
    CHECK_FALSE(action_from_name("").has_value());
}

TEST_CASE("action names are case-insensitive on input") {
    CHECK(parse_action_command(R"({"action":"STOP"})").action == AtomicAction::Stop);
    CHECK(parse_action_command(R"({"action":"Lane_Change_Left"})").action ==
          AtomicAction::LaneChangeLeft);
}

TEST_CASE("lane change classification") {
    CHECK(is_lane_change(AtomicAction::LaneChangeLeft));
    CHECK(is_lane_change(AtomicAction::LaneChangeRight));
    CHECK_FALSE(is_lane_change(AtomicAction::Stop));
    CHECK_FALSE(is_lane_change(AtomicAction::Accelerate));
}

TEST_CASE("command embedded in prose is extracted") {
    std::string reply = "Sure, here is my decision:\n"
                        R"({"action":"decelerate","rationale":"lead vehicle is close"})"
                        "\nLet me know if you need anything else.";
    ParsedCommand cmd = parse_action_command(reply);
    CHECK(cmd.action == AtomicAction::Decelerate);
    CHECK(cmd.rationale == "lead vehicle is close");
}

TEST_CASE("unbalanced junk before the command is skipped") {
    std::string reply = R"(weird { text {"action":"stop","rationale":"x"})";
    ParsedCommand cmd = parse_action_command(reply);
    CHECK(cmd.action == AtomicAction::Stop);
}

TEST_CASE("braces inside strings do not confuse extraction") {
    ParsedCommand cmd =
        parse_action_command(R"({"action":"stop","rationale":"use {care} here"})");
    CHECK(cmd.rationale == "use {care} here");

    cmd = parse_action_command(R"({"action":"stop","rationale":"say \"hi\" {"})");
    CHECK(cmd.rationale == "say \"hi\" {");
}

TEST_CASE("first well-formed object is judged as the command") {
    // An earlier object without an action key is an error, not something to
    // skip in favor of a later object.
    std::string reply = R"({"note":"ignore me"} {"action":"stop"})";
    try {
        parse_action_command(reply);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::MissingActionKey);
    }
}

TEST_CASE("missing or malformed action key") {
    try {
        parse_action_command(R"({"rationale":"no action"})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::MissingActionKey);
    }
    try {
        parse_action_command(R"({"action": 5})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::MissingActionKey);
    }
}

TEST_CASE("unknown action name") {
    try {
        parse_action_command(R"({"action":"teleport"})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::UnknownAction);
    }
}

TEST_CASE("no JSON object at all") {
    for (const char* reply : {"", "just some prose", "][", "}{", "{ never closed"}) {
        try {
            parse_action_command(reply);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.kind() == ParseError::Kind::NoJsonObject);
        }
    }
}

TEST_CASE("non-string rationale is dropped, not fatal") {
    ParsedCommand cmd = parse_action_command(R"({"action":"accelerate","rationale":42})");
    CHECK(cmd.action == AtomicAction::Accelerate);
    CHECK(cmd.rationale.empty());
}

TEST_CASE("nested objects inside the command are tolerated") {
    ParsedCommand cmd =
        parse_action_command(R"({"action":"maintain_speed","meta":{"depth":{"x":1}}})");
    CHECK(cmd.action == AtomicAction::MaintainSpeed);
}

namespace {

// Random reply generator mixing valid fragments, mangled JSON, and raw bytes.
std::string random_reply(surreal::Rng& rng) {
    static const char* fragments[] = {
        R"({"action":"stop"})",
        R"({"action":"accelerate","rationale":"go"})",
        R"({"action":)",
        R"("action")",
        "{{{{", "}}}}", "\"", "\\", "prose text ", "\n", ":", ",",
        R"({"rationale":"only"})",
        R"({"action":"fly"})",
    };
    std::string out;
    int parts = 1 + static_cast<int>(rng.uniform_index(6));
    for (int i = 0; i < parts; ++i) {
        if (rng.bernoulli(0.2)) {
            int len = static_cast<int>(rng.uniform_index(12));
            for (int k = 0; k < len; ++k) {
                out.push_back(static_cast<char>(rng.uniform_index(256)));
            }
        } else {
            out += fragments[rng.uniform_index(std::size(fragments))];
        }
    }
    return out;
}

} // namespace

TEST_CASE("parser never escapes the ParseError contract under fuzz") {
    surreal::Rng rng(2024);
    int parsed = 0, rejected = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string reply = random_reply(rng);
        try {
            (void)parse_action_command(reply);
            ++parsed;
        } catch (const ParseError&) {
            ++rejected;
        }
        // Any other exception type escapes and fails the test.
    }
    CHECK(parsed + rejected == 20000);
    CHECK(parsed > 0);
    CHECK(rejected > 0);
}
