#pragma once

#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>
#include <surreal/coach.hpp>
#include <surreal/remote_reasoner.hpp>

namespace surreal {

/// LLM-backed coach sharing the chat wire contract of the remote reasoner.
/// The rule-based coach stays the deterministic default; this variant exists
/// for runs where an actual model should write the guidelines.
class RemoteCoach {
public:
    explicit RemoteCoach(ReasonerConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.kind = "remote";
        cfg_.validate();
        endpoint_ = detail::parse_endpoint(cfg_.endpoint);
        if (const char* key = std::getenv("SURREAL_LLM_API_KEY")) api_key_ = key;
    }

    /// Builds a deterministic assessment prompt from the trace metrics.
    static std::string build_assessment_prompt(const EpisodeTrace& trace) {
        CoachMetrics m = compute_metrics(trace);
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "An autonomous driver produced this episode summary:\n"
                      "- stop onsets per second: %.4f\n"
                      "- speed direction changes per second: %.4f\n"
                      "- fraction of decisions overridden by the safety layer: %.4f\n"
                      "- ego-involved collisions: %d\n"
                      "- distance driven: %.1f m over %.1f s\n"
                      "Classify the driving quality and, if bad, write short imperative\n"
                      "driving guidelines. Reply with one JSON object of the form\n"
                      "{\"quality\": \"good\" or \"bad\", \"guidelines\": [\"...\"]}.\n",
                      m.stop_frequency_per_s, m.speed_change_frequency_per_s, m.override_rate,
                      m.collision_count, trace.footer.total_distance_m,
                      trace.footer.total_time_s);
        return buf;
    }

    /// One request, parsed as {quality, guidelines:[...]}. Transport errors
    /// raise ReasonerUnavailable; malformed replies raise ParseError.
    std::pair<Quality, std::vector<Guideline>> assess(const EpisodeTrace& trace,
                                                      int episode_index = 0) {
        nlohmann::json body;
        body["model"] = cfg_.model;
        body["messages"] = nlohmann::json::array(
            {{{"role", "system"},
              {"content", "You are a driving coach assessing an autonomous driver."}},
             {{"role", "user"}, {"content", build_assessment_prompt(trace)}}});
        body["temperature"] = cfg_.temperature;

        httplib::Client client(endpoint_.host, endpoint_.port);
        auto budget = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::duration<double>(cfg_.timeout_s));
        client.set_connection_timeout(budget);
        client.set_read_timeout(budget);
        client.set_write_timeout(budget);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
        if (!res) {
            throw ReasonerUnavailable("coach endpoint unreachable: " +
                                      std::string(httplib::to_string(res.error())));
        }
        if (res->status < 200 || res->status >= 300) {
            throw ReasonerUnavailable("coach endpoint returned HTTP " +
                                      std::to_string(res->status));
        }
        return parse_reply(RemoteReasoner::extract_reply_text(res->body), episode_index);
    }

    static std::pair<Quality, std::vector<Guideline>> parse_reply(const std::string& reply,
                                                                  int episode_index) {
        nlohmann::json obj = find_assessment_object(reply);
        std::string q = obj.value("quality", "");
        for (char& c : q) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (q != "good" && q != "bad") {
            throw ParseError(ParseError::Kind::MissingActionKey,
                             "coach reply lacks a good/bad \"quality\" field");
        }
        std::vector<Guideline> guidelines;
        if (obj.contains("guidelines") && obj["guidelines"].is_array()) {
            for (const auto& jg : obj["guidelines"]) {
                if (!jg.is_string()) continue;
                Guideline g;
                g.text = jg.get<std::string>();
                g.source_finding = "coach";
                g.created_at = episode_index;
                if (!g.text.empty()) guidelines.push_back(std::move(g));
            }
        }
        return {q == "good" ? Quality::Good : Quality::Bad, std::move(guidelines)};
    }

private:
    /// First embedded JSON object that carries a "quality" key.
    static nlohmann::json find_assessment_object(const std::string& reply) {
        for (std::size_t pos = reply.find('{'); pos != std::string::npos;
             pos = reply.find('{', pos + 1)) {
            std::size_t end = detail::balanced_object_end(reply, pos);
            if (end == std::string::npos) continue;
            nlohmann::json j =
                nlohmann::json::parse(reply.substr(pos, end - pos), nullptr, false);
            if (!j.is_discarded() && j.is_object() && j.contains("quality")) return j;
        }
        throw ParseError(ParseError::Kind::NoJsonObject,
                         "coach reply contains no assessment object");
    }

    ReasonerConfig cfg_;
    detail::Endpoint endpoint_;
    std::string api_key_;
};

} // namespace surreal
