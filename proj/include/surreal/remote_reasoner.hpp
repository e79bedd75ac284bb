#pragma once

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <httplib.h>
#include <json.hpp>
#include <surreal/context.hpp>
#include <surreal/prompt.hpp>

namespace surreal {

struct ReasonerConfig {
    std::string kind = "scripted";  // "scripted" or "remote"
    std::string endpoint;           // full URL, required for remote
    std::string model = "gpt-4";
    double timeout_s = 10.0;
    std::size_t max_reply_length = 4096;
    double temperature = 0.0;

    void validate() const {
        if (kind != "scripted" && kind != "remote") {
            throw std::invalid_argument("reasoner kind must be \"scripted\" or \"remote\"");
        }
        if (kind == "remote" && endpoint.empty()) {
            throw std::invalid_argument("remote reasoner requires an endpoint URL");
        }
        if (timeout_s <= 0.0) throw std::invalid_argument("reasoner timeout must be positive");
    }
};

namespace detail {

struct Endpoint {
    std::string host;
    int port = 80;
    std::string path = "/";
};

inline Endpoint parse_endpoint(const std::string& url) {
    const std::string http = "http://";
    if (url.rfind("https://", 0) == 0) {
        throw std::invalid_argument("https endpoints are not supported by this build; use http");
    }
    if (url.rfind(http, 0) != 0) {
        throw std::invalid_argument("endpoint must start with http://: " + url);
    }
    std::string rest = url.substr(http.size());
    Endpoint ep;
    std::size_t slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    ep.path = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = authority.find(':');
    if (colon == std::string::npos) {
        ep.host = authority;
    } else {
        ep.host = authority.substr(0, colon);
        ep.port = std::stoi(authority.substr(colon + 1));
    }
    if (ep.host.empty()) throw std::invalid_argument("endpoint has no host: " + url);
    return ep;
}

} // namespace detail

/// Chat-completions-style HTTP backend. One request per propose() call;
/// retries are the agent's responsibility so they stay visible in traces.
class RemoteReasoner final : public Reasoner {
public:
    RemoteReasoner(ReasonerConfig cfg, SafetyConfig safety_cfg = SafetyConfig{})
        : cfg_(std::move(cfg)), safety_cfg_(safety_cfg) {
        cfg_.validate();
        endpoint_ = detail::parse_endpoint(cfg_.endpoint);
        if (const char* key = std::getenv("SURREAL_LLM_API_KEY")) api_key_ = key;
    }

    Proposal propose(const AgentContext& ctx) override {
        PromptDocument doc = build_prompt(ctx, ctx.demonstrations, kCommandSchemaText, safety_cfg_);
        nlohmann::json body;
        body["model"] = cfg_.model;
        body["messages"] = nlohmann::json::array(
            {{{"role", "system"}, {"content", doc.system}},
             {{"role", "user"}, {"content", doc.user_message()}}});
        body["temperature"] = cfg_.temperature;

        httplib::Client client(endpoint_.host, endpoint_.port);
        auto timeout = std::chrono::duration<double>(cfg_.timeout_s);
        auto budget = std::chrono::duration_cast<std::chrono::milliseconds>(timeout);
        client.set_connection_timeout(budget);
        client.set_read_timeout(budget);
        client.set_write_timeout(budget);

        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
        if (!res) {
            throw ReasonerUnavailable("reasoner endpoint unreachable: " +
                                      std::string(httplib::to_string(res.error())));
        }
        if (res->status < 200 || res->status >= 300) {
            throw ReasonerUnavailable("reasoner endpoint returned HTTP " +
                                      std::to_string(res->status));
        }

        std::string reply = extract_reply_text(res->body);
        if (reply.size() > cfg_.max_reply_length) reply.resize(cfg_.max_reply_length);
        ParsedCommand cmd = parse_action_command(reply);  // ParseError propagates
        return {cmd.action, cmd.rationale};
    }

    std::string name() const override { return "remote"; }

    /// choices[0].message.content when the body is a chat-completions
    /// response; otherwise the raw body is treated as the reply.
    static std::string extract_reply_text(const std::string& body) {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (!j.is_discarded() && j.contains("choices") && j["choices"].is_array() &&
            !j["choices"].empty()) {
            const auto& first = j["choices"][0];
            if (first.contains("message") && first["message"].contains("content") &&
                first["message"]["content"].is_string()) {
                return first["message"]["content"].get<std::string>();
            }
        }
        return body;
    }

private:
    ReasonerConfig cfg_;
    SafetyConfig safety_cfg_;
    detail::Endpoint endpoint_;
    std::string api_key_;
};

} // namespace surreal
