#include "rtp/http_transport.hpp"

#include <chrono>
#include <cstdlib>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace rtp {

using nlohmann::json;

HttpConfig HttpConfig::from_env() {
    HttpConfig config;
    if (const char* base = std::getenv("RTP_API_BASE"); base && *base) config.base_url = base;
    const char* key = std::getenv("RTP_API_KEY");
    if (!key || !*key) throw ConfigError("RTP_API_KEY is not set; the live backend needs an API key");
    config.api_key = key;
    if (const char* model = std::getenv("RTP_MODEL"); model && *model) config.model = model;
    if (const char* embed = std::getenv("RTP_EMBED_MODEL"); embed && *embed) config.embed_model = embed;
    return config;
}

HttpTransport::HttpTransport(HttpConfig config) : config_(std::move(config)) {
    std::string url = config_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    const auto scheme_end = url.find("://");
    const std::size_t authority = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', authority);
    if (path_start == std::string::npos) {
        host_ = url;
    } else {
        host_ = url.substr(0, path_start);
        path_prefix_ = url.substr(path_start);
    }
    if (host_.empty() || host_.size() == authority) {
        throw ConfigError("invalid API base URL \"" + config_.base_url + "\"");
    }
}

namespace {

bool transient_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

std::string error_snippet(const json& payload, int status) {
    std::string message = "HTTP " + std::to_string(status);
    if (!payload.is_discarded() && payload.contains("error") && payload["error"].is_object()) {
        const json& err = payload["error"];
        if (err.contains("message") && err["message"].is_string()) {
            message += ": " + err["message"].get<std::string>();
        }
    }
    return message;
}

bool filtered_by_content_policy(const json& payload) {
    if (payload.is_discarded() || !payload.contains("error") || !payload["error"].is_object()) return false;
    const json& err = payload["error"];
    return err.contains("code") && err["code"].is_string() && err["code"].get<std::string>() == "content_filter";
}

httplib::Client make_client(const std::string& host, const HttpConfig& config) {
    httplib::Client client(host);
    const auto to_ms = [](double seconds) {
        return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
    };
    client.set_connection_timeout(to_ms(config.connect_timeout_s));
    client.set_read_timeout(to_ms(config.read_timeout_s));
    client.set_write_timeout(to_ms(config.read_timeout_s));
    client.set_bearer_token_auth(config.api_key);
    return client;
}

}  // namespace

ChatOutcome HttpTransport::chat_once(const ChatRequest& request) {
    json body{
        {"model", config_.model},
        {"temperature", request.temperature},
        {"messages",
         json::array({
             json{{"role", "system"}, {"content", request.system}},
             json{{"role", "user"}, {"content", request.user}},
         })},
    };
    if (!request.schema_hint.empty()) body["response_format"] = json{{"type", "json_object"}};

    httplib::Client client = make_client(host_, config_);
    const httplib::Result res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
    if (!res) return ChatOutcome::transient("connection failed: " + httplib::to_string(res.error()));

    const json payload = json::parse(res->body, nullptr, false);
    if (res->status != 200) {
        const std::string message = error_snippet(payload, res->status);
        if (filtered_by_content_policy(payload)) return ChatOutcome::refusal(message);
        if (transient_status(res->status)) return ChatOutcome::transient(message);
        return ChatOutcome::fatal(message);
    }
    if (payload.is_discarded()) return ChatOutcome::fatal("unparseable provider response body");

    try {
        if (!payload.contains("choices") || !payload["choices"].is_array() || payload["choices"].empty()) {
            return ChatOutcome::fatal("provider response has no choices");
        }
        const json& choice = payload["choices"][0];
        if (choice.contains("finish_reason") && choice["finish_reason"].is_string() &&
            choice["finish_reason"].get<std::string>() == "content_filter") {
            return ChatOutcome::refusal("provider flagged the request: finish_reason content_filter");
        }
        std::string content;
        if (choice.contains("message") && choice["message"].is_object()) {
            const json& message = choice["message"];
            if (message.contains("content") && message["content"].is_string()) {
                content = message["content"].get<std::string>();
            }
        }
        std::int64_t prompt_tokens = 0;
        std::int64_t completion_tokens = 0;
        if (payload.contains("usage") && payload["usage"].is_object()) {
            const json& usage = payload["usage"];
            if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
                prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
            }
            if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number()) {
                completion_tokens = usage["completion_tokens"].get<std::int64_t>();
            }
        }
        return ChatOutcome::success(std::move(content), prompt_tokens, completion_tokens);
    } catch (const json::exception& e) {
        return ChatOutcome::fatal(std::string("unexpected provider response shape: ") + e.what());
    }
}

EmbedOutcome HttpTransport::embed_once(const std::vector<std::string>& texts) {
    EmbedOutcome outcome;
    const json body{{"model", config_.embed_model}, {"input", texts}};

    httplib::Client client = make_client(host_, config_);
    const httplib::Result res = client.Post(path_prefix_ + "/embeddings", body.dump(), "application/json");
    if (!res) {
        outcome.status = EmbedOutcome::Status::transient;
        outcome.error = "connection failed: " + httplib::to_string(res.error());
        return outcome;
    }

    const json payload = json::parse(res->body, nullptr, false);
    if (res->status != 200) {
        outcome.status =
            transient_status(res->status) ? EmbedOutcome::Status::transient : EmbedOutcome::Status::fatal;
        outcome.error = error_snippet(payload, res->status);
        return outcome;
    }
    if (payload.is_discarded()) {
        outcome.status = EmbedOutcome::Status::fatal;
        outcome.error = "unparseable embedding response body";
        return outcome;
    }

    try {
        if (!payload.contains("data") || !payload["data"].is_array()) {
            outcome.status = EmbedOutcome::Status::fatal;
            outcome.error = "embedding response has no data array";
            return outcome;
        }
        outcome.vectors.assign(texts.size(), {});
        for (const json& item : payload["data"]) {
            const auto index = item.at("index").get<std::size_t>();
            if (index >= outcome.vectors.size()) {
                outcome.status = EmbedOutcome::Status::fatal;
                outcome.error = "embedding index out of range";
                return outcome;
            }
            outcome.vectors[index] = item.at("embedding").get<std::vector<double>>();
        }
        return outcome;
    } catch (const json::exception& e) {
        outcome.status = EmbedOutcome::Status::fatal;
        outcome.error = std::string("unexpected embedding response shape: ") + e.what();
        outcome.vectors.clear();
        return outcome;
    }
}

}  // namespace rtp
