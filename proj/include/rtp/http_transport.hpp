#pragma once

#include <string>
#include <vector>

#include "rtp/provider.hpp"

namespace rtp {

struct HttpConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string model = "gpt-4o-mini";
    std::string embed_model = "text-embedding-3-small";
    double connect_timeout_s = 10.0;
    double read_timeout_s = 120.0;

    // Reads RTP_API_BASE, RTP_API_KEY, RTP_MODEL, RTP_EMBED_MODEL.
    // Throws ConfigError when RTP_API_KEY is missing.
    static HttpConfig from_env();
};

// Chat-completions-style HTTP backend: POST <base>/chat/completions and
// POST <base>/embeddings. 408/429/5xx and connection errors are transient;
// content-filter responses map to refusals.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(HttpConfig config);

    ChatOutcome chat_once(const ChatRequest& request) override;
    EmbedOutcome embed_once(const std::vector<std::string>& texts) override;

private:
    HttpConfig config_;
    std::string host_;         // scheme://host[:port]
    std::string path_prefix_;  // e.g. "/v1"
};

}  // namespace rtp
