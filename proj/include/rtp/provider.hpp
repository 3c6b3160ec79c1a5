#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rtp/errors.hpp"

namespace rtp {

// Which pipeline stage a request belongs to; drives token accounting.
enum class Stage { question, answer, summarize, generation };

const char* stage_name(Stage stage);

struct ChatRequest {
    std::string system;
    std::string user;
    double temperature = 0.0;
    std::string schema_hint;  // rendered {schema_str}; live backends use it to request JSON output
    int max_attempts = 0;     // 0 = gateway default
    Stage stage = Stage::question;
};

struct ChatReply {
    std::string raw_text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    int attempts_used = 0;
};

// Per-stage token counters. total is always the sum of the four stages.
struct TokenLedger {
    std::int64_t question_stage = 0;
    std::int64_t answer_stage = 0;
    std::int64_t summarize_stage = 0;
    std::int64_t generation_stage = 0;

    std::int64_t total() const {
        return question_stage + answer_stage + summarize_stage + generation_stage;
    }

    TokenLedger operator-(const TokenLedger& earlier) const;
};

void to_json(nlohmann::json& j, const TokenLedger& ledger);
void from_json(const nlohmann::json& j, TokenLedger& ledger);

struct RefusalError : Error {
    using Error::Error;
};

struct ExhaustedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

// Result of a single transport attempt, before retry policy is applied.
struct ChatOutcome {
    enum class Status { ok, transient, refusal, fatal };
    Status status = Status::ok;
    std::string text;
    std::string error;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    static ChatOutcome success(std::string text, std::int64_t prompt_tokens, std::int64_t completion_tokens);
    static ChatOutcome transient(std::string error);
    static ChatOutcome refusal(std::string error);
    static ChatOutcome fatal(std::string error);
};

struct EmbedOutcome {
    enum class Status { ok, transient, fatal };
    Status status = Status::ok;
    std::vector<std::vector<double>> vectors;
    std::string error;
};

// One attempt against a concrete endpoint. Retries, refusal mapping and token
// accounting live in ProviderGateway, shared by every transport.
class Transport {
public:
    virtual ~Transport() = default;
    virtual ChatOutcome chat_once(const ChatRequest& request) = 0;
    virtual EmbedOutcome embed_once(const std::vector<std::string>& texts) = 0;
};

// Deterministic rule-table transport. First matching rule wins; a rule matches
// when every `when_contains` entry appears in the request's system or user text.
// Token counts are whitespace-delimited word counts.
struct ScriptedRule {
    std::vector<std::string> when_contains;
    std::string reply;
    bool refuse = false;
    bool transient = false;
    std::chrono::milliseconds latency{0};
};

struct EmbedRule {
    std::string when_contains;
    std::vector<double> vector;
};

class ScriptedTransport : public Transport {
public:
    ScriptedTransport() = default;
    explicit ScriptedTransport(std::vector<ScriptedRule> rules, std::vector<EmbedRule> embed_rules = {});

    // jsonl lines: {"when_contains": "..."|["..."], "reply": "..."|{...},
    //              "refuse": bool?, "transient": bool?, "latency_ms": int?}
    // or          {"embed_contains": "...", "vector": [..]}
    static ScriptedTransport from_rules_file(const std::filesystem::path& path);

    ChatOutcome chat_once(const ChatRequest& request) override;
    EmbedOutcome embed_once(const std::vector<std::string>& texts) override;

private:
    std::vector<ScriptedRule> rules_;
    std::vector<EmbedRule> embed_rules_;
};

std::int64_t word_count(std::string_view text);

struct RetryPolicy {
    std::chrono::duration<double> base_delay{0.5};
    double factor = 2.0;
    double jitter = 0.2;  // +/- fraction of the delay
    int max_attempts = 5;
};

// Thread-safe facade over a transport: bounded in-flight requests, exponential
// backoff on transient failures, refusal mapping, and per-stage token ledger.
class ProviderGateway {
public:
    explicit ProviderGateway(std::unique_ptr<Transport> transport, RetryPolicy retry = {}, int max_inflight = 8);

    // Throws RefusalError (never retried), ExhaustedError (transient failures
    // exceeded max_attempts) or ConfigError (non-retryable setup problem).
    ChatReply chat_complete(const ChatRequest& request);

    // One vector per input text, order preserved. Throws EmptyInputError and
    // DimensionMismatchError when the provider returns ragged vectors.
    std::vector<std::vector<double>> embed_texts(const std::vector<std::string>& texts);

    TokenLedger ledger_snapshot() const;
    int max_inflight() const { return max_inflight_; }

private:
    std::unique_ptr<Transport> transport_;
    RetryPolicy retry_;
    int max_inflight_;
    std::counting_semaphore<> inflight_;
    std::atomic<std::int64_t> question_tokens_{0};
    std::atomic<std::int64_t> answer_tokens_{0};
    std::atomic<std::int64_t> summarize_tokens_{0};
    std::atomic<std::int64_t> generation_tokens_{0};

    void credit(Stage stage, std::int64_t tokens);
    void backoff_sleep(int attempt);
};

}  // namespace rtp
