#include "rtp/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

namespace rtp {

using nlohmann::json;

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::question: return "question";
        case Stage::answer: return "answer";
        case Stage::summarize: return "summarize";
        case Stage::generation: return "generation";
    }
    return "question";
}

TokenLedger TokenLedger::operator-(const TokenLedger& earlier) const {
    return TokenLedger{
        question_stage - earlier.question_stage,
        answer_stage - earlier.answer_stage,
        summarize_stage - earlier.summarize_stage,
        generation_stage - earlier.generation_stage,
    };
}

void to_json(json& j, const TokenLedger& ledger) {
    j = json{
        {"question_stage", ledger.question_stage},
        {"answer_stage", ledger.answer_stage},
        {"summarize_stage", ledger.summarize_stage},
        {"generation_stage", ledger.generation_stage},
        {"total", ledger.total()},
    };
}

void from_json(const json& j, TokenLedger& ledger) {
    ledger.question_stage = j.value("question_stage", std::int64_t{0});
    ledger.answer_stage = j.value("answer_stage", std::int64_t{0});
    ledger.summarize_stage = j.value("summarize_stage", std::int64_t{0});
    ledger.generation_stage = j.value("generation_stage", std::int64_t{0});
}

ChatOutcome ChatOutcome::success(std::string text, std::int64_t prompt_tokens, std::int64_t completion_tokens) {
    ChatOutcome out;
    out.status = Status::ok;
    out.text = std::move(text);
    out.prompt_tokens = prompt_tokens;
    out.completion_tokens = completion_tokens;
    return out;
}

ChatOutcome ChatOutcome::transient(std::string error) {
    ChatOutcome out;
    out.status = Status::transient;
    out.error = std::move(error);
    return out;
}

ChatOutcome ChatOutcome::refusal(std::string error) {
    ChatOutcome out;
    out.status = Status::refusal;
    out.error = std::move(error);
    return out;
}

ChatOutcome ChatOutcome::fatal(std::string error) {
    ChatOutcome out;
    out.status = Status::fatal;
    out.error = std::move(error);
    return out;
}

std::int64_t word_count(std::string_view text) {
    std::int64_t count = 0;
    bool in_word = false;
    for (const char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

// ---------------------------------------------------------------------------
// ScriptedTransport

ScriptedTransport::ScriptedTransport(std::vector<ScriptedRule> rules, std::vector<EmbedRule> embed_rules)
    : rules_(std::move(rules)), embed_rules_(std::move(embed_rules)) {}

ScriptedTransport ScriptedTransport::from_rules_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open rules file: " + path.string());

    std::vector<ScriptedRule> rules;
    std::vector<EmbedRule> embed_rules;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw ConfigError("rules file line " + std::to_string(line_number) + ": not a JSON object");
        }
        if (obj.contains("embed_contains")) {
            EmbedRule rule;
            rule.when_contains = obj.at("embed_contains").get<std::string>();
            rule.vector = obj.at("vector").get<std::vector<double>>();
            embed_rules.push_back(std::move(rule));
            continue;
        }
        ScriptedRule rule;
        const auto& when = obj.at("when_contains");
        if (when.is_string()) {
            rule.when_contains.push_back(when.get<std::string>());
        } else {
            rule.when_contains = when.get<std::vector<std::string>>();
        }
        if (obj.contains("reply")) {
            const auto& reply = obj.at("reply");
            rule.reply = reply.is_string() ? reply.get<std::string>() : reply.dump();
        }
        rule.refuse = obj.value("refuse", false);
        rule.transient = obj.value("transient", false);
        rule.latency = std::chrono::milliseconds(obj.value("latency_ms", 0));
        if (!rule.refuse && !rule.transient && rule.reply.empty()) {
            throw ConfigError("rules file line " + std::to_string(line_number) + ": rule has no reply");
        }
        rules.push_back(std::move(rule));
    }
    return ScriptedTransport(std::move(rules), std::move(embed_rules));
}

ChatOutcome ScriptedTransport::chat_once(const ChatRequest& request) {
    auto matches = [&](const ScriptedRule& rule) {
        return std::all_of(rule.when_contains.begin(), rule.when_contains.end(), [&](const std::string& needle) {
            return request.system.find(needle) != std::string::npos ||
                   request.user.find(needle) != std::string::npos;
        });
    };
    for (const auto& rule : rules_) {
        if (!matches(rule)) continue;
        if (rule.latency.count() > 0) std::this_thread::sleep_for(rule.latency);
        if (rule.refuse) return ChatOutcome::refusal("scripted refusal");
        if (rule.transient) return ChatOutcome::transient("scripted transient failure");
        return ChatOutcome::success(rule.reply, word_count(request.system) + word_count(request.user),
                                    word_count(rule.reply));
    }
    const std::string excerpt = request.user.substr(0, 120);
    return ChatOutcome::fatal("no scripted rule matched request (user: \"" + excerpt + "\")");
}

EmbedOutcome ScriptedTransport::embed_once(const std::vector<std::string>& texts) {
    EmbedOutcome out;
    for (const auto& text : texts) {
        const auto rule = std::find_if(embed_rules_.begin(), embed_rules_.end(), [&](const EmbedRule& r) {
            return text.find(r.when_contains) != std::string::npos;
        });
        if (rule == embed_rules_.end()) {
            out.status = EmbedOutcome::Status::fatal;
            out.error = "no scripted embedding rule matched text \"" + text.substr(0, 80) + "\"";
            return out;
        }
        out.vectors.push_back(rule->vector);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ProviderGateway

ProviderGateway::ProviderGateway(std::unique_ptr<Transport> transport, RetryPolicy retry, int max_inflight)
    : transport_(std::move(transport)),
      retry_(retry),
      max_inflight_(max_inflight < 1 ? 1 : max_inflight),
      inflight_(max_inflight_) {}

void ProviderGateway::credit(Stage stage, std::int64_t tokens) {
    switch (stage) {
        case Stage::question: question_tokens_ += tokens; break;
        case Stage::answer: answer_tokens_ += tokens; break;
        case Stage::summarize: summarize_tokens_ += tokens; break;
        case Stage::generation: generation_tokens_ += tokens; break;
    }
}

void ProviderGateway::backoff_sleep(int attempt) {
    static std::mutex jitter_mutex;
    static std::mt19937_64 jitter_rng{std::random_device{}()};
    double fraction;
    {
        std::lock_guard lock(jitter_mutex);
        fraction = std::uniform_real_distribution<double>(-retry_.jitter, retry_.jitter)(jitter_rng);
    }
    const double delay = retry_.base_delay.count() * std::pow(retry_.factor, attempt - 1) * (1.0 + fraction);
    if (delay > 0) std::this_thread::sleep_for(std::chrono::duration<double>(delay));
}

ChatReply ProviderGateway::chat_complete(const ChatRequest& request) {
    const int attempts_allowed = request.max_attempts > 0 ? request.max_attempts : retry_.max_attempts;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
        ChatOutcome outcome;
        {
            inflight_.acquire();
            struct Release {
                std::counting_semaphore<>& sem;
                ~Release() { sem.release(); }
            } release{inflight_};
            outcome = transport_->chat_once(request);
        }
        switch (outcome.status) {
            case ChatOutcome::Status::ok:
                credit(request.stage, outcome.prompt_tokens + outcome.completion_tokens);
                return ChatReply{outcome.text, outcome.prompt_tokens, outcome.completion_tokens, attempt};
            case ChatOutcome::Status::refusal:
                credit(request.stage, outcome.prompt_tokens + outcome.completion_tokens);
                throw RefusalError(outcome.error.empty() ? "provider refused the request" : outcome.error);
            case ChatOutcome::Status::fatal:
                throw ConfigError(outcome.error);
            case ChatOutcome::Status::transient:
                last_error = outcome.error;
                if (attempt < attempts_allowed) backoff_sleep(attempt);
                break;
        }
    }
    throw ExhaustedError("chat request failed after " + std::to_string(attempts_allowed) +
                         " attempts; last error: " + last_error);
}

std::vector<std::vector<double>> ProviderGateway::embed_texts(const std::vector<std::string>& texts) {
    if (texts.empty()) throw EmptyInputError("embed_texts requires at least one text");

    const int attempts_allowed = retry_.max_attempts;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
        EmbedOutcome outcome;
        {
            inflight_.acquire();
            struct Release {
                std::counting_semaphore<>& sem;
                ~Release() { sem.release(); }
            } release{inflight_};
            outcome = transport_->embed_once(texts);
        }
        if (outcome.status == EmbedOutcome::Status::fatal) throw ConfigError(outcome.error);
        if (outcome.status == EmbedOutcome::Status::transient) {
            last_error = outcome.error;
            if (attempt < attempts_allowed) backoff_sleep(attempt);
            continue;
        }
        if (outcome.vectors.size() != texts.size()) {
            throw ConfigError("provider returned " + std::to_string(outcome.vectors.size()) + " vectors for " +
                              std::to_string(texts.size()) + " inputs");
        }
        for (const auto& vec : outcome.vectors) {
            if (vec.size() != outcome.vectors.front().size()) {
                throw DimensionMismatchError("provider returned vectors of lengths " +
                                             std::to_string(outcome.vectors.front().size()) + " and " +
                                             std::to_string(vec.size()));
            }
        }
        return outcome.vectors;
    }
    throw ExhaustedError("embedding request failed after " + std::to_string(attempts_allowed) +
                         " attempts; last error: " + last_error);
}

TokenLedger ProviderGateway::ledger_snapshot() const {
    return TokenLedger{
        question_tokens_.load(),
        answer_tokens_.load(),
        summarize_tokens_.load(),
        generation_tokens_.load(),
    };
}

}  // namespace rtp
