#include "rtp/config.hpp"

#include <nlohmann/json.hpp>

namespace rtp {

using nlohmann::json;

void BuildConfig::validate() const {
    if (sample_size < 1) throw InvalidConfigError("sample_size must be >= 1");
    if (max_depth < 1) throw InvalidConfigError("max_depth must be >= 1");
    if (min_leaf < 1) throw InvalidConfigError("min_leaf must be >= 1");
    if (votes < 1) throw InvalidConfigError("votes must be >= 1");
    if (max_words < 1) throw InvalidConfigError("max_words must be >= 1");
    if (question_retries < 0) throw InvalidConfigError("question_retries must be >= 0");
    if (max_attempts < 1) throw InvalidConfigError("max_attempts must be >= 1");
}

void to_json(json& j, const Temperatures& t) {
    j = json{
        {"question", t.question},
        {"answer", t.answer},
        {"summary", t.summary},
        {"generation", t.generation},
    };
}

void from_json(const json& j, Temperatures& t) {
    t.question = j.value("question", 0.7);
    t.answer = j.value("answer", 0.7);
    t.summary = j.value("summary", 0.3);
    t.generation = j.value("generation", 0.9);
}

void to_json(json& j, const BuildConfig& cfg) {
    j = json{
        {"sample_size", cfg.sample_size},
        {"max_depth", cfg.max_depth},
        {"min_leaf", cfg.min_leaf},
        {"votes", cfg.votes},
        {"summarize_train", cfg.summarize_train},
        {"summarize_eval", cfg.summarize_eval},
        {"max_words", cfg.max_words},
        {"seed", cfg.seed},
        {"temperatures", cfg.temperatures},
        {"question_retries", cfg.question_retries},
        {"prompt_char_budget", cfg.prompt_char_budget},
        {"max_attempts", cfg.max_attempts},
    };
}

void from_json(const json& j, BuildConfig& cfg) {
    cfg.sample_size = j.value("sample_size", 100);
    cfg.max_depth = j.value("max_depth", 5);
    cfg.min_leaf = j.value("min_leaf", 3);
    cfg.votes = j.value("votes", 4);
    cfg.summarize_train = j.value("summarize_train", false);
    cfg.summarize_eval = j.value("summarize_eval", false);
    cfg.max_words = j.value("max_words", 50);
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("temperatures")) cfg.temperatures = j.at("temperatures").get<Temperatures>();
    cfg.question_retries = j.value("question_retries", 3);
    cfg.prompt_char_budget = j.value("prompt_char_budget", std::size_t{200000});
    cfg.max_attempts = j.value("max_attempts", 5);
}

}  // namespace rtp
