#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "rtp/errors.hpp"

namespace rtp {

struct InvalidConfigError : Error {
    using Error::Error;
};

struct Temperatures {
    double question = 0.7;
    double answer = 0.7;   // must stay non-zero for vote diversity on live backends
    double summary = 0.3;
    double generation = 0.9;
};

struct BuildConfig {
    int sample_size = 100;  // S
    int max_depth = 5;      // D
    int min_leaf = 3;       // K
    int votes = 4;          // N
    bool summarize_train = false;
    bool summarize_eval = false;
    int max_words = 50;
    std::uint64_t seed = 0;
    Temperatures temperatures{};
    int question_retries = 3;                 // regenerations after a degenerate split or parse failure
    std::size_t prompt_char_budget = 200000;  // user-prompt size before node docs are subsampled
    int max_attempts = 5;                     // transport retries per request

    void validate() const;  // throws InvalidConfigError
};

void to_json(nlohmann::json& j, const Temperatures& t);
void from_json(const nlohmann::json& j, Temperatures& t);
void to_json(nlohmann::json& j, const BuildConfig& cfg);
void from_json(const nlohmann::json& j, BuildConfig& cfg);

}  // namespace rtp
