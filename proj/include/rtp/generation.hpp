#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtp/classifier.hpp"
#include "rtp/config.hpp"
#include "rtp/corpus.hpp"
#include "rtp/errors.hpp"
#include "rtp/prompts.hpp"
#include "rtp/provider.hpp"
#include "rtp/tree.hpp"

namespace rtp {

enum class Strategy { ctg, fewshot, uncontrolled };

const char* strategy_name(Strategy strategy);
Strategy strategy_from_name(const std::string& name);

struct MissingTargetLeafError : Error {
    using Error::Error;
};

struct GenerationBatch {
    Strategy strategy = Strategy::ctg;
    std::optional<std::string> target_leaf;
    std::vector<std::string> texts;  // item order; failed items are omitted
    std::string context;
    bool examples_truncated = false;       // few-shot examples were subsampled to fit the budget
    std::vector<std::string> failures;     // per-item provider errors
};

// Few-shot user prompt: "Examples:" followed by numbered example texts, no Q/A
// lines. Exposed so prompt-contract tests can check it directly.
PromptPair build_fewshot_prompt(const std::string& context, const std::vector<std::string>& examples);

// `count` independent generations constrained by the leaf's thematic signature.
GenerationBatch generate_thematic(const ThematicTree& tree, const std::string& leaf_id, const std::string& context,
                                  int count, const BuildConfig& cfg, ProviderGateway& gateway);

// Baseline: every leaf document (summaries when carried by `docs`) as examples,
// no signature. Oversized example sets are subsampled with the build seed and
// flagged. `docs` must cover the leaf's document ids.
GenerationBatch generate_fewshot(const ThematicTree& tree, const std::string& leaf_id, const std::string& context,
                                 int count, const BuildConfig& cfg, ProviderGateway& gateway,
                                 const std::vector<Document>& docs);

// Baseline: the generation prompt with an empty Q/A section and no examples.
GenerationBatch generate_uncontrolled(const std::string& context, int count, const BuildConfig& cfg,
                                      ProviderGateway& gateway);

// Fraction of generated texts the tree classifier routes back to the target
// leaf. Uncontrolled batches need reference_leaf. Refused texts are excluded
// from the denominator.
double eval_node_accuracy(const GenerationBatch& batch, const ThematicTree& tree, const BuildConfig& cfg,
                          ProviderGateway& gateway, std::optional<std::string> reference_leaf = std::nullopt);

// Cosine similarity between the centroids of the two embedded text sets. Only
// the leading embed_char_limit characters of each text are embedded.
double eval_centroid_similarity(const GenerationBatch& batch, const std::vector<std::string>& reference_texts,
                                ProviderGateway& gateway, std::size_t embed_char_limit = 8000);

}  // namespace rtp
