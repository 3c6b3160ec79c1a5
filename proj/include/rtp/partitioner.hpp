#pragma once

#include <string>
#include <vector>

#include "rtp/config.hpp"
#include "rtp/corpus.hpp"
#include "rtp/errors.hpp"
#include "rtp/prompts.hpp"
#include "rtp/provider.hpp"
#include "rtp/tree.hpp"
#include "rtp/voting.hpp"

namespace rtp {

struct EmptySampleError : Error {
    using Error::Error;
};

// Provider failure mid-build. The nodes completed so far are preserved; nodes
// whose split never finished are sealed as leaves with stop_reason none.
struct PartialBuildError : Error {
    PartialBuildError(ThematicTree tree, const std::string& cause);
    ThematicTree partial;
};

// Sends one chat request and parses the schema-constrained reply, re-requesting
// on parse failures up to parse_retries additional times.
ParsedReply chat_parsed(ProviderGateway& gateway, const PromptPair& prompt, const ReplySchema& schema,
                        Stage stage, double temperature, int max_attempts, int parse_retries);

// One summarization call per document (identity when summarize_train is off).
// Documents hitting a refusal or exhausted retries are moved to discarded.
SampleSet summarize_sample(SampleSet sample, const BuildConfig& cfg, ProviderGateway& gateway);

// One divisive yes/no question for the node's documents (summaries when
// present). Oversized prompts subsample the node with a seed derived from the
// build seed and the node's document ids.
std::string generate_question(const std::vector<Document>& docs, const BuildConfig& cfg, ProviderGateway& gateway);

// N answer calls at the answer temperature; majority decision, ties to yes.
// A refusal on any vote throws RefusalError (the document is discarded by the
// caller); an unparseable reply counts as a "no" vote after retries.
VoteRecord answer_by_vote(const Document& doc, const std::string& question, const BuildConfig& cfg,
                          ProviderGateway& gateway);

// The recursive build: optional summarization, then question/vote/split per
// node (breadth-first) until the depth or min-leaf criteria stop a branch.
// A split sending every document one way is regenerated up to
// cfg.question_retries times, then the node is sealed as a degenerate leaf.
ThematicTree build_tree(const SampleSet& sample, const BuildConfig& cfg, ProviderGateway& gateway);

// Depth of a perfectly balanced tree over S documents: floor(log2 S) + 1.
int balanced_depth_bound(int sample_size);

}  // namespace rtp
