#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rtp/config.hpp"
#include "rtp/corpus.hpp"
#include "rtp/partitioner.hpp"
#include "rtp/provider.hpp"
#include "rtp/tree.hpp"

namespace rtp {

struct RouteResult {
    std::string leaf_id;
    std::vector<VoteRecord> path_votes;  // one per internal node on the path
};

struct ClassificationOutcome {
    std::string doc_id;
    std::string leaf_id;
    std::string predicted_label;
    std::vector<VoteRecord> path_votes;
};

// Walks the tree from the root, answering each node question by majority vote.
// Requires no leaf labels. With cfg.summarize_eval the document is summarized
// first and the summary feeds every answer prompt. Throws RefusalError when the
// provider refuses (the document is unclassifiable).
RouteResult route_document(const ThematicTree& tree, const Document& doc, const BuildConfig& cfg,
                           ProviderGateway& gateway);

// route_document plus the leaf's majority label; throws NoLabeledDocsError on
// an unlabeled leaf.
ClassificationOutcome classify_document(const ThematicTree& tree, const Document& doc, const BuildConfig& cfg,
                                        ProviderGateway& gateway);

enum class EvalVariant { plain, summarize_train, summarize_eval, summarize_both };

const char* eval_variant_name(EvalVariant variant);
EvalVariant eval_variant_from_name(const std::string& name);

struct AccuracyStats {
    double mean = 0.0;
    double two_sigma = 0.0;  // 2 x sample standard deviation (n-1 denominator)
};

AccuracyStats summarize_accuracies(const std::vector<double>& accuracies);

struct EvalReport {
    int repetitions = 0;
    EvalVariant variant = EvalVariant::plain;
    std::vector<double> accuracies;  // one per successful repetition
    double mean = 0.0;
    double two_sigma = 0.0;
    int unclassifiable = 0;  // refused test documents, excluded from denominators
    std::vector<std::string> failed_repetitions;
    std::string ci_definition = "mean, two-sigma with sample standard deviation";
};

void to_json(nlohmann::json& j, const EvalReport& report);

struct EvalOptions {
    int repetitions = 5;
    int test_size = 200;  // held-out labeled documents per repetition
    EvalVariant variant = EvalVariant::plain;
};

// Each repetition draws a fresh build sample (seed + i), builds and labels a
// tree, and classifies a held-out labeled split. Build failures abort only the
// affected repetition and are flagged in the report.
EvalReport evaluate_classifier(const Corpus& corpus, BuildConfig cfg, ProviderGateway& gateway,
                               const EvalOptions& options);

}  // namespace rtp
