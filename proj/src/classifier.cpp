#include "rtp/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "rtp/parallel.hpp"
#include "rtp/random.hpp"

namespace rtp {

using nlohmann::json;

RouteResult route_document(const ThematicTree& tree, const Document& doc, const BuildConfig& cfg,
                           ProviderGateway& gateway) {
    Document working = doc;
    if (cfg.summarize_eval && !working.summary) {
        const PromptPair prompt = render_summarize_prompt(working.text, cfg.max_words);
        const ParsedReply reply = chat_parsed(gateway, prompt, reply_schema(SchemaName::summary), Stage::summarize,
                                              cfg.temperatures.summary, cfg.max_attempts, cfg.question_retries);
        working.summary = std::get<std::string>(reply);
    }

    RouteResult result;
    const TreeNode* node = &tree.node(tree.root_id);
    while (!node->is_leaf()) {
        VoteRecord record = answer_by_vote(working, *node->question, cfg, gateway);
        const std::string& next = record.decision ? *node->yes_child : *node->no_child;
        result.path_votes.push_back(std::move(record));
        node = &tree.node(next);
    }
    result.leaf_id = node->node_id;
    return result;
}

ClassificationOutcome classify_document(const ThematicTree& tree, const Document& doc, const BuildConfig& cfg,
                                        ProviderGateway& gateway) {
    RouteResult route = route_document(tree, doc, cfg, gateway);
    const TreeNode& leaf = tree.node(route.leaf_id);
    if (!leaf.majority_label) throw NoLabeledDocsError(route.leaf_id);
    return {doc.id, route.leaf_id, *leaf.majority_label, std::move(route.path_votes)};
}

const char* eval_variant_name(EvalVariant variant) {
    switch (variant) {
        case EvalVariant::plain: return "plain";
        case EvalVariant::summarize_train: return "T";
        case EvalVariant::summarize_eval: return "E";
        case EvalVariant::summarize_both: return "TE";
    }
    return "plain";
}

EvalVariant eval_variant_from_name(const std::string& name) {
    std::string lowered;
    for (const char c : name) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lowered == "plain") return EvalVariant::plain;
    if (lowered == "t") return EvalVariant::summarize_train;
    if (lowered == "e") return EvalVariant::summarize_eval;
    if (lowered == "te") return EvalVariant::summarize_both;
    throw InvalidConfigError("unknown evaluation variant \"" + name + "\" (expected plain, T, E or TE)");
}

AccuracyStats summarize_accuracies(const std::vector<double>& accuracies) {
    AccuracyStats stats;
    if (accuracies.empty()) return stats;

    double sum = 0.0;
    for (const double a : accuracies) sum += a;
    stats.mean = sum / double(accuracies.size());

    if (accuracies.size() >= 2) {
        double squares = 0.0;
        for (const double a : accuracies) squares += (a - stats.mean) * (a - stats.mean);
        stats.two_sigma = 2.0 * std::sqrt(squares / double(accuracies.size() - 1));
    }
    return stats;
}

void to_json(json& j, const EvalReport& report) {
    j = json{
        {"repetitions", report.repetitions},
        {"variant", eval_variant_name(report.variant)},
        {"accuracies", report.accuracies},
        {"mean", report.mean},
        {"two_sigma", report.two_sigma},
        {"unclassifiable", report.unclassifiable},
        {"failed_repetitions", report.failed_repetitions},
        {"ci_definition", report.ci_definition},
    };
}

EvalReport evaluate_classifier(const Corpus& corpus, BuildConfig cfg, ProviderGateway& gateway,
                               const EvalOptions& options) {
    if (options.repetitions < 1) throw InvalidConfigError("repetitions must be at least 1");
    if (options.test_size < 1) throw InvalidConfigError("test size must be at least 1");
    cfg.summarize_train =
        options.variant == EvalVariant::summarize_train || options.variant == EvalVariant::summarize_both;
    cfg.summarize_eval =
        options.variant == EvalVariant::summarize_eval || options.variant == EvalVariant::summarize_both;
    cfg.validate();

    std::map<std::string, std::string> labels;
    for (const auto& doc : corpus.documents) {
        if (doc.label) labels[doc.id] = *doc.label;
    }

    EvalReport report;
    report.repetitions = options.repetitions;
    report.variant = options.variant;

    for (int rep = 0; rep < options.repetitions; ++rep) {
        BuildConfig rep_cfg = cfg;
        rep_cfg.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        try {
            const SampleSet sample =
                sample_corpus(corpus, static_cast<std::size_t>(cfg.sample_size), rep_cfg.seed);
            std::set<std::string> in_sample;
            for (const auto& doc : sample.documents) in_sample.insert(doc.id);

            ThematicTree tree = build_tree(sample, rep_cfg, gateway);
            tree = assign_leaf_labels(std::move(tree), labels);

            std::vector<const Document*> candidates;
            for (const auto& doc : corpus.documents) {
                if (doc.label && !in_sample.count(doc.id)) candidates.push_back(&doc);
            }
            if (candidates.empty()) throw EmptyCorpusError("no held-out labeled documents to test on");

            std::vector<const Document*> test_docs;
            if (candidates.size() > static_cast<std::size_t>(options.test_size)) {
                auto picks = sampled_indices(candidates.size(), static_cast<std::size_t>(options.test_size),
                                             mix_seed(rep_cfg.seed, fnv1a64("test-split")));
                std::sort(picks.begin(), picks.end());
                for (const std::size_t idx : picks) test_docs.push_back(candidates[idx]);
            } else {
                test_docs = candidates;
            }

            enum class DocResult { correct, wrong, refused };
            std::vector<DocResult> slots(test_docs.size(), DocResult::refused);
            parallel_for(test_docs.size(), static_cast<unsigned>(gateway.max_inflight()), [&](std::size_t i) {
                try {
                    const ClassificationOutcome outcome = classify_document(tree, *test_docs[i], rep_cfg, gateway);
                    slots[i] = outcome.predicted_label == *test_docs[i]->label ? DocResult::correct
                                                                               : DocResult::wrong;
                } catch (const RefusalError&) {
                    slots[i] = DocResult::refused;
                }
            });

            int correct = 0;
            int classified = 0;
            for (const DocResult result : slots) {
                if (result == DocResult::refused) {
                    ++report.unclassifiable;
                    continue;
                }
                ++classified;
                if (result == DocResult::correct) ++correct;
            }
            if (classified == 0) throw Error("every test document was refused");
            report.accuracies.push_back(double(correct) / double(classified));
        } catch (const Error& e) {
            report.failed_repetitions.push_back("repetition " + std::to_string(rep) + ": " + e.what());
        }
    }

    const AccuracyStats stats = summarize_accuracies(report.accuracies);
    report.mean = stats.mean;
    report.two_sigma = stats.two_sigma;
    return report;
}

}  // namespace rtp
