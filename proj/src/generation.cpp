#include "rtp/generation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "rtp/parallel.hpp"
#include "rtp/random.hpp"

namespace rtp {

const char* strategy_name(Strategy strategy) {
    switch (strategy) {
        case Strategy::ctg: return "ctg";
        case Strategy::fewshot: return "fewshot";
        case Strategy::uncontrolled: return "uncontrolled";
    }
    return "ctg";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "ctg") return Strategy::ctg;
    if (name == "fewshot") return Strategy::fewshot;
    if (name == "uncontrolled") return Strategy::uncontrolled;
    throw InvalidConfigError("unknown generation strategy \"" + name + "\" (expected ctg, fewshot or uncontrolled)");
}

PromptPair build_fewshot_prompt(const std::string& context, const std::vector<std::string>& examples) {
    PromptPair prompt;
    prompt.system = generation_system_prompt(context);
    prompt.user = "Examples:";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        prompt.user += "\n" + std::to_string(i + 1) + ". " + examples[i];
    }
    return prompt;
}

namespace {

// Runs `count` generations of the same prompt; failed items are reported in
// `failures` and omitted from `texts`, preserving item order.
void run_batch(GenerationBatch& batch, const PromptPair& prompt, const BuildConfig& cfg, ProviderGateway& gateway,
               int count) {
    if (count < 0) throw InvalidConfigError("generation count must be non-negative");
    struct Slot {
        std::string text;
        std::string failure;
        bool ok = false;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(count));

    parallel_for(slots.size(), static_cast<unsigned>(gateway.max_inflight()), [&](std::size_t i) {
        try {
            const ParsedReply reply =
                chat_parsed(gateway, prompt, reply_schema(SchemaName::material), Stage::generation,
                            cfg.temperatures.generation, cfg.max_attempts, cfg.question_retries);
            slots[i].text = std::get<std::string>(reply);
            slots[i].ok = true;
        } catch (const RefusalError& e) {
            slots[i].failure = std::string("refused: ") + e.what();
        } catch (const ExhaustedError& e) {
            slots[i].failure = std::string("exhausted: ") + e.what();
        } catch (const ParseFailureError& e) {
            slots[i].failure = std::string("unparseable: ") + e.what();
        } catch (const WrongTypeError& e) {
            slots[i].failure = std::string("unparseable: ") + e.what();
        }
    });

    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].ok) {
            batch.texts.push_back(std::move(slots[i].text));
        } else {
            batch.failures.push_back("item " + std::to_string(i) + ": " + slots[i].failure);
        }
    }
}

}  // namespace

GenerationBatch generate_thematic(const ThematicTree& tree, const std::string& leaf_id, const std::string& context,
                                  int count, const BuildConfig& cfg, ProviderGateway& gateway) {
    const ThematicSignature signature = extract_signature(tree, leaf_id);
    const PromptPair prompt = render_generation_prompt(context, signature);

    GenerationBatch batch;
    batch.strategy = Strategy::ctg;
    batch.target_leaf = leaf_id;
    batch.context = context;
    run_batch(batch, prompt, cfg, gateway, count);
    return batch;
}

GenerationBatch generate_fewshot(const ThematicTree& tree, const std::string& leaf_id, const std::string& context,
                                 int count, const BuildConfig& cfg, ProviderGateway& gateway,
                                 const std::vector<Document>& docs) {
    const TreeNode& leaf = tree.node(leaf_id);
    if (!leaf.is_leaf()) throw NotALeafError("node \"" + leaf_id + "\" is not a leaf");
    if (leaf.doc_ids.empty()) throw EmptyInputError("leaf \"" + leaf_id + "\" holds no documents");

    std::map<std::string, const Document*> by_id;
    for (const auto& doc : docs) by_id[doc.id] = &doc;

    std::vector<std::string> examples;
    examples.reserve(leaf.doc_ids.size());
    for (const auto& doc_id : leaf.doc_ids) {
        const auto it = by_id.find(doc_id);
        if (it == by_id.end()) {
            throw InvalidConfigError("document \"" + doc_id + "\" from leaf \"" + leaf_id +
                                     "\" is missing from the supplied documents");
        }
        examples.push_back(it->second->summary ? *it->second->summary : it->second->text);
    }

    GenerationBatch batch;
    batch.strategy = Strategy::fewshot;
    batch.target_leaf = leaf_id;
    batch.context = context;

    PromptPair prompt = build_fewshot_prompt(context, examples);
    if (prompt.user.size() > cfg.prompt_char_budget) {
        batch.examples_truncated = true;
        const auto order =
            sampled_indices(examples.size(), examples.size(), mix_seed(cfg.seed, fnv1a64(leaf_id)));
        const std::size_t base = std::string("Examples:").size();
        std::size_t used = base;
        std::vector<std::size_t> keep;
        for (const std::size_t idx : order) {
            // "\n<number>. " + text; the number is at most the example count
            const std::size_t cost = examples[idx].size() + 3 + std::to_string(examples.size()).size();
            if (!keep.empty() && used + cost > cfg.prompt_char_budget) break;
            keep.push_back(idx);
            used += cost;
        }
        std::sort(keep.begin(), keep.end());
        std::vector<std::string> subset;
        subset.reserve(keep.size());
        for (const std::size_t idx : keep) subset.push_back(examples[idx]);
        prompt = build_fewshot_prompt(context, subset);
    }

    run_batch(batch, prompt, cfg, gateway, count);
    return batch;
}

GenerationBatch generate_uncontrolled(const std::string& context, int count, const BuildConfig& cfg,
                                      ProviderGateway& gateway) {
    const PromptPair prompt = render_generation_prompt(context, ThematicSignature{});

    GenerationBatch batch;
    batch.strategy = Strategy::uncontrolled;
    batch.context = context;
    run_batch(batch, prompt, cfg, gateway, count);
    return batch;
}

double eval_node_accuracy(const GenerationBatch& batch, const ThematicTree& tree, const BuildConfig& cfg,
                          ProviderGateway& gateway, std::optional<std::string> reference_leaf) {
    const std::optional<std::string>& target = batch.target_leaf ? batch.target_leaf : reference_leaf;
    if (!target) throw MissingTargetLeafError("batch has no target leaf; supply a reference leaf");
    if (batch.texts.empty()) throw EmptyInputError("batch holds no generated texts");
    tree.node(*target);  // validate the leaf id early

    enum class ItemResult { hit, miss, refused };
    std::vector<ItemResult> slots(batch.texts.size(), ItemResult::refused);
    parallel_for(batch.texts.size(), static_cast<unsigned>(gateway.max_inflight()), [&](std::size_t i) {
        Document doc;
        doc.id = "generated-" + std::to_string(i);
        doc.text = batch.texts[i];
        try {
            const RouteResult route = route_document(tree, doc, cfg, gateway);
            slots[i] = route.leaf_id == *target ? ItemResult::hit : ItemResult::miss;
        } catch (const RefusalError&) {
            slots[i] = ItemResult::refused;
        }
    });

    int hits = 0;
    int routed = 0;
    for (const ItemResult result : slots) {
        if (result == ItemResult::refused) continue;
        ++routed;
        if (result == ItemResult::hit) ++hits;
    }
    if (routed == 0) throw Error("every generated text was refused during routing");
    return double(hits) / double(routed);
}

namespace {

std::vector<double> embedded_centroid(ProviderGateway& gateway, const std::vector<std::string>& texts,
                                      std::size_t char_limit) {
    std::vector<std::string> clipped;
    clipped.reserve(texts.size());
    for (const auto& text : texts) clipped.push_back(text.substr(0, char_limit));

    const auto vectors = gateway.embed_texts(clipped);
    std::vector<double> centroid(vectors.front().size(), 0.0);
    for (const auto& vec : vectors) {
        for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += vec[d];
    }
    for (double& component : centroid) component /= double(vectors.size());
    return centroid;
}

}  // namespace

double eval_centroid_similarity(const GenerationBatch& batch, const std::vector<std::string>& reference_texts,
                                ProviderGateway& gateway, std::size_t embed_char_limit) {
    if (batch.texts.empty()) throw EmptyInputError("batch holds no generated texts");
    if (reference_texts.empty()) throw EmptyInputError("no reference texts to compare against");

    const std::vector<double> a = embedded_centroid(gateway, batch.texts, embed_char_limit);
    const std::vector<double> b = embedded_centroid(gateway, reference_texts, embed_char_limit);
    if (a.size() != b.size()) {
        throw DimensionMismatchError("centroid dimensions differ: " + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
    }

    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        dot += a[d] * b[d];
        norm_a += a[d] * a[d];
        norm_b += b[d] * b[d];
    }
    if (norm_a == 0.0 || norm_b == 0.0) throw Error("cannot take cosine against a zero-magnitude centroid");
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

}  // namespace rtp
