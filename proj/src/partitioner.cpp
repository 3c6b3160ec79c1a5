#include "rtp/partitioner.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <optional>
#include <utility>

#include "rtp/parallel.hpp"
#include "rtp/random.hpp"

namespace rtp {

PartialBuildError::PartialBuildError(ThematicTree tree, const std::string& cause)
    : Error("tree build aborted: " + cause), partial(std::move(tree)) {}

ParsedReply chat_parsed(ProviderGateway& gateway, const PromptPair& prompt, const ReplySchema& schema,
                        Stage stage, double temperature, int max_attempts, int parse_retries) {
    ChatRequest request;
    request.system = prompt.system;
    request.user = prompt.user;
    request.temperature = temperature;
    request.schema_hint = schema_hint(schema);
    request.max_attempts = max_attempts;
    request.stage = stage;

    for (int asked = 0;; ++asked) {
        const ChatReply reply = gateway.chat_complete(request);
        try {
            return parse_structured_reply(reply.raw_text, schema);
        } catch (const ParseFailureError&) {
            if (asked >= parse_retries) throw;
        } catch (const WrongTypeError&) {
            if (asked >= parse_retries) throw;
        }
    }
}

SampleSet summarize_sample(SampleSet sample, const BuildConfig& cfg, ProviderGateway& gateway) {
    if (!cfg.summarize_train) return sample;

    struct Slot {
        std::optional<std::string> summary;
        std::string failure;
    };
    std::vector<Slot> slots(sample.documents.size());

    parallel_for(sample.documents.size(), static_cast<unsigned>(gateway.max_inflight()), [&](std::size_t i) {
        const Document& doc = sample.documents[i];
        const PromptPair prompt = render_summarize_prompt(doc.text, cfg.max_words);
        try {
            const ParsedReply reply = chat_parsed(gateway, prompt, reply_schema(SchemaName::summary),
                                                  Stage::summarize, cfg.temperatures.summary, cfg.max_attempts,
                                                  cfg.question_retries);
            slots[i].summary = std::get<std::string>(reply);
        } catch (const RefusalError& e) {
            slots[i].failure = std::string("summarize refused: ") + e.what();
        } catch (const ExhaustedError& e) {
            slots[i].failure = std::string("summarize exhausted: ") + e.what();
        } catch (const ParseFailureError& e) {
            slots[i].failure = std::string("summarize unparseable: ") + e.what();
        } catch (const WrongTypeError& e) {
            slots[i].failure = std::string("summarize unparseable: ") + e.what();
        }
    });

    std::vector<Document> kept;
    kept.reserve(sample.documents.size());
    for (std::size_t i = 0; i < sample.documents.size(); ++i) {
        if (slots[i].summary) {
            Document doc = std::move(sample.documents[i]);
            doc.summary = std::move(*slots[i].summary);
            kept.push_back(std::move(doc));
        } else {
            sample.discarded.push_back({sample.documents[i].id, slots[i].failure});
        }
    }
    sample.documents = std::move(kept);
    return sample;
}

std::string generate_question(const std::vector<Document>& docs, const BuildConfig& cfg, ProviderGateway& gateway) {
    if (docs.size() < 2) throw TooFewTextsError("question generation needs at least two documents");

    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& doc : docs) texts.push_back(doc.summary ? *doc.summary : doc.text);

    PromptPair prompt = render_question_prompt(texts);
    if (prompt.user.size() > cfg.prompt_char_budget) {
        // Subsample the node to fit the budget. The seed is tied to the node's
        // membership so repeated builds pick the same subset.
        std::string salt;
        for (const auto& doc : docs) {
            salt += doc.id;
            salt.push_back('\n');
        }
        std::vector<std::size_t> quoted_len(texts.size());
        for (std::size_t i = 0; i < texts.size(); ++i) {
            quoted_len[i] = render_text_list({texts[i]}).size() - 2;  // drop the brackets, keep the quotes
        }

        const auto order = sampled_indices(texts.size(), texts.size(), mix_seed(cfg.seed, fnv1a64(salt)));
        std::size_t used = std::string("Texts: []").size();
        std::vector<std::size_t> keep;
        for (const std::size_t idx : order) {
            const std::size_t cost = quoted_len[idx] + (keep.empty() ? 0 : 2);
            if (keep.size() >= 2 && used + cost > cfg.prompt_char_budget) break;
            keep.push_back(idx);
            used += cost;
        }
        std::sort(keep.begin(), keep.end());

        std::vector<std::string> subset;
        subset.reserve(keep.size());
        for (const std::size_t idx : keep) subset.push_back(texts[idx]);
        prompt = render_question_prompt(subset);
    }

    const ParsedReply reply = chat_parsed(gateway, prompt, reply_schema(SchemaName::question), Stage::question,
                                          cfg.temperatures.question, cfg.max_attempts, cfg.question_retries);
    const std::string question = std::get<std::string>(reply);
    if (question.empty()) throw ParseFailureError("question reply was empty");
    return question;
}

VoteRecord answer_by_vote(const Document& doc, const std::string& question, const BuildConfig& cfg,
                          ProviderGateway& gateway) {
    const std::string& text = doc.summary ? *doc.summary : doc.text;
    const PromptPair prompt = render_answer_prompt(text, question);

    std::vector<bool> votes;
    votes.reserve(static_cast<std::size_t>(cfg.votes));
    for (int v = 0; v < cfg.votes; ++v) {
        try {
            const ParsedReply reply = chat_parsed(gateway, prompt, reply_schema(SchemaName::answer), Stage::answer,
                                                  cfg.temperatures.answer, cfg.max_attempts, cfg.question_retries);
            votes.push_back(std::get<bool>(reply));
        } catch (const ParseFailureError&) {
            votes.push_back(false);
        } catch (const WrongTypeError&) {
            votes.push_back(false);
        }
    }
    return aggregate_votes(doc.id, question, std::move(votes));
}

namespace {

struct Pending {
    std::string node_id;
    int depth = 0;
    std::vector<Document> docs;
};

void seal_leaf(ThematicTree& tree, const Pending& pending, StopReason reason) {
    TreeNode node;
    node.node_id = pending.node_id;
    node.depth = pending.depth;
    node.doc_ids.reserve(pending.docs.size());
    for (const auto& doc : pending.docs) node.doc_ids.push_back(doc.id);
    node.stop_reason = reason;
    tree.nodes[pending.node_id] = std::move(node);
}

}  // namespace

ThematicTree build_tree(const SampleSet& sample, const BuildConfig& cfg, ProviderGateway& gateway) {
    cfg.validate();
    if (sample.documents.empty()) throw EmptySampleError("cannot build a tree over an empty sample");

    const TokenLedger start = gateway.ledger_snapshot();
    const auto workers = static_cast<unsigned>(gateway.max_inflight());

    ThematicTree tree;
    tree.root_id = "r";
    tree.config = cfg;
    tree.discarded = sample.discarded;

    SampleSet prepared;
    try {
        prepared = summarize_sample(sample, cfg, gateway);
    } catch (const Error& e) {
        Pending root{tree.root_id, 0, sample.documents};
        seal_leaf(tree, root, StopReason::none);
        tree.ledger = gateway.ledger_snapshot() - start;
        throw PartialBuildError(std::move(tree), e.what());
    }
    if (prepared.documents.empty()) throw EmptySampleError("every document was discarded during summarization");
    tree.discarded = prepared.discarded;

    std::deque<Pending> queue;
    queue.push_back({tree.root_id, 0, prepared.documents});

    auto abort_partial = [&](const Pending& current, const std::string& cause) -> PartialBuildError {
        seal_leaf(tree, current, StopReason::none);
        for (const auto& pending : queue) seal_leaf(tree, pending, StopReason::none);
        tree.ledger = gateway.ledger_snapshot() - start;
        return PartialBuildError(tree, cause);
    };

    while (!queue.empty()) {
        Pending current = std::move(queue.front());
        queue.pop_front();

        if (current.depth >= cfg.max_depth) {
            seal_leaf(tree, current, StopReason::depth);
            continue;
        }
        if (current.docs.size() < static_cast<std::size_t>(cfg.min_leaf) || current.docs.size() < 2) {
            seal_leaf(tree, current, StopReason::min_leaf);
            continue;
        }

        bool resolved = false;
        for (int attempt = 0; attempt <= cfg.question_retries && !resolved; ++attempt) {
            if (current.docs.size() < 2) break;  // refusals shrank the node below question size

            std::string question;
            try {
                question = generate_question(current.docs, cfg, gateway);
            } catch (const RefusalError&) {
                seal_leaf(tree, current, StopReason::degenerate);
                resolved = true;
                break;
            } catch (const ParseFailureError&) {
                seal_leaf(tree, current, StopReason::degenerate);
                resolved = true;
                break;
            } catch (const WrongTypeError&) {
                seal_leaf(tree, current, StopReason::degenerate);
                resolved = true;
                break;
            } catch (const Error& e) {
                throw abort_partial(current, e.what());
            }

            struct VoteSlot {
                std::optional<VoteRecord> record;
                std::string discard_reason;
            };
            std::vector<VoteSlot> slots(current.docs.size());
            try {
                parallel_for(current.docs.size(), workers, [&](std::size_t i) {
                    try {
                        slots[i].record = answer_by_vote(current.docs[i], question, cfg, gateway);
                    } catch (const RefusalError& e) {
                        slots[i].discard_reason = std::string("answer refused: ") + e.what();
                    }
                });
            } catch (const Error& e) {
                throw abort_partial(current, e.what());
            }

            std::vector<Document> survivors;
            std::vector<Document> yes_docs;
            std::vector<Document> no_docs;
            for (std::size_t i = 0; i < current.docs.size(); ++i) {
                if (!slots[i].record) {
                    tree.discarded.push_back({current.docs[i].id, slots[i].discard_reason});
                    continue;
                }
                survivors.push_back(current.docs[i]);
                (slots[i].record->decision ? yes_docs : no_docs).push_back(current.docs[i]);
                tree.vote_records.push_back(std::move(*slots[i].record));
            }
            current.docs = std::move(survivors);

            if (yes_docs.empty() || no_docs.empty()) continue;  // degenerate round, regenerate the question

            TreeNode node;
            node.node_id = current.node_id;
            node.depth = current.depth;
            node.question = question;
            node.doc_ids.reserve(current.docs.size());
            for (const auto& doc : current.docs) node.doc_ids.push_back(doc.id);
            node.yes_child = current.node_id + "y";
            node.no_child = current.node_id + "n";
            tree.nodes[current.node_id] = std::move(node);

            queue.push_back({current.node_id + "y", current.depth + 1, std::move(yes_docs)});
            queue.push_back({current.node_id + "n", current.depth + 1, std::move(no_docs)});
            resolved = true;
        }
        if (!resolved) seal_leaf(tree, current, StopReason::degenerate);
    }

    tree.ledger = gateway.ledger_snapshot() - start;
    return tree;
}

int balanced_depth_bound(int sample_size) {
    if (sample_size < 1) throw InvalidConfigError("sample size must be at least 1");
    return std::bit_width(static_cast<unsigned>(sample_size));
}

}  // namespace rtp
