#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtp/config.hpp"
#include "rtp/corpus.hpp"
#include "rtp/errors.hpp"
#include "rtp/provider.hpp"
#include "rtp/signature.hpp"
#include "rtp/voting.hpp"

namespace rtp {

enum class StopReason { none, depth, min_leaf, degenerate };

const char* stop_reason_name(StopReason reason);
StopReason stop_reason_from_name(const std::string& name);

struct TreeNode {
    std::string node_id;
    int depth = 0;
    std::optional<std::string> question;  // absent iff leaf
    std::vector<std::string> doc_ids;
    std::optional<std::string> yes_child;
    std::optional<std::string> no_child;
    std::optional<std::map<std::string, int>> label_histogram;
    std::optional<std::string> majority_label;  // leaves only, after labeling
    StopReason stop_reason = StopReason::none;

    bool is_leaf() const { return !question.has_value(); }
};

struct ThematicTree {
    std::string root_id;
    std::map<std::string, TreeNode> nodes;
    BuildConfig config;
    TokenLedger ledger;
    std::vector<VoteRecord> vote_records;
    std::vector<DiscardedDoc> discarded;
    int format_version = 1;

    const TreeNode& node(const std::string& id) const;  // throws UnknownNodeError
    std::vector<std::string> leaf_ids() const;          // breadth order
};

struct UnknownVersionError : Error {
    using Error::Error;
};
struct CorruptPayloadError : Error {
    using Error::Error;
};
struct NotALeafError : Error {
    using Error::Error;
};
struct UnknownNodeError : Error {
    using Error::Error;
};
struct NoLabeledDocsError : Error {
    explicit NoLabeledDocsError(const std::string& leaf_id);
    std::string leaf_id;
};

// Canonical JSON (sorted keys, fixed layout): two serializations of the same
// tree are byte-identical. Round trips are lossless.
std::string serialize_tree(const ThematicTree& tree);
ThematicTree deserialize_tree(const std::string& payload);

// Root-first breadth order, yes child before no child.
std::vector<const TreeNode*> breadth_order(const ThematicTree& tree);

// DOT digraph: internal nodes show the question, edges are labeled yes/no,
// leaves show size plus majority label and purity when histograms exist.
std::string export_dot(const ThematicTree& tree);

// Root-first (question, branch) pairs for the path to leaf_id.
ThematicSignature extract_signature(const ThematicTree& tree, const std::string& leaf_id);

// Histograms for every node from ground-truth labels; leaves additionally get
// a majority label (ties resolve to the lexicographically smallest label).
// Throws NoLabeledDocsError when a leaf has no labeled document at all.
ThematicTree assign_leaf_labels(ThematicTree tree, const std::map<std::string, std::string>& labels);

}  // namespace rtp
