#include "rtp/tree.hpp"

#include <deque>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rtp {

using nlohmann::json;

const char* stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::none: return "none";
        case StopReason::depth: return "depth";
        case StopReason::min_leaf: return "min_leaf";
        case StopReason::degenerate: return "degenerate";
    }
    return "none";
}

StopReason stop_reason_from_name(const std::string& name) {
    if (name == "none") return StopReason::none;
    if (name == "depth") return StopReason::depth;
    if (name == "min_leaf") return StopReason::min_leaf;
    if (name == "degenerate") return StopReason::degenerate;
    throw CorruptPayloadError("unknown stop_reason \"" + name + "\"");
}

NoLabeledDocsError::NoLabeledDocsError(const std::string& leaf)
    : Error("leaf \"" + leaf + "\" has no labeled documents"), leaf_id(leaf) {}

const TreeNode& ThematicTree::node(const std::string& id) const {
    const auto it = nodes.find(id);
    if (it == nodes.end()) throw UnknownNodeError("unknown node id \"" + id + "\"");
    return it->second;
}

std::vector<const TreeNode*> breadth_order(const ThematicTree& tree) {
    std::vector<const TreeNode*> order;
    std::deque<const TreeNode*> queue{&tree.node(tree.root_id)};
    while (!queue.empty()) {
        const TreeNode* current = queue.front();
        queue.pop_front();
        order.push_back(current);
        if (current->yes_child) queue.push_back(&tree.node(*current->yes_child));
        if (current->no_child) queue.push_back(&tree.node(*current->no_child));
    }
    return order;
}

std::vector<std::string> ThematicTree::leaf_ids() const {
    std::vector<std::string> ids;
    for (const TreeNode* node : breadth_order(*this)) {
        if (node->is_leaf()) ids.push_back(node->node_id);
    }
    return ids;
}

namespace {

json optional_string(const std::optional<std::string>& value) {
    return value ? json(*value) : json(nullptr);
}

json node_to_json(const TreeNode& node) {
    json histogram(nullptr);
    if (node.label_histogram) histogram = *node.label_histogram;
    return json{
        {"node_id", node.node_id},
        {"depth", node.depth},
        {"question", optional_string(node.question)},
        {"doc_ids", node.doc_ids},
        {"yes_child", optional_string(node.yes_child)},
        {"no_child", optional_string(node.no_child)},
        {"label_histogram", histogram},
        {"majority_label", optional_string(node.majority_label)},
        {"stop_reason", stop_reason_name(node.stop_reason)},
    };
}

TreeNode node_from_json(const json& j) {
    TreeNode node;
    node.node_id = j.at("node_id").get<std::string>();
    node.depth = j.at("depth").get<int>();
    if (!j.at("question").is_null()) node.question = j.at("question").get<std::string>();
    node.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    if (!j.at("yes_child").is_null()) node.yes_child = j.at("yes_child").get<std::string>();
    if (!j.at("no_child").is_null()) node.no_child = j.at("no_child").get<std::string>();
    if (!j.at("label_histogram").is_null()) {
        node.label_histogram = j.at("label_histogram").get<std::map<std::string, int>>();
    }
    if (!j.at("majority_label").is_null()) node.majority_label = j.at("majority_label").get<std::string>();
    node.stop_reason = stop_reason_from_name(j.at("stop_reason").get<std::string>());
    return node;
}

// Structural checks shared by deserialization: exactly one root, every
// non-root referenced exactly once, children consistent with questions.
void validate_structure(const ThematicTree& tree) {
    if (!tree.nodes.count(tree.root_id)) throw CorruptPayloadError("root node missing from node map");

    std::map<std::string, int> referenced;
    for (const auto& [id, node] : tree.nodes) {
        if (node.node_id != id) throw CorruptPayloadError("node key/id mismatch at \"" + id + "\"");
        if (node.question.has_value() != (node.yes_child && node.no_child)) {
            throw CorruptPayloadError("node \"" + id + "\": question and children must appear together");
        }
        for (const auto& child : {node.yes_child, node.no_child}) {
            if (!child) continue;
            if (!tree.nodes.count(*child)) throw CorruptPayloadError("dangling child reference \"" + *child + "\"");
            ++referenced[*child];
        }
    }
    if (referenced.count(tree.root_id)) throw CorruptPayloadError("root node is referenced as a child");
    for (const auto& [id, node] : tree.nodes) {
        if (id == tree.root_id) continue;
        const auto it = referenced.find(id);
        if (it == referenced.end() || it->second != 1) {
            throw CorruptPayloadError("node \"" + id + "\" must be referenced exactly once");
        }
    }
    breadth_order(tree);  // also confirms reachability; cycles are impossible once references are unique
}

}  // namespace

std::string serialize_tree(const ThematicTree& tree) {
    json nodes = json::object();
    for (const auto& [id, node] : tree.nodes) nodes[id] = node_to_json(node);

    json discarded = json::array();
    for (const auto& d : tree.discarded) discarded.push_back(json{{"doc_id", d.doc_id}, {"reason", d.reason}});

    const json payload{
        {"format_version", tree.format_version},
        {"root", tree.root_id},
        {"config", tree.config},
        {"ledger", tree.ledger},
        {"nodes", nodes},
        {"vote_records", tree.vote_records},
        {"discarded", discarded},
    };
    return payload.dump(2) + "\n";
}

ThematicTree deserialize_tree(const std::string& payload) {
    const json j = json::parse(payload, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw CorruptPayloadError("payload is not a JSON object");
    if (!j.contains("format_version") || !j.at("format_version").is_number_integer()) {
        throw CorruptPayloadError("missing format_version");
    }
    const int version = j.at("format_version").get<int>();
    if (version != 1) throw UnknownVersionError("unsupported tree format_version " + std::to_string(version));

    try {
        ThematicTree tree;
        tree.format_version = version;
        tree.root_id = j.at("root").get<std::string>();
        tree.config = j.at("config").get<BuildConfig>();
        tree.ledger = j.at("ledger").get<TokenLedger>();
        for (const auto& [id, node_json] : j.at("nodes").items()) tree.nodes[id] = node_from_json(node_json);
        tree.vote_records = j.at("vote_records").get<std::vector<VoteRecord>>();
        for (const auto& d : j.at("discarded")) {
            tree.discarded.push_back({d.at("doc_id").get<std::string>(), d.at("reason").get<std::string>()});
        }
        validate_structure(tree);
        return tree;
    } catch (const json::exception& e) {
        throw CorruptPayloadError(std::string("malformed tree payload: ") + e.what());
    }
}

namespace {

std::string dot_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string leaf_label(const TreeNode& node) {
    std::string label = "n=" + std::to_string(node.doc_ids.size());
    if (node.majority_label && node.label_histogram) {
        int total = 0;
        int majority = 0;
        for (const auto& [name, count] : *node.label_histogram) {
            total += count;
            if (name == *node.majority_label) majority = count;
        }
        char purity[32];
        std::snprintf(purity, sizeof(purity), "%.2f", total > 0 ? double(majority) / total : 0.0);
        label += "\n" + *node.majority_label + " (purity " + purity + ")";
    }
    return label;
}

}  // namespace

std::string export_dot(const ThematicTree& tree) {
    std::ostringstream out;
    out << "digraph rtp {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box];\n";
    const auto order = breadth_order(tree);
    for (const TreeNode* node : order) {
        const std::string label = node->is_leaf() ? leaf_label(*node) : *node->question;
        out << "  \"" << dot_escape(node->node_id) << "\" [label=\"" << dot_escape(label) << "\"];\n";
    }
    for (const TreeNode* node : order) {
        if (node->is_leaf()) continue;
        out << "  \"" << dot_escape(node->node_id) << "\" -> \"" << dot_escape(*node->yes_child)
            << "\" [label=\"yes\"];\n";
        out << "  \"" << dot_escape(node->node_id) << "\" -> \"" << dot_escape(*node->no_child)
            << "\" [label=\"no\"];\n";
    }
    out << "}\n";
    return out.str();
}

ThematicSignature extract_signature(const ThematicTree& tree, const std::string& leaf_id) {
    const TreeNode& leaf = tree.node(leaf_id);
    if (!leaf.is_leaf()) throw NotALeafError("node \"" + leaf_id + "\" is not a leaf");

    // parent id -> (child id, branch) lookup
    std::map<std::string, std::pair<std::string, bool>> parent_of;
    for (const auto& [id, node] : tree.nodes) {
        if (node.yes_child) parent_of[*node.yes_child] = {id, true};
        if (node.no_child) parent_of[*node.no_child] = {id, false};
    }

    ThematicSignature signature;
    signature.leaf_id = leaf_id;
    std::string current = leaf_id;
    while (current != tree.root_id) {
        const auto it = parent_of.find(current);
        if (it == parent_of.end()) throw CorruptPayloadError("node \"" + current + "\" is unreachable from root");
        const auto& [parent_id, answer] = it->second;
        signature.steps.push_back({*tree.node(parent_id).question, answer});
        current = parent_id;
    }
    std::reverse(signature.steps.begin(), signature.steps.end());
    return signature;
}

ThematicTree assign_leaf_labels(ThematicTree tree, const std::map<std::string, std::string>& labels) {
    for (auto& [id, node] : tree.nodes) {
        std::map<std::string, int> histogram;
        for (const auto& doc_id : node.doc_ids) {
            const auto it = labels.find(doc_id);
            if (it != labels.end()) ++histogram[it->second];
        }
        if (node.is_leaf()) {
            if (histogram.empty()) throw NoLabeledDocsError(id);
            // map iteration is ordered, so the first maximum is the
            // lexicographically smallest label
            std::string majority;
            int best = -1;
            for (const auto& [label, count] : histogram) {
                if (count > best) {
                    best = count;
                    majority = label;
                }
            }
            node.majority_label = majority;
        }
        node.label_histogram = std::move(histogram);
    }
    return tree;
}

}  // namespace rtp
