#include "rtp/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rtp {

double node_entropy(const std::map<std::string, int>& counts) {
    long long total = 0;
    for (const auto& [label, count] : counts) total += count;
    if (total <= 0) throw EmptyNodeError("entropy is undefined for an empty node");

    double bits = 0.0;
    for (const auto& [label, count] : counts) {
        if (count == 0) continue;
        const double p = double(count) / double(total);
        bits -= p * std::log2(p);
    }
    return bits;
}

double node_purity(const std::map<std::string, int>& counts) {
    long long total = 0;
    int best = 0;
    for (const auto& [label, count] : counts) {
        total += count;
        if (count > best) best = count;
    }
    if (total <= 0) throw EmptyNodeError("purity is undefined for an empty node");
    return double(best) / double(total);
}

std::vector<NodeAlignment> tree_alignment_report(const ThematicTree& tree) {
    std::vector<NodeAlignment> rows;
    for (const TreeNode* node : breadth_order(tree)) {
        if (!node->label_histogram) {
            throw MissingHistogramsError("node \"" + node->node_id + "\" has no label histogram; assign labels first");
        }
        NodeAlignment row;
        row.node_id = node->node_id;
        row.depth = node->depth;
        row.n = int(node->doc_ids.size());
        row.counts = *node->label_histogram;

        int labeled = 0;
        int best = 0;
        for (const auto& [label, count] : row.counts) {
            labeled += count;
            if (count > best) {
                best = count;
                row.majority_label = label;
            }
        }
        row.unlabeled = row.n - labeled;
        if (labeled > 0) {
            row.entropy_bits = node_entropy(row.counts);
            row.purity = node_purity(row.counts);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string alignment_report_csv(const std::vector<NodeAlignment>& rows) {
    std::ostringstream out;
    out << "node_id,depth,n,entropy_bits,purity,majority_label\n";
    for (const auto& row : rows) {
        char numbers[64];
        std::snprintf(numbers, sizeof(numbers), "%.6f,%.6f", row.entropy_bits, row.purity);
        out << row.node_id << ',' << row.depth << ',' << row.n << ',' << numbers << ',' << row.majority_label
            << '\n';
    }
    return out.str();
}

}  // namespace rtp
