#pragma once

#include <map>
#include <string>
#include <vector>

#include "rtp/errors.hpp"
#include "rtp/tree.hpp"

namespace rtp {

struct EmptyNodeError : Error {
    using Error::Error;
};
struct MissingHistogramsError : Error {
    using Error::Error;
};

// Base-2 information entropy of a label-count map, with 0*log(0) := 0.
double node_entropy(const std::map<std::string, int>& counts);

// Proportion of the majority class.
double node_purity(const std::map<std::string, int>& counts);

struct NodeAlignment {
    std::string node_id;
    int depth = 0;
    int n = 0;  // documents in the node
    std::map<std::string, int> counts;
    int unlabeled = 0;  // docs excluded from counts
    double entropy_bits = 0.0;
    double purity = 0.0;
    std::string majority_label;
};

// One row per node, root-first breadth order. Requires histograms.
std::vector<NodeAlignment> tree_alignment_report(const ThematicTree& tree);

// CSV with header node_id,depth,n,entropy_bits,purity,majority_label.
std::string alignment_report_csv(const std::vector<NodeAlignment>& rows);

}  // namespace rtp
