#pragma once

#include <string>
#include <vector>

namespace rtp {

// One hop on a root-to-leaf path: the node's question and the branch taken.
struct SignatureStep {
    std::string question;
    bool answer = false;
};

struct ThematicSignature {
    std::vector<SignatureStep> steps;  // root first
    std::string leaf_id;
};

}  // namespace rtp
