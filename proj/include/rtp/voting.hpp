#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rtp/errors.hpp"

namespace rtp {

// The raw yes/no votes and final decision for one (document, question) pair.
struct VoteRecord {
    std::string doc_id;
    std::string question;
    std::vector<bool> votes;
    bool decision = false;
    bool tie_broken = false;
};

// decision = majority of the vote multiset; exact ties resolve to yes and set
// tie_broken. Depends only on the vote counts, never on vote order.
VoteRecord aggregate_votes(std::string doc_id, std::string question, std::vector<bool> votes);

void to_json(nlohmann::json& j, const VoteRecord& record);
void from_json(const nlohmann::json& j, VoteRecord& record);

}  // namespace rtp
