#include "rtp/voting.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace rtp {

using nlohmann::json;

VoteRecord aggregate_votes(std::string doc_id, std::string question, std::vector<bool> votes) {
    if (votes.empty()) throw Error("aggregate_votes requires at least one vote");

    const auto yes = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), true));
    const std::size_t no = votes.size() - yes;

    VoteRecord record;
    record.doc_id = std::move(doc_id);
    record.question = std::move(question);
    record.votes = std::move(votes);
    record.tie_broken = yes == no;
    record.decision = yes >= no;  // exact ties resolve to yes
    return record;
}

void to_json(json& j, const VoteRecord& record) {
    j = json{
        {"doc_id", record.doc_id},
        {"question", record.question},
        {"votes", record.votes},
        {"decision", record.decision},
        {"tie_broken", record.tie_broken},
    };
}

void from_json(const json& j, VoteRecord& record) {
    record.doc_id = j.at("doc_id").get<std::string>();
    record.question = j.at("question").get<std::string>();
    record.votes = j.at("votes").get<std::vector<bool>>();
    record.decision = j.at("decision").get<bool>();
    record.tie_broken = j.at("tie_broken").get<bool>();
}

}  // namespace rtp
