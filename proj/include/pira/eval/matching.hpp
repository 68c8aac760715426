#pragma once

#include "pira/eval/judge.hpp"

namespace pira::eval {

struct MatchReport {
    std::string trajectory_id;
    std::string profile_id;
    std::vector<std::pair<Intent, Intent>> tp_pairs;  // (predicted, reference)
    std::vector<Intent> fp;
    std::vector<Intent> fn;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool negative_pair = false;     // reference set empty
    int hallucination_count = 0;    // |predicted| on a negative pair
};

// Maximum one-to-one matching on a predicted x reference adjacency matrix.
// Returns the matching size; when match_of_predicted is given, it receives
// the matched reference index per prediction (-1 for unmatched).
std::size_t max_bipartite_match(const std::vector<std::vector<bool>>& adjacency,
                                std::vector<int>* match_of_predicted = nullptr);

// Judge-based set comparison: builds the pairwise equivalence matrix, takes
// a maximum one-to-one matching and derives tp/fp/fn with the conventions
//   predicted empty, reference non-empty  -> P = R = F1 = 0
//   reference empty                       -> negative pair, count |predicted|
//   both empty                            -> perfect negative (count 0).
MatchReport match_sets(const std::vector<Intent>& predicted,
                       const std::vector<Intent>& reference, const UserProfile& profile,
                       Judge& judge);

// Consensus over exactly three independent annotations: intents cluster by
// judge equivalence and a cluster survives when at least two distinct
// annotators contributed to it. The representative is the lexicographically
// first member; output is sorted for determinism.
std::vector<Intent> aggregate_annotations(const std::vector<std::vector<Intent>>& annotations,
                                          const UserProfile& profile, Judge& judge);

}  // namespace pira::eval
