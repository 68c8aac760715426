#include "pira/eval/matching.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace pira::eval {

namespace {

// Kuhn's augmenting-path search. Intent sets are a handful of entries per
// trajectory, so O(V*E) is plenty.
bool try_augment(std::size_t pred, const std::vector<std::vector<bool>>& adjacency,
                 std::vector<char>& visited, std::vector<int>& ref_match) {
    for (std::size_t ref = 0; ref < adjacency[pred].size(); ++ref) {
        if (!adjacency[pred][ref] || visited[ref]) continue;
        visited[ref] = 1;
        if (ref_match[ref] < 0 ||
            try_augment(static_cast<std::size_t>(ref_match[ref]), adjacency, visited,
                        ref_match)) {
            ref_match[ref] = static_cast<int>(pred);
            return true;
        }
    }
    return false;
}

std::string sort_key(const Intent& intent) {
    std::string key = intent.text;
    for (const auto& [k, v] : intent.slots) key += "\x1f" + k + "=" + v;
    return key;
}

}  // namespace

std::size_t max_bipartite_match(const std::vector<std::vector<bool>>& adjacency,
                                std::vector<int>* match_of_predicted) {
    const std::size_t n_pred = adjacency.size();
    const std::size_t n_ref = n_pred == 0 ? 0 : adjacency[0].size();

    std::vector<int> ref_match(n_ref, -1);
    std::size_t matched = 0;
    for (std::size_t pred = 0; pred < n_pred; ++pred) {
        std::vector<char> visited(n_ref, 0);
        if (try_augment(pred, adjacency, visited, ref_match)) ++matched;
    }
    if (match_of_predicted) {
        match_of_predicted->assign(n_pred, -1);
        for (std::size_t ref = 0; ref < n_ref; ++ref) {
            if (ref_match[ref] >= 0)
                (*match_of_predicted)[static_cast<std::size_t>(ref_match[ref])] =
                    static_cast<int>(ref);
        }
    }
    return matched;
}

MatchReport match_sets(const std::vector<Intent>& predicted,
                       const std::vector<Intent>& reference, const UserProfile& profile,
                       Judge& judge) {
    MatchReport report;

    if (reference.empty()) {
        report.negative_pair = true;
        report.hallucination_count = static_cast<int>(predicted.size());
        report.fp = predicted;
        return report;
    }
    if (predicted.empty()) {
        report.fn = reference;
        return report;  // P = R = F1 = 0
    }

    std::vector<std::vector<bool>> adjacency(predicted.size(),
                                             std::vector<bool>(reference.size(), false));
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        for (std::size_t j = 0; j < reference.size(); ++j) {
            adjacency[i][j] =
                judge.judge_pair(predicted[i], reference[j], profile).equivalent;
        }
    }

    std::vector<int> match_of_predicted;
    const std::size_t tp = max_bipartite_match(adjacency, &match_of_predicted);

    std::vector<char> ref_used(reference.size(), 0);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int ref = match_of_predicted[i];
        if (ref >= 0) {
            report.tp_pairs.emplace_back(predicted[i], reference[static_cast<std::size_t>(ref)]);
            ref_used[static_cast<std::size_t>(ref)] = 1;
        } else {
            report.fp.push_back(predicted[i]);
        }
    }
    for (std::size_t j = 0; j < reference.size(); ++j)
        if (!ref_used[j]) report.fn.push_back(reference[j]);

    report.precision = static_cast<double>(tp) / static_cast<double>(predicted.size());
    report.recall = static_cast<double>(tp) / static_cast<double>(reference.size());
    report.f1 = (report.precision + report.recall) == 0.0
                    ? 0.0
                    : 2.0 * report.precision * report.recall /
                          (report.precision + report.recall);
    return report;
}

std::vector<Intent> aggregate_annotations(const std::vector<std::vector<Intent>>& annotations,
                                          const UserProfile& profile, Judge& judge) {
    if (annotations.size() != 3)
        throw std::invalid_argument("consensus aggregation requires exactly 3 annotations");

    struct Tagged {
        Intent intent;
        std::size_t annotator;
    };
    std::vector<Tagged> all;
    for (std::size_t a = 0; a < annotations.size(); ++a)
        for (const auto& intent : annotations[a]) all.push_back({intent, a});

    // Union-find over pairwise judge equivalence; the judge relation is not
    // guaranteed transitive, so clusters are its transitive closure.
    std::vector<std::size_t> parent(all.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (judge.judge_pair(all[i].intent, all[j].intent, profile).equivalent)
                parent[find(i)] = find(j);
        }
    }

    struct Cluster {
        std::vector<std::size_t> members;
        std::vector<char> annotators = std::vector<char>(3, 0);
    };
    std::map<std::size_t, Cluster> clusters;
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto& cluster = clusters[find(i)];
        cluster.members.push_back(i);
        cluster.annotators[all[i].annotator] = 1;
    }

    std::vector<Intent> consensus;
    for (const auto& [root, cluster] : clusters) {
        const int distinct = cluster.annotators[0] + cluster.annotators[1] +
                             cluster.annotators[2];
        if (distinct < 2) continue;
        const Intent* representative = nullptr;
        for (std::size_t idx : cluster.members) {
            if (!representative || sort_key(all[idx].intent) < sort_key(*representative))
                representative = &all[idx].intent;
        }
        consensus.push_back(*representative);
    }
    std::sort(consensus.begin(), consensus.end(),
              [](const Intent& a, const Intent& b) { return sort_key(a) < sort_key(b); });
    return consensus;
}

}  // namespace pira::eval
