#pragma once

#include <optional>

#include "json.hpp"
#include "pira/eval/matching.hpp"

namespace pira::eval {

// Macro-average F1 over positive pairs. Undefined (absent) without any.
std::optional<double> f1_avg(const std::vector<MatchReport>& reports);

// Mean hallucinated-intent count over negative pairs. Absent without any.
std::optional<double> fps(const std::vector<MatchReport>& reports);

// 1 / (1 + ln(1 + fps)); strictly decreasing, 1.0 at fps = 0. Rejects
// negative input.
double fps_norm(double fps_value);

// Product of the two ratios; both must be in [0, 1].
double s_final(double f1_avg_value, double fps_norm_value);

// Half-up rounding, used for all percentage rendering.
double round_half_up(double value, int decimals);

struct RunReport {
    std::string schema_version = "1";
    std::string label;

    int positive_pairs = 0;
    int negative_pairs = 0;
    int failed_runs = 0;
    int skipped_pairs = 0;
    int excluded_pairs = 0;  // no ground truth found

    std::optional<double> precision_avg;
    std::optional<double> recall_avg;
    std::optional<double> f1_avg;
    std::optional<double> fps;
    std::optional<double> fps_norm;
    std::optional<double> s_final;

    std::vector<MatchReport> pairs;

    nlohmann::ordered_json to_json() const;
    static RunReport from_json(const nlohmann::ordered_json& doc);
};

// Folds per-pair reports into the aggregate metrics. Positive-set averages
// are macro over positive pairs; the negative set feeds FPS.
RunReport aggregate_run(const std::string& label, std::vector<MatchReport> pairs,
                        int failed_runs = 0, int skipped_pairs = 0, int excluded_pairs = 0);

// Fixed-width comparison table (percentages, two decimals, "-" for absent),
// one row per report, sorted by S_final descending.
std::string render_report_table(std::vector<RunReport> reports);

}  // namespace pira::eval
