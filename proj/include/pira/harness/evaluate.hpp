#pragma once

#include "pira/eval/metrics.hpp"
#include "pira/harness/run.hpp"

namespace pira::harness {

struct EvalConfig {
    std::filesystem::path run_dir;
    JudgeSpec judge;
    std::optional<std::filesystem::path> dataset_dir;  // default: run manifest's
    std::optional<std::filesystem::path> out_path;     // default: <run_dir>/report.json
    std::string label;                                 // default: "<mode>+<backend>"
};

// Matches every completed PredictionResult in the run directory against its
// ground truth and aggregates the metrics. Pairs without ground truth are
// excluded and counted; failed runs are counted but not scored. Writes
// report.json and report.txt unless out_path suppresses them.
eval::RunReport evaluate_run(const EvalConfig& config);

// Merged comparison table for previously written report.json files; rows
// sorted by S_final descending. Throws on schema-version mismatch.
std::string merge_reports(const std::vector<std::filesystem::path>& report_paths);

}  // namespace pira::harness
