#pragma once

#include "pira/core/dataset.hpp"
#include "pira/eval/judge.hpp"
#include "pira/harness/config.hpp"

namespace pira::harness {

struct PairStatus {
    std::string trajectory_id;  // as executed (clean variants carry the suffix)
    std::string profile_id;
    std::string status;         // "done" | "failed" | "skipped"
    std::string detail;
    std::string file;           // result file name, when one exists
};

struct RunSummary {
    int done = 0;
    int failed = 0;
    int skipped = 0;
    int resumed = 0;  // completed pairs found on disk and not re-executed
    std::vector<PairStatus> pairs;
    std::filesystem::path manifest_path;
};

std::unique_ptr<backend::Backend> make_backend(const BackendSpec& spec,
                                               const Dataset& dataset,
                                               const std::filesystem::path& dataset_dir);

std::unique_ptr<eval::Judge> make_judge(const JudgeSpec& spec);

// Executes every (trajectory, profile) pair of the dataset under the
// configured mode and backend with bounded concurrency. Result files are
// written atomically per pair; re-invocation skips pairs whose result file
// already exists, so an interrupted run resumes exactly. A pair failure
// never affects other pairs.
RunSummary execute_run(const RunConfig& config);

struct RunManifest {
    std::string harness_version;
    std::string dataset_dir;
    std::string dataset_digest;
    std::string mode;
    std::string backend;
    std::string ablation;
    int window_size = 10;
    int chunk_size = 10;
    std::vector<PairStatus> pairs;

    static RunManifest load(const std::filesystem::path& run_dir);
};

}  // namespace pira::harness
