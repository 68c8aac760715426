#pragma once

#include "pira/harness/config.hpp"

namespace pira::harness {

struct GenSummary {
    std::filesystem::path dataset_dir;
    std::optional<std::filesystem::path> clean_dataset_dir;
    int trajectories = 0;
    int profiles = 0;
    int ground_truth_entries = 0;
};

// Generates a dataset into config.out_dir (manifest + intent sheet). With
// emit_clean_companion set, also writes <out_dir>-clean/ holding the
// strip_noise variant of every trajectory that has task frames; pure-noise
// trajectories have no clean variant and are omitted there.
GenSummary generate_dataset(const GenConfig& config);

}  // namespace pira::harness
