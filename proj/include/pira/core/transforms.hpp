#pragma once

#include <map>
#include <vector>

#include "pira/core/types.hpp"

namespace pira {

// Suffix appended to a trajectory id by strip_noise.
inline constexpr const char* kCleanSuffix = "--clean";

// Returns the trajectory with every noise-labeled frame removed, indices
// re-compacted from 0 and the id suffixed with kCleanSuffix. Throws
// DatasetError if provenance does not cover every frame, or if every frame
// is noise (the clean variant of a pure-noise trajectory is undefined).
Trajectory strip_noise(const Trajectory& trajectory, const GroundTruth& gt);

// Companion transform for ground truth: drops noise labels, re-compacts
// frame indices to match strip_noise output and suffixes trajectory_id.
GroundTruth strip_noise_ground_truth(const GroundTruth& gt);

// Labels ordered by frame index, one per frame. Throws DatasetError naming
// the first unlabeled index when provenance is incomplete.
std::vector<ProvenanceLabel> ordered_provenance(const Trajectory& trajectory,
                                                const GroundTruth& gt);

struct Decomposition {
    std::map<int, std::vector<Frame>> tasks;  // task id -> frames, original order
    std::vector<Frame> noise;
};

// Partitions frames by provenance. Every frame lands in exactly one part.
Decomposition decompose(const Trajectory& trajectory, const GroundTruth& gt);

}  // namespace pira
