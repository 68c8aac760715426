#include "pira/core/transforms.hpp"

#include <algorithm>

namespace pira {

std::vector<ProvenanceLabel> ordered_provenance(const Trajectory& trajectory,
                                                const GroundTruth& gt) {
    const int n = static_cast<int>(trajectory.frames.size());
    std::vector<const ProvenanceLabel*> by_index(static_cast<std::size_t>(n), nullptr);
    for (const auto& label : gt.provenance) {
        if (label.frame_index >= 0 && label.frame_index < n)
            by_index[static_cast<std::size_t>(label.frame_index)] = &label;
    }
    std::vector<ProvenanceLabel> ordered;
    ordered.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (!by_index[static_cast<std::size_t>(i)])
            throw DatasetError(gt.trajectory_id,
                               "provenance incomplete: frame " + std::to_string(i) +
                                   " is unlabeled");
        ordered.push_back(*by_index[static_cast<std::size_t>(i)]);
    }
    return ordered;
}

Trajectory strip_noise(const Trajectory& trajectory, const GroundTruth& gt) {
    const auto labels = ordered_provenance(trajectory, gt);

    Trajectory clean;
    clean.id = trajectory.id + kCleanSuffix;
    clean.device_class = trajectory.device_class;
    clean.profile_ids = trajectory.profile_ids;
    for (std::size_t i = 0; i < trajectory.frames.size(); ++i) {
        if (labels[i].is_noise) continue;
        Frame f = trajectory.frames[i];
        f.index = static_cast<int>(clean.frames.size());
        clean.frames.push_back(std::move(f));
    }
    if (clean.frames.empty())
        throw DatasetError(trajectory.id,
                           "all frames are noise; the clean variant is undefined");
    return clean;
}

GroundTruth strip_noise_ground_truth(const GroundTruth& gt) {
    GroundTruth clean;
    clean.trajectory_id = gt.trajectory_id + kCleanSuffix;
    clean.profile_id = gt.profile_id;
    clean.intents = gt.intents;

    std::vector<ProvenanceLabel> sorted = gt.provenance;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
    int next = 0;
    for (const auto& label : sorted) {
        if (label.is_noise) continue;
        clean.provenance.push_back(ProvenanceLabel::task(next++, label.task_id));
    }
    return clean;
}

Decomposition decompose(const Trajectory& trajectory, const GroundTruth& gt) {
    const auto labels = ordered_provenance(trajectory, gt);

    Decomposition parts;
    for (std::size_t i = 0; i < trajectory.frames.size(); ++i) {
        if (labels[i].is_noise) {
            parts.noise.push_back(trajectory.frames[i]);
        } else {
            parts.tasks[labels[i].task_id].push_back(trajectory.frames[i]);
        }
    }
    return parts;
}

}  // namespace pira
