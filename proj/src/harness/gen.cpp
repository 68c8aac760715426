#include "pira/harness/gen.hpp"

#include <set>

#include "pira/core/dataset.hpp"
#include "pira/core/transforms.hpp"

namespace pira::harness {

namespace {

// Clean companion: strip every trajectory that has at least one task frame,
// carry over only the profiles still referenced.
Dataset make_clean_companion(const Dataset& noised) {
    Dataset clean;
    clean.manifest_version = noised.manifest_version;

    std::set<std::string> kept_profiles;
    for (const auto& trajectory : noised.trajectories) {
        const GroundTruth* any_gt = nullptr;
        for (const auto& gt : noised.ground_truth) {
            if (gt.trajectory_id == trajectory.id) {
                any_gt = &gt;
                break;
            }
        }
        if (!any_gt) continue;
        Trajectory stripped;
        try {
            stripped = strip_noise(trajectory, *any_gt);
        } catch (const DatasetError&) {
            continue;  // pure noise: no clean variant
        }
        clean.trajectories.push_back(std::move(stripped));
        for (const auto& pid : trajectory.profile_ids) kept_profiles.insert(pid);
        for (const auto& gt : noised.ground_truth) {
            if (gt.trajectory_id == trajectory.id)
                clean.ground_truth.push_back(strip_noise_ground_truth(gt));
        }
    }
    for (const auto& profile : noised.profiles) {
        if (kept_profiles.count(profile.id)) clean.profiles.push_back(profile);
    }
    return clean;
}

}  // namespace

GenSummary generate_dataset(const GenConfig& config) {
    if (config.out_dir.empty()) throw HarnessError("gen: output directory is required");

    const auto templates = config.templates_file
                               ? synthgen::load_templates(*config.templates_file)
                               : synthgen::builtin_templates();
    const auto noise_pool = config.noise_pool_file
                                ? synthgen::load_noise_pool(*config.noise_pool_file)
                                : synthgen::builtin_noise_pool();

    synthgen::GeneratorOutput generated;
    try {
        generated = synthgen::generate(config.generator, templates, noise_pool);
    } catch (const synthgen::ConfigError& e) {
        throw HarnessError(std::string("config error at ") + e.what());
    }

    save_dataset(generated.dataset, config.out_dir);
    generated.sheet.save(config.out_dir / backend::kIntentSheetFileName);

    GenSummary summary;
    summary.dataset_dir = config.out_dir;
    summary.trajectories = static_cast<int>(generated.dataset.trajectories.size());
    summary.profiles = static_cast<int>(generated.dataset.profiles.size());
    summary.ground_truth_entries = static_cast<int>(generated.dataset.ground_truth.size());

    if (config.emit_clean_companion) {
        const Dataset clean = make_clean_companion(generated.dataset);
        auto clean_dir = config.out_dir;
        clean_dir += "-clean";
        save_dataset(clean, clean_dir);
        generated.sheet.save(clean_dir / backend::kIntentSheetFileName);
        summary.clean_dataset_dir = clean_dir;
    }
    return summary;
}

}  // namespace pira::harness
