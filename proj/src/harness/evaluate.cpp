#include "pira/harness/evaluate.hpp"

#include <algorithm>
#include <fstream>

#include "pira/core/transforms.hpp"

namespace pira::harness {

namespace {

using ojson = nlohmann::ordered_json;

std::string base_trajectory_id(const std::string& id) {
    const std::string suffix = kCleanSuffix;
    if (id.size() > suffix.size() &&
        id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0)
        return id.substr(0, id.size() - suffix.size());
    return id;
}

}  // namespace

eval::RunReport evaluate_run(const EvalConfig& config) {
    const RunManifest manifest = RunManifest::load(config.run_dir);
    const std::filesystem::path dataset_dir =
        config.dataset_dir.value_or(std::filesystem::path(manifest.dataset_dir));
    const Dataset dataset = load_dataset(dataset_dir);
    const bool clean_run = manifest.ablation == "clean";

    auto judge = make_judge(config.judge);

    int failed_runs = 0;
    int skipped_pairs = 0;
    int excluded_pairs = 0;
    std::vector<eval::MatchReport> pair_reports;

    // Manifest order is deterministic; keep it so repeated evaluations are
    // byte-identical.
    for (const auto& pair : manifest.pairs) {
        if (pair.status == "skipped") {
            ++skipped_pairs;
            continue;
        }
        if (pair.status == "failed") {
            ++failed_runs;
            continue;
        }
        if (pair.status != "done") continue;

        const auto result_path = config.run_dir / pair.file;
        engine::PredictionResult result;
        try {
            result = engine::read_result_file(result_path);
        } catch (const std::exception&) {
            ++excluded_pairs;
            continue;
        }

        const std::string gt_trajectory =
            clean_run ? base_trajectory_id(result.trajectory_id) : result.trajectory_id;
        const GroundTruth* gt = dataset.find_ground_truth(gt_trajectory, result.profile_id);
        const UserProfile* profile = dataset.find_profile(result.profile_id);
        if (!gt || !profile) {
            ++excluded_pairs;
            continue;
        }

        eval::MatchReport match =
            eval::match_sets(result.predicted_intents, gt->intents, *profile, *judge);
        match.trajectory_id = result.trajectory_id;
        match.profile_id = result.profile_id;
        pair_reports.push_back(std::move(match));
    }

    const std::string label =
        config.label.empty() ? manifest.mode + "+" + manifest.backend : config.label;
    eval::RunReport report = eval::aggregate_run(label, std::move(pair_reports), failed_runs,
                                                 skipped_pairs, excluded_pairs);

    const auto out_path = config.out_path.value_or(config.run_dir / "report.json");
    {
        std::ofstream out(out_path);
        if (!out) throw HarnessError("cannot write report: " + out_path.string());
        out << report.to_json().dump(2) << "\n";
    }
    {
        auto txt_path = out_path;
        txt_path.replace_extension(".txt");
        std::ofstream out(txt_path);
        out << eval::render_report_table({report});
    }
    return report;
}

std::string merge_reports(const std::vector<std::filesystem::path>& report_paths) {
    if (report_paths.empty()) throw HarnessError("at least one report required");
    std::vector<eval::RunReport> reports;
    std::string version;
    for (const auto& path : report_paths) {
        std::ifstream in(path);
        if (!in) throw HarnessError("report not found: " + path.string());
        ojson doc = ojson::parse(in, nullptr, false);
        if (doc.is_discarded())
            throw HarnessError("report is not valid JSON: " + path.string());
        eval::RunReport report = eval::RunReport::from_json(doc);
        if (version.empty()) {
            version = report.schema_version;
        } else if (version != report.schema_version) {
            throw HarnessError("report schema version mismatch: " + path.string() +
                               " has '" + report.schema_version + "', expected '" +
                               version + "'");
        }
        reports.push_back(std::move(report));
    }
    return eval::render_report_table(std::move(reports));
}

}  // namespace pira::harness
