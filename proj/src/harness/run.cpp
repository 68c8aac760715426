#include "pira/harness/run.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "pira/core/transforms.hpp"
#include "pira/eval/judge.hpp"

namespace pira::harness {

namespace {

using ojson = nlohmann::ordered_json;

struct PairWork {
    Trajectory trajectory;  // already stripped for clean ablation
    UserProfile profile;
    std::filesystem::path result_path;
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const RunConfig& config, const Dataset& dataset,
                    const std::vector<PairStatus>& pairs, const std::string& started_at,
                    const std::filesystem::path& path) {
    ojson doc;
    doc["harness_version"] = kHarnessVersion;
    doc["dataset_dir"] = config.dataset_dir.string();
    doc["dataset_digest"] = std::to_string(dataset_digest(dataset));
    doc["mode"] = engine::to_string(config.mode);
    doc["backend"] = config.backend.describe();
    doc["ablation"] = to_string(config.ablation);
    doc["window_size"] = config.window_size;
    doc["chunk_size"] = config.chunk_size;
    doc["seed"] = config.seed;
    doc["concurrency"] = config.concurrency;
    doc["started_at"] = started_at;
    doc["finished_at"] = iso_timestamp();
    doc["pairs"] = ojson::array();
    for (const auto& p : pairs) {
        ojson jp;
        jp["trajectory_id"] = p.trajectory_id;
        jp["profile_id"] = p.profile_id;
        jp["status"] = p.status;
        jp["detail"] = p.detail;
        jp["file"] = p.file;
        doc["pairs"].push_back(std::move(jp));
    }
    std::ofstream out(path);
    if (!out) throw HarnessError("cannot write run manifest: " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace

std::unique_ptr<backend::Backend> make_backend(const BackendSpec& spec,
                                               const Dataset& dataset,
                                               const std::filesystem::path& dataset_dir) {
    switch (spec.kind) {
        case BackendSpec::Kind::oracle: {
            const auto sheet_path = dataset_dir / backend::kIntentSheetFileName;
            return std::make_unique<backend::OracleBackend>(
                dataset, backend::IntentSheet::load(sheet_path));
        }
        case BackendSpec::Kind::trigger_happy: {
            const auto sheet_path = dataset_dir / backend::kIntentSheetFileName;
            return std::make_unique<backend::TriggerHappyBackend>(
                dataset, backend::IntentSheet::load(sheet_path), spec.p_create, spec.seed);
        }
        case BackendSpec::Kind::remote:
            return std::make_unique<backend::RemoteBackend>(spec.remote, dataset_dir);
    }
    throw HarnessError("unsupported backend kind");
}

std::unique_ptr<eval::Judge> make_judge(const JudgeSpec& spec) {
    std::vector<eval::ConstraintRule> rules;
    if (spec.rules_file) rules = eval::load_constraint_rules(*spec.rules_file);
    switch (spec.kind) {
        case JudgeSpec::Kind::deterministic:
            return std::make_unique<eval::DeterministicJudge>(std::move(rules));
        case JudgeSpec::Kind::fixture:
            return std::make_unique<eval::FixtureJudge>(*spec.fixture_file, std::move(rules));
        case JudgeSpec::Kind::remote:
            return std::make_unique<eval::RemoteJudge>(spec.remote);
    }
    throw HarnessError("unsupported judge kind");
}

RunSummary execute_run(const RunConfig& config) {
    config.validate();
    const Dataset dataset = load_dataset(config.dataset_dir);
    std::filesystem::create_directories(config.out_dir);
    const std::string started_at = iso_timestamp();

    auto model = make_backend(config.backend, dataset, config.dataset_dir);

    RunSummary summary;
    std::vector<PairWork> work;
    std::vector<std::size_t> work_status_index;

    // Deterministic pair order: trajectories and profiles as listed in the
    // manifest, which the generator emits sorted.
    for (const auto& trajectory : dataset.trajectories) {
        for (const auto& profile_id : trajectory.profile_ids) {
            const UserProfile* profile = dataset.find_profile(profile_id);
            if (!profile) continue;  // validation makes this unreachable

            PairStatus status;
            status.profile_id = profile_id;

            Trajectory to_run = trajectory;
            if (config.ablation == Ablation::clean) {
                const GroundTruth* gt =
                    dataset.find_ground_truth(trajectory.id, profile_id);
                if (!gt) {
                    status.trajectory_id = trajectory.id;
                    status.status = "skipped";
                    status.detail = "no ground truth; clean variant cannot be derived";
                    summary.skipped++;
                    summary.pairs.push_back(std::move(status));
                    continue;
                }
                try {
                    to_run = strip_noise(trajectory, *gt);
                } catch (const DatasetError& e) {
                    status.trajectory_id = trajectory.id;
                    status.status = "skipped";
                    status.detail = e.what();  // pure-noise: clean variant undefined
                    summary.skipped++;
                    summary.pairs.push_back(std::move(status));
                    continue;
                }
            }
            status.trajectory_id = to_run.id;
            status.file = engine::result_file_name(to_run.id, profile_id, config.mode);

            const auto result_path = config.out_dir / status.file;
            if (std::filesystem::exists(result_path)) {
                try {
                    const auto existing = engine::read_result_file(result_path);
                    status.status = existing.failed ? "failed" : "done";
                    status.detail = existing.failed ? existing.failure : "resumed";
                    summary.resumed++;
                    (existing.failed ? summary.failed : summary.done)++;
                    summary.pairs.push_back(std::move(status));
                    continue;
                } catch (const std::exception&) {
                    // Truncated file from an interrupted run: re-execute.
                    std::filesystem::remove(result_path);
                }
            }

            status.status = "pending";
            summary.pairs.push_back(std::move(status));
            work.push_back({std::move(to_run), *profile, result_path});
            work_status_index.push_back(summary.pairs.size() - 1);
        }
    }

    engine::EngineOptions options;
    options.window_size = config.window_size;
    options.chunk_size = config.chunk_size;

    std::atomic<std::size_t> next{0};
    const int workers = std::min(
        config.concurrency, static_cast<int>(std::max<std::size_t>(work.size(), 1)));

    auto run_one = [&](const PairWork& item, PairStatus& status) {
        engine::PredictionResult result =
            config.mode == engine::RunMode::pirf
                ? engine::run_pirf(*model, item.trajectory, item.profile, options)
                : engine::run_naive(*model, item.trajectory, item.profile, options);

        const auto tmp_path = item.result_path.string() + ".tmp";
        engine::write_result_file(result, tmp_path);
        std::filesystem::rename(tmp_path, item.result_path);

        status.status = result.failed ? "failed" : "done";
        status.detail = result.failure;
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= work.size()) return;
                PairStatus& status = summary.pairs[work_status_index[i]];
                try {
                    run_one(work[i], status);
                } catch (const std::exception& e) {
                    status.status = "failed";
                    status.detail = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < work.size(); ++i) {
        const auto& status = summary.pairs[work_status_index[i]];
        (status.status == "done" ? summary.done : summary.failed)++;
    }

    summary.manifest_path = config.out_dir / kRunManifestFileName;
    write_manifest(config, dataset, summary.pairs, started_at, summary.manifest_path);
    return summary;
}

RunManifest RunManifest::load(const std::filesystem::path& run_dir) {
    const auto path = run_dir / kRunManifestFileName;
    std::ifstream in(path);
    if (!in) throw HarnessError("run manifest not found: " + path.string());
    const ojson doc = ojson::parse(in);

    RunManifest manifest;
    manifest.harness_version = doc.value("harness_version", "");
    manifest.dataset_dir = doc.value("dataset_dir", "");
    manifest.dataset_digest = doc.value("dataset_digest", "");
    manifest.mode = doc.value("mode", "pirf");
    manifest.backend = doc.value("backend", "");
    manifest.ablation = doc.value("ablation", "noised");
    manifest.window_size = doc.value("window_size", 10);
    manifest.chunk_size = doc.value("chunk_size", 10);
    for (const auto& jp : doc.value("pairs", ojson::array())) {
        PairStatus p;
        p.trajectory_id = jp.value("trajectory_id", "");
        p.profile_id = jp.value("profile_id", "");
        p.status = jp.value("status", "");
        p.detail = jp.value("detail", "");
        p.file = jp.value("file", "");
        manifest.pairs.push_back(std::move(p));
    }
    return manifest;
}

}  // namespace pira::harness
