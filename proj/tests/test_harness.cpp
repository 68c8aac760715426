#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>

#include "pira/core/transforms.hpp"
#include "pira/harness/evaluate.hpp"
#include "pira/harness/gen.hpp"
#include "pira/harness/run.hpp"
#include "test_support.hpp"

using namespace pira;
using namespace pira::harness;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

GenConfig demo_gen(const std::filesystem::path& out, std::uint64_t seed,
                   int n = 8, double pure = 0.25, double cond = 0.25,
                   double rho = 0.35) {
    GenConfig config;
    config.generator.seed = seed;
    config.generator.n_trajectories = n;
    config.generator.mean_frames = 20;
    config.generator.noise_fraction = rho;
    config.generator.pure_noise_fraction = pure;
    config.generator.profile_dependent_fraction = cond;
    config.out_dir = out;
    return config;
}

RunConfig oracle_run(const std::filesystem::path& dataset,
                     const std::filesystem::path& out) {
    RunConfig config;
    config.dataset_dir = dataset;
    config.out_dir = out;
    config.mode = engine::RunMode::pirf;
    config.backend = BackendSpec::parse("oracle");
    config.concurrency = 4;
    return config;
}

}  // namespace

TEST_CASE("gen config files parse, validate and reject unknown fields") {
    const auto dir = pira::testing::scratch_dir("harness_gencfg");
    pira::testing::write_file(dir / "good.json", R"({
      "seed": 42, "n_trajectories": 6, "mean_frames": 18,
      "noise_fraction": 0.4, "pure_noise_fraction": 0.25,
      "profile_dependent_fraction": 0.25, "out_dir": "unused"
    })");
    const GenConfig good = load_gen_config(dir / "good.json");
    CHECK(good.generator.seed == 42);
    CHECK(good.generator.n_trajectories == 6);

    pira::testing::write_file(dir / "typo.json", R"({"n_trajectorys": 6})");
    CHECK_THROWS_WITH_AS(load_gen_config(dir / "typo.json"),
                         doctest::Contains("n_trajectorys"), HarnessError);

    pira::testing::write_file(dir / "bad.json", R"({"noise_fraction": 1.5})");
    CHECK_THROWS_WITH_AS(load_gen_config(dir / "bad.json"),
                         doctest::Contains("noise_fraction"), HarnessError);
}

TEST_CASE("backend and judge specs parse") {
    CHECK(BackendSpec::parse("oracle").kind == BackendSpec::Kind::oracle);

    const auto trigger = BackendSpec::parse("trigger-happy:p=0.25,seed=9");
    CHECK(trigger.kind == BackendSpec::Kind::trigger_happy);
    CHECK(trigger.p_create == doctest::Approx(0.25));
    CHECK(trigger.seed == 9);

    const auto remote = BackendSpec::parse("remote:model=foo,base=http://h,timeout=5");
    CHECK(remote.kind == BackendSpec::Kind::remote);
    CHECK(remote.remote.model == "foo");
    CHECK(remote.remote.base_url == "http://h");
    CHECK(remote.remote.timeout_seconds == 5);

    CHECK_THROWS_AS(BackendSpec::parse("nonsense"), HarnessError);
    CHECK_THROWS_AS(BackendSpec::parse("trigger-happy:p=2"), HarnessError);

    CHECK(JudgeSpec::parse("deterministic").kind == JudgeSpec::Kind::deterministic);
    const auto fixture = JudgeSpec::parse("fixture:file=/tmp/f.json");
    CHECK(fixture.kind == JudgeSpec::Kind::fixture);
    CHECK(fixture.fixture_file == "/tmp/f.json");
    CHECK_THROWS_AS(JudgeSpec::parse("fixture"), HarnessError);
}

TEST_CASE("generate_dataset writes a loadable manifest and intent sheet") {
    const auto root = pira::testing::scratch_dir("harness_gen");
    const auto summary = generate_dataset(demo_gen(root / "ds", 1001));
    CHECK(summary.trajectories == 8);
    CHECK(summary.profiles == 24);
    CHECK(summary.ground_truth_entries == 24);
    CHECK_NOTHROW(load_dataset(root / "ds"));
    CHECK_NOTHROW(backend::IntentSheet::load(root / "ds" / backend::kIntentSheetFileName));
}

TEST_CASE("clean companion datasets strip noise and drop pure-noise trajectories") {
    const auto root = pira::testing::scratch_dir("harness_gen_clean");
    GenConfig config = demo_gen(root / "ds", 1002);
    config.emit_clean_companion = true;
    const auto summary = generate_dataset(config);
    REQUIRE(summary.clean_dataset_dir.has_value());

    const Dataset noised = load_dataset(root / "ds");
    const Dataset clean = load_dataset(*summary.clean_dataset_dir);
    CHECK(clean.trajectories.size() < noised.trajectories.size());
    for (const auto& traj : clean.trajectories) {
        CHECK(traj.id.find(kCleanSuffix) != std::string::npos);
        const GroundTruth* gt = clean.find_ground_truth(traj.id, traj.profile_ids[0]);
        REQUIRE(gt != nullptr);
        for (const auto& label : gt->provenance) CHECK_FALSE(label.is_noise);
    }
}

TEST_CASE("oracle run completes every pair and evaluation is perfect") {
    const auto root = pira::testing::scratch_dir("harness_run_oracle");
    generate_dataset(demo_gen(root / "ds", 2024));

    const auto summary = execute_run(oracle_run(root / "ds", root / "run"));
    CHECK(summary.failed == 0);
    CHECK(summary.skipped == 0);
    CHECK(summary.done == 24);

    EvalConfig eval_config;
    eval_config.run_dir = root / "run";
    eval_config.judge = JudgeSpec::parse("deterministic");
    const auto report = evaluate_run(eval_config);

    CHECK(report.positive_pairs + report.negative_pairs == 24);
    CHECK(report.negative_pairs > 0);
    REQUIRE(report.f1_avg.has_value());
    CHECK(*report.f1_avg == doctest::Approx(1.0));
    CHECK(*report.fps == doctest::Approx(0.0));
    CHECK(*report.fps_norm == doctest::Approx(1.0));
    CHECK(*report.s_final == doctest::Approx(1.0));
    CHECK(std::filesystem::exists(root / "run" / "report.json"));
    CHECK(std::filesystem::exists(root / "run" / "report.txt"));
}

TEST_CASE("interrupted runs resume without re-executing completed pairs") {
    const auto root = pira::testing::scratch_dir("harness_resume");
    generate_dataset(demo_gen(root / "ds", 3030, 6));
    const auto config = oracle_run(root / "ds", root / "run");

    const auto first = execute_run(config);
    CHECK(first.done == 18);
    CHECK(first.resumed == 0);

    // Collect result bytes, then delete one file to simulate an interrupt.
    std::map<std::string, std::string> bytes_before;
    std::string victim;
    for (const auto& entry : std::filesystem::directory_iterator(root / "run")) {
        if (entry.path().extension() != ".jsonl") continue;
        bytes_before[entry.path().filename().string()] = slurp(entry.path());
        victim = entry.path().filename().string();
    }
    REQUIRE(bytes_before.size() == 18);
    std::filesystem::remove(root / "run" / victim);

    const auto second = execute_run(config);
    CHECK(second.done == 18);
    CHECK(second.resumed == 17);  // only the deleted pair was re-executed

    for (const auto& [name, bytes] : bytes_before)
        CHECK(slurp(root / "run" / name) == bytes);  // byte-identical, victim included
}

TEST_CASE("clean ablation skips pure-noise pairs and scores the rest perfectly") {
    const auto root = pira::testing::scratch_dir("harness_clean_run");
    generate_dataset(demo_gen(root / "ds", 4040));

    RunConfig config = oracle_run(root / "ds", root / "run-clean");
    config.ablation = Ablation::clean;
    const auto summary = execute_run(config);

    CHECK(summary.skipped > 0);   // the pure-noise trajectories
    CHECK(summary.failed == 0);
    CHECK(summary.done + summary.skipped == 24);

    for (const auto& pair : summary.pairs) {
        if (pair.status == "done")
            CHECK(pair.trajectory_id.find(kCleanSuffix) != std::string::npos);
    }

    EvalConfig eval_config;
    eval_config.run_dir = root / "run-clean";
    eval_config.judge = JudgeSpec::parse("deterministic");
    const auto report = evaluate_run(eval_config);
    CHECK(report.skipped_pairs == summary.skipped);
    REQUIRE(report.f1_avg.has_value());
    CHECK(*report.f1_avg == doctest::Approx(1.0));
}

TEST_CASE("pair isolation: one failing pair does not disturb the others") {
    // A backend that hard-fails for exactly one trajectory.
    class SelectiveBackend : public backend::Backend {
    public:
        SelectiveBackend(std::unique_ptr<backend::Backend> inner, std::string poison)
            : inner_(std::move(inner)), poison_(std::move(poison)) {}
        backend::RawCompletion complete(const backend::PromptBundle& bundle) override {
            if (bundle.trajectory_id == poison_)
                throw backend::BackendError("induced failure");
            return inner_->complete(bundle);
        }
        std::string name() const override { return "selective"; }

    private:
        std::unique_ptr<backend::Backend> inner_;
        std::string poison_;
    };

    const auto root = pira::testing::scratch_dir("harness_isolation");
    generate_dataset(demo_gen(root / "ds", 5050, 6, 0.0, 0.0));
    const Dataset dataset = load_dataset(root / "ds");
    auto sheet = backend::IntentSheet::load(root / "ds" / backend::kIntentSheetFileName);

    SelectiveBackend model(std::make_unique<backend::OracleBackend>(dataset, sheet),
                           dataset.trajectories[0].id);

    // Run through the engine directly (execute_run owns backend construction).
    int failed = 0;
    int done = 0;
    for (const auto& gt : dataset.ground_truth) {
        const auto* traj = dataset.find_trajectory(gt.trajectory_id);
        const auto* profile = dataset.find_profile(gt.profile_id);
        const auto result = engine::run_pirf(model, *traj, *profile);
        if (result.failed) {
            ++failed;
            continue;
        }
        ++done;
        std::vector<std::string> predicted;
        for (const auto& intent : result.predicted_intents) predicted.push_back(intent.text);
        std::sort(predicted.begin(), predicted.end());
        std::vector<std::string> expected;
        for (const auto& intent : gt.intents) expected.push_back(intent.text);
        std::sort(expected.begin(), expected.end());
        CHECK(predicted == expected);
    }
    CHECK(failed == 3);  // the poisoned trajectory's three profiles
    CHECK(done == 15);
}

TEST_CASE("trigger-happy scores strictly below the oracle and reports merge") {
    const auto root = pira::testing::scratch_dir("harness_report");
    generate_dataset(demo_gen(root / "ds", 6060));

    execute_run(oracle_run(root / "ds", root / "run-oracle"));
    RunConfig trigger_config = oracle_run(root / "ds", root / "run-trigger");
    trigger_config.backend = BackendSpec::parse("trigger-happy:p=1.0,seed=3");
    execute_run(trigger_config);

    EvalConfig eval_oracle;
    eval_oracle.run_dir = root / "run-oracle";
    eval_oracle.judge = JudgeSpec::parse("deterministic");
    eval_oracle.label = "pirf-oracle";
    const auto oracle_report = evaluate_run(eval_oracle);

    EvalConfig eval_trigger;
    eval_trigger.run_dir = root / "run-trigger";
    eval_trigger.judge = JudgeSpec::parse("deterministic");
    eval_trigger.label = "pirf-trigger";
    const auto trigger_report = evaluate_run(eval_trigger);

    REQUIRE(trigger_report.fps_norm.has_value());
    CHECK(*trigger_report.fps > 0.0);
    CHECK(*trigger_report.fps_norm < *oracle_report.fps_norm);
    // Corruption touches noise frames only: recall stays perfect, precision
    // pays for the invented intents.
    CHECK(*trigger_report.recall_avg == doctest::Approx(1.0));
    CHECK(*trigger_report.precision_avg < 1.0);

    const auto table = merge_reports(
        {root / "run-oracle" / "report.json", root / "run-trigger" / "report.json"});
    CHECK(table.find("pirf-oracle") != std::string::npos);
    CHECK(table.find("pirf-trigger") != std::string::npos);
    CHECK(table.find("pirf-oracle") < table.find("pirf-trigger"));  // sorted by S_final
}

TEST_CASE("report merge rejects mismatched schema versions") {
    const auto root = pira::testing::scratch_dir("harness_schema");
    eval::RunReport a = eval::aggregate_run("a", {});
    eval::RunReport b = eval::aggregate_run("b", {});
    b.schema_version = "2";
    pira::testing::write_file(root / "a.json", a.to_json().dump());
    pira::testing::write_file(root / "b.json", b.to_json().dump());
    CHECK_THROWS_WITH_AS(merge_reports({root / "a.json", root / "b.json"}),
                         doctest::Contains("schema version"), HarnessError);
}

TEST_CASE("naive mode runs end to end through the harness") {
    const auto root = pira::testing::scratch_dir("harness_naive");
    generate_dataset(demo_gen(root / "ds", 7070, 6));

    RunConfig config = oracle_run(root / "ds", root / "run-naive");
    config.mode = engine::RunMode::naive;
    const auto summary = execute_run(config);
    CHECK(summary.done == 18);

    EvalConfig eval_config;
    eval_config.run_dir = root / "run-naive";
    eval_config.judge = JudgeSpec::parse("deterministic");
    const auto report = evaluate_run(eval_config);
    CHECK(*report.f1_avg == doctest::Approx(1.0));
    CHECK(*report.fps == doctest::Approx(0.0));
}

TEST_CASE("full gen-run-eval cycle is byte-identical across repetitions") {
    const auto root = pira::testing::scratch_dir("harness_repro");

    auto cycle = [&](const std::string& tag) {
        const auto base = root / tag;
        generate_dataset(demo_gen(base / "ds", 8080));
        execute_run(oracle_run(base / "ds", base / "run"));
        EvalConfig eval_config;
        eval_config.run_dir = base / "run";
        eval_config.judge = JudgeSpec::parse("deterministic");
        eval_config.label = "repro";
        evaluate_run(eval_config);
        return slurp(base / "run" / "report.json");
    };

    const std::string first = cycle("one");
    const std::string second = cycle("two");
    CHECK(first == second);
    CHECK(slurp(root / "one/ds" / kManifestFileName) ==
          slurp(root / "two/ds" / kManifestFileName));
}
