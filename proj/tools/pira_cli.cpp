// pira: generate synthetic benchmark datasets, run intent-recommendation
// agents over them, and score the results.
//
// Exit codes: 0 success, 1 config error, 2 total run failure, 3 evaluation
// error.

#include <iostream>

#include "CLI11.hpp"
#include "pira/harness/evaluate.hpp"
#include "pira/harness/gen.hpp"
#include "pira/harness/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRunFailure = 2;
constexpr int kExitEvalError = 3;

int cmd_gen(const std::string& config_path, const std::string& out_override,
            std::optional<std::uint64_t> seed_override, const std::string& ablation) {
    pira::harness::GenConfig config;
    if (!config_path.empty()) {
        config = pira::harness::load_gen_config(config_path);
    }
    if (!out_override.empty()) config.out_dir = out_override;
    if (seed_override) config.generator.seed = *seed_override;
    if (ablation == "clean") config.emit_clean_companion = true;

    const auto summary = pira::harness::generate_dataset(config);
    std::cout << "dataset: " << summary.dataset_dir.string() << "\n"
              << "  trajectories: " << summary.trajectories << "\n"
              << "  profiles: " << summary.profiles << "\n"
              << "  ground truth entries: " << summary.ground_truth_entries << "\n";
    if (summary.clean_dataset_dir)
        std::cout << "clean companion: " << summary.clean_dataset_dir->string() << "\n";
    return kExitOk;
}

int cmd_run(const pira::harness::RunConfig& config) {
    const auto summary = pira::harness::execute_run(config);
    std::cout << "run: " << config.out_dir.string() << "\n"
              << "  done: " << summary.done << "  failed: " << summary.failed
              << "  skipped: " << summary.skipped << "  resumed: " << summary.resumed
              << "\n";
    const int executed = summary.done + summary.failed;
    if (executed > 0 && summary.done == 0) return kExitRunFailure;
    return kExitOk;
}

int cmd_eval(const pira::harness::EvalConfig& config) {
    const auto report = pira::harness::evaluate_run(config);
    std::cout << pira::eval::render_report_table({report});
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& paths) {
    std::vector<std::filesystem::path> files(paths.begin(), paths.end());
    std::cout << pira::harness::merge_reports(files);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proactive intent recommendation benchmark harness"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    std::string gen_config;
    std::string gen_out;
    std::string gen_ablation = "noised";
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    gen->add_option("--config", gen_config, "Generator config JSON file");
    gen->add_option("--out", gen_out, "Dataset output directory");
    gen->add_option("--ablation", gen_ablation, "noised|clean (clean emits a companion)")
        ->check(CLI::IsMember({"noised", "clean"}));
    gen->add_option("--seed", gen_seed, "Generator seed override")
        ->each([&](const std::string&) { gen_seed_set = true; });

    // run
    auto* run = app.add_subcommand("run", "Execute an agent over a dataset");
    std::string run_dataset;
    std::string run_out;
    std::string run_mode = "pirf";
    std::string run_backend = "oracle";
    std::string run_ablation = "noised";
    int run_k = 10;
    int run_n = 10;
    int run_concurrency = 4;
    std::uint64_t run_seed = 0;
    run->add_option("--dataset", run_dataset, "Dataset directory")->required();
    run->add_option("--out", run_out, "Run output directory")->required();
    run->add_option("--mode", run_mode, "pirf|naive")
        ->check(CLI::IsMember({"pirf", "naive"}));
    run->add_option("--backend", run_backend,
                    "oracle | trigger-happy:p=..,seed=.. | remote:model=..");
    run->add_option("--ablation", run_ablation, "noised|clean")
        ->check(CLI::IsMember({"noised", "clean"}));
    run->add_option("--window", run_k, "PIRF sliding window size K");
    run->add_option("--chunk", run_n, "Naive chunk size N");
    run->add_option("--concurrency", run_concurrency, "Worker pool size");
    run->add_option("--seed", run_seed, "Run seed");

    // eval
    auto* eval = app.add_subcommand("eval", "Score a run directory");
    std::string eval_run_dir;
    std::string eval_judge = "deterministic";
    std::string eval_dataset;
    std::string eval_out;
    std::string eval_label;
    eval->add_option("--run", eval_run_dir, "Run directory")->required();
    eval->add_option("--judge", eval_judge,
                     "deterministic[:rules=..] | fixture:file=.. | remote:model=..");
    eval->add_option("--dataset", eval_dataset, "Dataset override");
    eval->add_option("--out", eval_out, "Report output path");
    eval->add_option("--label", eval_label, "Row label for the report");

    // report
    auto* report = app.add_subcommand("report", "Merge report files into one table");
    std::vector<std::string> report_paths;
    report->add_option("reports", report_paths, "report.json files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen(gen_config, gen_out,
                           gen_seed_set ? std::optional<std::uint64_t>(gen_seed)
                                        : std::nullopt,
                           gen_ablation);
        }
        if (run->parsed()) {
            pira::harness::RunConfig config;
            config.dataset_dir = run_dataset;
            config.out_dir = run_out;
            config.mode = pira::engine::run_mode_from_string(run_mode)
                              .value_or(pira::engine::RunMode::pirf);
            config.backend = pira::harness::BackendSpec::parse(run_backend);
            config.ablation = pira::harness::ablation_from_string(run_ablation)
                                  .value_or(pira::harness::Ablation::noised);
            config.window_size = run_k;
            config.chunk_size = run_n;
            config.concurrency = run_concurrency;
            config.seed = run_seed;
            return cmd_run(config);
        }
        if (eval->parsed()) {
            pira::harness::EvalConfig config;
            config.run_dir = eval_run_dir;
            config.judge = pira::harness::JudgeSpec::parse(eval_judge);
            if (!eval_dataset.empty()) config.dataset_dir = eval_dataset;
            if (!eval_out.empty()) config.out_path = eval_out;
            config.label = eval_label;
            return cmd_eval(config);
        }
        if (report->parsed()) return cmd_report(report_paths);
    } catch (const pira::harness::HarnessError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (eval->parsed() || report->parsed()) return kExitEvalError;
        return kExitConfig;
    } catch (const pira::DatasetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return eval->parsed() || report->parsed() ? kExitEvalError : kExitConfig;
    }
    return kExitOk;
}
