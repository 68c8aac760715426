#pragma once

#include <filesystem>
#include <optional>

#include "pira/backend/remote.hpp"
#include "pira/engine/runner.hpp"
#include "pira/synthgen/generator.hpp"

namespace pira::harness {

inline constexpr const char* kHarnessVersion = "0.1.0";
inline constexpr const char* kRunManifestFileName = "run_manifest.json";

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Ablation { noised, clean };
std::string to_string(Ablation ablation);
std::optional<Ablation> ablation_from_string(const std::string& s);

struct GenConfig {
    synthgen::GeneratorConfig generator;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> templates_file;
    std::optional<std::filesystem::path> noise_pool_file;
    bool emit_clean_companion = false;
};

// Reads a JSON config document; unknown keys are rejected so typos surface
// as config errors with the field path.
GenConfig load_gen_config(const std::filesystem::path& path);

struct BackendSpec {
    enum class Kind { oracle, trigger_happy, remote };
    Kind kind = Kind::oracle;
    double p_create = 0.5;          // trigger-happy
    std::uint64_t seed = 0;         // trigger-happy
    backend::RemoteConfig remote;   // remote

    // "oracle" | "trigger-happy:p=0.5,seed=7" | "remote:model=...,base=...".
    static BackendSpec parse(const std::string& text);
    std::string describe() const;
};

struct JudgeSpec {
    enum class Kind { deterministic, fixture, remote };
    Kind kind = Kind::deterministic;
    std::optional<std::filesystem::path> rules_file;
    std::optional<std::filesystem::path> fixture_file;
    backend::RemoteConfig remote;

    // "deterministic[:rules=path]" | "fixture:file=path[,rules=path]" |
    // "remote:model=...".
    static JudgeSpec parse(const std::string& text);
    std::string describe() const;
};

struct RunConfig {
    std::filesystem::path dataset_dir;
    std::filesystem::path out_dir;
    engine::RunMode mode = engine::RunMode::pirf;
    BackendSpec backend;
    Ablation ablation = Ablation::noised;
    int window_size = 10;
    int chunk_size = 10;
    int concurrency = 4;
    std::uint64_t seed = 0;

    void validate() const;
};

}  // namespace pira::harness
