#pragma once

#include <deque>
#include <filesystem>

#include "json.hpp"
#include "pira/backend/backend.hpp"
#include "pira/engine/memory.hpp"

namespace pira::engine {

enum class RunMode { pirf, naive };
std::string to_string(RunMode mode);
std::optional<RunMode> run_mode_from_string(const std::string& s);

struct TraceEntry {
    int frame_index = 0;
    std::uint64_t prompt_hash = 0;
    backend::TransitionDecision decision;
    std::string raw_text;
    std::string memory_summary;
    std::vector<std::string> flags;

    bool operator==(const TraceEntry&) const = default;
};

struct DecisionTrace {
    std::vector<TraceEntry> entries;

    bool operator==(const DecisionTrace&) const = default;
};

struct PredictionResult {
    std::string trajectory_id;
    std::string profile_id;
    RunMode mode = RunMode::pirf;
    std::vector<Intent> predicted_intents;
    DecisionTrace trace;
    std::vector<std::string> flags;
    bool failed = false;
    std::string failure;
};

struct EngineOptions {
    int window_size = 10;   // K: sliding window of recent frames + reasoning
    int chunk_size = 10;    // N: frames per naive turn
    int reask_budget = 1;
};

std::string pirf_system_prompt();
std::string naive_system_prompt();

// Prompt assembly is exposed so traces can be re-derived and audited: the
// bundle at frame t is a pure function of the frames up to t, the memory
// produced by prior decisions, and the window contents.
backend::PromptBundle make_pirf_bundle(const Trajectory& trajectory,
                                       const UserProfile& profile,
                                       const MemoryState& memory,
                                       const std::deque<backend::WindowEntry>& window,
                                       int frame_index);

// Processes frames strictly in order, one transition per frame; the final
// prediction is every thread still in memory after the last frame.
PredictionResult run_pirf(backend::Backend& backend, const Trajectory& trajectory,
                          const UserProfile& profile, const EngineOptions& options = {});

// Sliding-context baseline: ceil(len/N) turns, observation only until the
// final turn, which must output the intent list. No memory module; the
// conversation transcript is the only state.
PredictionResult run_naive(backend::Backend& backend, const Trajectory& trajectory,
                           const UserProfile& profile, const EngineOptions& options = {});

// JSONL persistence for run directories: first line is the result header,
// then one line per trace entry.
void write_result_file(const PredictionResult& result, const std::filesystem::path& path);
PredictionResult read_result_file(const std::filesystem::path& path);
std::string result_file_name(const std::string& trajectory_id, const std::string& profile_id,
                             RunMode mode);

}  // namespace pira::engine
