#pragma once

#include <filesystem>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "pira/backend/backend.hpp"
#include "pira/core/types.hpp"

namespace pira::backend {

// Generator side artifact associating, per (trajectory, profile), each task
// id with the intent texts it implies (empty list = no intent for that
// profile). Ground truth alone carries a flat intent list; this sheet is what
// lets scripted backends reconstruct per-frame decisions.
struct IntentSheet {
    struct Entry {
        std::string trajectory_id;
        std::string profile_id;
        std::vector<std::pair<int, std::vector<std::string>>> task_intents;
    };

    std::vector<Entry> entries;

    // Lookup with clean-suffix fallback, so sheets written for a noised
    // dataset also serve its stripped variants.
    const Entry* find(const std::string& trajectory_id, const std::string& profile_id) const;

    nlohmann::ordered_json to_json() const;
    static IntentSheet from_json(const nlohmann::ordered_json& doc);

    void save(const std::filesystem::path& path) const;
    static IntentSheet load(const std::filesystem::path& path);
};

inline constexpr const char* kIntentSheetFileName = "intent_sheet.json";

// Per-frame script for one (trajectory, profile) pair.
struct PairScript {
    struct Step {
        TransitionDecision decision;
        bool is_noise = false;  // provenance-noise frames; trigger-happy targets
    };
    std::vector<Step> steps;                // indexed by frame
    std::vector<std::string> final_intents; // naive predict_final answer
};

// When a trigger-happy wrapper will corrupt noise frames at run time, the
// builder must know so task-frame decisions keep engine-accurate thread ids.
struct ScriptCorruption {
    double p_create = 0.0;
    std::uint64_t seed = 0;
};

// Builds scripts for every ground-truth pair of the dataset, keyed by
// (trajectory_id, profile_id). Pairs whose trajectory contains any task frame
// additionally get a script under the clean-variant id, matching what
// strip_noise produces. Requires complete provenance.
std::map<std::pair<std::string, std::string>, PairScript> build_pair_scripts(
    const Dataset& dataset, const IntentSheet& sheet, const ScriptCorruption& corruption = {});

// Emits the exact scripted transition for every frame; end-to-end evaluation
// of this backend is perfect by construction.
class OracleBackend : public Backend {
public:
    OracleBackend(const Dataset& dataset, const IntentSheet& sheet);

    RawCompletion complete(const PromptBundle& bundle) override;
    std::string name() const override { return "oracle"; }

private:
    std::map<std::pair<std::string, std::string>, PairScript> scripts_;
};

// Oracle on task frames; on each noise frame invents a CREATE with
// probability p_create. The coin for a frame is a pure function of
// (seed, trajectory, profile, frame index), so corruption sets are nested
// across increasing p_create and independent of call order.
class TriggerHappyBackend : public Backend {
public:
    TriggerHappyBackend(const Dataset& dataset, const IntentSheet& sheet, double p_create,
                        std::uint64_t seed);

    RawCompletion complete(const PromptBundle& bundle) override;
    std::string name() const override { return "trigger-happy"; }

    static std::string invented_intent(const std::string& trajectory_id, int frame_index);
    static double noise_coin(std::uint64_t seed, const std::string& trajectory_id,
                             const std::string& profile_id, int frame_index);

private:
    std::map<std::pair<std::string, std::string>, PairScript> scripts_;
    double p_create_;
    std::uint64_t seed_;
};

// Serializes a decision the way a well-behaved model would answer.
std::string decision_to_model_json(const TransitionDecision& decision);

}  // namespace pira::backend
