#pragma once

#include <filesystem>
#include <memory>

#include "pira/backend/remote.hpp"
#include "pira/core/types.hpp"

namespace pira::eval {

struct JudgeVerdict {
    Intent predicted;
    Intent reference;
    bool equivalent = false;
    bool profile_satisfied = true;  // equivalent implies profile_satisfied
    std::string rationale;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual JudgeVerdict judge_pair(const Intent& predicted, const Intent& reference,
                                    const UserProfile& profile) = 0;
    virtual std::string name() const = 0;
};

// Lowercases, collapses whitespace and strips punctuation.
std::string normalize_intent_text(std::string_view text);

// Profile constraint for the offline judge: when the profile carries
// attribute=value, a prediction containing any forbidden phrase violates it.
struct ConstraintRule {
    std::string attribute;
    std::string value;
    std::vector<std::string> forbidden_phrases;
};

std::vector<ConstraintRule> load_constraint_rules(const std::filesystem::path& path);

// Offline judge: equivalence is normalized-text equality plus slot
// compatibility (shared keys must agree; a side without slots is not
// penalized), gated on the profile constraints above. Makes the full
// pipeline testable without any model.
class DeterministicJudge : public Judge {
public:
    explicit DeterministicJudge(std::vector<ConstraintRule> rules = {});

    JudgeVerdict judge_pair(const Intent& predicted, const Intent& reference,
                            const UserProfile& profile) override;
    std::string name() const override { return "deterministic"; }

private:
    std::vector<ConstraintRule> rules_;
};

// Regression judge: verdicts for listed (predicted, reference) pairs come
// from a fixture file; everything else falls back to the deterministic
// judge. Fixture entries encode the semantic cases a live judge is expected
// to handle.
class FixtureJudge : public Judge {
public:
    explicit FixtureJudge(const std::filesystem::path& fixture_file,
                          std::vector<ConstraintRule> fallback_rules = {});

    JudgeVerdict judge_pair(const Intent& predicted, const Intent& reference,
                            const UserProfile& profile) override;
    std::string name() const override { return "fixture"; }

private:
    struct Entry {
        std::string predicted;
        std::string reference;
        bool equivalent = false;
        bool profile_satisfied = true;
    };
    std::vector<Entry> entries_;
    DeterministicJudge fallback_;
};

// LLM judge with a fixed rubric prompt at temperature 0. Unparseable output
// and transport failures fail closed: the pair is judged not equivalent and
// the verdict rationale records why.
class RemoteJudge : public Judge {
public:
    explicit RemoteJudge(backend::RemoteConfig config);
    RemoteJudge(backend::RemoteConfig config, backend::Transport transport);

    JudgeVerdict judge_pair(const Intent& predicted, const Intent& reference,
                            const UserProfile& profile) override;
    std::string name() const override;

    static std::string rubric_prompt(const Intent& predicted, const Intent& reference,
                                     const UserProfile& profile);

private:
    std::unique_ptr<backend::RemoteBackend> client_;
    std::string model_;
};

}  // namespace pira::eval
