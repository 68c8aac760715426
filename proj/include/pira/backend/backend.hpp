#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pira/backend/decision.hpp"

namespace pira::backend {

// Hard failure surfaced after the retry policy is exhausted (or immediately
// for authentication failures). The engine records it and moves on to the
// next (trajectory, profile) pair.
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& message, bool auth_failure = false)
        : std::runtime_error(message), auth_failure_(auth_failure) {}

    bool auth_failure() const { return auth_failure_; }

private:
    bool auth_failure_;
};

// Decision-producing model abstraction. Implementations must be safe for
// concurrent complete() calls from multiple harness workers.
class Backend {
public:
    virtual ~Backend() = default;
    virtual RawCompletion complete(const PromptBundle& bundle) = 0;
    virtual std::string name() const = 0;
};

struct DecisionResponse {
    TransitionDecision decision;
    std::uint64_t prompt_hash = 0;
    std::string raw_text;
    std::vector<std::string> flags;
};

// complete + parse with a bounded re-ask loop. On parse failure the bundle is
// re-sent with a formatting reminder appended; after `reask_budget` extra
// attempts the decision falls back to IDLE and "parse_failure" is flagged.
DecisionResponse request_decision(Backend& backend, const PromptBundle& bundle,
                                  int reask_budget = 1);

struct FinalResponse {
    std::vector<std::string> intents;
    std::uint64_t prompt_hash = 0;
    std::string raw_text;
    std::vector<std::string> flags;
};

// Same policy for the naive baseline's final-turn intent list; fallback is an
// empty prediction.
FinalResponse request_final_intents(Backend& backend, const PromptBundle& bundle,
                                    int reask_budget = 1);

}  // namespace pira::backend
