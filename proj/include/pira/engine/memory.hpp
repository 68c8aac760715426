#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pira/backend/decision.hpp"
#include "pira/core/types.hpp"

namespace pira::engine {

enum class ThreadStatus { active, suspended };

// One tracked latent goal. Ids are assigned monotonically for the life of a
// run and never reused after deletion.
struct IntentThread {
    int thread_id = 0;
    std::string description;
    ThreadStatus status = ThreadStatus::suspended;
    int created_at = 0;
    int updated_at = 0;

    bool operator==(const IntentThread&) const = default;
};

struct MemoryState {
    UserProfile profile;
    std::vector<IntentThread> threads;
    std::optional<int> active_thread;
    int next_id = 0;

    const IntentThread* find(int thread_id) const;

    // Multi-line block injected into the transition prompt.
    std::string render() const;
    // Compact one-line form for traces.
    std::string summary() const;

    bool operator==(const MemoryState&) const = default;
};

struct TransitionOutcome {
    MemoryState memory;
    std::vector<std::string> flags;  // degradations; never errors
};

// Applies one decision. Deletions happen first (unknown ids are ignored and
// flagged); RESUME of an unknown thread degrades to IDLE, UPDATE with no
// active thread degrades to CREATE. Nothing throws.
TransitionOutcome apply_transition(const MemoryState& memory,
                                   const backend::TransitionDecision& decision,
                                   int frame_index);

}  // namespace pira::engine
