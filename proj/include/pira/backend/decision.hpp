#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pira/core/types.hpp"

namespace pira::backend {

enum class Action { create, resume, update, idle };

std::string to_string(Action action);
std::optional<Action> action_from_string(std::string name);

// One structured model output per frame. Deletions may accompany any action
// and are applied before it.
struct TransitionDecision {
    Action action = Action::idle;
    std::string intent_text;            // required for CREATE and UPDATE
    std::optional<int> thread_id;       // required for RESUME
    std::vector<int> delete_intent_ids;
    std::string rationale;

    bool operator==(const TransitionDecision&) const = default;
};

// One-line rendering used in sliding-window history and traces.
std::string summarize_decision(const TransitionDecision& decision);

enum class QueryKind { transition, observe, predict_final };
std::string to_string(QueryKind kind);

struct WindowEntry {
    PayloadKind kind = PayloadKind::text;
    std::string payload;
    std::string decision_summary;  // empty for frames awaiting a decision

    bool operator==(const WindowEntry&) const = default;
};

// A completed turn of the naive sliding-context conversation; resent on
// every later request because the transcript is the baseline's only state.
struct TurnRecord {
    std::vector<std::pair<PayloadKind, std::string>> frames;
    std::string reply;

    bool operator==(const TurnRecord&) const = default;
};

struct PromptBundle {
    std::string system_text;
    std::string memory_rendering;       // non-empty iff query_kind == transition
    std::vector<WindowEntry> window;    // oldest -> newest
    std::vector<TurnRecord> transcript; // naive mode only
    QueryKind query_kind = QueryKind::transition;

    // Routing metadata for scripted backends; never rendered into remote
    // request bodies on its own.
    std::string trajectory_id;
    std::string profile_id;
    int frame_index = -1;

    // Stable digest of everything the model would see. Persisted in traces,
    // so the serialization behind it must not change.
    std::uint64_t content_hash() const;
};

struct RawCompletion {
    std::string text;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    std::chrono::milliseconds latency{0};
    int retries = 0;
};

struct ParsedDecision {
    TransitionDecision decision;  // IDLE when parsing failed
    bool parse_failed = false;
    std::string error;
};

// Total: extracts the first well-formed JSON object from the text and
// validates field presence. Any failure yields an IDLE decision with
// parse_failed set; nothing is ever thrown.
ParsedDecision parse_decision(const std::string& raw_text);

struct ParsedFinal {
    std::vector<std::string> intents;
    bool parse_failed = false;
    std::string error;
};

// Total: extracts the final-turn intent list (a JSON array of strings, or an
// object carrying one under "intents"). Failure yields an empty list.
ParsedFinal parse_final_intents(const std::string& raw_text);

}  // namespace pira::backend
