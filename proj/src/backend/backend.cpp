#include "pira/backend/backend.hpp"

namespace pira::backend {

namespace {

PromptBundle with_format_reminder(const PromptBundle& bundle) {
    PromptBundle nudged = bundle;
    nudged.system_text +=
        "\n\nYour previous reply could not be parsed. Respond with exactly one "
        "valid JSON object and nothing else.";
    return nudged;
}

}  // namespace

DecisionResponse request_decision(Backend& backend, const PromptBundle& bundle,
                                  int reask_budget) {
    DecisionResponse out;
    out.prompt_hash = bundle.content_hash();

    PromptBundle current = bundle;
    for (int attempt = 0; attempt <= reask_budget; ++attempt) {
        const RawCompletion raw = backend.complete(current);
        out.raw_text = raw.text;
        const ParsedDecision parsed = parse_decision(raw.text);
        if (!parsed.parse_failed) {
            out.decision = parsed.decision;
            if (attempt > 0) out.flags.push_back("reasked");
            return out;
        }
        if (attempt < reask_budget) current = with_format_reminder(current);
    }
    out.decision = TransitionDecision{};  // IDLE
    out.flags.push_back("parse_failure");
    return out;
}

FinalResponse request_final_intents(Backend& backend, const PromptBundle& bundle,
                                    int reask_budget) {
    FinalResponse out;
    out.prompt_hash = bundle.content_hash();

    PromptBundle current = bundle;
    for (int attempt = 0; attempt <= reask_budget; ++attempt) {
        const RawCompletion raw = backend.complete(current);
        out.raw_text = raw.text;
        const ParsedFinal parsed = parse_final_intents(raw.text);
        if (!parsed.parse_failed) {
            out.intents = parsed.intents;
            if (attempt > 0) out.flags.push_back("reasked");
            return out;
        }
        if (attempt < reask_budget) current = with_format_reminder(current);
    }
    out.flags.push_back("parse_failure");
    return out;
}

}  // namespace pira::backend
