#include "pira/eval/judge.hpp"

#include <cctype>
#include <fstream>

#include "json.hpp"

namespace pira::eval {

namespace {

using ojson = nlohmann::ordered_json;

bool slots_compatible(const Intent& a, const Intent& b) {
    for (const auto& [ka, va] : a.slots) {
        for (const auto& [kb, vb] : b.slots) {
            if (ka == kb && normalize_intent_text(va) != normalize_intent_text(vb))
                return false;
        }
    }
    return true;
}

}  // namespace

std::string normalize_intent_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            // Whitespace and punctuation both collapse to one separator.
            pending_space = true;
        }
    }
    return out;
}

std::vector<ConstraintRule> load_constraint_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("constraint rules file not found: " + path.string());
    const ojson doc = ojson::parse(in);
    const ojson& arr = doc.is_array() ? doc : doc.at("rules");
    std::vector<ConstraintRule> rules;
    for (const auto& jr : arr) {
        ConstraintRule rule;
        rule.attribute = jr.at("attribute").get<std::string>();
        rule.value = jr.at("value").get<std::string>();
        for (const auto& p : jr.at("forbidden_phrases"))
            rule.forbidden_phrases.push_back(p.get<std::string>());
        rules.push_back(std::move(rule));
    }
    return rules;
}

DeterministicJudge::DeterministicJudge(std::vector<ConstraintRule> rules)
    : rules_(std::move(rules)) {}

JudgeVerdict DeterministicJudge::judge_pair(const Intent& predicted, const Intent& reference,
                                            const UserProfile& profile) {
    JudgeVerdict verdict;
    verdict.predicted = predicted;
    verdict.reference = reference;

    const std::string norm_predicted = normalize_intent_text(predicted.text);
    for (const auto& rule : rules_) {
        const std::string* value = profile.find_attribute(rule.attribute);
        if (!value || *value != rule.value) continue;
        for (const auto& phrase : rule.forbidden_phrases) {
            if (norm_predicted.find(normalize_intent_text(phrase)) != std::string::npos) {
                verdict.profile_satisfied = false;
                verdict.rationale = "prediction conflicts with profile " + rule.attribute +
                                    "=" + rule.value + " (contains '" + phrase + "')";
                return verdict;  // equivalent stays false
            }
        }
    }

    const bool text_match = norm_predicted == normalize_intent_text(reference.text);
    verdict.equivalent = text_match && slots_compatible(predicted, reference);
    verdict.rationale = verdict.equivalent ? "normalized texts match"
                        : text_match       ? "slot values conflict"
                                           : "normalized texts differ";
    return verdict;
}

FixtureJudge::FixtureJudge(const std::filesystem::path& fixture_file,
                           std::vector<ConstraintRule> fallback_rules)
    : fallback_(std::move(fallback_rules)) {
    std::ifstream in(fixture_file);
    if (!in) throw std::runtime_error("judge fixture not found: " + fixture_file.string());
    const ojson doc = ojson::parse(in);
    const ojson& arr = doc.is_array() ? doc : doc.at("fixtures");
    for (const auto& jf : arr) {
        Entry e;
        e.predicted = jf.at("predicted").get<std::string>();
        e.reference = jf.at("reference").get<std::string>();
        const auto& expected = jf.at("expected");
        e.equivalent = expected.at("equivalent").get<bool>();
        e.profile_satisfied = expected.value("profile_satisfied", true);
        entries_.push_back(std::move(e));
    }
}

JudgeVerdict FixtureJudge::judge_pair(const Intent& predicted, const Intent& reference,
                                      const UserProfile& profile) {
    for (const auto& e : entries_) {
        if (normalize_intent_text(e.predicted) == normalize_intent_text(predicted.text) &&
            normalize_intent_text(e.reference) == normalize_intent_text(reference.text)) {
            JudgeVerdict verdict;
            verdict.predicted = predicted;
            verdict.reference = reference;
            verdict.profile_satisfied = e.profile_satisfied;
            verdict.equivalent = e.equivalent && e.profile_satisfied;
            verdict.rationale = "fixture verdict";
            return verdict;
        }
    }
    return fallback_.judge_pair(predicted, reference, profile);
}

RemoteJudge::RemoteJudge(backend::RemoteConfig config) : model_(config.model) {
    client_ = std::make_unique<backend::RemoteBackend>(std::move(config));
}

RemoteJudge::RemoteJudge(backend::RemoteConfig config, backend::Transport transport)
    : model_(config.model) {
    client_ = std::make_unique<backend::RemoteBackend>(std::move(config), std::move(transport));
}

std::string RemoteJudge::name() const { return "remote-judge:" + model_; }

std::string RemoteJudge::rubric_prompt(const Intent& predicted, const Intent& reference,
                                       const UserProfile& profile) {
    std::string prompt =
        "Decide whether a predicted intent is semantically equivalent to a reference "
        "intent for this specific user.\n\nUser profile: " +
        profile.description + "\n";
    for (const auto& [k, v] : profile.attributes) prompt += "  - " + k + ": " + v + "\n";
    prompt += "\nPredicted intent: " + predicted.text +
              "\nReference intent: " + reference.text +
              "\n\nRules:\n"
              "1. Equivalent means the two describe the same concrete action with the "
              "same key details (place, time, item), allowing different wording.\n"
              "2. profile_satisfied is false when the predicted intent violates the "
              "user's constraints or preferences; a prediction that violates them is "
              "never equivalent.\n\n"
              "Reply with exactly one JSON object: {\"equivalent\": true|false, "
              "\"profile_satisfied\": true|false, \"rationale\": \"...\"}";
    return prompt;
}

JudgeVerdict RemoteJudge::judge_pair(const Intent& predicted, const Intent& reference,
                                     const UserProfile& profile) {
    JudgeVerdict verdict;
    verdict.predicted = predicted;
    verdict.reference = reference;

    backend::PromptBundle bundle;
    bundle.system_text =
        "You are a strict evaluation judge for proactive intent recommendations. "
        "You reply with one JSON object and nothing else.";
    bundle.window.push_back(
        {PayloadKind::text, rubric_prompt(predicted, reference, profile), ""});
    bundle.query_kind = backend::QueryKind::observe;

    std::string text;
    try {
        text = client_->complete(bundle).text;
    } catch (const backend::BackendError& e) {
        verdict.equivalent = false;
        verdict.rationale = std::string("judge transport failure: ") + e.what();
        return verdict;
    }

    // Fail closed on anything unparseable.
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        verdict.rationale = "judge output unparseable";
        return verdict;
    }
    const ojson j = ojson::parse(text.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("equivalent") ||
        !j["equivalent"].is_boolean()) {
        verdict.rationale = "judge output unparseable";
        return verdict;
    }
    verdict.profile_satisfied = j.value("profile_satisfied", true);
    verdict.equivalent = j["equivalent"].get<bool>() && verdict.profile_satisfied;
    verdict.rationale = j.value("rationale", "");
    return verdict;
}

}  // namespace pira::eval
