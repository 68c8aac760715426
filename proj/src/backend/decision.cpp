#include "pira/backend/decision.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pira/util/rng.hpp"

namespace pira::backend {

namespace {

using json = nlohmann::json;

// Yields each balanced {...} span of the text, outermost first, skipping
// string literals and escapes. Model output often wraps the object in prose
// or code fences, so we cannot just json::parse the whole text.
std::vector<std::string> candidate_objects(const std::string& text) {
    std::vector<std::string> spans;
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    spans.push_back(text.substr(start, i - start + 1));
                    start = i;  // resume scanning after this object
                    break;
                }
            }
        }
    }
    return spans;
}

std::optional<json> first_parsable_object(const std::string& text) {
    for (const auto& span : candidate_objects(text)) {
        json parsed = json::parse(span, nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

ParsedDecision fail(const std::string& why) {
    ParsedDecision out;
    out.parse_failed = true;
    out.error = why;
    return out;
}

}  // namespace

std::string to_string(Action action) {
    switch (action) {
        case Action::create: return "CREATE";
        case Action::resume: return "RESUME";
        case Action::update: return "UPDATE";
        case Action::idle: return "IDLE";
    }
    return "IDLE";
}

std::optional<Action> action_from_string(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (name == "CREATE") return Action::create;
    if (name == "RESUME") return Action::resume;
    if (name == "UPDATE") return Action::update;
    if (name == "IDLE") return Action::idle;
    return std::nullopt;
}

std::string to_string(QueryKind kind) {
    switch (kind) {
        case QueryKind::transition: return "transition";
        case QueryKind::observe: return "observe";
        case QueryKind::predict_final: return "predict_final";
    }
    return "transition";
}

std::string summarize_decision(const TransitionDecision& d) {
    std::ostringstream out;
    switch (d.action) {
        case Action::create: out << "CREATE: " << d.intent_text; break;
        case Action::update: out << "UPDATE: " << d.intent_text; break;
        case Action::resume:
            out << "RESUME thread " << (d.thread_id ? std::to_string(*d.thread_id) : "?");
            break;
        case Action::idle: out << "IDLE"; break;
    }
    if (!d.delete_intent_ids.empty()) {
        out << " | deleted:";
        for (int id : d.delete_intent_ids) out << " " << id;
    }
    return out.str();
}

std::uint64_t PromptBundle::content_hash() const {
    std::uint64_t h = fnv1a64(system_text);
    h = hash_combine(h, fnv1a64(memory_rendering));
    h = hash_combine(h, fnv1a64(to_string(query_kind)));
    for (const auto& entry : window) {
        h = hash_combine(h, fnv1a64(to_string(entry.kind)));
        h = hash_combine(h, fnv1a64(entry.payload));
        h = hash_combine(h, fnv1a64(entry.decision_summary));
    }
    for (const auto& turn : transcript) {
        for (const auto& [kind, payload] : turn.frames) {
            h = hash_combine(h, fnv1a64(to_string(kind)));
            h = hash_combine(h, fnv1a64(payload));
        }
        h = hash_combine(h, fnv1a64(turn.reply));
    }
    return h;
}

ParsedDecision parse_decision(const std::string& raw_text) {
    auto obj = first_parsable_object(raw_text);
    if (!obj) return fail("no JSON object found in output");
    const json& j = *obj;

    if (!j.contains("action") || !j["action"].is_string())
        return fail("missing \"action\" field");
    auto action = action_from_string(j["action"].get<std::string>());
    if (!action) return fail("unknown action '" + j["action"].get<std::string>() + "'");

    TransitionDecision d;
    d.action = *action;

    if (j.contains("intent_text") && j["intent_text"].is_string())
        d.intent_text = j["intent_text"].get<std::string>();
    if (d.action == Action::create || d.action == Action::update) {
        if (d.intent_text.empty())
            return fail(to_string(d.action) + " requires a non-empty \"intent_text\"");
    }

    if (j.contains("thread_id") && j["thread_id"].is_number_integer())
        d.thread_id = j["thread_id"].get<int>();
    if (d.action == Action::resume && !d.thread_id)
        return fail("RESUME requires an integer \"thread_id\"");

    if (j.contains("delete_intent_ids")) {
        if (!j["delete_intent_ids"].is_array())
            return fail("\"delete_intent_ids\" must be an array");
        std::set<int> seen;
        for (const auto& v : j["delete_intent_ids"]) {
            if (!v.is_number_integer())
                return fail("\"delete_intent_ids\" entries must be integers");
            const int id = v.get<int>();
            if (seen.insert(id).second) d.delete_intent_ids.push_back(id);
        }
    }

    if (j.contains("rationale") && j["rationale"].is_string())
        d.rationale = j["rationale"].get<std::string>();

    return ParsedDecision{std::move(d), false, ""};
}

ParsedFinal parse_final_intents(const std::string& raw_text) {
    auto collect = [](const json& arr) -> std::optional<std::vector<std::string>> {
        std::vector<std::string> texts;
        for (const auto& v : arr) {
            if (v.is_string()) {
                texts.push_back(v.get<std::string>());
            } else if (v.is_object() && v.contains("text") && v["text"].is_string()) {
                texts.push_back(v["text"].get<std::string>());
            } else {
                return std::nullopt;
            }
        }
        return texts;
    };

    // Whole text as a JSON array first, then embedded objects with "intents".
    json direct = json::parse(raw_text, nullptr, false);
    if (!direct.is_discarded() && direct.is_array()) {
        if (auto texts = collect(direct)) return {std::move(*texts), false, ""};
    }
    for (const auto& span : candidate_objects(raw_text)) {
        json parsed = json::parse(span, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) continue;
        if (parsed.contains("intents") && parsed["intents"].is_array()) {
            if (auto texts = collect(parsed["intents"])) return {std::move(*texts), false, ""};
        }
    }
    // Bare arrays embedded in prose.
    const auto bracket = raw_text.find('[');
    if (bracket != std::string::npos) {
        const auto close = raw_text.rfind(']');
        if (close != std::string::npos && close > bracket) {
            json arr = json::parse(raw_text.substr(bracket, close - bracket + 1), nullptr, false);
            if (!arr.is_discarded() && arr.is_array()) {
                if (auto texts = collect(arr)) return {std::move(*texts), false, ""};
            }
        }
    }
    return {{}, true, "no intent list found in final output"};
}

}  // namespace pira::backend
