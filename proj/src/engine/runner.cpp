#include "pira/engine/runner.hpp"

#include <fstream>

namespace pira::engine {

namespace {

using backend::PromptBundle;
using backend::QueryKind;
using backend::WindowEntry;
using ojson = nlohmann::ordered_json;

std::vector<std::string> merge_flags(std::vector<std::string> a,
                                     const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

std::string to_string(RunMode mode) { return mode == RunMode::pirf ? "pirf" : "naive"; }

std::optional<RunMode> run_mode_from_string(const std::string& s) {
    if (s == "pirf") return RunMode::pirf;
    if (s == "naive") return RunMode::naive;
    return std::nullopt;
}

std::string pirf_system_prompt() {
    return
        "You are a proactive assistant watching a user's screen stream one frame at a "
        "time. You maintain a memory of intent threads: distinct goals the user appears "
        "to be pursuing. Exactly one thread can be active; the others stay suspended.\n"
        "\n"
        "For the newest screen, reply with exactly one JSON object choosing one action:\n"
        "  {\"action\": \"CREATE\", \"intent_text\": \"<new actionable intent>\"}\n"
        "      when the screen starts a task not yet in memory.\n"
        "  {\"action\": \"RESUME\", \"thread_id\": <id>}\n"
        "      when the user switches back to a suspended thread.\n"
        "  {\"action\": \"UPDATE\", \"intent_text\": \"<refined intent>\"}\n"
        "      when the screen continues the active thread and reveals more detail.\n"
        "  {\"action\": \"IDLE\"}\n"
        "      when the screen is noise: idle scrolling, app switching, home screens, "
        "aimless browsing. When in doubt, prefer IDLE; inventing intents from noise is "
        "the worst failure mode.\n"
        "\n"
        "Additionally, on every reply you may include \"delete_intent_ids\": [ids] for "
        "threads the evidence shows are abandoned, completed, or obsolete. Deletions are "
        "applied before your action. Intents must be phrased as concrete instructions "
        "the user would act on, and must respect the user profile in memory. Optionally "
        "include a short \"rationale\".";
}

std::string naive_system_prompt() {
    return
        "You are a proactive assistant reviewing a user's screen stream in batches. "
        "Remember the context and observe user behavior. Do not output any intent "
        "predictions until you are told it is the final turn. On the final turn, output "
        "a JSON array of actionable intent strings the user will likely want next, "
        "respecting the user profile below; output [] when the stream shows no "
        "actionable intent.";
}

PromptBundle make_pirf_bundle(const Trajectory& trajectory, const UserProfile& profile,
                              const MemoryState& memory,
                              const std::deque<WindowEntry>& window, int frame_index) {
    PromptBundle bundle;
    bundle.system_text = pirf_system_prompt();
    bundle.memory_rendering = memory.render();
    bundle.window.assign(window.begin(), window.end());
    bundle.query_kind = QueryKind::transition;
    bundle.trajectory_id = trajectory.id;
    bundle.profile_id = profile.id;
    bundle.frame_index = frame_index;
    return bundle;
}

PredictionResult run_pirf(backend::Backend& backend, const Trajectory& trajectory,
                          const UserProfile& profile, const EngineOptions& options) {
    PredictionResult result;
    result.trajectory_id = trajectory.id;
    result.profile_id = profile.id;
    result.mode = RunMode::pirf;

    MemoryState memory;
    memory.profile = profile;
    std::deque<WindowEntry> window;

    try {
        for (const Frame& frame : trajectory.frames) {
            window.push_back({frame.kind, frame.content, ""});
            while (static_cast<int>(window.size()) > options.window_size) window.pop_front();

            const PromptBundle bundle =
                make_pirf_bundle(trajectory, profile, memory, window, frame.index);
            const auto response =
                backend::request_decision(backend, bundle, options.reask_budget);

            TransitionOutcome outcome =
                apply_transition(memory, response.decision, frame.index);
            memory = std::move(outcome.memory);

            window.back().decision_summary = backend::summarize_decision(response.decision);

            TraceEntry entry;
            entry.frame_index = frame.index;
            entry.prompt_hash = response.prompt_hash;
            entry.decision = response.decision;
            entry.raw_text = response.raw_text;
            entry.memory_summary = memory.summary();
            entry.flags = merge_flags(response.flags, outcome.flags);
            result.trace.entries.push_back(std::move(entry));
        }
    } catch (const backend::BackendError& e) {
        result.failed = true;
        result.failure = e.what();
        return result;
    }

    // Everything surviving reflection is a recommendation, suspended or not.
    for (const auto& thread : memory.threads) {
        Intent intent;
        intent.text = thread.description;
        result.predicted_intents.push_back(std::move(intent));
    }
    return result;
}

PredictionResult run_naive(backend::Backend& backend, const Trajectory& trajectory,
                           const UserProfile& profile, const EngineOptions& options) {
    PredictionResult result;
    result.trajectory_id = trajectory.id;
    result.profile_id = profile.id;
    result.mode = RunMode::naive;

    const int n = static_cast<int>(trajectory.frames.size());
    const int chunk = std::max(1, options.chunk_size);
    const int turns = (n + chunk - 1) / chunk;

    std::vector<backend::TurnRecord> transcript;

    try {
        for (int turn = 0; turn < turns; ++turn) {
            const int begin = turn * chunk;
            const int end = std::min(n, begin + chunk);
            const bool final_turn = turn == turns - 1;

            PromptBundle bundle;
            bundle.system_text = naive_system_prompt() + "\n\nUser profile: " +
                                 profile.description;
            bundle.query_kind = final_turn ? QueryKind::predict_final : QueryKind::observe;
            bundle.trajectory_id = trajectory.id;
            bundle.profile_id = profile.id;
            bundle.frame_index = end - 1;
            bundle.transcript = transcript;
            for (int i = begin; i < end; ++i)
                bundle.window.push_back(
                    {trajectory.frames[i].kind, trajectory.frames[i].content, ""});

            TraceEntry entry;
            entry.frame_index = end - 1;

            if (!final_turn) {
                entry.prompt_hash = bundle.content_hash();
                const backend::RawCompletion raw = backend.complete(bundle);
                entry.raw_text = raw.text;
                backend::TurnRecord record;
                for (int i = begin; i < end; ++i)
                    record.frames.emplace_back(trajectory.frames[i].kind,
                                               trajectory.frames[i].content);
                record.reply = raw.text;
                transcript.push_back(std::move(record));
            } else {
                const auto response =
                    backend::request_final_intents(backend, bundle, options.reask_budget);
                entry.prompt_hash = response.prompt_hash;
                entry.raw_text = response.raw_text;
                entry.flags = response.flags;
                result.flags = response.flags;
                for (const auto& text : response.intents) {
                    Intent intent;
                    intent.text = text;
                    result.predicted_intents.push_back(std::move(intent));
                }
            }
            entry.memory_summary = "(no memory module)";
            result.trace.entries.push_back(std::move(entry));
        }
    } catch (const backend::BackendError& e) {
        result.failed = true;
        result.failure = e.what();
        result.predicted_intents.clear();
    }
    return result;
}

std::string result_file_name(const std::string& trajectory_id, const std::string& profile_id,
                             RunMode mode) {
    return trajectory_id + "__" + profile_id + "__" + to_string(mode) + ".jsonl";
}

namespace {

ojson intent_to_json(const Intent& intent) {
    ojson j;
    j["text"] = intent.text;
    ojson slots = ojson::object();
    for (const auto& [k, v] : intent.slots) slots[k] = v;
    j["slots"] = std::move(slots);
    return j;
}

Intent intent_from_json(const ojson& j) {
    Intent intent;
    intent.text = j.at("text").get<std::string>();
    if (j.contains("slots"))
        for (const auto& [k, v] : j["slots"].items())
            intent.slots.emplace_back(k, v.get<std::string>());
    return intent;
}

}  // namespace

void write_result_file(const PredictionResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write result file: " + path.string());

    ojson header;
    header["record"] = "result";
    header["trajectory_id"] = result.trajectory_id;
    header["profile_id"] = result.profile_id;
    header["mode"] = to_string(result.mode);
    header["predicted_intents"] = ojson::array();
    for (const auto& intent : result.predicted_intents)
        header["predicted_intents"].push_back(intent_to_json(intent));
    header["flags"] = result.flags;
    header["failed"] = result.failed;
    header["failure"] = result.failure;
    out << header.dump() << "\n";

    for (const auto& entry : result.trace.entries) {
        ojson j;
        j["record"] = "trace";
        j["frame_index"] = entry.frame_index;
        j["prompt_hash"] = std::to_string(entry.prompt_hash);
        j["action"] = backend::to_string(entry.decision.action);
        j["intent_text"] = entry.decision.intent_text;
        if (entry.decision.thread_id) j["thread_id"] = *entry.decision.thread_id;
        j["delete_intent_ids"] = entry.decision.delete_intent_ids;
        j["rationale"] = entry.decision.rationale;
        j["raw_text"] = entry.raw_text;
        j["memory_summary"] = entry.memory_summary;
        j["flags"] = entry.flags;
        out << j.dump() << "\n";
    }
}

PredictionResult read_result_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("result file not found: " + path.string());

    PredictionResult result;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ojson j = ojson::parse(line);
        const std::string record = j.value("record", "");
        if (record == "result") {
            result.trajectory_id = j.at("trajectory_id").get<std::string>();
            result.profile_id = j.at("profile_id").get<std::string>();
            auto mode = run_mode_from_string(j.at("mode").get<std::string>());
            if (!mode) throw std::runtime_error("bad mode in " + path.string());
            result.mode = *mode;
            for (const auto& ji : j.at("predicted_intents"))
                result.predicted_intents.push_back(intent_from_json(ji));
            result.flags = j.value("flags", std::vector<std::string>{});
            result.failed = j.value("failed", false);
            result.failure = j.value("failure", "");
            saw_header = true;
        } else if (record == "trace") {
            TraceEntry entry;
            entry.frame_index = j.at("frame_index").get<int>();
            entry.prompt_hash = std::stoull(j.at("prompt_hash").get<std::string>());
            auto action = backend::action_from_string(j.at("action").get<std::string>());
            entry.decision.action = action.value_or(backend::Action::idle);
            entry.decision.intent_text = j.value("intent_text", "");
            if (j.contains("thread_id")) entry.decision.thread_id = j["thread_id"].get<int>();
            entry.decision.delete_intent_ids =
                j.value("delete_intent_ids", std::vector<int>{});
            entry.decision.rationale = j.value("rationale", "");
            entry.raw_text = j.value("raw_text", "");
            entry.memory_summary = j.value("memory_summary", "");
            entry.flags = j.value("flags", std::vector<std::string>{});
            result.trace.entries.push_back(std::move(entry));
        }
    }
    if (!saw_header)
        throw std::runtime_error("result file has no header record: " + path.string());
    return result;
}

}  // namespace pira::engine
