#include "pira/backend/scripted.hpp"

#include <deque>
#include <fstream>

#include "pira/core/transforms.hpp"
#include "pira/util/rng.hpp"

namespace pira::backend {

namespace {

using ojson = nlohmann::ordered_json;

std::string strip_clean_suffix(const std::string& id) {
    const std::string suffix = kCleanSuffix;
    if (id.size() > suffix.size() &&
        id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0)
        return id.substr(0, id.size() - suffix.size());
    return id;
}

// Replays the engine's id assignment over the labeled frames and emits the
// matching decision per frame. `task_intents` lists intent texts per task;
// tasks absent from the map (or mapped to an empty list) are treated as
// having no intent for this profile and produce IDLE. `corrupted` marks the
// noise frames where a trigger-happy wrapper will invent a CREATE at run
// time; the simulation must account for those so subsequent task-frame
// decisions still carry engine-accurate thread ids.
PairScript build_script(const std::vector<ProvenanceLabel>& labels,
                        const std::map<int, std::vector<std::string>>& task_intents,
                        std::vector<std::string> final_intents,
                        const std::vector<bool>& corrupted = {}) {
    PairScript script;
    script.final_intents = std::move(final_intents);

    int sim_next_id = 0;
    int active_task = -1;  // -2 after an invented thread takes the active slot
    std::map<int, int> last_thread_of_task;
    std::map<int, std::deque<std::string>> pending;
    std::map<int, std::string> last_text_of_task;

    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& label = labels[i];
        PairScript::Step step;
        if (label.is_noise) {
            step.is_noise = true;
            if (i < corrupted.size() && corrupted[i]) {
                sim_next_id++;  // the invented CREATE consumes an engine id
                active_task = -2;
            }
            script.steps.push_back(std::move(step));
            continue;
        }
        const int m = label.task_id;
        auto it = task_intents.find(m);
        const bool has_intent = it != task_intents.end() && !it->second.empty();
        if (!has_intent) {
            // Profile-negated task: correct behavior is restraint.
            script.steps.push_back(std::move(step));
            continue;
        }
        const auto& texts = it->second;
        TransitionDecision d;
        if (!last_thread_of_task.count(m)) {
            d.action = Action::create;
            d.intent_text = texts.front();
            last_thread_of_task[m] = sim_next_id++;
            last_text_of_task[m] = d.intent_text;
            pending[m].assign(texts.begin() + 1, texts.end());
            active_task = m;
        } else if (!pending[m].empty()) {
            // Composite tasks imply several intents; each gets its own thread
            // on a later frame of the same task.
            d.action = Action::create;
            d.intent_text = pending[m].front();
            pending[m].pop_front();
            last_thread_of_task[m] = sim_next_id++;
            last_text_of_task[m] = d.intent_text;
            active_task = m;
        } else if (active_task == m) {
            d.action = Action::update;
            d.intent_text = last_text_of_task[m];
        } else {
            d.action = Action::resume;
            d.thread_id = last_thread_of_task[m];
            active_task = m;
        }
        step.decision = std::move(d);
        script.steps.push_back(std::move(step));
    }
    return script;
}

}  // namespace

const IntentSheet::Entry* IntentSheet::find(const std::string& trajectory_id,
                                            const std::string& profile_id) const {
    for (const auto& e : entries) {
        if (e.trajectory_id == trajectory_id && e.profile_id == profile_id) return &e;
    }
    const std::string base = strip_clean_suffix(trajectory_id);
    if (base != trajectory_id) {
        for (const auto& e : entries) {
            if (e.trajectory_id == base && e.profile_id == profile_id) return &e;
        }
    }
    return nullptr;
}

ojson IntentSheet::to_json() const {
    ojson doc;
    doc["version"] = "1";
    doc["entries"] = ojson::array();
    for (const auto& e : entries) {
        ojson je;
        je["trajectory_id"] = e.trajectory_id;
        je["profile_id"] = e.profile_id;
        je["task_intents"] = ojson::array();
        for (const auto& [task, intents] : e.task_intents) {
            ojson jt;
            jt["task"] = task;
            jt["intents"] = intents;
            je["task_intents"].push_back(std::move(jt));
        }
        doc["entries"].push_back(std::move(je));
    }
    return doc;
}

IntentSheet IntentSheet::from_json(const ojson& doc) {
    IntentSheet sheet;
    for (const auto& je : doc.value("entries", ojson::array())) {
        Entry e;
        e.trajectory_id = je.at("trajectory_id").get<std::string>();
        e.profile_id = je.at("profile_id").get<std::string>();
        for (const auto& jt : je.value("task_intents", ojson::array())) {
            std::vector<std::string> intents;
            for (const auto& v : jt.at("intents")) intents.push_back(v.get<std::string>());
            e.task_intents.emplace_back(jt.at("task").get<int>(), std::move(intents));
        }
        sheet.entries.push_back(std::move(e));
    }
    return sheet;
}

void IntentSheet::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write intent sheet: " + path.string());
    out << to_json().dump(2) << "\n";
}

IntentSheet IntentSheet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("intent sheet not found: " + path.string());
    return from_json(ojson::parse(in));
}

std::map<std::pair<std::string, std::string>, PairScript> build_pair_scripts(
    const Dataset& dataset, const IntentSheet& sheet, const ScriptCorruption& corruption) {
    std::map<std::pair<std::string, std::string>, PairScript> scripts;

    auto corrupted_mask = [&corruption](const std::string& trajectory_id,
                                        const std::string& profile_id,
                                        const std::vector<ProvenanceLabel>& labels) {
        std::vector<bool> mask(labels.size(), false);
        if (corruption.p_create <= 0.0) return mask;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            mask[i] = labels[i].is_noise &&
                      TriggerHappyBackend::noise_coin(corruption.seed, trajectory_id,
                                                      profile_id, static_cast<int>(i)) <
                          corruption.p_create;
        }
        return mask;
    };

    for (const auto& gt : dataset.ground_truth) {
        const Trajectory* traj = dataset.find_trajectory(gt.trajectory_id);
        if (!traj) continue;
        const IntentSheet::Entry* entry = sheet.find(gt.trajectory_id, gt.profile_id);

        std::map<int, std::vector<std::string>> task_intents;
        std::vector<std::string> finals;
        if (entry) {
            for (const auto& [task, intents] : entry->task_intents) {
                task_intents[task] = intents;
                finals.insert(finals.end(), intents.begin(), intents.end());
            }
        }

        const auto labels = ordered_provenance(*traj, gt);
        scripts[{gt.trajectory_id, gt.profile_id}] =
            build_script(labels, task_intents, finals,
                         corrupted_mask(gt.trajectory_id, gt.profile_id, labels));

        // Clean-variant script, if this trajectory has any task frame. Labels
        // after stripping are exactly the task labels, re-compacted.
        const GroundTruth clean_gt = strip_noise_ground_truth(gt);
        if (!clean_gt.provenance.empty()) {
            scripts[{clean_gt.trajectory_id, gt.profile_id}] = build_script(
                clean_gt.provenance, task_intents, finals,
                corrupted_mask(clean_gt.trajectory_id, gt.profile_id, clean_gt.provenance));
        }
    }
    return scripts;
}

std::string decision_to_model_json(const TransitionDecision& d) {
    ojson j;
    j["action"] = to_string(d.action);
    if (d.action == Action::create || d.action == Action::update)
        j["intent_text"] = d.intent_text;
    if (d.thread_id) j["thread_id"] = *d.thread_id;
    if (!d.delete_intent_ids.empty()) j["delete_intent_ids"] = d.delete_intent_ids;
    return j.dump();
}

OracleBackend::OracleBackend(const Dataset& dataset, const IntentSheet& sheet)
    : scripts_(build_pair_scripts(dataset, sheet)) {}

RawCompletion OracleBackend::complete(const PromptBundle& bundle) {
    RawCompletion raw;
    auto it = scripts_.find({bundle.trajectory_id, bundle.profile_id});

    if (bundle.query_kind == QueryKind::observe) {
        raw.text = "Noted. Observing.";
        return raw;
    }
    if (bundle.query_kind == QueryKind::predict_final) {
        ojson arr = ojson::array();
        if (it != scripts_.end())
            for (const auto& text : it->second.final_intents) arr.push_back(text);
        raw.text = arr.dump();
        return raw;
    }

    if (it == scripts_.end() || bundle.frame_index < 0 ||
        bundle.frame_index >= static_cast<int>(it->second.steps.size())) {
        raw.text = decision_to_model_json(TransitionDecision{});  // unknown frame: IDLE
        return raw;
    }
    raw.text = decision_to_model_json(
        it->second.steps[static_cast<std::size_t>(bundle.frame_index)].decision);
    return raw;
}

TriggerHappyBackend::TriggerHappyBackend(const Dataset& dataset, const IntentSheet& sheet,
                                         double p_create, std::uint64_t seed)
    : scripts_(build_pair_scripts(dataset, sheet, {p_create, seed})),
      p_create_(p_create),
      seed_(seed) {
    if (p_create < 0.0 || p_create > 1.0)
        throw std::invalid_argument("p_create must be in [0, 1]");
}

std::string TriggerHappyBackend::invented_intent(const std::string& trajectory_id,
                                                 int frame_index) {
    return "Open the highlighted suggestion from screen " + std::to_string(frame_index) +
           " of " + trajectory_id;
}

double TriggerHappyBackend::noise_coin(std::uint64_t seed, const std::string& trajectory_id,
                                       const std::string& profile_id, int frame_index) {
    std::uint64_t h = fnv1a64(trajectory_id);
    h = hash_combine(h, fnv1a64(profile_id));
    h = hash_combine(h, mix64(seed + 0x6c62272e07bb0142ULL));
    h = hash_combine(h, static_cast<std::uint64_t>(frame_index));
    return static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
}

RawCompletion TriggerHappyBackend::complete(const PromptBundle& bundle) {
    RawCompletion raw;
    auto it = scripts_.find({bundle.trajectory_id, bundle.profile_id});

    if (bundle.query_kind == QueryKind::observe) {
        raw.text = "Noted. Observing.";
        return raw;
    }
    if (bundle.query_kind == QueryKind::predict_final) {
        ojson arr = ojson::array();
        if (it != scripts_.end()) {
            for (const auto& text : it->second.final_intents) arr.push_back(text);
            const auto& steps = it->second.steps;
            for (std::size_t i = 0; i < steps.size(); ++i) {
                if (steps[i].is_noise &&
                    noise_coin(seed_, bundle.trajectory_id, bundle.profile_id,
                               static_cast<int>(i)) < p_create_)
                    arr.push_back(invented_intent(bundle.trajectory_id, static_cast<int>(i)));
            }
        }
        raw.text = arr.dump();
        return raw;
    }

    if (it == scripts_.end() || bundle.frame_index < 0 ||
        bundle.frame_index >= static_cast<int>(it->second.steps.size())) {
        raw.text = decision_to_model_json(TransitionDecision{});
        return raw;
    }
    const auto& step = it->second.steps[static_cast<std::size_t>(bundle.frame_index)];
    if (step.is_noise && noise_coin(seed_, bundle.trajectory_id, bundle.profile_id,
                                    bundle.frame_index) < p_create_) {
        TransitionDecision invented;
        invented.action = Action::create;
        invented.intent_text = invented_intent(bundle.trajectory_id, bundle.frame_index);
        raw.text = decision_to_model_json(invented);
        return raw;
    }
    raw.text = decision_to_model_json(step.decision);
    return raw;
}

}  // namespace pira::backend
