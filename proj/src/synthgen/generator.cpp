#include "pira/synthgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pira/core/dataset.hpp"

namespace pira::synthgen {

namespace {

constexpr const char* kOccupations[] = {"student",  "software engineer", "teacher",
                                        "nurse",    "graphic designer",  "retiree",
                                        "chef",     "accountant"};
constexpr const char* kDiets[] = {"omnivore", "vegetarian", "vegan", "pescatarian"};

const std::vector<std::string>& default_pool(const std::string& slot) {
    static const std::map<std::string, std::vector<std::string>> pools = {
        {"venue", {"Grnd Restaurant", "Vera Trattoria", "The Juniper Table"}},
        {"time", {"7 PM", "6:30 PM", "8 PM"}},
        {"day", {"Friday", "Saturday", "Sunday"}},
        {"friend", {"Alex", "Priya", "Marco"}},
        {"city", {"Lisbon", "Kyoto", "Montreal"}},
        {"topic", {"graph algorithms", "linear regression"}},
        {"item", {"oat milk", "ground coffee"}},
    };
    static const std::vector<std::string> empty;
    auto it = pools.find(slot);
    return it == pools.end() ? empty : it->second;
}

const std::vector<std::string>& pool_for(const TaskTemplate& tmpl, const std::string& slot) {
    for (const auto& [name, pool] : tmpl.slot_pools) {
        if (name == slot && !pool.empty()) return pool;
    }
    const auto& fallback = default_pool(slot);
    if (fallback.empty())
        throw ConfigError("templates",
                          "template '" + tmpl.template_id + "' uses slot {" + slot +
                              "} with no value pool");
    return fallback;
}

std::string zero_pad(int value, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*d", width, value);
    return buf;
}

// All slot placeholders a template can ever substitute, in stable order.
std::vector<std::string> template_slots(const TaskTemplate& tmpl) {
    std::vector<std::string> slots;
    std::set<std::string> seen;
    auto add_from = [&](const std::string& text) {
        for (const auto& s : extract_slots(text))
            if (seen.insert(s).second) slots.push_back(s);
    };
    for (const auto& f : tmpl.frame_scripts) add_from(f);
    for (const auto& i : tmpl.intent_scripts) add_from(i.text);
    if (tmpl.conditioning)
        for (const auto& c : tmpl.conditioning->cases)
            for (const auto& i : c.intents) add_from(i.text);
    return slots;
}

Intent instantiate_intent(const IntentScript& script, const AttributeList& values) {
    Intent intent;
    intent.text = substitute_slots(script.text, values);
    for (const auto& [k, v] : script.slots)
        intent.slots.emplace_back(k, substitute_slots(v, values));
    return intent;
}

InstantiatedTask instantiate_task(const TaskTemplate& tmpl, int task_id, SeededRng& rng) {
    AttributeList values;
    for (const auto& slot : template_slots(tmpl))
        values.emplace_back(slot, rng.pick(pool_for(tmpl, slot)));

    InstantiatedTask task;
    task.task_id = task_id;
    task.template_id = tmpl.template_id;
    for (const auto& script : tmpl.frame_scripts) {
        Frame f;
        f.kind = PayloadKind::text;
        f.content = substitute_slots(script, values);
        task.frames.push_back(std::move(f));
    }
    for (const auto& script : tmpl.intent_scripts)
        task.direct_intents.push_back(instantiate_intent(script, values));
    if (tmpl.conditioning) {
        task.conditioning_attribute = tmpl.conditioning->attribute;
        for (const auto& c : tmpl.conditioning->cases) {
            std::vector<Intent> intents;
            for (const auto& script : c.intents)
                intents.push_back(instantiate_intent(script, values));
            task.conditioned_cases.emplace_back(c.value, std::move(intents));
        }
    }
    return task;
}

enum class TrajectoryKind { direct, profile_dependent, pure_noise };

std::string profile_description(const AttributeList& attributes) {
    std::ostringstream out;
    out << "User profile:";
    for (const auto& [k, v] : attributes) out << " " << k << "=" << v << ";";
    return out.str();
}

}  // namespace

void GeneratorConfig::validate() const {
    if (n_trajectories < 1)
        throw ConfigError("n_trajectories", "must be at least 1");
    if (mean_frames < 4)
        throw ConfigError("mean_frames", "must be at least 4");
    if (tasks_min < 1 || tasks_max < tasks_min)
        throw ConfigError("tasks_per_trajectory", "range must satisfy 1 <= min <= max");
    if (noise_fraction < 0.0 || noise_fraction >= 1.0)
        throw ConfigError("noise_fraction", "must be in [0, 1)");
    if (pure_noise_fraction < 0.0 || pure_noise_fraction > 1.0)
        throw ConfigError("pure_noise_fraction", "must be in [0, 1]");
    if (profile_dependent_fraction < 0.0 || profile_dependent_fraction > 1.0)
        throw ConfigError("profile_dependent_fraction", "must be in [0, 1]");
    if (pure_noise_fraction + profile_dependent_fraction > 1.0)
        throw ConfigError("pure_noise_fraction",
                          "pure_noise_fraction + profile_dependent_fraction must not "
                          "exceed 1");
    if (profiles_per_trajectory < 1)
        throw ConfigError("profiles_per_trajectory", "must be at least 1");
}

std::vector<TaskIntents> instantiate_profiles(const std::vector<InstantiatedTask>& tasks,
                                              const std::vector<UserProfile>& profiles) {
    std::vector<TaskIntents> per_profile;
    per_profile.reserve(profiles.size());
    for (const auto& profile : profiles) {
        TaskIntents intents;
        for (const auto& task : tasks) {
            if (!task.conditioning_attribute) {
                intents[task.task_id] = task.direct_intents;
                continue;
            }
            const std::string* value = profile.find_attribute(*task.conditioning_attribute);
            if (!value)
                throw ConfigError("profile_conditioning",
                                  "profile '" + profile.id + "' lacks attribute '" +
                                      *task.conditioning_attribute + "' required by task " +
                                      std::to_string(task.task_id));
            const std::vector<Intent>* matched = nullptr;
            for (const auto& [case_value, case_intents] : task.conditioned_cases) {
                if (case_value == *value) {
                    matched = &case_intents;
                    break;
                }
            }
            // Values outside the rule fall back to the template's default
            // intents (possibly none).
            intents[task.task_id] = matched ? *matched : task.direct_intents;
        }
        per_profile.push_back(std::move(intents));
    }
    return per_profile;
}

InterleaveResult interleave(const std::vector<std::vector<Frame>>& task_streams,
                            const std::vector<Frame>& noise_frames, std::uint64_t seed) {
    SeededRng rng(seed);

    // Sources 0..S-1 are task streams, source S is noise. Picking a source
    // with probability proportional to its remaining count makes every
    // order-preserving merge equally likely.
    struct Source {
        const std::vector<Frame>* frames;
        std::size_t next = 0;
        bool is_noise = false;
        int task_id = 0;
    };
    std::vector<Source> sources;
    for (std::size_t i = 0; i < task_streams.size(); ++i)
        sources.push_back({&task_streams[i], 0, false, static_cast<int>(i) + 1});
    if (!noise_frames.empty()) sources.push_back({&noise_frames, 0, true, 0});

    std::size_t remaining = 0;
    for (const auto& s : sources) remaining += s.frames->size();

    InterleaveResult out;
    out.frames.reserve(remaining);
    while (remaining > 0) {
        std::uint64_t pick = rng.below(remaining);
        for (auto& s : sources) {
            const std::size_t left = s.frames->size() - s.next;
            if (pick >= left) {
                pick -= left;
                continue;
            }
            Frame f = (*s.frames)[s.next++];
            f.index = static_cast<int>(out.frames.size());
            out.labels.push_back(s.is_noise ? ProvenanceLabel::noise(f.index)
                                            : ProvenanceLabel::task(f.index, s.task_id));
            out.frames.push_back(std::move(f));
            --remaining;
            break;
        }
    }
    return out;
}

GeneratorOutput generate(const GeneratorConfig& config,
                         const std::vector<TaskTemplate>& templates,
                         const std::vector<std::string>& noise_pool) {
    config.validate();
    if (templates.empty()) throw ConfigError("templates", "at least one template required");
    if (noise_pool.empty()) throw ConfigError("noise_pool", "at least one noise frame required");
    for (const auto& t : templates) validate_template(t);

    std::vector<std::size_t> direct_templates;
    std::vector<std::size_t> conditioned_templates;
    for (std::size_t i = 0; i < templates.size(); ++i)
        (templates[i].is_conditioned() ? conditioned_templates : direct_templates).push_back(i);

    const int n = config.n_trajectories;
    const int n_pure = static_cast<int>(std::llround(config.pure_noise_fraction * n));
    int n_cond = static_cast<int>(std::llround(config.profile_dependent_fraction * n));
    n_cond = std::min(n_cond, n - n_pure);

    if (n_cond > 0 && conditioned_templates.empty())
        throw ConfigError("profile_dependent_fraction",
                          "no profile-conditioned template available");
    const int n_direct = n - n_pure - n_cond;
    if (n_direct > 0 && direct_templates.empty())
        throw ConfigError("templates", "no direct (unconditioned) template available");
    if (static_cast<std::size_t>(config.tasks_min) > templates.size())
        throw ConfigError("tasks_per_trajectory",
                          "tasks_min exceeds the template count under the no-repetition "
                          "policy");

    double avg_template_len = 0;
    for (const auto& t : templates) avg_template_len += static_cast<double>(t.frame_scripts.size());
    avg_template_len /= static_cast<double>(templates.size());

    SeededRng rng(config.seed);

    std::vector<TrajectoryKind> kinds;
    kinds.insert(kinds.end(), static_cast<std::size_t>(n_pure), TrajectoryKind::pure_noise);
    kinds.insert(kinds.end(), static_cast<std::size_t>(n_cond),
                 TrajectoryKind::profile_dependent);
    kinds.insert(kinds.end(), static_cast<std::size_t>(n_direct), TrajectoryKind::direct);
    rng.shuffle(kinds);

    GeneratorOutput out;
    out.dataset.manifest_version = kManifestVersion;

    for (int t = 0; t < n; ++t) {
        const TrajectoryKind kind = kinds[static_cast<std::size_t>(t)];
        Trajectory traj;
        traj.id = "traj-" + zero_pad(t, 4);
        traj.device_class = rng.bernoulli(0.5) ? DeviceClass::mobile : DeviceClass::desktop;

        // Profiles are fresh per trajectory.
        std::vector<UserProfile> profiles;
        for (int j = 0; j < config.profiles_per_trajectory; ++j) {
            UserProfile p;
            p.id = "prof-" + zero_pad(t, 4) + "-" + std::to_string(j);
            p.attributes = {
                {"budget", rng.bernoulli(0.5) ? "high" : "low"},
                {"occupation", kOccupations[rng.below(std::size(kOccupations))]},
                {"diet", kDiets[rng.below(std::size(kDiets))]},
            };
            profiles.push_back(std::move(p));
        }

        std::vector<InstantiatedTask> tasks;
        std::vector<Frame> noise_frames;
        InterleaveResult merged;

        if (kind == TrajectoryKind::pure_noise) {
            const double jitter = 0.75 + 0.5 * rng.uniform01();
            const int length =
                std::max(3, rng.round_stochastic(config.mean_frames * jitter));
            for (int i = 0; i < length; ++i) {
                Frame f;
                f.kind = PayloadKind::text;
                f.content = rng.pick(noise_pool);
                noise_frames.push_back(std::move(f));
            }
            merged = interleave({}, noise_frames, rng.next());
        } else {
            // Size the task count so realized totals track mean_frames once
            // the noise share is added back on top.
            const double task_frame_target =
                config.mean_frames * (1.0 - config.noise_fraction);
            const double want_tasks = task_frame_target / avg_template_len;
            int k = std::clamp(rng.round_stochastic(want_tasks), config.tasks_min,
                               config.tasks_max);

            std::vector<std::size_t> chosen;
            if (kind == TrajectoryKind::profile_dependent) {
                chosen.push_back(
                    conditioned_templates[rng.below(conditioned_templates.size())]);
            }
            std::vector<std::size_t> rest = direct_templates;
            rng.shuffle(rest);
            for (std::size_t i = 0; i < rest.size() && static_cast<int>(chosen.size()) < k;
                 ++i)
                chosen.push_back(rest[i]);
            if (static_cast<int>(chosen.size()) < config.tasks_min)
                throw ConfigError("tasks_per_trajectory",
                                  "not enough distinct templates to place tasks_min tasks");

            std::vector<std::vector<Frame>> streams;
            int total_task_frames = 0;
            for (std::size_t i = 0; i < chosen.size(); ++i) {
                tasks.push_back(instantiate_task(templates[chosen[i]],
                                                 static_cast<int>(i) + 1, rng));
                total_task_frames += static_cast<int>(tasks.back().frames.size());
                streams.push_back(tasks.back().frames);
            }

            int noise_count = 0;
            if (config.noise_fraction > 0.0) {
                noise_count = std::max(
                    1, static_cast<int>(std::llround(
                           total_task_frames * config.noise_fraction /
                           (1.0 - config.noise_fraction))));
            }
            for (int i = 0; i < noise_count; ++i) {
                Frame f;
                f.kind = PayloadKind::text;
                f.content = rng.pick(noise_pool);
                noise_frames.push_back(std::move(f));
            }

            // Conditioned tasks pin the relevant attribute, cycling through
            // the rule's case values so the variants actually differ across
            // this trajectory's profiles.
            for (const auto& task : tasks) {
                if (!task.conditioning_attribute) continue;
                const auto& cases = task.conditioned_cases;
                if (cases.empty()) continue;
                const std::size_t offset = rng.below(cases.size());
                for (std::size_t j = 0; j < profiles.size(); ++j) {
                    const std::string& value =
                        cases[(offset + j) % cases.size()].first;
                    bool replaced = false;
                    for (auto& [k2, v2] : profiles[j].attributes) {
                        if (k2 == *task.conditioning_attribute) {
                            v2 = value;
                            replaced = true;
                            break;
                        }
                    }
                    if (!replaced)
                        profiles[j].attributes.emplace_back(*task.conditioning_attribute,
                                                            value);
                }
            }

            merged = interleave(streams, noise_frames, rng.next());
        }

        for (auto& p : profiles) {
            p.description = profile_description(p.attributes);
            traj.profile_ids.push_back(p.id);
            out.dataset.profiles.push_back(p);
        }

        traj.frames = merged.frames;
        for (auto& f : traj.frames) f.device_class = traj.device_class;

        const auto per_profile = instantiate_profiles(tasks, profiles);
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            GroundTruth gt;
            gt.trajectory_id = traj.id;
            gt.profile_id = profiles[j].id;
            gt.provenance = merged.labels;

            backend::IntentSheet::Entry entry;
            entry.trajectory_id = traj.id;
            entry.profile_id = profiles[j].id;
            for (const auto& task : tasks) {
                const auto& intents = per_profile[j].at(task.task_id);
                std::vector<std::string> texts;
                for (const auto& intent : intents) {
                    gt.intents.push_back(intent);
                    texts.push_back(intent.text);
                }
                entry.task_intents.emplace_back(task.task_id, std::move(texts));
            }
            out.dataset.ground_truth.push_back(std::move(gt));
            out.sheet.entries.push_back(std::move(entry));
        }

        out.dataset.trajectories.push_back(std::move(traj));
    }

    validate_dataset(out.dataset);
    return out;
}

}  // namespace pira::synthgen
