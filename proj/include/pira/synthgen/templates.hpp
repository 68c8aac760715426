#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pira/core/types.hpp"

namespace pira::synthgen {

// Parameterized intent; slot placeholders look like {venue}.
struct IntentScript {
    std::string text;
    AttributeList slots;
};

// One attribute value -> the intent variants it implies. An empty intent
// list is a profile-negated case: for that user the stream implies nothing.
struct ConditionCase {
    std::string value;
    std::vector<IntentScript> intents;
};

struct ProfileConditioning {
    std::string attribute;
    std::vector<ConditionCase> cases;
};

struct TaskTemplate {
    std::string template_id;
    std::vector<std::string> frame_scripts;
    std::vector<IntentScript> intent_scripts;
    std::optional<ProfileConditioning> conditioning;
    std::vector<std::pair<std::string, std::vector<std::string>>> slot_pools;

    bool is_conditioned() const { return conditioning.has_value(); }
};

// Slot placeholders appearing in a script, in first-appearance order.
std::vector<std::string> extract_slots(const std::string& script);

std::string substitute_slots(const std::string& script, const AttributeList& values);

// Structural checks: at least two frame scripts, every slot used by any
// intent variant also appears in some frame script (otherwise the intent
// would not be inferable from the stream), and no variant implies more
// intents than the task has frames.
void validate_template(const TaskTemplate& tmpl);

std::vector<TaskTemplate> templates_from_json(const nlohmann::ordered_json& doc);
std::vector<TaskTemplate> load_templates(const std::filesystem::path& path);

std::vector<std::string> load_noise_pool(const std::filesystem::path& path);

// Curated defaults used when no template / noise files are supplied.
const std::vector<TaskTemplate>& builtin_templates();
const std::vector<std::string>& builtin_noise_pool();

}  // namespace pira::synthgen
