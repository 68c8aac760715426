#include "pira/synthgen/templates.hpp"

#include <fstream>
#include <set>

namespace pira::synthgen {

namespace {

using ojson = nlohmann::ordered_json;

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AttributeList slots_from_json(const ojson& obj) {
    AttributeList slots;
    for (const auto& [k, v] : obj.items()) slots.emplace_back(k, v.get<std::string>());
    return slots;
}

std::vector<IntentScript> intent_scripts_from_json(const ojson& arr) {
    std::vector<IntentScript> scripts;
    for (const auto& ji : arr) {
        IntentScript script;
        script.text = ji.at("text").get<std::string>();
        if (ji.contains("slots")) script.slots = slots_from_json(ji["slots"]);
        scripts.push_back(std::move(script));
    }
    return scripts;
}

}  // namespace

std::vector<std::string> extract_slots(const std::string& script) {
    std::vector<std::string> slots;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < script.size(); ++i) {
        if (script[i] != '{') continue;
        const auto close = script.find('}', i + 1);
        if (close == std::string::npos) break;
        const std::string name = script.substr(i + 1, close - i - 1);
        if (!name.empty() && name.find('{') == std::string::npos && seen.insert(name).second)
            slots.push_back(name);
        i = close;
    }
    return slots;
}

std::string substitute_slots(const std::string& script, const AttributeList& values) {
    std::string out = script;
    for (const auto& [name, value] : values) {
        const std::string placeholder = "{" + name + "}";
        std::size_t pos = 0;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return out;
}

void validate_template(const TaskTemplate& tmpl) {
    if (tmpl.template_id.empty()) throw TemplateError("template with empty template_id");
    if (tmpl.frame_scripts.size() < 2)
        throw TemplateError("template '" + tmpl.template_id +
                            "': needs at least two frame scripts");

    std::set<std::string> frame_slots;
    for (const auto& script : tmpl.frame_scripts) {
        if (script.empty())
            throw TemplateError("template '" + tmpl.template_id + "': empty frame script");
        for (const auto& slot : extract_slots(script)) frame_slots.insert(slot);
    }

    auto check_variant = [&](const std::vector<IntentScript>& intents,
                             const std::string& label) {
        if (intents.size() > tmpl.frame_scripts.size())
            throw TemplateError("template '" + tmpl.template_id + "' " + label +
                                ": more intents than frames");
        for (const auto& intent : intents) {
            if (intent.text.empty())
                throw TemplateError("template '" + tmpl.template_id + "' " + label +
                                    ": empty intent text");
            for (const auto& slot : extract_slots(intent.text)) {
                if (!frame_slots.count(slot))
                    throw TemplateError("template '" + tmpl.template_id + "' " + label +
                                        ": intent slot {" + slot +
                                        "} never appears in a frame script");
            }
        }
    };

    check_variant(tmpl.intent_scripts, "intent_scripts");
    if (tmpl.conditioning) {
        if (tmpl.conditioning->attribute.empty())
            throw TemplateError("template '" + tmpl.template_id +
                                "': conditioning attribute is empty");
        if (tmpl.conditioning->cases.empty())
            throw TemplateError("template '" + tmpl.template_id +
                                "': conditioning has no cases");
        for (const auto& c : tmpl.conditioning->cases)
            check_variant(c.intents, "case '" + c.value + "'");
    } else if (tmpl.intent_scripts.empty()) {
        throw TemplateError("template '" + tmpl.template_id +
                            "': a direct template must imply at least one intent");
    }
}

std::vector<TaskTemplate> templates_from_json(const ojson& doc) {
    const ojson& arr = doc.is_array() ? doc : doc.at("templates");
    std::vector<TaskTemplate> templates;
    for (const auto& jt : arr) {
        TaskTemplate tmpl;
        tmpl.template_id = jt.at("template_id").get<std::string>();
        for (const auto& s : jt.at("frame_scripts"))
            tmpl.frame_scripts.push_back(s.get<std::string>());
        if (jt.contains("intent_scripts"))
            tmpl.intent_scripts = intent_scripts_from_json(jt["intent_scripts"]);
        if (jt.contains("profile_conditioning")) {
            ProfileConditioning cond;
            const auto& jc = jt["profile_conditioning"];
            cond.attribute = jc.at("attribute").get<std::string>();
            for (const auto& [value, intents] : jc.at("cases").items())
                cond.cases.push_back({value, intent_scripts_from_json(intents)});
            tmpl.conditioning = std::move(cond);
        }
        if (jt.contains("slot_pools")) {
            for (const auto& [name, pool] : jt["slot_pools"].items()) {
                std::vector<std::string> values;
                for (const auto& v : pool) values.push_back(v.get<std::string>());
                tmpl.slot_pools.emplace_back(name, std::move(values));
            }
        }
        validate_template(tmpl);
        templates.push_back(std::move(tmpl));
    }
    if (templates.empty()) throw TemplateError("no templates defined");
    return templates;
}

std::vector<TaskTemplate> load_templates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TemplateError("template file not found: " + path.string());
    return templates_from_json(ojson::parse(in));
}

std::vector<std::string> load_noise_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TemplateError("noise pool file not found: " + path.string());
    const ojson doc = ojson::parse(in);
    const ojson& arr = doc.is_array() ? doc : doc.at("noise_frames");
    std::vector<std::string> pool;
    for (const auto& v : arr) pool.push_back(v.get<std::string>());
    if (pool.empty()) throw TemplateError("noise pool is empty: " + path.string());
    return pool;
}

namespace {

IntentScript intent(std::string text, AttributeList slots) {
    return IntentScript{std::move(text), std::move(slots)};
}

std::vector<TaskTemplate> make_builtin_templates() {
    std::vector<TaskTemplate> all;

    {
        TaskTemplate t;
        t.template_id = "dinner_plan";
        t.frame_scripts = {
            "Messaging app - chat with {friend}: 'Dinner this {day}?' / 'Yes! How about "
            "{venue}?'",
            "Messaging app - {friend}: 'Let's say {time} at {venue}, I'll come straight "
            "from work.'",
            "Browser - search results for '{venue} reviews', top result rated 4.6 stars.",
            "Maps app - pin dropped on {venue}, 18 minutes away by subway.",
            "Messaging app - user: 'Perfect, {venue} at {time} on {day}. See you there!'",
        };
        t.intent_scripts = {
            intent("Book a table for two at {venue} at {time} on {day}",
                   {{"venue", "{venue}"}, {"time", "{time}"}, {"day", "{day}"}}),
            intent("Add a calendar event for dinner with {friend} at {venue} on {day}",
                   {{"friend", "{friend}"}, {"venue", "{venue}"}, {"day", "{day}"}}),
        };
        t.slot_pools = {
            {"friend", {"Alex", "Priya", "Marco", "Dana", "Yuki"}},
            {"venue",
             {"Grnd Restaurant", "Vera Trattoria", "The Juniper Table", "Cielo Azul",
              "Old Pine Bistro"}},
            {"time", {"7 PM", "6:30 PM", "8 PM", "12:30 PM"}},
            {"day", {"Friday", "Saturday", "Sunday", "Tuesday"}},
        };
        all.push_back(std::move(t));
    }

    {
        TaskTemplate t;
        t.template_id = "study_topic";
        t.frame_scripts = {
            "PDF reader - lecture slides '{topic}', page 3 of 42.",
            "Note-taking app - heading '{topic}' with three half-finished bullet points.",
            "Browser - recorded lecture on {topic}, paused at 12:40.",
            "PDF reader - '{topic}' practice problems, problem set 2 open.",
        };
        t.intent_scripts = {
            intent("Summarize the study materials on {topic}", {{"topic", "{topic}"}}),
        };
        t.slot_pools = {
            {"topic",
             {"graph algorithms", "linear regression", "thermodynamics",
              "organic chemistry", "French verb conjugation"}},
        };
        all.push_back(std::move(t));
    }

    {
        TaskTemplate t;
        t.template_id = "housing_search";
        t.frame_scripts = {
            "Real-estate app - browsing listings in {district}.",
            "Real-estate app - listing: 3-bed apartment in {district}, floor-to-ceiling "
            "windows, concierge.",
            "Real-estate app - listing: studio in {district}, compact, recently renovated.",
            "Calculator app - rough monthly cost estimate for a place in {district}.",
            "Real-estate app - saved search for {district} updated with new filters.",
        };
        ProfileConditioning cond;
        cond.attribute = "budget";
        cond.cases = {
            {"high",
             {intent("Schedule a viewing to buy a luxury apartment in {district}",
                     {{"district", "{district}"}})}},
            {"low",
             {intent("Schedule a viewing to rent a budget studio in {district}",
                     {{"district", "{district}"}})}},
        };
        t.conditioning = std::move(cond);
        t.slot_pools = {
            {"district", {"Riverside", "Oakwood", "Northgate", "Harbor Point", "Eastfield"}},
        };
        all.push_back(std::move(t));
    }

    {
        TaskTemplate t;
        t.template_id = "trip_planning";
        t.frame_scripts = {
            "Browser - article: '48 hours in {city}'.",
            "Travel app - flight search to {city}, {month} dates selected.",
            "Travel app - places to stay in {city}, map view with price pins.",
            "Notes app - checklist titled '{city} ideas', four unchecked items.",
        };
        ProfileConditioning cond;
        cond.attribute = "travel_style";
        cond.cases = {
            {"comfort",
             {intent("Book a well-reviewed hotel in {city} for the {month} trip",
                     {{"city", "{city}"}, {"month", "{month}"}})}},
            {"thrifty",
             {intent("Book a budget hostel in {city} for the {month} trip",
                     {{"city", "{city}"}, {"month", "{month}"}})}},
            {"homebody", {}},
        };
        t.conditioning = std::move(cond);
        t.slot_pools = {
            {"city", {"Lisbon", "Kyoto", "Tallinn", "Montreal", "Busan"}},
            {"month", {"March", "May", "September", "November"}},
        };
        all.push_back(std::move(t));
    }

    {
        TaskTemplate t;
        t.template_id = "grocery_restock";
        t.frame_scripts = {
            "Pantry-tracker app - running low: {item}.",
            "Recipe app - tonight's saved recipe calls for {item}.",
            "Shopping list app - '{item}' typed into the list but not ordered.",
        };
        t.intent_scripts = {
            intent("Order {item} from the grocery app", {{"item", "{item}"}}),
        };
        t.slot_pools = {
            {"item", {"oat milk", "basmati rice", "ground coffee", "olive oil", "cat food"}},
        };
        all.push_back(std::move(t));
    }

    {
        TaskTemplate t;
        t.template_id = "gift_hunt";
        t.frame_scripts = {
            "Messaging app - group chat: '{friend}'s birthday is on {day}!'",
            "Shopping app - browsing {gift} gift sets, sorted by rating.",
            "Shopping app - {gift} gift set added to the wishlist.",
            "Calendar app - {day} shows a small birthday marker.",
        };
        t.intent_scripts = {
            intent("Order the {gift} gift set for {friend}'s birthday on {day}",
                   {{"friend", "{friend}"}, {"gift", "{gift}"}, {"day", "{day}"}}),
        };
        t.slot_pools = {
            {"friend", {"Alex", "Priya", "Marco", "Dana", "Yuki"}},
            {"gift", {"tea sampler", "sketching kit", "board game", "scented candle"}},
            {"day", {"Friday", "Saturday", "Sunday", "Tuesday"}},
        };
        all.push_back(std::move(t));
    }

    {
        TaskTemplate t;
        t.template_id = "fitness_class";
        t.frame_scripts = {
            "Fitness app - {class_name} timetable at the downtown studio.",
            "Fitness app - {class_name} class detail, {day} slots still open.",
            "Messaging app - user: 'Thinking of trying {class_name} on {day}.'",
        };
        t.intent_scripts = {
            intent("Reserve a spot in the {class_name} class on {day}",
                   {{"class_name", "{class_name}"}, {"day", "{day}"}}),
        };
        t.slot_pools = {
            {"class_name", {"spin", "hot yoga", "pilates", "boxing"}},
            {"day", {"Friday", "Saturday", "Sunday", "Tuesday"}},
        };
        all.push_back(std::move(t));
    }

    for (const auto& t : all) validate_template(t);
    return all;
}

std::vector<std::string> make_builtin_noise_pool() {
    return {
        "Home screen - grid of app icons, nothing opened.",
        "Lock screen - clock and two silent notifications.",
        "Social feed - scrolling past short videos, none opened.",
        "App switcher - flipping between recent apps without choosing one.",
        "News app - skimming headlines, scrolled past without tapping.",
        "Photo gallery - idly swiping through old screenshots.",
        "Weather app - glanced at today's forecast.",
        "Settings - brightness slider nudged, closed again.",
        "Browser - blank new-tab page.",
        "Music app - paused track, screen left open.",
        "Video app - muted autoplay preview, scrolled onward.",
        "System notice - software update reminder dismissed.",
    };
}

}  // namespace

const std::vector<TaskTemplate>& builtin_templates() {
    static const std::vector<TaskTemplate> templates = make_builtin_templates();
    return templates;
}

const std::vector<std::string>& builtin_noise_pool() {
    static const std::vector<std::string> pool = make_builtin_noise_pool();
    return pool;
}

}  // namespace pira::synthgen
