#pragma once

#include <cstdint>
#include <map>

#include "pira/backend/scripted.hpp"
#include "pira/core/types.hpp"
#include "pira/synthgen/templates.hpp"
#include "pira/util/rng.hpp"

namespace pira::synthgen {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    int n_trajectories = 20;
    int mean_frames = 32;
    int tasks_min = 1;
    int tasks_max = 3;
    double noise_fraction = 0.3;            // share of frames that are noise
    double pure_noise_fraction = 0.2;       // share of trajectories with no intent at all
    double profile_dependent_fraction = 0.3;
    int profiles_per_trajectory = 3;

    void validate() const;  // throws ConfigError naming the offending field
};

// A task placed into one trajectory: slot values are already substituted,
// so the intent variants below are concrete.
struct InstantiatedTask {
    int task_id = 0;
    std::string template_id;
    std::vector<Frame> frames;                 // template order, indices unset
    std::vector<Intent> direct_intents;
    std::optional<std::string> conditioning_attribute;
    std::vector<std::pair<std::string, std::vector<Intent>>> conditioned_cases;
};

// Per-profile ground-truth intents, keyed by task id.
using TaskIntents = std::map<int, std::vector<Intent>>;

// Resolves each task against each profile: conditioned tasks consult the
// profile attribute (a case may map to no intent), direct tasks contribute
// identical intents for every profile. Throws ConfigError when a conditioning
// rule references an attribute a profile does not carry.
std::vector<TaskIntents> instantiate_profiles(const std::vector<InstantiatedTask>& tasks,
                                              const std::vector<UserProfile>& profiles);

struct InterleaveResult {
    std::vector<Frame> frames;            // re-indexed from 0
    std::vector<ProvenanceLabel> labels;  // one per frame
};

// Seeded riffle merge: each stream keeps its internal order, crossings are
// random. Stream i is labeled task(i+1); the noise list is labeled noise.
InterleaveResult interleave(const std::vector<std::vector<Frame>>& task_streams,
                            const std::vector<Frame>& noise_frames, std::uint64_t seed);

struct GeneratorOutput {
    Dataset dataset;
    backend::IntentSheet sheet;
};

// Pure function of (config, templates, noise_pool): identical inputs yield
// byte-identical manifests and sheets.
GeneratorOutput generate(const GeneratorConfig& config,
                         const std::vector<TaskTemplate>& templates,
                         const std::vector<std::string>& noise_pool);

}  // namespace pira::synthgen
