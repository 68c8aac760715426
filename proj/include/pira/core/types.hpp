#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pira {

enum class DeviceClass { mobile, desktop };
enum class PayloadKind { text, image };

std::string to_string(DeviceClass dc);
std::string to_string(PayloadKind kind);
std::optional<DeviceClass> device_class_from_string(const std::string& s);
std::optional<PayloadKind> payload_kind_from_string(const std::string& s);

// One passive observation. The payload is either a text rendering of the
// screen or a relative path to an image file; agents see nothing else.
struct Frame {
    int index = 0;
    PayloadKind kind = PayloadKind::text;
    std::string content;
    DeviceClass device_class = DeviceClass::mobile;

    bool operator==(const Frame&) const = default;
};

struct Trajectory {
    std::string id;
    DeviceClass device_class = DeviceClass::mobile;
    std::vector<Frame> frames;
    std::vector<std::string> profile_ids;

    bool operator==(const Trajectory&) const = default;
};

// Ordered key/value pairs; order is part of the value and survives
// serialization round trips.
using AttributeList = std::vector<std::pair<std::string, std::string>>;

struct UserProfile {
    std::string id;
    std::string description;
    AttributeList attributes;

    const std::string* find_attribute(const std::string& key) const;

    bool operator==(const UserProfile&) const = default;
};

struct Intent {
    std::string text;
    AttributeList slots;

    bool operator==(const Intent&) const = default;
};

// Frame origin label. Tag encoding on disk is "noise" or "task:<m>".
struct ProvenanceLabel {
    int frame_index = 0;
    bool is_noise = true;
    int task_id = 0;

    static ProvenanceLabel noise(int frame_index) { return {frame_index, true, 0}; }
    static ProvenanceLabel task(int frame_index, int task_id) {
        return {frame_index, false, task_id};
    }

    std::string tag() const;
    static std::optional<ProvenanceLabel> from_tag(int frame_index, const std::string& tag);

    bool operator==(const ProvenanceLabel&) const = default;
};

// Per (trajectory, profile) reference annotation. An empty intent list is
// the one and only representation of a negative sample.
struct GroundTruth {
    std::string trajectory_id;
    std::string profile_id;
    std::vector<Intent> intents;
    std::vector<ProvenanceLabel> provenance;

    bool is_negative() const { return intents.empty(); }

    bool operator==(const GroundTruth&) const = default;
};

struct Dataset {
    std::string manifest_version;
    std::vector<UserProfile> profiles;
    std::vector<Trajectory> trajectories;
    std::vector<GroundTruth> ground_truth;

    const Trajectory* find_trajectory(const std::string& id) const;
    const UserProfile* find_profile(const std::string& id) const;
    const GroundTruth* find_ground_truth(const std::string& trajectory_id,
                                         const std::string& profile_id) const;

    bool operator==(const Dataset&) const = default;
};

// Validation / load failure with a file-and-field location string, e.g.
// "manifest.json: ground_truth[2].profile_id".
class DatasetError : public std::runtime_error {
public:
    DatasetError(std::string location, const std::string& message)
        : std::runtime_error(location + ": " + message), location_(std::move(location)) {}

    const std::string& location() const { return location_; }

private:
    std::string location_;
};

}  // namespace pira
