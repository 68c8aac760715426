#include "pira/core/types.hpp"

namespace pira {

std::string to_string(DeviceClass dc) {
    return dc == DeviceClass::mobile ? "mobile" : "desktop";
}

std::string to_string(PayloadKind kind) {
    return kind == PayloadKind::text ? "text" : "image";
}

std::optional<DeviceClass> device_class_from_string(const std::string& s) {
    if (s == "mobile") return DeviceClass::mobile;
    if (s == "desktop") return DeviceClass::desktop;
    return std::nullopt;
}

std::optional<PayloadKind> payload_kind_from_string(const std::string& s) {
    if (s == "text") return PayloadKind::text;
    if (s == "image") return PayloadKind::image;
    return std::nullopt;
}

const std::string* UserProfile::find_attribute(const std::string& key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string ProvenanceLabel::tag() const {
    return is_noise ? std::string("noise") : "task:" + std::to_string(task_id);
}

std::optional<ProvenanceLabel> ProvenanceLabel::from_tag(int frame_index,
                                                         const std::string& tag) {
    if (tag == "noise") return ProvenanceLabel::noise(frame_index);
    constexpr const char* prefix = "task:";
    if (tag.rfind(prefix, 0) == 0) {
        const std::string id_part = tag.substr(5);
        if (id_part.empty()) return std::nullopt;
        for (char c : id_part) {
            if (c < '0' || c > '9') return std::nullopt;
        }
        return ProvenanceLabel::task(frame_index, std::stoi(id_part));
    }
    return std::nullopt;
}

const Trajectory* Dataset::find_trajectory(const std::string& id) const {
    for (const auto& t : trajectories) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

const UserProfile* Dataset::find_profile(const std::string& id) const {
    for (const auto& p : profiles) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

const GroundTruth* Dataset::find_ground_truth(const std::string& trajectory_id,
                                              const std::string& profile_id) const {
    for (const auto& gt : ground_truth) {
        if (gt.trajectory_id == trajectory_id && gt.profile_id == profile_id) return &gt;
    }
    return nullptr;
}

}  // namespace pira
