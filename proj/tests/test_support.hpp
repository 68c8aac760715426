#pragma once

// Shared fixture builders for the test suites.

#include <filesystem>
#include <fstream>
#include <string>

#include "pira/core/dataset.hpp"

namespace pira::testing {

inline Frame text_frame(int index, std::string content) {
    Frame f;
    f.index = index;
    f.kind = PayloadKind::text;
    f.content = std::move(content);
    return f;
}

inline UserProfile make_profile(std::string id, AttributeList attributes = {}) {
    UserProfile p;
    p.id = std::move(id);
    p.description = "test profile " + p.id;
    p.attributes = std::move(attributes);
    return p;
}

inline Intent make_intent(std::string text, AttributeList slots = {}) {
    Intent i;
    i.text = std::move(text);
    i.slots = std::move(slots);
    return i;
}

// One trajectory, three profiles, three ground-truth entries. Frames 0 and 2
// belong to task 1, frame 1 is noise.
inline Dataset small_dataset() {
    Dataset ds;
    ds.manifest_version = kManifestVersion;
    for (int j = 0; j < 3; ++j)
        ds.profiles.push_back(make_profile("p" + std::to_string(j), {{"budget", "low"}}));

    Trajectory t;
    t.id = "t0";
    t.profile_ids = {"p0", "p1", "p2"};
    t.frames = {text_frame(0, "Ticket app - concert tickets for Saturday on screen."),
                text_frame(1, "Home screen - nothing opened."),
                text_frame(2, "Ticket app - checkout page for two tickets.")};
    ds.trajectories.push_back(t);

    for (int j = 0; j < 3; ++j) {
        GroundTruth gt;
        gt.trajectory_id = "t0";
        gt.profile_id = "p" + std::to_string(j);
        gt.intents = {make_intent("Buy two concert tickets for Saturday")};
        gt.provenance = {ProvenanceLabel::task(0, 1), ProvenanceLabel::noise(1),
                         ProvenanceLabel::task(2, 1)};
        ds.ground_truth.push_back(std::move(gt));
    }
    return ds;
}

// Unique scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pira_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace pira::testing
