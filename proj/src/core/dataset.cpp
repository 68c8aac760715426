#include "pira/core/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pira/util/rng.hpp"

namespace pira {

namespace {

using ojson = nlohmann::ordered_json;

std::string idx(const char* array, std::size_t i) {
    std::ostringstream out;
    out << array << "[" << i << "]";
    return out.str();
}

ojson attributes_to_json(const AttributeList& attrs) {
    ojson obj = ojson::object();
    for (const auto& [k, v] : attrs) obj[k] = v;
    return obj;
}

AttributeList attributes_from_json(const ojson& obj, const std::string& where) {
    if (!obj.is_object()) throw DatasetError(where, "expected an object");
    AttributeList attrs;
    for (const auto& [k, v] : obj.items()) {
        if (!v.is_string()) throw DatasetError(where + "." + k, "expected a string value");
        attrs.emplace_back(k, v.get<std::string>());
    }
    return attrs;
}

std::string require_string(const ojson& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw DatasetError(where + "." + key, "missing or not a string");
    return obj[key].get<std::string>();
}

}  // namespace

ojson dataset_to_json(const Dataset& dataset) {
    ojson doc;
    doc["manifest_version"] = dataset.manifest_version;

    doc["profiles"] = ojson::array();
    for (const auto& p : dataset.profiles) {
        ojson jp;
        jp["id"] = p.id;
        jp["description"] = p.description;
        jp["attributes"] = attributes_to_json(p.attributes);
        doc["profiles"].push_back(std::move(jp));
    }

    doc["trajectories"] = ojson::array();
    for (const auto& t : dataset.trajectories) {
        ojson jt;
        jt["id"] = t.id;
        jt["device_class"] = to_string(t.device_class);
        jt["profile_ids"] = t.profile_ids;
        jt["frames"] = ojson::array();
        for (const auto& f : t.frames) {
            ojson jf;
            jf["index"] = f.index;
            jf["kind"] = to_string(f.kind);
            jf["content"] = f.content;
            jt["frames"].push_back(std::move(jf));
        }
        doc["trajectories"].push_back(std::move(jt));
    }

    doc["ground_truth"] = ojson::array();
    for (const auto& gt : dataset.ground_truth) {
        ojson jg;
        jg["trajectory_id"] = gt.trajectory_id;
        jg["profile_id"] = gt.profile_id;
        jg["intents"] = ojson::array();
        for (const auto& intent : gt.intents) {
            ojson ji;
            ji["text"] = intent.text;
            ji["slots"] = attributes_to_json(intent.slots);
            jg["intents"].push_back(std::move(ji));
        }
        jg["provenance"] = ojson::array();
        for (const auto& label : gt.provenance) {
            ojson jl;
            jl["frame_index"] = label.frame_index;
            jl["tag"] = label.tag();
            jg["provenance"].push_back(std::move(jl));
        }
        doc["ground_truth"].push_back(std::move(jg));
    }
    return doc;
}

Dataset dataset_from_json(const ojson& doc) {
    Dataset ds;
    if (!doc.is_object()) throw DatasetError(kManifestFileName, "manifest is not a JSON object");
    if (!doc.contains("manifest_version") || !doc["manifest_version"].is_string())
        throw DatasetError("manifest_version", "missing or not a string");
    ds.manifest_version = doc["manifest_version"].get<std::string>();

    for (std::size_t i = 0; doc.contains("profiles") && i < doc["profiles"].size(); ++i) {
        const auto& jp = doc["profiles"][i];
        const std::string where = idx("profiles", i);
        UserProfile p;
        p.id = require_string(jp, "id", where);
        p.description = require_string(jp, "description", where);
        if (jp.contains("attributes"))
            p.attributes = attributes_from_json(jp["attributes"], where + ".attributes");
        ds.profiles.push_back(std::move(p));
    }

    for (std::size_t i = 0; doc.contains("trajectories") && i < doc["trajectories"].size(); ++i) {
        const auto& jt = doc["trajectories"][i];
        const std::string where = idx("trajectories", i);
        Trajectory t;
        t.id = require_string(jt, "id", where);
        const std::string dc = jt.value("device_class", "mobile");
        auto parsed_dc = device_class_from_string(dc);
        if (!parsed_dc)
            throw DatasetError(where + ".device_class", "unknown device class '" + dc + "'");
        t.device_class = *parsed_dc;
        if (jt.contains("profile_ids")) {
            for (const auto& pid : jt["profile_ids"]) {
                if (!pid.is_string())
                    throw DatasetError(where + ".profile_ids", "expected string entries");
                t.profile_ids.push_back(pid.get<std::string>());
            }
        }
        if (!jt.contains("frames") || !jt["frames"].is_array())
            throw DatasetError(where + ".frames", "missing frame list");
        for (std::size_t j = 0; j < jt["frames"].size(); ++j) {
            const auto& jf = jt["frames"][j];
            const std::string fwhere = where + "." + idx("frames", j);
            Frame f;
            if (!jf.contains("index") || !jf["index"].is_number_integer())
                throw DatasetError(fwhere + ".index", "missing or not an integer");
            f.index = jf["index"].get<int>();
            const std::string kind = require_string(jf, "kind", fwhere);
            auto parsed_kind = payload_kind_from_string(kind);
            if (!parsed_kind)
                throw DatasetError(fwhere + ".kind", "unknown payload kind '" + kind + "'");
            f.kind = *parsed_kind;
            f.content = require_string(jf, "content", fwhere);
            f.device_class = t.device_class;
            t.frames.push_back(std::move(f));
        }
        ds.trajectories.push_back(std::move(t));
    }

    for (std::size_t i = 0; doc.contains("ground_truth") && i < doc["ground_truth"].size(); ++i) {
        const auto& jg = doc["ground_truth"][i];
        const std::string where = idx("ground_truth", i);
        GroundTruth gt;
        gt.trajectory_id = require_string(jg, "trajectory_id", where);
        gt.profile_id = require_string(jg, "profile_id", where);
        if (jg.contains("intents")) {
            for (std::size_t j = 0; j < jg["intents"].size(); ++j) {
                const auto& ji = jg["intents"][j];
                const std::string iwhere = where + "." + idx("intents", j);
                Intent intent;
                intent.text = require_string(ji, "text", iwhere);
                if (ji.contains("slots"))
                    intent.slots = attributes_from_json(ji["slots"], iwhere + ".slots");
                gt.intents.push_back(std::move(intent));
            }
        }
        if (jg.contains("provenance")) {
            for (std::size_t j = 0; j < jg["provenance"].size(); ++j) {
                const auto& jl = jg["provenance"][j];
                const std::string lwhere = where + "." + idx("provenance", j);
                if (!jl.contains("frame_index") || !jl["frame_index"].is_number_integer())
                    throw DatasetError(lwhere + ".frame_index", "missing or not an integer");
                const int frame_index = jl["frame_index"].get<int>();
                const std::string tag = require_string(jl, "tag", lwhere);
                auto label = ProvenanceLabel::from_tag(frame_index, tag);
                if (!label)
                    throw DatasetError(lwhere + ".tag",
                                       "expected \"noise\" or \"task:<m>\", got '" + tag + "'");
                gt.provenance.push_back(*label);
            }
        }
        ds.ground_truth.push_back(std::move(gt));
    }
    return ds;
}

void validate_dataset(const Dataset& ds, const std::filesystem::path& root) {
    if (ds.manifest_version != kManifestVersion)
        throw DatasetError("manifest_version",
                           "unsupported schema version '" + ds.manifest_version +
                               "', expected '" + kManifestVersion + "'");

    std::set<std::string> profile_ids;
    for (std::size_t i = 0; i < ds.profiles.size(); ++i) {
        const auto& p = ds.profiles[i];
        const std::string where = idx("profiles", i);
        if (p.id.empty()) throw DatasetError(where + ".id", "empty profile id");
        if (!profile_ids.insert(p.id).second)
            throw DatasetError(where + ".id", "duplicate profile id '" + p.id + "'");
        if (p.description.empty())
            throw DatasetError(where + ".description", "profile description must be non-empty");
        std::set<std::string> keys;
        for (const auto& [k, v] : p.attributes) {
            if (!keys.insert(k).second)
                throw DatasetError(where + ".attributes", "duplicate attribute key '" + k + "'");
        }
    }

    std::set<std::string> trajectory_ids;
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        const auto& t = ds.trajectories[i];
        const std::string where = idx("trajectories", i);
        if (t.id.empty()) throw DatasetError(where + ".id", "empty trajectory id");
        if (!trajectory_ids.insert(t.id).second)
            throw DatasetError(where + ".id", "duplicate trajectory id '" + t.id + "'");
        if (t.frames.empty())
            throw DatasetError(where + ".frames", "trajectory must contain at least one frame");
        std::set<std::string> seen_profiles;
        for (const auto& pid : t.profile_ids) {
            if (!profile_ids.count(pid))
                throw DatasetError(where + ".profile_ids",
                                   "dangling profile reference '" + pid + "'");
            if (!seen_profiles.insert(pid).second)
                throw DatasetError(where + ".profile_ids", "duplicate profile id '" + pid + "'");
        }
        for (std::size_t j = 0; j < t.frames.size(); ++j) {
            const auto& f = t.frames[j];
            const std::string fwhere = where + "." + idx("frames", j);
            if (f.index != static_cast<int>(j))
                throw DatasetError(fwhere + ".index",
                                   "frame indices must be contiguous from 0; expected " +
                                       std::to_string(j) + ", got " + std::to_string(f.index));
            if (f.content.empty())
                throw DatasetError(fwhere + ".content", "frame payload must be non-empty");
            if (f.kind == PayloadKind::image && !root.empty()) {
                if (!std::filesystem::exists(root / f.content))
                    throw DatasetError(fwhere + ".content",
                                       "image payload file not found: " + f.content);
            }
        }
    }

    std::set<std::pair<std::string, std::string>> gt_pairs;
    for (std::size_t i = 0; i < ds.ground_truth.size(); ++i) {
        const auto& gt = ds.ground_truth[i];
        const std::string where = idx("ground_truth", i);
        const Trajectory* traj = ds.find_trajectory(gt.trajectory_id);
        if (!traj)
            throw DatasetError(where + ".trajectory_id",
                               "dangling trajectory reference '" + gt.trajectory_id + "'");
        if (!profile_ids.count(gt.profile_id))
            throw DatasetError(where + ".profile_id",
                               "dangling profile reference '" + gt.profile_id + "'");
        if (!gt_pairs.insert({gt.trajectory_id, gt.profile_id}).second)
            throw DatasetError(where, "duplicate (trajectory_id, profile_id) pair (" +
                                          gt.trajectory_id + ", " + gt.profile_id + ")");
        for (std::size_t j = 0; j < gt.intents.size(); ++j) {
            if (gt.intents[j].text.empty())
                throw DatasetError(where + "." + idx("intents", j) + ".text",
                                   "intent text must be non-empty");
        }
        std::set<int> labeled;
        for (std::size_t j = 0; j < gt.provenance.size(); ++j) {
            const auto& label = gt.provenance[j];
            const std::string lwhere = where + "." + idx("provenance", j);
            if (label.frame_index < 0 ||
                label.frame_index >= static_cast<int>(traj->frames.size()))
                throw DatasetError(lwhere + ".frame_index",
                                   "frame index " + std::to_string(label.frame_index) +
                                       " out of range for trajectory '" + gt.trajectory_id + "'");
            if (!labeled.insert(label.frame_index).second)
                throw DatasetError(lwhere + ".frame_index",
                                   "frame " + std::to_string(label.frame_index) +
                                       " labeled more than once");
        }
    }
}

Dataset load_dataset(const std::filesystem::path& root) {
    const auto manifest_path = root / kManifestFileName;
    std::ifstream in(manifest_path);
    if (!in)
        throw DatasetError(manifest_path.string(), "manifest file not found");
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(manifest_path.string(), std::string("malformed JSON: ") + e.what());
    }
    Dataset ds = dataset_from_json(doc);
    validate_dataset(ds, root);
    return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& root) {
    std::filesystem::create_directories(root);
    const auto manifest_path = root / kManifestFileName;
    std::ofstream out(manifest_path);
    if (!out)
        throw DatasetError(manifest_path.string(), "cannot open manifest for writing");
    out << dataset_to_json(dataset).dump(2) << "\n";
}

std::uint64_t dataset_digest(const Dataset& dataset) {
    return fnv1a64(dataset_to_json(dataset).dump());
}

}  // namespace pira
