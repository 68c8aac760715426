#include "pira/harness/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pira::harness {

namespace {

using ojson = nlohmann::ordered_json;

// "key=value,key=value" parameter lists used by --backend / --judge specs.
std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> params;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw HarnessError("malformed parameter '" + item + "' (expected key=value)");
        params[item.substr(0, eq)] = item.substr(eq + 1);
        pos = comma + 1;
    }
    return params;
}

}  // namespace

std::string to_string(Ablation ablation) {
    return ablation == Ablation::noised ? "noised" : "clean";
}

std::optional<Ablation> ablation_from_string(const std::string& s) {
    if (s == "noised") return Ablation::noised;
    if (s == "clean") return Ablation::clean;
    return std::nullopt;
}

GenConfig load_gen_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw HarnessError("config file not found: " + path.string());
    ojson doc = ojson::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw HarnessError("config file is not a JSON object: " + path.string());

    static const std::set<std::string> known = {
        "seed",           "n_trajectories",      "mean_frames",
        "tasks_min",      "tasks_max",           "noise_fraction",
        "pure_noise_fraction", "profile_dependent_fraction", "profiles_per_trajectory",
        "out_dir",        "templates_file",      "noise_pool_file",
        "emit_clean_companion"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key))
            throw HarnessError("config error at " + key + ": unknown field");
    }

    GenConfig config;
    auto& g = config.generator;
    try {
        g.seed = doc.value("seed", g.seed);
        g.n_trajectories = doc.value("n_trajectories", g.n_trajectories);
        g.mean_frames = doc.value("mean_frames", g.mean_frames);
        g.tasks_min = doc.value("tasks_min", g.tasks_min);
        g.tasks_max = doc.value("tasks_max", g.tasks_max);
        g.noise_fraction = doc.value("noise_fraction", g.noise_fraction);
        g.pure_noise_fraction = doc.value("pure_noise_fraction", g.pure_noise_fraction);
        g.profile_dependent_fraction =
            doc.value("profile_dependent_fraction", g.profile_dependent_fraction);
        g.profiles_per_trajectory =
            doc.value("profiles_per_trajectory", g.profiles_per_trajectory);
        if (doc.contains("out_dir"))
            config.out_dir = doc["out_dir"].get<std::string>();
        if (doc.contains("templates_file"))
            config.templates_file = doc["templates_file"].get<std::string>();
        if (doc.contains("noise_pool_file"))
            config.noise_pool_file = doc["noise_pool_file"].get<std::string>();
        config.emit_clean_companion = doc.value("emit_clean_companion", false);
    } catch (const nlohmann::json::exception& e) {
        throw HarnessError("config error in " + path.string() + ": " + e.what());
    }

    try {
        g.validate();
    } catch (const synthgen::ConfigError& e) {
        throw HarnessError(std::string("config error at ") + e.what());
    }
    return config;
}

BackendSpec BackendSpec::parse(const std::string& text) {
    BackendSpec spec;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (kind == "oracle") {
        spec.kind = Kind::oracle;
        if (!rest.empty()) throw HarnessError("oracle backend takes no parameters");
        return spec;
    }
    if (kind == "trigger-happy") {
        spec.kind = Kind::trigger_happy;
        for (const auto& [key, value] : parse_params(rest)) {
            if (key == "p") {
                spec.p_create = std::stod(value);
            } else if (key == "seed") {
                spec.seed = std::stoull(value);
            } else {
                throw HarnessError("unknown trigger-happy parameter '" + key + "'");
            }
        }
        if (spec.p_create < 0.0 || spec.p_create > 1.0)
            throw HarnessError("trigger-happy p must be in [0, 1]");
        return spec;
    }
    if (kind == "remote") {
        spec.kind = Kind::remote;
        for (const auto& [key, value] : parse_params(rest)) {
            if (key == "model") {
                spec.remote.model = value;
            } else if (key == "base") {
                spec.remote.base_url = value;
            } else if (key == "temperature") {
                spec.remote.temperature = std::stod(value);
            } else if (key == "timeout") {
                spec.remote.timeout_seconds = std::stoi(value);
            } else if (key == "max_retries") {
                spec.remote.max_retries = std::stoi(value);
            } else if (key == "max_in_flight") {
                spec.remote.max_in_flight = std::stoi(value);
            } else {
                throw HarnessError("unknown remote parameter '" + key + "'");
            }
        }
        return spec;
    }
    throw HarnessError("unknown backend '" + kind +
                       "' (expected oracle, trigger-happy or remote)");
}

std::string BackendSpec::describe() const {
    switch (kind) {
        case Kind::oracle:
            return "oracle";
        case Kind::trigger_happy: {
            std::ostringstream out;
            out << "trigger-happy:p=" << p_create << ",seed=" << seed;
            return out.str();
        }
        case Kind::remote:
            return "remote:model=" + remote.model;
    }
    return "oracle";
}

JudgeSpec JudgeSpec::parse(const std::string& text) {
    JudgeSpec spec;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

    auto apply_common = [&spec](const std::string& key, const std::string& value) {
        if (key == "rules") {
            spec.rules_file = value;
            return true;
        }
        return false;
    };

    if (kind == "deterministic") {
        spec.kind = Kind::deterministic;
        for (const auto& [key, value] : parse_params(rest)) {
            if (!apply_common(key, value))
                throw HarnessError("unknown deterministic judge parameter '" + key + "'");
        }
        return spec;
    }
    if (kind == "fixture") {
        spec.kind = Kind::fixture;
        for (const auto& [key, value] : parse_params(rest)) {
            if (key == "file") {
                spec.fixture_file = value;
            } else if (!apply_common(key, value)) {
                throw HarnessError("unknown fixture judge parameter '" + key + "'");
            }
        }
        if (!spec.fixture_file) throw HarnessError("fixture judge requires file=<path>");
        return spec;
    }
    if (kind == "remote") {
        spec.kind = Kind::remote;
        for (const auto& [key, value] : parse_params(rest)) {
            if (key == "model") {
                spec.remote.model = value;
            } else if (key == "base") {
                spec.remote.base_url = value;
            } else {
                throw HarnessError("unknown remote judge parameter '" + key + "'");
            }
        }
        return spec;
    }
    throw HarnessError("unknown judge '" + kind +
                       "' (expected deterministic, fixture or remote)");
}

std::string JudgeSpec::describe() const {
    switch (kind) {
        case Kind::deterministic: return "deterministic";
        case Kind::fixture: return "fixture";
        case Kind::remote: return "remote:" + remote.model;
    }
    return "deterministic";
}

void RunConfig::validate() const {
    if (dataset_dir.empty()) throw HarnessError("dataset directory is required");
    if (out_dir.empty()) throw HarnessError("output directory is required");
    if (window_size < 1) throw HarnessError("window size K must be at least 1");
    if (chunk_size < 1) throw HarnessError("chunk size N must be at least 1");
    if (concurrency < 1) throw HarnessError("concurrency must be at least 1");
}

}  // namespace pira::harness
