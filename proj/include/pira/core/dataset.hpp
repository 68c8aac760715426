#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "pira/core/types.hpp"

namespace pira {

inline constexpr const char* kManifestVersion = "1";
inline constexpr const char* kManifestFileName = "manifest.json";

// Loads <root>/manifest.json, resolves image payloads against root, and
// validates every structural invariant. Throws DatasetError on the first
// violation.
Dataset load_dataset(const std::filesystem::path& root);

// Writes <root>/manifest.json (creating root if needed). Serialization is
// deterministic: identical datasets produce byte-identical files.
void save_dataset(const Dataset& dataset, const std::filesystem::path& root);

// Invariant checks shared by load and by the generator. `root` is only used
// to verify that image payload paths exist; pass an empty path to skip
// file-existence checks.
void validate_dataset(const Dataset& dataset,
                      const std::filesystem::path& root = {});

nlohmann::ordered_json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::ordered_json& doc);

// FNV-1a digest of the serialized manifest; recorded in run manifests so a
// run can be tied to the exact dataset bytes it consumed.
std::uint64_t dataset_digest(const Dataset& dataset);

}  // namespace pira
