#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "otcp/model.hpp"

namespace otcp {

inline constexpr int kArtifactVersion = 1;
inline constexpr const char* kArtifactFormat = "otcp-calibration";

struct Provenance {
  // (path, fnv1a-64 hex digest of the file bytes)
  std::vector<std::pair<std::string, std::string>> inputs;
  std::string created;  // UTC, ISO 8601
};

// FNV-1a 64-bit digest as 16 hex digits.
std::string ContentDigest(std::string_view bytes);
std::string UtcTimestamp();

nlohmann::json ArtifactToJson(const CalibratedModel& model, const Provenance& provenance);
// Throws VersionMismatch on a foreign format tag or version, MalformedData on
// missing or ill-typed fields.
CalibratedModel ArtifactFromJson(const nlohmann::json& j);

std::string SerializeArtifact(const CalibratedModel& model, const Provenance& provenance);
CalibratedModel ParseArtifact(const std::string& text);

void SaveArtifact(const std::string& path, const CalibratedModel& model, const Provenance& provenance);
CalibratedModel LoadArtifact(const std::string& path);

}  // namespace otcp
