#pragma once

#include <filesystem>
#include <memory>

#include <nlohmann/json.hpp>

#include "gnsde/model.hpp"

namespace gnsde {

/// Writes the model kind, its full config and every named parameter as JSON.
/// Doubles are printed in shortest round-trip form, so loading restores the
/// parameters bit for bit. `run` is stored alongside when not null.
void save_checkpoint(const std::filesystem::path& path, const NodeModel& model,
                     const nlohmann::json& run = nullptr);

struct LoadedCheckpoint {
  std::unique_ptr<NodeModel> model;
  nlohmann::json run;
};

/// Throws ParseError on unreadable or malformed files and DimensionError when
/// a stored tensor does not fit the architecture it declares.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gnsde
