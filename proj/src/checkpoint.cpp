#include "gnsde/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "gnsde/config.hpp"
#include "gnsde/error.hpp"

namespace gnsde {

namespace {

constexpr const char* kFormat = "gnsde-checkpoint";
constexpr int kVersion = 1;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const NodeModel& model, const nlohmann::json& run) {
  nlohmann::json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["model_kind"] = to_string(model.kind());
  doc["model"] = to_json(model.config());
  auto& params = doc["parameters"] = nlohmann::json::array();
  for (const auto& p : model.parameters()) {
    auto data = p.value.data();
    params.push_back({{"name", p.name},
                      {"shape", p.value.shape()},
                      {"data", std::vector<double>(data.begin(), data.end())}});
  }
  if (!run.is_null()) doc["run"] = run;
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << doc.dump(1) << '\n';
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  using Kind = ParseError::Kind;
  std::ifstream in(path);
  if (!in) throw ParseError(Kind::missing_file, path.string(), 0, "cannot open checkpoint");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(Kind::malformed, path.string(), 0, err.what());
  }
  try {
    if (doc.value("format", "") != kFormat || doc.value("version", 0) != kVersion) {
      throw ParseError(Kind::malformed, path.string(), 0, "not a version 1 checkpoint");
    }
    auto config = model_config_from_json(doc.at("model"));
    if (doc.at("model_kind").get<std::string>() != to_string(config.kind)) {
      throw ParseError(Kind::malformed, path.string(), 0, "model_kind disagrees with the stored config");
    }
    LoadedCheckpoint out;
    out.model = make_model(config);
    const auto& stored = doc.at("parameters");
    if (stored.size() != out.model->parameters().size()) {
      throw DimensionError("checkpoint holds " + std::to_string(stored.size()) + " tensors, model has " +
                           std::to_string(out.model->parameters().size()));
    }
    for (const auto& item : stored) {
      const auto name = item.at("name").get<std::string>();
      auto& target = out.model->parameters().get(name);
      const auto shape = item.at("shape").get<Shape>();
      const auto data = item.at("data").get<std::vector<double>>();
      if (shape != target.shape() || data.size() != target.numel()) {
        throw DimensionError("parameter " + name + " stored as " + to_string(shape) + ", model expects " +
                             to_string(target.shape()));
      }
      std::copy(data.begin(), data.end(), target.mutable_data().begin());
    }
    if (doc.contains("run")) out.run = doc["run"];
    return out;
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(Kind::malformed, path.string(), 0, err.what());
  } catch (const ConfigError& err) {
    throw ParseError(Kind::malformed, path.string(), 0, err.what());
  }
}

}  // namespace gnsde
