#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "gnsde/checkpoint.hpp"
#include "gnsde/config.hpp"
#include "gnsde/error.hpp"
#include "gnsde/latent.hpp"

using namespace gnsde;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_error_field(const json& doc, ConfigUse use = ConfigUse::train) {
  try {
    parse_run_config(doc, use);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

fs::path scratch_dir(const char* name) {
  auto dir = fs::temp_directory_path() / ("gnsde_config_" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("defaults depend on the task") {
  auto voting = parse_run_config(json{{"task", "voting"}, {"model", {{"kind", "gnsde"}}}}, ConfigUse::train);
  CHECK(voting.t1 == 1.0);
  CHECK(voting.solver_steps == 10);
  CHECK(voting.train.epochs == 60);
  CHECK(voting.model.likelihood == LikelihoodKind::categorical);

  auto regression = parse_run_config(json{{"task", "three_node"}, {"model", {{"kind", "gnode"}}}}, ConfigUse::train);
  CHECK(regression.t1 == 12.0);
  CHECK(regression.solver_steps == 120);
  CHECK(regression.model.likelihood == LikelihoodKind::gaussian);
  CHECK(regression.model.kind == ModelKind::gnode);
  CHECK(regression.thresholds.front() == 3.0);

  auto experiment = parse_run_config(json::object(), ConfigUse::experiment);
  CHECK(experiment.seeds == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("explicit fields override defaults") {
  json doc = {{"task", "voting"},
              {"model", {{"kind", "gcn"}, {"latent_dim", 16}}},
              {"data", {{"n", 120}, {"homophily", 0.8}}},
              {"solver", {{"steps", 20}}},
              {"train", {{"epochs", 7}, {"lr", 0.05}}},
              {"predict", {{"samples", 9}, {"thresholds", {"inf", 0.5}}}},
              {"experiments", {{"fig3_active", {{"acquisitions", {"random"}}}}}},
              {"seed", 4}};
  auto c = parse_run_config(doc, ConfigUse::train);
  CHECK(c.model.latent_dim == 16);
  CHECK(c.voting.n == 120);
  CHECK(c.voting.homophily == 0.8);
  CHECK(c.solver_steps == 20);
  CHECK(c.train.epochs == 7);
  CHECK(c.train.adam.lr == 0.05);
  CHECK(c.mc_samples == 9);
  CHECK(c.thresholds == std::vector<double>{std::numeric_limits<double>::infinity(), 0.5});
  CHECK(c.active.acquisitions == std::vector<Acquisition>{Acquisition::random});
  CHECK(c.seed == 4);
}

TEST_CASE("errors name the offending field") {
  CHECK(config_error_field(json{{"model", {{"kind", "gnsde"}}}}) == "task");
  CHECK(config_error_field(json{{"task", "voting"}}) == "model.kind");
  CHECK(config_error_field(json{{"task", "voting"}, {"model", {{"kind", "gnsde"}, {"latnt_dim", 3}}}}) ==
        "model.latnt_dim");
  CHECK(config_error_field(json{{"task", "voting"}, {"model", {{"kind", "gnsde"}}}, {"train", {{"epochs", -1}}}}) ==
        "train.epochs");
  CHECK(config_error_field(json{{"task", "voting"}, {"model", {{"kind", "gnsde"}}}, {"solver", {{"t1", "x"}}}}) ==
        "solver.t1");
  CHECK(config_error_field(json{{"task", "voting"}, {"model", {{"kind", "lstm"}}}}) == "model.kind");
  CHECK(config_error_field(json{{"task", "planetoid"}, {"model", {{"kind", "gcn"}}}}) == "data.path");
  CHECK(config_error_field(json{{"task", "voting"}, {"model", {{"kind", "gcn"}}}, {"predict", {{"dropout_rate", 1.0}}}}) ==
        "predict.dropout_rate");
  CHECK(config_error_field(json{{"experiments", {{"fig9", json::object()}}}}, ConfigUse::experiment) ==
        "experiments.fig9");
}

TEST_CASE("the JSON echo parses back to the same configuration") {
  json doc = {{"task", "three_node"},
              {"model", {{"kind", "gnsde"}, {"diffusion", 0.7}, {"prior_decay", 0.25}}},
              {"predict", {{"thresholds", {3.0, "inf"}}}},
              {"seeds", {5, 6}}};
  auto c = parse_run_config(doc, ConfigUse::train);
  auto echo = to_json(c);
  auto again = parse_run_config(echo, ConfigUse::train);
  CHECK(to_json(again) == echo);
  CHECK(again.model.prior_decay == 0.25);
  CHECK(again.seeds == std::vector<std::uint64_t>{5, 6});
}

TEST_CASE("config files accept comments") {
  auto dir = scratch_dir("file");
  {
    std::ofstream out(dir / "run.json");
    out << "{\n  // small run\n  \"task\": \"voting\",\n  \"model\": {\"kind\": \"gcn\"}\n}\n";
  }
  CHECK(load_run_config(dir / "run.json", ConfigUse::train).model.kind == ModelKind::gcn);
  CHECK_THROWS_AS(load_run_config(dir / "absent.json", ConfigUse::train), ConfigError);
}

TEST_CASE("checkpoints restore parameters bit for bit") {
  ModelConfig config;
  config.input_dim = 3;
  config.output_dim = 2;
  config.latent_dim = 5;
  config.hidden_dim = 4;
  config.init_seed = 21;
  LatentGnsde model(config);
  // Values with long decimal expansions.
  for (auto& p : model.parameters()) {
    for (auto& v : p.value.mutable_data()) v = v / 3.0 + 1e-17;
  }
  auto dir = scratch_dir("checkpoint");
  save_checkpoint(dir / "model.json", model, json{{"note", "kept"}});
  auto loaded = load_checkpoint(dir / "model.json");
  CHECK(loaded.model->kind() == ModelKind::gnsde);
  CHECK(loaded.run["note"] == "kept");
  for (const auto& p : model.parameters()) {
    CHECK(std::ranges::equal(p.value.data(), loaded.model->parameters().get(p.name).data()));
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  auto dir = scratch_dir("corrupt");
  CHECK_THROWS_AS(load_checkpoint(dir / "none.json"), ParseError);
  {
    std::ofstream out(dir / "junk.json");
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "junk.json"), ParseError);

  ModelConfig config;
  config.kind = ModelKind::gcn;
  config.input_dim = 2;
  config.output_dim = 2;
  auto model = make_model(config);
  save_checkpoint(dir / "ok.json", *model);
  json doc;
  {
    std::ifstream in(dir / "ok.json");
    in >> doc;
  }
  doc["model"]["latent_dim"] = 7;
  {
    std::ofstream out(dir / "shape.json");
    out << doc.dump();
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "shape.json"), DimensionError);
}
