#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "gnsde_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(GNSDE_CLI_PATH) + " " + args + " > " + (kRoot / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::create_directories(kRoot);
  auto path = kRoot / name;
  std::ofstream(path) << body;
  return path;
}

const char* kSmallVoting = R"({
  "task": "voting",
  "model": {"kind": "gnsde", "latent_dim": 8, "hidden_dim": 8},
  "data": {"n": 40},
  "solver": {"steps": 4},
  "train": {"epochs": 3},
  "predict": {"samples": 4, "thresholds": ["inf", 0.5]}
})";

}  // namespace

TEST_CASE("train then predict writes the documented files") {
  fs::remove_all(kRoot);
  auto config = write_config("voting.json", kSmallVoting);
  const auto out = kRoot / "run";
  REQUIRE(run("train --config " + config.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "config.json"));
  CHECK(fs::exists(out / "checkpoint.json"));
  CHECK(slurp(out / "trace.csv").starts_with("epoch,loss,nll,kl\n"));

  REQUIRE(run("predict --config " + config.string() + " --checkpoint " + (out / "checkpoint.json").string() +
              " --out " + out.string()) == 0);
  const auto predictions = slurp(out / "predictions.csv");
  CHECK(predictions.starts_with("node,label,split,predicted,entropy,retained_lt_inf,retained_lt_0.5\n"));
  CHECK(std::count(predictions.begin(), predictions.end(), '\n') == 41);
}

TEST_CASE("property: equal seeds give byte-identical outputs") {
  auto config = write_config("voting.json", kSmallVoting);
  for (const char* dir : {"a", "b"}) {
    REQUIRE(run("train --config " + config.string() + " --seed 3 --out " + (kRoot / dir).string()) == 0);
    REQUIRE(run("predict --config " + config.string() + " --checkpoint " + (kRoot / dir / "checkpoint.json").string() +
                " --out " + (kRoot / dir).string()) == 0);
  }
  CHECK(slurp(kRoot / "a" / "trace.csv") == slurp(kRoot / "b" / "trace.csv"));
  CHECK(slurp(kRoot / "a" / "predictions.csv") == slurp(kRoot / "b" / "predictions.csv"));
  CHECK(slurp(kRoot / "a" / "checkpoint.json") == slurp(kRoot / "b" / "checkpoint.json"));
}

TEST_CASE("configuration mistakes exit with status 1 and name the field") {
  auto bad = write_config("bad.json", R"({"task": "voting", "model": {"kind": "gnsde", "depth": 3}})");
  CHECK(run("train --config " + bad.string() + " --out " + (kRoot / "bad").string()) == 1);
  CHECK(slurp(kRoot / "last.log").find("model.depth") != std::string::npos);

  auto no_task = write_config("no_task.json", R"({"model": {"kind": "gnsde"}})");
  CHECK(run("train --config " + no_task.string()) == 1);
  CHECK(run("experiment fig7") == 1);
  CHECK(run("train") == 1);
}

TEST_CASE("experiments write tables and plots") {
  auto config = write_config("curves.json", R"({
    "model": {"latent_dim": 8, "hidden_dim": 8},
    "data": {"n": 40},
    "solver": {"steps": 4},
    "train": {"epochs": 2},
    "predict": {"samples": 3, "ensemble_members": 2},
    "seeds": [0],
    "experiments": {"fig2_curves": {"curves": ["train_fraction"], "methods": ["gcn", "gnsde"],
                                    "values": {"train_fraction": [0.5]}}}
  })");
  const auto out = kRoot / "exp";
  REQUIRE(run("experiment fig2_curves --config " + config.string() + " --out " + out.string()) == 0);
  const auto table = slurp(out / "fig2_train_fraction.csv");
  CHECK(table.starts_with("method,train_fraction,accuracy_mean,accuracy_sd,seeds_used,diverged,coverage\n"));
  CHECK(fs::exists(out / "fig2_train_fraction.svg"));
}
