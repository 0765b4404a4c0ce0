#include <cstdlib>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "advstat/loaders.hpp"
#include "config.hpp"
#include "report_io.hpp"
#include "test_support.hpp"

using namespace advstat;
using namespace advstat::cli;
using advstat::testing::TempDir;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string command = std::string(ADVSTAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json doc;
  in >> doc;
  return doc;
}

json manifest_outputs(const std::filesystem::path& dir) {
  return read_json(dir / "manifest.json").at("outputs");
}

std::string small_train_config(const std::string& out) {
  return R"({
    "dataset": { "kind": "synth_digits", "per_class": 20, "seed": 7 },
    "split": { "test_fraction": 0.2, "seed": 1 },
    "model": { "family": "logreg", "epochs": 15, "seed": 3 },
    "attack": { "kind": "fgsm", "epsilon": 0.275 },
    "seed": 42,
    "out": ")" + out + R"("
  })";
}

}  // namespace

TEST_CASE("cli exit codes: usage, config, runtime" * doctest::timeout(120)) {
  TempDir dir("cli_exit");
  CHECK(run_cli("definitely-not-a-command") == 2);
  CHECK(run_cli("repro table9 --out " + (dir.path() / "x").string()) == 2);

  // config referencing a missing dataset path exits 2
  const auto bad_config = dir.path() / "bad.json";
  write_file(bad_config, R"({ "dataset": { "kind": "csv", "path": "/nope/missing.csv" } })");
  CHECK(run_cli("train --config " + bad_config.string()) == 2);

  // malformed JSON exits 2
  const auto broken = dir.path() / "broken.json";
  write_file(broken, "{ not json");
  CHECK(run_cli("train --config " + broken.string()) == 2);

  // incompatible attack/model pair exits 3
  const auto train_out = (dir.path() / "m").string();
  const auto config = dir.path() / "cfg.json";
  write_file(config, small_train_config(train_out));
  REQUIRE(run_cli("train --config " + config.string()) == 0);
  const auto dt_config = dir.path() / "dt.json";
  write_file(dt_config, R"({
    "dataset": { "kind": "synth_digits", "per_class": 20, "seed": 7 },
    "attack": { "kind": "dt_path", "budget": 3 },
    "out": ")" + (dir.path() / "a").string() + R"("
  })");
  CHECK(run_cli("attack --config " + dt_config.string() + " --model " + train_out +
                "/model.json") == 3);
}

TEST_CASE("cli train is byte-deterministic and reports accuracy" * doctest::timeout(120)) {
  TempDir dir("cli_train");
  const auto config = dir.path() / "cfg.json";

  write_file(config, small_train_config((dir.path() / "run1").string()));
  REQUIRE(run_cli("train --config " + config.string()) == 0);
  write_file(config, small_train_config((dir.path() / "run2").string()));
  REQUIRE(run_cli("train --config " + config.string()) == 0);

  // identical config + seed: identical model bytes and identical digests
  std::ifstream m1(dir.path() / "run1" / "model.json");
  std::ifstream m2(dir.path() / "run2" / "model.json");
  const std::string b1((std::istreambuf_iterator<char>(m1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(m2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(manifest_outputs(dir.path() / "run1") == manifest_outputs(dir.path() / "run2"));

  const json report = read_json(dir.path() / "run1" / "train_report.json");
  CHECK(report.at("train_accuracy").get<double>() >= 0.0);
  CHECK(report.at("train_accuracy").get<double>() <= 1.0);
}

TEST_CASE("cli attack echoes epsilon and round-trips through the candidate reader" *
          doctest::timeout(120)) {
  TempDir dir("cli_attack");
  const auto config = dir.path() / "cfg.json";
  const auto train_out = (dir.path() / "t").string();
  write_file(config, small_train_config(train_out));
  REQUIRE(run_cli("train --config " + config.string()) == 0);

  const auto attack_out = dir.path() / "a";
  REQUIRE(run_cli("attack --config " + config.string() + " --model " + train_out +
                  "/model.json --epsilon 0.275 --out " + attack_out.string()) == 0);

  const json summary = read_json(attack_out / "attack_summary.json");
  CHECK(summary.at("attack").at("epsilon").get<double>() == doctest::Approx(0.275));

  // the crafted CSV parses back with labels intact
  const CraftedSet crafted = read_candidate_file(attack_out / "crafted.csv");
  CHECK(crafted.features.rows() == 40);  // 20% of 200
  CHECK(crafted.features.cols() == 64);
  CHECK(crafted.original_labels.size() == 40);
  CHECK(crafted.predicted_labels.size() == 40);
}

TEST_CASE("cli stat: identical reference and candidate give p-value 1" * doctest::timeout(120)) {
  TempDir dir("cli_stat");

  // bare matrix CSV used as both reference and candidate
  const auto pool = dir.path() / "pool.csv";
  {
    std::ofstream out(pool);
    RandomSource rng(3);
    for (int r = 0; r < 12; ++r) {
      for (int c = 0; c < 3; ++c) out << (c ? "," : "") << format_double(rng.next_double());
      out << "\n";
    }
  }
  const auto out_dir = dir.path() / "s";
  REQUIRE(run_cli("stat --mode test --reference " + pool.string() + " --candidate " +
                  pool.string() + " --bootstrap 200 --out " + out_dir.string()) == 0);
  const json report = read_json(out_dir / "test_report.json");
  CHECK(report.at("p_value").get<double>() == doctest::Approx(1.0));
  CHECK(report.at("decision").get<std::string>() == "accept");
  CHECK(report.at("alpha").get<double>() == doctest::Approx(0.05));  // default

  // sizes flag yields one sweep row per size
  const auto sweep_dir = dir.path() / "sw";
  REQUIRE(run_cli("stat --mode sweep --reference " + pool.string() + " --candidate " +
                  pool.string() + " --sizes 3,5 --bootstrap 100 --out " + sweep_dir.string()) ==
          0);
  std::ifstream csv(sweep_dir / "sweep.csv");
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line == "size,acceptance_frequency,R");
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("cli results do not depend on the thread cap" * doctest::timeout(120)) {
  TempDir dir("cli_threads");
  const auto pool = dir.path() / "pool.csv";
  {
    std::ofstream out(pool);
    RandomSource rng(5);
    for (int r = 0; r < 40; ++r) {
      for (int c = 0; c < 4; ++c) out << (c ? "," : "") << format_double(rng.next_gaussian());
      out << "\n";
    }
  }
  const auto shifted = dir.path() / "shifted.csv";
  {
    std::ofstream out(shifted);
    RandomSource rng(6);
    for (int r = 0; r < 40; ++r) {
      for (int c = 0; c < 4; ++c) out << (c ? "," : "") << format_double(rng.next_gaussian() + 2);
      out << "\n";
    }
  }
  const std::string common = "stat --mode sweep --reference " + pool.string() + " --candidate " +
                             shifted.string() + " --sizes 5,10 --bootstrap 200 --seed 3 --out ";
  REQUIRE(run_cli(common + (dir.path() / "one").string() + " --threads 1") == 0);
  REQUIRE(run_cli(common + (dir.path() / "two").string() + " --threads 2") == 0);
  CHECK(file_digest(dir.path() / "one" / "sweep.csv") ==
        file_digest(dir.path() / "two" / "sweep.csv"));
}

TEST_CASE("cli defend emits partitioned breakdowns" * doctest::timeout(300)) {
  TempDir dir("cli_defend");
  const auto config = dir.path() / "cfg.json";
  const auto out = (dir.path() / "d").string();
  write_file(config, R"({
    "dataset": { "kind": "synth_digits", "per_class": 40, "seed": 7 },
    "split": { "test_fraction": 0.2, "seed": 1 },
    "model": { "family": "mlp", "hidden": [32], "epochs": 30, "seed": 3 },
    "defense": { "attacks": [ { "kind": "fgsm", "epsilon": 0.275 } ], "blackbox": ["bb", "bb+1"] },
    "seed": 9,
    "out": ")" + out + R"("
  })");
  REQUIRE(run_cli("defend --config " + config.string()) == 0);

  const json breakdowns = read_json(std::filesystem::path(out) / "breakdown.json");
  REQUIRE(breakdowns.is_array());
  for (const json& b : breakdowns) {
    const double sum = b.at("recovered").get<double>() + b.at("detected").get<double>() +
                       b.at("error").get<double>();
    CHECK(sum == doctest::Approx(1.0));
  }
  CHECK(std::filesystem::exists(std::filesystem::path(out) / "blackbox_bb.json"));
  CHECK(std::filesystem::exists(std::filesystem::path(out) / "blackbox_bb1.json"));
  CHECK(std::filesystem::exists(std::filesystem::path(out) / "confusion_augmented.csv"));
}

TEST_CASE("empty batches produce a header-only crafted csv") {
  TempDir dir("cli_empty");
  BatchResult empty;
  empty.summary.no_samples = true;
  const auto path = dir.path() / "crafted.csv";
  write_crafted_csv(path, empty, 4);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "f0,f1,f2,f3,original_label,predicted_label,features_changed");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("crafted csv round-trips through load_csv" * doctest::timeout(120)) {
  // the emitted CSV is a valid dataset file: label column = original_label
  TempDir dir("cli_roundtrip");
  const auto config = dir.path() / "cfg.json";
  const auto train_out = (dir.path() / "t").string();
  write_file(config, small_train_config(train_out));
  REQUIRE(run_cli("train --config " + config.string()) == 0);
  const auto attack_out = dir.path() / "a";
  REQUIRE(run_cli("attack --config " + config.string() + " --model " + train_out +
                  "/model.json --out " + attack_out.string()) == 0);

  const Dataset parsed = load_csv(attack_out / "crafted.csv", 64, /*has_header=*/true);
  CHECK(parsed.size() == 40);
  CHECK(parsed.dim() == 66);  // features + predicted_label + features_changed
}
