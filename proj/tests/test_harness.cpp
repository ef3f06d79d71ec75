#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparse_limits/bounds.hpp"
#include "sparse_limits/errors.hpp"
#include "sparse_limits/harness.hpp"
#include "sparse_limits/io.hpp"

using namespace sparse_limits;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SPARSE_LIMITS_TEST_DATA;

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_path(const json& doc) {
  try {
    harness::validate_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

json minimal() {
  return json::parse(R"({"base": {"dimension": 10, "sparsity": 2, "snr": 50},
                         "sweep_var": "n_norm", "sweep_values": [1, 2]})");
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sparse_limits_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto spec = harness::validate_config(minimal());
  CHECK(spec.trials == 40);
  CHECK(spec.emit_bounds);
  CHECK(spec.decoders.empty());
  CHECK(spec.base.sigma2 == 1.0);
  CHECK(spec.base.rho == 0.0);
  CHECK(spec.base.nu == 0.0);
  CHECK(spec.base.coeff_model == CoeffModel::FixedSigns);
  CHECK(spec.threads == 1);
  CHECK_FALSE(spec.success_metric.partial_alpha);
}

TEST_CASE("config errors name the offending key") {
  auto doc = minimal();
  doc["base"]["rho"] = 1.5;
  CHECK(error_path(doc) == "base.rho");

  doc = minimal();
  doc["base"]["colour"] = 1;
  CHECK(error_path(doc) == "base.colour");

  doc = minimal();
  doc["extra"] = true;
  CHECK(error_path(doc) == "extra");

  doc = minimal();
  doc["sweep_values"] = {0.001, 1};
  CHECK(error_path(doc) == "sweep_values[0]");

  doc = minimal();
  doc["sweep_values"] = {2, 1};
  CHECK(error_path(doc) == "sweep_values[1]");

  doc = minimal();
  doc["decoders"] = {"lasso", "magic"};
  CHECK(error_path(doc) == "decoders[1]");

  doc = minimal();
  doc["base"].erase("snr");
  CHECK(error_path(doc) == "base.snr");

  doc = minimal();
  doc["base"]["n_samples"] = 10;
  CHECK(error_path(doc) == "base.n_samples");

  doc = minimal();
  doc["success_metric"] = {{"partial_alpha", 0}};
  CHECK(error_path(doc) == "success_metric.partial_alpha");

  doc = minimal();
  doc["decoder_settings"] = {{"eps", -1}};
  CHECK(error_path(doc) == "decoder_settings.eps");

  doc = minimal();
  doc["emit_bounds"] = false;
  CHECK(error_path(doc) == "decoders");

  CHECK(error_path(load(kData / "bad_rho.json")) == "base.rho");
}

TEST_CASE("sweep values as a range") {
  auto doc = minimal();
  doc["sweep_var"] = "snr";
  doc["base"]["n_samples"] = 20;
  doc["sweep_values"] = "10:10:50";
  const auto spec = harness::validate_config(doc);
  REQUIRE(spec.sweep_values.size() == 5);
  CHECK(spec.sweep_values.back() == doctest::Approx(50));
  CHECK(harness::config_at(spec, 2).snr == doctest::Approx(30));
}

TEST_CASE("normalized sample count") {
  CHECK(harness::samples_from_normalized(1, 512, 32) == 128);
  CHECK(harness::samples_from_normalized(2.5, 128, 8) == 80);
  CHECK(harness::samples_from_normalized(1, 3, 2) == 1);  // 2 log2(1.5) = 1.17
  CHECK(harness::samples_from_normalized(1, 8, 8) == 0);
}

TEST_CASE("csv round trip") {
  SweepCurve c;
  c.sweep_values = {0.5, 1.0 / 3, 1e-7};
  c.decoders.push_back({DecoderKind::Lasso, {0.1, 0.25, 1.0 / 7}, {0.01, 0.02, 0.003}});
  c.bound_success = std::vector<double>{0, 0.5, 0.999999};
  const auto t = harness::parse_csv(harness::to_csv(c));
  CHECK(t.header ==
        std::vector<std::string>{"n_norm", "lasso_success", "lasso_stderr", "bound_success"});
  REQUIRE(t.rows.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(std::abs(t.rows[r][0] - c.sweep_values[r]) <= 1e-9 * std::abs(c.sweep_values[r]));
    CHECK(std::abs(t.rows[r][1] - c.decoders[0].success_frequency[r]) <= 1e-9);
    CHECK(std::abs(t.rows[r][3] - (*c.bound_success)[r]) <= 1e-9);
  }

  SweepCurve bare;
  bare.sweep_var = SweepVar::Rho;
  bare.sweep_values = {0.1};
  bare.bound_success = std::vector<double>{0.2};
  CHECK(harness::parse_csv(harness::to_csv(bare)).header.size() == 2);

  const auto dir = scratch("csv");
  harness::emit_csv(c, dir / "c.csv");
  CHECK(harness::read_csv(dir / "c.csv").rows == t.rows);

  CHECK_THROWS_AS(harness::parse_csv("a,b\n1\n"), ParameterError);
  CHECK_THROWS_AS(harness::parse_csv("a\nx\n"), ParameterError);
  CHECK_THROWS_AS(harness::parse_csv(""), ParameterError);
}

TEST_CASE("tiny sweep matches the frozen output") {
  const auto spec = harness::validate_config(load(kData / "tiny_sweep.json"));
  CHECK(harness::to_csv(harness::run_sweep(spec)) == slurp(kData / "golden_tiny.csv"));
}

TEST_CASE("sweep output does not depend on the thread count") {
  auto spec = harness::validate_config(load(kData / "tiny_sweep.json"));
  spec.trials = 15;
  spec.threads = 1;
  const auto one = harness::to_csv(harness::run_sweep(spec));
  spec.threads = 4;
  CHECK(harness::to_csv(harness::run_sweep(spec)) == one);
  spec.threads = 7;
  CHECK(harness::to_csv(harness::run_sweep(spec)) == one);
}

TEST_CASE("noiseless exhaustive decoding always succeeds") {
  auto doc = minimal();
  doc["base"]["snr"] = 1e12;
  doc["sweep_values"] = {3};
  doc["trials"] = 1;
  doc["decoders"] = {"ml_ls", "ml_marginal"};
  const auto curve = harness::run_sweep(harness::validate_config(doc));
  CHECK(curve.decoders[0].success_frequency[0] == 1.0);
  CHECK(curve.decoders[1].success_frequency[0] == 1.0);
  CHECK(curve.decoders[0].std_err[0] == 0.0);
}

TEST_CASE("bound success never exceeds ML success by more than sampling error") {
  auto doc = minimal();
  doc["base"] = {{"dimension", 12}, {"sparsity", 2}, {"snr", 200}, {"seed", 3}};
  doc["sweep_values"] = {4, 6, 8};
  doc["trials"] = 300;
  doc["decoders"] = {"ml_marginal"};
  doc["threads"] = 4;
  const auto curve = harness::run_sweep(harness::validate_config(doc));
  for (std::size_t p = 0; p < 3; ++p) {
    const double ml = curve.decoders[0].success_frequency[p];
    const double se = std::max(curve.decoders[0].std_err[p], 1.0 / 300);
    CHECK((*curve.bound_success)[p] <= ml + 3 * se);
  }
}

TEST_CASE("partial recovery metric is weaker than exact recovery") {
  auto doc = minimal();
  doc["base"] = {{"dimension", 40}, {"sparsity", 4}, {"snr", 20}, {"seed", 5}};
  doc["sweep_values"] = {1, 2};
  doc["trials"] = 60;
  doc["decoders"] = {"omp"};
  const auto exact = harness::run_sweep(harness::validate_config(doc));
  doc["success_metric"] = {{"partial_alpha", 0.5}};
  const auto partial = harness::run_sweep(harness::validate_config(doc));
  for (std::size_t p = 0; p < 2; ++p) {
    CHECK(partial.decoders[0].success_frequency[p] >= exact.decoders[0].success_frequency[p]);
    CHECK((*partial.bound_success)[p] >= (*exact.bound_success)[p] - 1e-12);
  }
}

TEST_CASE("capacity refusal before any work") {
  const auto spec = harness::validate_config(load(kData / "too_big_ml.json"));
  CHECK_THROWS_AS(harness::run_sweep(spec), CapacityError);
}

TEST_CASE("trial seeds") {
  CHECK(harness::trial_seed(1, 0, 0) != harness::trial_seed(1, 0, 1));
  CHECK(harness::trial_seed(1, 0, 1) != harness::trial_seed(1, 1, 0));
  CHECK(harness::trial_seed(1, 2, 3) == harness::trial_seed(1, 2, 3));
}

TEST_CASE("dataset dump") {
  ProblemConfig c;
  c.n_samples = 6;
  c.dimension = 5;
  c.sparsity = 2;
  c.snr = 10;
  c.nu = 0.3;
  c.seed = 8;
  const auto ds = model::generate_dataset(c);
  const auto dir = scratch("dump");
  io::dump_dataset(ds, c, dir);
  for (const char* f : {"x.csv", "z.csv", "y.csv", "beta.csv", "header.json"})
    CHECK(fs::exists(dir / f));
  CHECK((io::read_matrix_csv(dir / "x.csv") - ds.x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((io::read_matrix_csv(dir / "z.csv") - *ds.z).cwiseAbs().maxCoeff() < 1e-12);
  const auto header = load(dir / "header.json");
  CHECK(header.at("support").get<std::vector<int>>() == ds.support.indices());
}

TEST_CASE("model documents") {
  const auto gt = io::model_from_json(load(kData / "group_testing_k2.json"));
  CHECK(gt.k() == 2);
  CHECK(exponent::mutual_information(gt, 2) ==
        doctest::Approx(exponent::mutual_information(DiscreteChannelModel::group_testing(2, 0.5), 2)));

  const auto doc = json::parse(R"({"k": 1, "x_alphabet": ["a", "b"], "y_alphabet": ["u", "v"],
      "theta": [{"prob": 1.0, "x_pmf": [0.5, 0.5]}], "y_given_xs": [[1, 0], [0, 1]]})");
  CHECK(exponent::error_exponent(io::model_from_json(doc), 1, 1.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(io::model_from_json(load(kData / "bad_model.json")), ConfigError);
  CHECK_THROWS(io::model_from_json(json::parse(R"({"builtin": "nope"})")));
}
