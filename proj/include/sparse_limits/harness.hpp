#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparse_limits/decoders.hpp"
#include "sparse_limits/model.hpp"

namespace sparse_limits {

enum class SweepVar { NormalizedN, SNR, Rho, Nu };
enum class DecoderKind { MLMarginal, MLLeastSquares, Lasso, ReweightedLasso, OMP };

std::string_view to_string(SweepVar v);
std::string_view to_string(DecoderKind d);
SweepVar sweep_var_from_string(std::string_view s);
DecoderKind decoder_from_string(std::string_view s);

struct SuccessMetric {
  // Empty: exact support recovery. Otherwise success means at least
  // (1 - alpha) K correct indices.
  std::optional<double> partial_alpha;
};

// Knobs for the practical decoders. Unset lambda means the default rule
// 2 sqrt(2 log D) / sqrt(SNR) evaluated at each sweep point.
struct DecoderSettings {
  std::optional<double> lambda;
  LambdaLog lambda_log = LambdaLog::Natural;
  std::optional<double> lambda_reweighted;
  double tol = 1e-8;
  int max_iter = 10'000;
  // Unset eps means sigma.
  std::optional<double> eps;
  int outer_max = 10;
  double outer_tol = 1e-6;
};

struct SweepSpec {
  ProblemConfig base;
  SweepVar sweep_var = SweepVar::NormalizedN;
  std::vector<double> sweep_values;
  std::vector<DecoderKind> decoders;
  int trials = 40;
  bool emit_bounds = true;
  SuccessMetric success_metric;
  DecoderSettings settings;
  int threads = 1;
};

struct DecoderCurve {
  DecoderKind decoder;
  std::vector<double> success_frequency;
  std::vector<double> std_err;
};

struct SweepCurve {
  SweepVar sweep_var = SweepVar::NormalizedN;
  std::vector<double> sweep_values;
  std::vector<DecoderCurve> decoders;
  std::optional<std::vector<double>> bound_success;
};

namespace harness {

// N = round-half-up(n_norm * K * log2(D / K)).
long long samples_from_normalized(double n_norm, int d, int k);

// The configuration at one sweep point (seed unchanged).
ProblemConfig config_at(const SweepSpec& spec, std::size_t sweep_index);

// Seed of trial `trial` at sweep point `sweep_index`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, std::size_t trial);

// Throws ConfigError with the key path of the first problem.
SweepSpec validate_config(const nlohmann::json& raw);

// Runs every (sweep point, trial) job on spec.threads workers. Results are
// keyed by job index, so the curve does not depend on the thread count.
SweepCurve run_sweep(const SweepSpec& spec);

// Success probability 1 - bound at one configuration (linear bound when
// nu = 0, noisy-data bound otherwise).
double bound_success(const ProblemConfig& cfg, const SuccessMetric& metric);

std::string to_csv(const SweepCurve& curve);
void emit_csv(const SweepCurve& curve, const std::filesystem::path& path);

// Parsed CSV: header names and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace harness
}  // namespace sparse_limits
