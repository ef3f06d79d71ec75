#include "sparse_limits/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sparse_limits/bounds.hpp"
#include "sparse_limits/combinatorics.hpp"
#include "sparse_limits/errors.hpp"
#include "sparse_limits/rng.hpp"

namespace sparse_limits {

std::string_view to_string(SweepVar v) {
  switch (v) {
    case SweepVar::NormalizedN:
      return "n_norm";
    case SweepVar::SNR:
      return "snr";
    case SweepVar::Rho:
      return "rho";
    case SweepVar::Nu:
      return "nu";
  }
  return "unknown";
}

std::string_view to_string(DecoderKind d) {
  switch (d) {
    case DecoderKind::MLMarginal:
      return "ml_marginal";
    case DecoderKind::MLLeastSquares:
      return "ml_ls";
    case DecoderKind::Lasso:
      return "lasso";
    case DecoderKind::ReweightedLasso:
      return "reweighted_lasso";
    case DecoderKind::OMP:
      return "omp";
  }
  return "unknown";
}

SweepVar sweep_var_from_string(std::string_view s) {
  if (s == "n_norm" || s == "normalized_n") return SweepVar::NormalizedN;
  if (s == "snr") return SweepVar::SNR;
  if (s == "rho") return SweepVar::Rho;
  if (s == "nu") return SweepVar::Nu;
  throw ParameterError("unknown sweep variable '" + std::string(s) +
                       "' (expected n_norm, snr, rho or nu)");
}

DecoderKind decoder_from_string(std::string_view s) {
  for (auto d : {DecoderKind::MLMarginal, DecoderKind::MLLeastSquares, DecoderKind::Lasso,
                 DecoderKind::ReweightedLasso, DecoderKind::OMP})
    if (s == to_string(d)) return d;
  throw ParameterError("unknown decoder '" + std::string(s) +
                       "' (expected ml_marginal, ml_ls, lasso, reweighted_lasso or omp)");
}

namespace harness {

long long samples_from_normalized(double n_norm, int d, int k) {
  detail::require(d >= 1 && k >= 1 && k <= d, "samples_from_normalized: need 1 <= K <= D");
  const double n = n_norm * k * std::log2(static_cast<double>(d) / k);
  return static_cast<long long>(std::floor(n + 0.5));
}

ProblemConfig config_at(const SweepSpec& spec, std::size_t sweep_index) {
  ProblemConfig cfg = spec.base;
  const double v = spec.sweep_values.at(sweep_index);
  switch (spec.sweep_var) {
    case SweepVar::NormalizedN:
      cfg.n_samples = static_cast<int>(samples_from_normalized(v, cfg.dimension, cfg.sparsity));
      break;
    case SweepVar::SNR:
      cfg.snr = v;
      break;
    case SweepVar::Rho:
      cfg.rho = v;
      break;
    case SweepVar::Nu:
      cfg.nu = v;
      break;
  }
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, std::size_t trial) {
  return derive_seed(derive_seed(master, StreamTag::Trial, sweep_index), StreamTag::Trial, trial);
}

double bound_success(const ProblemConfig& cfg, const SuccessMetric& metric) {
  BoundResult b;
  if (metric.partial_alpha) {
    b = cfg.nu > 0.0 ? bounds::partial_recovery_bound_noisy(cfg, *metric.partial_alpha)
                     : bounds::partial_recovery_bound(cfg, *metric.partial_alpha);
  } else {
    b = cfg.nu > 0.0 ? bounds::error_bound_noisy(cfg) : bounds::error_bound_linear(cfg);
  }
  return 1.0 - b.value;
}

namespace {

bool is_exhaustive(DecoderKind d) {
  return d == DecoderKind::MLMarginal || d == DecoderKind::MLLeastSquares;
}

DecoderOutput run_decoder(DecoderKind kind, const Dataset& ds, const ProblemConfig& cfg,
                          const DecoderSettings& s) {
  const Matrix& x = ds.observed_matrix();
  const int k = cfg.sparsity;
  switch (kind) {
    case DecoderKind::MLMarginal:
      return decoders::ml_decode_marginal(ds, cfg);
    case DecoderKind::MLLeastSquares:
      return decoders::ml_decode_ls(x, ds.y, k);
    case DecoderKind::Lasso:
    case DecoderKind::ReweightedLasso: {
      LassoSettings ls;
      ls.lambda = s.lambda.value_or(decoders::default_lambda(cfg.dimension, cfg.snr, s.lambda_log));
      ls.tol = s.tol;
      ls.max_iter = s.max_iter;
      if (kind == DecoderKind::Lasso) return decoders::lasso(x, ds.y, ls, k);
      if (s.lambda_reweighted) ls.lambda = *s.lambda_reweighted;
      decoders::ReweightSettings rw;
      rw.eps = s.eps.value_or(std::sqrt(cfg.sigma2));
      rw.outer_max = s.outer_max;
      rw.outer_tol = s.outer_tol;
      return decoders::reweighted_lasso(x, ds.y, ls, rw, k);
    }
    case DecoderKind::OMP:
      return decoders::omp(x, ds.y, k);
  }
  throw ParameterError("unknown decoder");
}

bool is_success(const SupportSet& estimate, const SupportSet& truth, int k,
                const SuccessMetric& metric) {
  if (!metric.partial_alpha) return estimate == truth;
  return estimate.overlap(truth) >= (1.0 - *metric.partial_alpha) * k - 1e-9;
}

}  // namespace

SweepCurve run_sweep(const SweepSpec& spec) {
  detail::require(!spec.sweep_values.empty(), "run_sweep: sweep_values must be nonempty");
  detail::require(spec.trials >= 1, "run_sweep: trials must be >= 1");
  const std::size_t points = spec.sweep_values.size();
  const std::size_t n_dec = spec.decoders.size();
  const auto trials = static_cast<std::size_t>(spec.trials);

  for (std::size_t p = 0; p < points; ++p) config_at(spec, p).validate();
  for (auto d : spec.decoders) {
    if (is_exhaustive(d) && binomial(spec.base.dimension, spec.base.sparsity) > decoders::kMaxSubsets)
      throw CapacityError("decoder " + std::string(to_string(d)) +
                          " refused: C(D, K) exceeds 1e6 candidate supports");
  }

  const std::size_t jobs = points * trials;
  std::vector<char> success(jobs * n_dec, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t p = job / trials;
      const std::size_t t = job % trials;
      try {
        ProblemConfig cfg = config_at(spec, p);
        cfg.seed = trial_seed(spec.base.seed, p, t);
        const Dataset ds = model::generate_dataset(cfg);
        for (std::size_t j = 0; j < n_dec; ++j) {
          const auto out = run_decoder(spec.decoders[j], ds, cfg, spec.settings);
          success[job * n_dec + j] =
              is_success(out.support_estimate, ds.support, cfg.sparsity, spec.success_metric);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(spec.threads, static_cast<int>(jobs)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepCurve curve;
  curve.sweep_var = spec.sweep_var;
  curve.sweep_values = spec.sweep_values;
  for (std::size_t j = 0; j < n_dec; ++j) {
    DecoderCurve dc{spec.decoders[j], {}, {}};
    for (std::size_t p = 0; p < points; ++p) {
      std::size_t hits = 0;
      for (std::size_t t = 0; t < trials; ++t) hits += success[(p * trials + t) * n_dec + j];
      const double freq = static_cast<double>(hits) / trials;
      dc.success_frequency.push_back(freq);
      dc.std_err.push_back(std::sqrt(freq * (1.0 - freq) / trials));
    }
    curve.decoders.push_back(std::move(dc));
  }
  if (spec.emit_bounds) {
    std::vector<double> b;
    for (std::size_t p = 0; p < points; ++p)
      b.push_back(bound_success(config_at(spec, p), spec.success_metric));
    curve.bound_success = std::move(b);
  }
  return curve;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string to_csv(const SweepCurve& curve) {
  std::ostringstream os;
  os << to_string(curve.sweep_var);
  for (const auto& d : curve.decoders)
    os << ',' << to_string(d.decoder) << "_success," << to_string(d.decoder) << "_stderr";
  if (curve.bound_success) os << ",bound_success";
  os << '\n';
  for (std::size_t p = 0; p < curve.sweep_values.size(); ++p) {
    os << format_number(curve.sweep_values[p]);
    for (const auto& d : curve.decoders)
      os << ',' << format_number(d.success_frequency[p]) << ',' << format_number(d.std_err[p]);
    if (curve.bound_success) os << ',' << format_number((*curve.bound_success)[p]);
    os << '\n';
  }
  return os.str();
}

void emit_csv(const SweepCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_csv(curve);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  auto split = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParameterError("csv line " + std::to_string(line_no) + ": expected " +
                           std::to_string(table.header.size()) + " fields, got " +
                           std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      char* stop = nullptr;
      const double v = std::strtod(c.c_str(), &stop);
      if (c.empty() || *stop != '\0')
        throw ParameterError("csv line " + std::to_string(line_no) + ": '" + c +
                             "' is not a number");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParameterError("csv: missing header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const ParameterError& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- config

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

double number_at(const json& obj, const std::string& path, std::string_view key) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& path,
                                      std::string_view key) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return number_at(obj, path, key);
}

long long integer_at(const json& obj, const std::string& path, std::string_view key) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<long long>();
}

std::vector<double> parse_range(const std::string& text, const std::string& path) {
  // "start:step:stop", inclusive of stop within rounding.
  double start = 0, step = 0, stop = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0 ||
      stop < start)
    throw ConfigError(path, "expected 'start:step:stop' with step > 0 and stop >= start");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  if (count > 1'000'000) throw ConfigError(path, "range has too many points");
  for (long long j = 0; j <= count; ++j) out.push_back(start + j * step);
  return out;
}

ProblemConfig parse_base(const json& b, SweepVar var) {
  const std::string path = "base";
  if (!b.is_object()) throw ConfigError(path, "expected an object");
  reject_unknown(b, path, {"n_samples", "dimension", "sparsity", "snr", "sigma2", "rho", "nu",
                           "coeff_model", "seed"});
  ProblemConfig cfg;

  auto require_key = [&](std::string_view key) {
    if (!b.contains(std::string(key))) throw ConfigError(join(path, key), "required key missing");
  };

  require_key("dimension");
  require_key("sparsity");
  const long long d = integer_at(b, path, "dimension");
  const long long k = integer_at(b, path, "sparsity");
  if (d < 1 || d > 1'000'000) throw ConfigError("base.dimension", "must lie in [1, 1e6]");
  if (k < 1) throw ConfigError("base.sparsity", "must be >= 1");
  if (k > d) throw ConfigError("base.sparsity", "must not exceed base.dimension");
  cfg.dimension = static_cast<int>(d);
  cfg.sparsity = static_cast<int>(k);

  if (var != SweepVar::NormalizedN) {
    require_key("n_samples");
    const long long n = integer_at(b, path, "n_samples");
    if (n < 1 || n > bounds::kMaxSamples) throw ConfigError("base.n_samples", "must lie in [1, 1e9]");
    cfg.n_samples = static_cast<int>(n);
  } else if (b.contains("n_samples")) {
    throw ConfigError("base.n_samples", "must be omitted when sweeping n_norm");
  }

  if (var != SweepVar::SNR) {
    require_key("snr");
    cfg.snr = number_at(b, path, "snr");
    if (!(cfg.snr > 0.0) || !std::isfinite(cfg.snr)) throw ConfigError("base.snr", "must be positive");
  }
  cfg.sigma2 = optional_number(b, path, "sigma2").value_or(1.0);
  if (!(cfg.sigma2 > 0.0) || !std::isfinite(cfg.sigma2))
    throw ConfigError("base.sigma2", "must be positive");
  cfg.rho = optional_number(b, path, "rho").value_or(0.0);
  if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw ConfigError("base.rho", "must lie in [0, 1]");
  cfg.nu = optional_number(b, path, "nu").value_or(0.0);
  if (!(cfg.nu >= 0.0) || !std::isfinite(cfg.nu)) throw ConfigError("base.nu", "must be >= 0");

  if (b.contains("coeff_model")) {
    const auto& m = b.at("coeff_model");
    if (!m.is_string()) throw ConfigError("base.coeff_model", "expected a string");
    try {
      cfg.coeff_model = coeff_model_from_string(m.get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigError("base.coeff_model", e.what());
    }
  }
  if (b.contains("seed")) {
    const auto& s = b.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("base.seed", "expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  return cfg;
}

DecoderSettings parse_settings(const json& s) {
  const std::string path = "decoder_settings";
  if (!s.is_object()) throw ConfigError(path, "expected an object");
  reject_unknown(s, path, {"lambda", "lambda_log", "lambda_reweighted", "tol", "max_iter", "eps",
                           "outer_max", "outer_tol"});
  DecoderSettings out;
  out.lambda = optional_number(s, path, "lambda");
  if (out.lambda && !(*out.lambda >= 0.0)) throw ConfigError(join(path, "lambda"), "must be >= 0");
  out.lambda_reweighted = optional_number(s, path, "lambda_reweighted");
  if (out.lambda_reweighted && !(*out.lambda_reweighted >= 0.0))
    throw ConfigError(join(path, "lambda_reweighted"), "must be >= 0");
  if (s.contains("lambda_log")) {
    const auto& v = s.at("lambda_log");
    const std::string txt = v.is_string() ? v.get<std::string>() : "";
    if (txt == "natural") {
      out.lambda_log = LambdaLog::Natural;
    } else if (txt == "log2") {
      out.lambda_log = LambdaLog::Base2;
    } else {
      throw ConfigError(join(path, "lambda_log"), "expected \"natural\" or \"log2\"");
    }
  }
  out.tol = optional_number(s, path, "tol").value_or(out.tol);
  if (!(out.tol > 0.0)) throw ConfigError(join(path, "tol"), "must be positive");
  if (s.contains("max_iter")) {
    const auto v = integer_at(s, path, "max_iter");
    if (v < 1 || v > 100'000'000) throw ConfigError(join(path, "max_iter"), "must lie in [1, 1e8]");
    out.max_iter = static_cast<int>(v);
  }
  out.eps = optional_number(s, path, "eps");
  if (out.eps && !(*out.eps > 0.0)) throw ConfigError(join(path, "eps"), "must be positive");
  if (s.contains("outer_max")) {
    const auto v = integer_at(s, path, "outer_max");
    if (v < 0 || v > 1'000'000) throw ConfigError(join(path, "outer_max"), "must lie in [0, 1e6]");
    out.outer_max = static_cast<int>(v);
  }
  out.outer_tol = optional_number(s, path, "outer_tol").value_or(out.outer_tol);
  if (!(out.outer_tol > 0.0)) throw ConfigError(join(path, "outer_tol"), "must be positive");
  return out;
}

}  // namespace

SweepSpec validate_config(const json& raw) {
  if (!raw.is_object()) throw ConfigError("", "config document must be a JSON object");
  reject_unknown(raw, "", {"base", "sweep_var", "sweep_values", "decoders", "trials", "emit_bounds",
                           "success_metric", "decoder_settings", "threads"});
  SweepSpec spec;
  try {
    if (!raw.contains("sweep_var")) throw ConfigError("sweep_var", "required key missing");
    const auto& var = raw.at("sweep_var");
    if (!var.is_string()) throw ConfigError("sweep_var", "expected a string");
    try {
      spec.sweep_var = sweep_var_from_string(var.get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigError("sweep_var", e.what());
    }

    if (!raw.contains("base")) throw ConfigError("base", "required key missing");
    spec.base = parse_base(raw.at("base"), spec.sweep_var);

    if (!raw.contains("sweep_values")) throw ConfigError("sweep_values", "required key missing");
    const auto& vals = raw.at("sweep_values");
    if (vals.is_string()) {
      spec.sweep_values = parse_range(vals.get<std::string>(), "sweep_values");
    } else if (vals.is_array()) {
      for (std::size_t j = 0; j < vals.size(); ++j) {
        if (!vals[j].is_number())
          throw ConfigError("sweep_values[" + std::to_string(j) + "]", "expected a number");
        spec.sweep_values.push_back(vals[j].get<double>());
      }
    } else {
      throw ConfigError("sweep_values", "expected an array or 'start:step:stop'");
    }
    if (spec.sweep_values.empty()) throw ConfigError("sweep_values", "must be nonempty");
    for (std::size_t j = 0; j < spec.sweep_values.size(); ++j) {
      const std::string p = "sweep_values[" + std::to_string(j) + "]";
      const double v = spec.sweep_values[j];
      if (!std::isfinite(v)) throw ConfigError(p, "must be finite");
      if (j > 0 && !(v > spec.sweep_values[j - 1])) throw ConfigError(p, "values must be strictly ascending");
      switch (spec.sweep_var) {
        case SweepVar::NormalizedN: {
          const auto n = samples_from_normalized(v, spec.base.dimension, spec.base.sparsity);
          if (n < 1) throw ConfigError(p, "normalized N gives N = " + std::to_string(n) + " samples");
          if (n > bounds::kMaxSamples) throw ConfigError(p, "normalized N gives more than 1e9 samples");
          break;
        }
        case SweepVar::SNR:
          if (!(v > 0.0)) throw ConfigError(p, "snr must be positive");
          break;
        case SweepVar::Rho:
          if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(p, "rho must lie in [0, 1]");
          break;
        case SweepVar::Nu:
          if (!(v >= 0.0)) throw ConfigError(p, "nu must be >= 0");
          break;
      }
    }

    if (raw.contains("decoders")) {
      const auto& ds = raw.at("decoders");
      if (!ds.is_array()) throw ConfigError("decoders", "expected an array");
      std::set<DecoderKind> seen;
      for (std::size_t j = 0; j < ds.size(); ++j) {
        const std::string p = "decoders[" + std::to_string(j) + "]";
        if (!ds[j].is_string()) throw ConfigError(p, "expected a string");
        DecoderKind k;
        try {
          k = decoder_from_string(ds[j].get<std::string>());
        } catch (const ParameterError& e) {
          throw ConfigError(p, e.what());
        }
        if (!seen.insert(k).second) throw ConfigError(p, "duplicate decoder");
        spec.decoders.push_back(k);
      }
    }

    if (raw.contains("trials")) {
      const auto t = integer_at(raw, "", "trials");
      if (t < 1 || t > 100'000'000) throw ConfigError("trials", "must lie in [1, 1e8]");
      spec.trials = static_cast<int>(t);
    }
    if (raw.contains("emit_bounds")) {
      if (!raw.at("emit_bounds").is_boolean()) throw ConfigError("emit_bounds", "expected a boolean");
      spec.emit_bounds = raw.at("emit_bounds").get<bool>();
    }
    if (raw.contains("success_metric")) {
      const auto& m = raw.at("success_metric");
      if (m.is_string() && m.get<std::string>() == "exact") {
        spec.success_metric = {};
      } else if (m.is_object()) {
        reject_unknown(m, "success_metric", {"partial_alpha"});
        if (!m.contains("partial_alpha"))
          throw ConfigError("success_metric.partial_alpha", "required key missing");
        const double a = number_at(m, "success_metric", "partial_alpha");
        if (!(a > 0.0 && a <= 1.0)) throw ConfigError("success_metric.partial_alpha", "must lie in (0, 1]");
        spec.success_metric.partial_alpha = a;
      } else {
        throw ConfigError("success_metric", "expected \"exact\" or {\"partial_alpha\": a}");
      }
    }
    if (raw.contains("decoder_settings")) spec.settings = parse_settings(raw.at("decoder_settings"));
    if (raw.contains("threads")) {
      const auto t = integer_at(raw, "", "threads");
      if (t < 1 || t > 1024) throw ConfigError("threads", "must lie in [1, 1024]");
      spec.threads = static_cast<int>(t);
    }
    if (spec.decoders.empty() && !spec.emit_bounds)
      throw ConfigError("decoders", "nothing to compute: no decoders and emit_bounds is false");
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return spec;
}

}  // namespace harness
}  // namespace sparse_limits
