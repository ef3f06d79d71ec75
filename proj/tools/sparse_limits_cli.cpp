// sparse-limits: information-theoretic limits and decoder benchmarks for
// sparse support recovery.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparse_limits/bounds.hpp"
#include "sparse_limits/decoders.hpp"
#include "sparse_limits/errors.hpp"
#include "sparse_limits/exponent.hpp"
#include "sparse_limits/harness.hpp"
#include "sparse_limits/io.hpp"
#include "sparse_limits/model.hpp"

namespace sl = sparse_limits;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> parse_range(const std::string& text, const std::string& what) {
  double start = 0, step = 0, stop = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || !(step > 0) ||
      stop < start)
    throw sl::ConfigError(what, "expected start:step:stop with step > 0 and stop >= start");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  if (count > 1'000'000) throw sl::ConfigError(what, "too many points");
  for (long long j = 0; j <= count; ++j) out.push_back(start + j * step);
  return out;
}

// Scalar problem flags shared by bound, mi, sample-complexity, snr-cutoff,
// generate and decode.
struct ScalarArgs {
  int n = 100;
  int d = 512;
  int k = 32;
  double snr = 100.0;
  double sigma2 = 1.0;
  double rho = 0.0;
  double nu = 0.0;
  std::string coeff_model = "fixed_signs";
  std::uint64_t seed = 0;
  std::string sweep;

  void add_to(CLI::App* app, bool with_seed = false) {
    app->add_option("--n", n, "number of samples N")->capture_default_str();
    app->add_option("--d", d, "number of variables D")->capture_default_str();
    app->add_option("--k", k, "sparsity K")->capture_default_str();
    app->add_option("--snr", snr, "linear SNR (noise variance 1/SNR)")->capture_default_str();
    app->add_option("--sigma2", sigma2, "coefficient variance sigma^2")->capture_default_str();
    app->add_option("--rho", rho, "column correlation rho in [0,1]")->capture_default_str();
    app->add_option("--nu", nu, "variable-noise variance scale nu")->capture_default_str();
    app->add_option("--coeff-model", coeff_model, "fixed_signs | gaussian_iid")->capture_default_str();
    if (with_seed) app->add_option("--seed", seed, "master seed")->capture_default_str();
  }

  void add_sweep(CLI::App* app) {
    app->add_option("--sweep", sweep, "sweep one parameter: <var>=<start:step:stop>, var in "
                                      "n, n_norm, snr, rho, nu, sigma2");
  }

  sl::ProblemConfig config() const {
    sl::ProblemConfig c;
    c.n_samples = n;
    c.dimension = d;
    c.sparsity = k;
    c.snr = snr;
    c.sigma2 = sigma2;
    c.rho = rho;
    c.nu = nu;
    c.coeff_model = sl::coeff_model_from_string(coeff_model);
    c.seed = seed;
    c.validate();
    return c;
  }

  // (column name, value) pairs and the configuration at each sweep point.
  std::pair<std::string, std::vector<std::pair<double, sl::ProblemConfig>>> points() const {
    const auto base = config();
    if (sweep.empty()) return {"", {{0.0, base}}};
    const auto eq = sweep.find('=');
    if (eq == std::string::npos) throw sl::ConfigError("--sweep", "expected <var>=<start:step:stop>");
    const std::string var = sweep.substr(0, eq);
    std::vector<std::pair<double, sl::ProblemConfig>> out;
    for (double v : parse_range(sweep.substr(eq + 1), "--sweep")) {
      auto c = base;
      if (var == "n") {
        c.n_samples = static_cast<int>(std::llround(v));
      } else if (var == "n_norm") {
        c.n_samples = static_cast<int>(sl::harness::samples_from_normalized(v, c.dimension, c.sparsity));
      } else if (var == "snr") {
        c.snr = v;
      } else if (var == "rho") {
        c.rho = v;
      } else if (var == "nu") {
        c.nu = v;
      } else if (var == "sigma2") {
        c.sigma2 = v;
      } else {
        throw sl::ConfigError("--sweep", "unknown sweep variable '" + var + "'");
      }
      try {
        c.validate();
      } catch (const sl::ParameterError& e) {
        throw sl::ConfigError("--sweep", std::string("at ") + var + "=" + num(v) + ": " + e.what());
      }
      out.emplace_back(v, c);
    }
    return {var, out};
  }
};

std::string config_columns() { return "n,d,k,snr,sigma2,rho,nu,coeff_model"; }

std::string config_cells(const sl::ProblemConfig& c) {
  return std::to_string(c.n_samples) + "," + std::to_string(c.dimension) + "," +
         std::to_string(c.sparsity) + "," + num(c.snr) + "," + num(c.sigma2) + "," + num(c.rho) +
         "," + num(c.nu) + "," + std::string(sl::to_string(c.coeff_model));
}

template <class RowFn>
void print_rows(const ScalarArgs& args, const std::string& result_columns, RowFn row) {
  const auto [var, pts] = args.points();
  std::cout << (var.empty() ? "" : "sweep_" + var + ",") << config_columns() << ","
            << result_columns << "\n";
  for (const auto& [v, cfg] : pts) {
    if (!var.empty()) std::cout << num(v) << ",";
    std::cout << config_cells(cfg) << "," << row(cfg) << "\n";
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sl::ConfigError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sl::ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-theoretic limits and decoder benchmarks for sparse support recovery"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo sweep from a JSON config");
  std::string config_path, out_path;
  int threads = 0;
  std::uint64_t seed_override = 0;
  simulate->add_option("--config", config_path, "sweep config (JSON)")->required();
  simulate->add_option("--out", out_path, "output CSV path")->required();
  auto* threads_opt = simulate->add_option("--threads", threads, "worker threads");
  auto* seed_opt = simulate->add_option("--seed", seed_override, "master seed (overrides base.seed)");

  // bound
  ScalarArgs bound_args;
  std::string bound_kind = "auto";
  double alpha = 1.0;
  auto* bound = app.add_subcommand("bound", "error-probability upper bound");
  bound_args.add_to(bound);
  bound_args.add_sweep(bound);
  bound->add_option("--kind", bound_kind, "auto | linear | noisy")->capture_default_str();
  auto* alpha_opt = bound->add_option("--alpha", alpha, "bound P(at least floor(alpha K) errors)");

  // mi
  ScalarArgs mi_args;
  int mi_i = 0;
  auto* mi = app.add_subcommand("mi", "per-sample conditional mutual information (bits)");
  mi_args.add_to(mi);
  mi_args.add_sweep(mi);
  mi->add_option("--i", mi_i, "error count i (default K)");

  // sample-complexity
  ScalarArgs sc_args;
  std::string criterion = "both";
  double target_pe = 0.01;
  auto* sc = app.add_subcommand("sample-complexity", "necessary / sufficient number of samples");
  sc_args.add_to(sc);
  sc_args.add_sweep(sc);
  sc->add_option("--criterion", criterion, "necessary | sufficient | both")->capture_default_str();
  sc->add_option("--target-pe", target_pe, "target error probability for the sufficient criterion")
      ->capture_default_str();

  // snr-cutoff
  ScalarArgs cut_args;
  auto* cutoff = app.add_subcommand("snr-cutoff", "SNR below which no N achieves recovery");
  cut_args.add_to(cutoff);
  cut_args.add_sweep(cutoff);

  // exponent
  std::string model_path, delta_sweep;
  int ex_i = 1;
  double delta = 1.0, h = 1e-4;
  bool check_derivative = false, weak_form = false;
  long long ex_n = -1;
  int ex_d = 0;
  auto* exponent = app.add_subcommand("exponent", "exact error exponent for a discrete model");
  exponent->add_option("--model", model_path, "model description (JSON)")->required();
  exponent->add_option("--i", ex_i, "error count i")->capture_default_str();
  auto* delta_opt = exponent->add_option("--delta", delta, "delta in [0,1]");
  exponent->add_option("--delta-sweep", delta_sweep, "start:step:stop grid of delta");
  exponent->add_flag("--check-derivative", check_derivative, "compare E_o'(0) with the mutual information");
  exponent->add_option("--fd-step", h, "finite-difference step h")->capture_default_str();
  exponent->add_option("--bound-n", ex_n, "also evaluate the error bound at this N");
  exponent->add_option("--bound-d", ex_d, "D for --bound-n");
  exponent->add_flag("--weak", weak_form, "use the bound with the undiminished penalty");

  // decode
  ScalarArgs dec_args;
  std::string x_path, y_path, decoder_name = "lasso";
  double lambda = -1.0;
  double eps = -1.0;
  auto* decode = app.add_subcommand("decode", "run one decoder on CSV-supplied (X, y)");
  decode->add_option("--x", x_path, "sensing (or observed noisy) matrix CSV")->required();
  decode->add_option("--y", y_path, "observation vector CSV (one value per line)")->required();
  decode->add_option("--decoder", decoder_name, "ml_marginal | ml_ls | lasso | reweighted_lasso | omp")
      ->capture_default_str();
  decode->add_option("--k", dec_args.k, "sparsity K")->required();
  decode->add_option("--snr", dec_args.snr, "SNR for lambda default and ml_marginal")->capture_default_str();
  decode->add_option("--sigma2", dec_args.sigma2, "coefficient variance")->capture_default_str();
  decode->add_option("--coeff-model", dec_args.coeff_model, "fixed_signs | gaussian_iid")->capture_default_str();
  decode->add_option("--lambda", lambda, "lasso regularization (default 2 sqrt(2 ln D)/sqrt(SNR))");
  decode->add_option("--eps", eps, "reweighting constant (default sigma)");

  // generate
  ScalarArgs gen_args;
  std::string out_dir;
  auto* generate = app.add_subcommand("generate", "write one synthetic dataset as CSV + JSON");
  gen_args.add_to(generate, true);
  generate->add_option("--out-dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      auto spec = sl::harness::validate_config(read_json_file(config_path));
      if (*threads_opt) {
        if (threads < 1) throw sl::ConfigError("--threads", "must be >= 1");
        spec.threads = threads;
      }
      if (*seed_opt) spec.base.seed = seed_override;
      const auto curve = sl::harness::run_sweep(spec);
      sl::harness::emit_csv(curve, out_path);
    } else if (*bound) {
      print_rows(bound_args, "kind,bound,clamped,success_bound", [&](const sl::ProblemConfig& c) {
        const bool noisy = bound_kind == "noisy" || (bound_kind == "auto" && c.nu > 0.0);
        if (bound_kind != "auto" && bound_kind != "linear" && bound_kind != "noisy")
          throw sl::ConfigError("--kind", "expected auto, linear or noisy");
        const double a = *alpha_opt ? alpha : 1.0 / c.sparsity;
        const auto b = noisy ? sl::bounds::partial_recovery_bound_noisy(c, a)
                             : sl::bounds::partial_recovery_bound(c, a);
        return std::string(noisy ? "noisy" : "linear") + "," + num(b.value) + "," +
               (b.clamped ? "1" : "0") + "," + num(1.0 - b.value);
      });
    } else if (*mi) {
      print_rows(mi_args, "i,mi_bits", [&](const sl::ProblemConfig& c) {
        const int i = mi_i > 0 ? mi_i : c.sparsity;
        return std::to_string(i) + "," + num(sl::bounds::mutual_info_linear(i, c));
      });
    } else if (*sc) {
      if (criterion != "necessary" && criterion != "sufficient" && criterion != "both")
        throw sl::ConfigError("--criterion", "expected necessary, sufficient or both");
      auto cell = [](const sl::SampleComplexityResult& r) {
        return std::string(r.feasible ? "1" : "0") + "," +
               (r.n_required ? std::to_string(*r.n_required) : std::string("")) + "," +
               std::to_string(r.binding_i);
      };
      std::string cols;
      if (criterion != "sufficient") cols += "necessary_feasible,necessary_n,necessary_binding_i";
      if (criterion == "both") cols += ",";
      if (criterion != "necessary") cols += "sufficient_feasible,sufficient_n,sufficient_binding_i";
      print_rows(sc_args, cols, [&](const sl::ProblemConfig& c) {
        std::string row;
        if (criterion != "sufficient") row += cell(sl::bounds::necessary_samples(c));
        if (criterion == "both") row += ",";
        if (criterion != "necessary") row += cell(sl::bounds::sufficient_samples(c, target_pe));
        return row;
      });
    } else if (*cutoff) {
      print_rows(cut_args, "snr_cutoff", [](const sl::ProblemConfig& c) {
        const auto v = sl::bounds::snr_cutoff(c);
        return v ? num(*v) : std::string("inf");
      });
    } else if (*exponent) {
      const auto model = sl::io::model_from_json(read_json_file(model_path));
      std::vector<double> deltas;
      if (!delta_sweep.empty()) {
        deltas = parse_range(delta_sweep, "--delta-sweep");
      } else if (*delta_opt || !check_derivative) {
        deltas.push_back(delta);
      }
      if (!deltas.empty()) {
        const auto curve = sl::exponent::exponent_curve(model, ex_i, deltas);
        std::cout << "i,delta,exponent_bits\n";
        for (std::size_t j = 0; j < deltas.size(); ++j)
          std::cout << ex_i << "," << num(deltas[j]) << "," << num(curve.values[j]) << "\n";
      }
      if (check_derivative) {
        const auto r = sl::exponent::derivative_check(model, ex_i, h);
        std::cout << "i,h,derivative_at_0,mutual_information_bits,abs_diff\n"
                  << ex_i << "," << num(h) << "," << num(r.lhs) << "," << num(r.rhs) << ","
                  << num(std::abs(r.lhs - r.rhs)) << "\n";
      }
      if (ex_n >= 0) {
        if (ex_d < model.k()) throw sl::ConfigError("--bound-d", "must be >= K of the model");
        const auto b = sl::exponent::error_bound_general(
            model, ex_n, ex_d, weak_form ? sl::BoundForm::Weak : sl::BoundForm::Stated);
        std::cout << "n,d,form,bound,clamped\n"
                  << ex_n << "," << ex_d << "," << (weak_form ? "weak" : "stated") << ","
                  << num(b.value) << "," << (b.clamped ? 1 : 0) << "\n";
      }
    } else if (*decode) {
      const sl::Matrix x = sl::io::read_matrix_csv(x_path);
      const sl::Matrix ym = sl::io::read_matrix_csv(y_path);
      if (ym.cols() != 1 || ym.rows() != x.rows())
        throw sl::ConfigError("--y", "expected one value per line, as many lines as rows of X");
      const sl::Vector y = ym.col(0);
      dec_args.d = static_cast<int>(x.cols());
      dec_args.n = static_cast<int>(x.rows());
      const auto cfg = dec_args.config();
      const auto kind = sl::decoder_from_string(decoder_name);

      sl::DecoderOutput out;
      sl::LassoSettings ls;
      ls.lambda = lambda >= 0.0 ? lambda : sl::decoders::default_lambda(cfg.dimension, cfg.snr);
      switch (kind) {
        case sl::DecoderKind::MLMarginal: {
          sl::Dataset ds;
          ds.x = x;
          ds.y = y;
          out = sl::decoders::ml_decode_marginal(ds, cfg);
          break;
        }
        case sl::DecoderKind::MLLeastSquares:
          out = sl::decoders::ml_decode_ls(x, y, cfg.sparsity);
          break;
        case sl::DecoderKind::Lasso:
          out = sl::decoders::lasso(x, y, ls, cfg.sparsity);
          break;
        case sl::DecoderKind::ReweightedLasso: {
          sl::decoders::ReweightSettings rw;
          rw.eps = eps > 0.0 ? eps : std::sqrt(cfg.sigma2);
          out = sl::decoders::reweighted_lasso(x, y, ls, rw, cfg.sparsity);
          break;
        }
        case sl::DecoderKind::OMP:
          out = sl::decoders::omp(x, y, cfg.sparsity);
          break;
      }
      json j = {{"decoder", decoder_name},
                {"support", out.support_estimate.indices()},
                {"iterations", out.iterations},
                {"converged", out.converged}};
      if (out.objective) j["objective"] = *out.objective;
      if (out.beta_estimate)
        j["beta"] = std::vector<double>(out.beta_estimate->data(),
                                        out.beta_estimate->data() + out.beta_estimate->size());
      std::cout << j.dump() << "\n";
    } else if (*generate) {
      const auto cfg = gen_args.config();
      sl::io::dump_dataset(sl::model::generate_dataset(cfg), cfg, out_dir);
    }
  } catch (const sl::CapacityError& e) {
    std::cerr << "capacity refusal: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const sl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sl::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
