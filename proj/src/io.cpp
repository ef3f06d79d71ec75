#include "sparse_limits/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sparse_limits/errors.hpp"

namespace sparse_limits::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_vector_csv(const Vector& v, const fs::path& path) {
  write_matrix_csv(Matrix(v), path);
}

}  // namespace

void write_matrix_csv(const Matrix& m, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* stop = nullptr;
      const double v = std::strtod(cell.c_str(), &stop);
      if (cell.empty() || *stop != '\0')
        throw ParameterError(path.string() + ":" + std::to_string(line_no) + ": '" + cell +
                             "' is not a number");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParameterError(path.string() + ":" + std::to_string(line_no) +
                           ": ragged row (expected " + std::to_string(rows.front().size()) +
                           " columns)");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParameterError(path.string() + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void dump_dataset(const Dataset& ds, const ProblemConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  write_matrix_csv(ds.x, dir / "x.csv");
  if (ds.z) write_matrix_csv(*ds.z, dir / "z.csv");
  write_vector_csv(ds.y, dir / "y.csv");
  write_vector_csv(ds.beta, dir / "beta.csv");

  json header = {
      {"n_samples", cfg.n_samples},
      {"dimension", cfg.dimension},
      {"sparsity", cfg.sparsity},
      {"snr", cfg.snr},
      {"sigma2", cfg.sigma2},
      {"rho", cfg.rho},
      {"nu", cfg.nu},
      {"coeff_model", std::string(to_string(cfg.coeff_model))},
      {"seed", cfg.seed},
      {"support", ds.support.indices()},
      {"files", {{"x", "x.csv"}, {"y", "y.csv"}, {"beta", "beta.csv"}}},
  };
  if (ds.z) header["files"]["z"] = "z.csv";
  std::ofstream out(dir / "header.json");
  out << header.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + (dir / "header.json").string() + "'");
}

DiscreteChannelModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "model document must be a JSON object");
  try {
    if (doc.contains("builtin")) {
      const auto name = doc.at("builtin").get<std::string>();
      if (name != "group_testing") throw ConfigError("builtin", "unknown builtin model '" + name + "'");
      for (const auto& [key, _] : doc.items())
        if (key != "builtin" && key != "k" && key != "p" && key != "flip")
          throw ConfigError(key, "unknown key");
      if (!doc.contains("k")) throw ConfigError("k", "required key missing");
      return DiscreteChannelModel::group_testing(doc.at("k").get<int>(), doc.value("p", 0.5),
                                                 doc.value("flip", 0.0));
    }

    for (const auto& [key, _] : doc.items())
      if (key != "k" && key != "x_alphabet" && key != "y_alphabet" && key != "theta" &&
          key != "y_given_xs")
        throw ConfigError(key, "unknown key");
    for (const char* key : {"k", "x_alphabet", "y_alphabet", "theta", "y_given_xs"})
      if (!doc.contains(key)) throw ConfigError(key, "required key missing");

    const int k = doc.at("k").get<int>();
    const int nx = static_cast<int>(doc.at("x_alphabet").size());
    const int ny = static_cast<int>(doc.at("y_alphabet").size());

    std::vector<DiscreteChannelModel::Theta> thetas;
    const auto& th = doc.at("theta");
    for (std::size_t j = 0; j < th.size(); ++j) {
      const std::string p = "theta[" + std::to_string(j) + "]";
      if (!th[j].contains("prob") || !th[j].contains("x_pmf"))
        throw ConfigError(p, "expected {\"prob\": ..., \"x_pmf\": [...]}");
      thetas.push_back({th[j].at("prob").get<double>(), th[j].at("x_pmf").get<std::vector<double>>()});
    }

    std::vector<double> table;
    const auto& rows = doc.at("y_given_xs");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = rows[r].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != ny)
        throw ConfigError("y_given_xs[" + std::to_string(r) + "]",
                          "expected " + std::to_string(ny) + " probabilities");
      table.insert(table.end(), row.begin(), row.end());
    }
    return DiscreteChannelModel(k, nx, ny, std::move(thetas), std::move(table));
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("malformed model: ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError("", e.what());
  }
}

}  // namespace sparse_limits::io
