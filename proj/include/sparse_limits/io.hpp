#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "sparse_limits/exponent.hpp"
#include "sparse_limits/model.hpp"

namespace sparse_limits::io {

// Plain comma-separated matrix, one row per line, no header.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

// Writes x.csv, optional z.csv, y.csv, beta.csv and header.json (config,
// support, file list) into `dir`.
void dump_dataset(const Dataset& ds, const ProblemConfig& cfg, const std::filesystem::path& dir);

// Model document:
//   {"builtin": "group_testing", "k": 2, "p": 0.5, "flip": 0.0}
// or
//   {"k": 2, "x_alphabet": ["0", "1"], "y_alphabet": ["0", "1"],
//    "theta": [{"prob": 1.0, "x_pmf": [0.5, 0.5]}],
//    "y_given_xs": [[1, 0], [0, 1], [0, 1], [0, 1]]}
// where y_given_xs has |X|^K rows indexed by the support tuple in mixed radix
// (first variable most significant).
DiscreteChannelModel model_from_json(const nlohmann::json& doc);

}  // namespace sparse_limits::io
