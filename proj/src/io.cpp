#include "firm/io.hpp"
#include "firm/result.hpp"
#include "firm/version.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace firm {

std::string_view to_string(FirmMethod method) {
  switch (method) {
    case FirmMethod::binary_exact: return "binary_exact";
    case FirmMethod::binary_matrix: return "binary_matrix";
    case FirmMethod::uniform_closed_form: return "uniform_closed_form";
    case FirmMethod::gaussian_taylor: return "gaussian_taylor";
    case FirmMethod::gaussian_linear: return "gaussian_linear";
    case FirmMethod::regression_closed_form: return "regression_closed_form";
    case FirmMethod::empirical_binned: return "empirical_binned";
    case FirmMethod::slope: return "slope";
    case FirmMethod::sensitivity: return "sensitivity";
    case FirmMethod::poim: return "poim";
  }
  return "unknown";
}

FirmResult make_result(std::string feature, double q_signed, FirmMethod method) {
  FirmResult r;
  r.feature = std::move(feature);
  r.q_signed = q_signed;
  r.q_abs = std::abs(q_signed);
  r.method = method;
  return r;
}

}  // namespace firm

namespace firm::io {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\r')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse '" + std::string(text) + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite value '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void write_matrix_tsv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_tsv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (auto cell : split(line, '\t')) {
      try {
        row.push_back(parse_double(cell));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source + ": line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(source + ": ragged matrix at line " + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(source + ": empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Eigen::MatrixXd load_matrix_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix_tsv(in, path.string());
}

StagedOutput::StagedOutput(std::filesystem::path target) : target_(std::move(target)) {
  auto parent = target_.has_parent_path() ? target_.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(parent);
  staging_ = parent / ("." + target_.filename().string() + ".staging-" + std::to_string(::getpid()));
  std::filesystem::remove_all(staging_);
  std::filesystem::create_directories(staging_);
}

StagedOutput::~StagedOutput() {
  std::error_code ec;
  std::filesystem::remove_all(staging_, ec);
}

std::filesystem::path StagedOutput::path(const std::filesystem::path& relative) const {
  return staging_ / relative;
}

void StagedOutput::write(const std::filesystem::path& relative, std::string_view contents) {
  auto p = path(relative);
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + p.string());
  written_.push_back(relative);
}

void StagedOutput::commit() {
  if (committed_) return;
  std::filesystem::create_directories(target_);
  for (const auto& rel : written_) {
    auto dest = target_ / rel;
    std::filesystem::create_directories(dest.parent_path());
    std::filesystem::rename(staging_ / rel, dest);
  }
  committed_ = true;
}

nlohmann::json run_metadata(std::string_view command, nlohmann::json config) {
  return {{"command", command},
          {"config", std::move(config)},
          {"versions",
           {{"firm", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}}}};
}

}  // namespace firm::io
