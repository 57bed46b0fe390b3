#include "firm/dataset.hpp"
#include "firm/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace firm {

const Eigen::VectorXd& TabularDataset::labels() const {
  if (!y) throw std::invalid_argument("dataset has no labels");
  return *y;
}

TabularDataset make_tabular(Eigen::MatrixXd X, std::optional<Eigen::VectorXd> y,
                            std::vector<std::string> names) {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("no data rows");
  if (!X.allFinite()) throw std::invalid_argument("data matrix contains non-finite values");
  if (y) {
    if (y->size() != X.rows()) {
      throw std::invalid_argument("label count " + std::to_string(y->size()) +
                                  " does not match row count " + std::to_string(X.rows()));
    }
    if (!y->allFinite()) throw std::invalid_argument("labels contain non-finite values");
  }
  if (names.empty()) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != X.cols()) {
    throw std::invalid_argument("column name count does not match column count");
  }
  TabularDataset data;
  data.column_means = X.colwise().mean().transpose();
  data.binary_pm1 = (X.array() == 1.0 || X.array() == -1.0).all();
  data.X = std::move(X);
  data.y = std::move(y);
  data.names = std::move(names);
  return data;
}

TabularDataset parse_tabular(std::istream& in, bool has_labels, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(source + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  for (auto h : io::split(line, ',')) header.emplace_back(h);
  const std::size_t width = header.size();
  if (has_labels && width < 2) {
    throw std::runtime_error(source + ": labelled data needs at least one feature column");
  }

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = io::split(line, ',');
    if (cells.size() != width) {
      throw std::runtime_error(source + ": line " + std::to_string(lineno) + ": ragged row, expected " +
                               std::to_string(width) + " fields, got " +
                               std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
      try {
        row.push_back(io::parse_double(cells[c]));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source + ": line " + std::to_string(lineno) + ", column " +
                                 std::to_string(c + 1) + " (" + header[c] + "): " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(source + ": no data rows");

  const std::size_t d = has_labels ? width - 1 : width;
  Eigen::MatrixXd X(rows.size(), d);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = rows[i][j];
    if (has_labels) y(i) = rows[i][d];
  }
  header.resize(d);
  std::optional<Eigen::VectorXd> labels;
  if (has_labels) labels = std::move(y);
  return make_tabular(std::move(X), std::move(labels), std::move(header));
}

TabularDataset load_tabular(const std::filesystem::path& path, bool has_labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_tabular(in, has_labels, path.string());
}

void write_tabular(std::ostream& out, const TabularDataset& data) {
  for (std::size_t j = 0; j < data.names.size(); ++j) out << (j ? "," : "") << data.names[j];
  if (data.y) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      out << (j ? "," : "") << io::format_double(data.X(i, j));
    }
    if (data.y) out << ',' << io::format_double((*data.y)(i));
    out << '\n';
  }
}

void save_tabular(const std::filesystem::path& path, const TabularDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_tabular(out, data);
}

SequenceDataset make_sequences(std::vector<std::string> sequences, Eigen::VectorXd y,
                               std::string alphabet) {
  if (sequences.empty()) throw std::invalid_argument("no sequences");
  if (static_cast<Eigen::Index>(sequences.size()) != y.size()) {
    throw std::invalid_argument("label count does not match sequence count");
  }
  const std::size_t L = sequences.front().size();
  if (L == 0) throw std::invalid_argument("empty sequence");
  for (std::size_t n = 0; n < sequences.size(); ++n) {
    if (sequences[n].size() != L) {
      throw std::invalid_argument("length mismatch at line " + std::to_string(n + 1));
    }
    for (char c : sequences[n]) {
      if (alphabet.find(c) == std::string::npos) {
        throw std::invalid_argument(std::string("symbol ") + c + " not in alphabet at line " +
                                    std::to_string(n + 1));
      }
    }
  }
  SequenceDataset data;
  data.alphabet = std::move(alphabet);
  data.sequences = std::move(sequences);
  data.y = std::move(y);
  return data;
}

SequenceDataset parse_sequences(std::istream& in, std::string alphabet,
                                const std::string& source) {
  std::vector<std::string> seqs;
  std::vector<double> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = io::split(line, '\t');
    auto where = source + ": line " + std::to_string(lineno) + ": ";
    if (fields.size() != 2) throw std::runtime_error(where + "expected <sequence>\\t<label>");
    std::string seq(fields[0]);
    if (!seqs.empty() && seq.size() != seqs.front().size()) {
      throw std::runtime_error(where + "length mismatch at line " + std::to_string(lineno));
    }
    for (char c : seq) {
      if (alphabet.find(c) == std::string::npos) {
        throw std::runtime_error(where + "symbol " + std::string(1, c) + " not in alphabet");
      }
    }
    if (fields[1] == "+1" || fields[1] == "1") {
      labels.push_back(1.0);
    } else if (fields[1] == "-1") {
      labels.push_back(-1.0);
    } else {
      throw std::runtime_error(where + "malformed label '" + std::string(fields[1]) + "'");
    }
    seqs.push_back(std::move(seq));
  }
  if (seqs.empty()) throw std::runtime_error(source + ": no sequences");
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(labels.data(), labels.size());
  return make_sequences(std::move(seqs), std::move(y), std::move(alphabet));
}

SequenceDataset load_sequences(const std::filesystem::path& path, std::string alphabet) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_sequences(in, std::move(alphabet), path.string());
}

void write_sequences(std::ostream& out, const SequenceDataset& data) {
  for (std::size_t n = 0; n < data.size(); ++n) {
    out << data.sequences[n] << '\t' << (data.y(n) > 0 ? "+1" : "-1") << '\n';
  }
}

std::string to_string(CovarianceMethod method) {
  switch (method) {
    case CovarianceMethod::empirical_uncentered: return "empirical_uncentered";
    case CovarianceMethod::empirical_centered: return "empirical_centered";
    case CovarianceMethod::shrunk: return "shrunk";
    case CovarianceMethod::supplied: return "supplied";
  }
  return "unknown";
}

CovarianceEstimate empirical_covariance(const Eigen::MatrixXd& X, bool centered) {
  const auto n = X.rows();
  if (n < 1) throw std::invalid_argument("empirical_covariance: need at least one row");
  if (centered && n < 2) {
    throw std::invalid_argument("empirical_covariance: centered estimate needs n >= 2");
  }
  CovarianceEstimate est;
  if (centered) {
    Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    est.sigma = (Xc.transpose() * Xc) / static_cast<double>(n);
    est.method = CovarianceMethod::empirical_centered;
  } else {
    est.sigma = (X.transpose() * X) / static_cast<double>(n);
    est.method = CovarianceMethod::empirical_uncentered;
  }
  // The product is symmetric up to rounding; make it exactly so.
  est.sigma = 0.5 * (est.sigma + est.sigma.transpose()).eval();
  return est;
}

CovarianceEstimate empirical_covariance(const TabularDataset& data, bool centered) {
  return empirical_covariance(data.X, centered);
}

CovarianceEstimate shrinkage_covariance(const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n < 3) throw std::invalid_argument("shrinkage_covariance: need n >= 3");
  Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  Eigen::MatrixXd S = empirical_covariance(X, true).sigma;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(S(j, j) > 0.0)) {
      throw std::invalid_argument("shrinkage_covariance: zero-variance column " +
                                  std::to_string(j + 1));
    }
  }

  // Var(s_ij) = Σ_k (w_kij − s_ij)² / (n(n−1)) with w_kij = xc_ki xc_kj.
  const double nd = static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      double ss = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double dev = Xc(k, i) * Xc(k, j) - S(i, j);
        ss += dev * dev;
      }
      num += 2.0 * ss / (nd * (nd - 1.0));
      den += 2.0 * S(i, j) * S(i, j);
    }
  }
  double lambda = 0.0;
  if (num > 0.0) lambda = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;

  CovarianceEstimate est;
  est.sigma = (1.0 - lambda) * S;
  est.sigma.diagonal() = S.diagonal();
  est.method = CovarianceMethod::shrunk;
  est.shrinkage_lambda = lambda;
  return est;
}

CovarianceEstimate shrinkage_covariance(const TabularDataset& data) {
  return shrinkage_covariance(data.X);
}

CovarianceEstimate supplied_covariance(Eigen::MatrixXd sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw std::invalid_argument("covariance matrix must be square and non-empty");
  }
  if (!sigma.allFinite()) throw std::invalid_argument("covariance matrix has non-finite entries");
  if (((sigma - sigma.transpose()).array().abs() > 1e-12).any()) {
    throw std::invalid_argument("covariance matrix is not symmetric");
  }
  if ((sigma.diagonal().array() < 0.0).any()) {
    throw std::invalid_argument("covariance matrix has a negative diagonal entry");
  }
  CovarianceEstimate est;
  est.sigma = std::move(sigma);
  est.method = CovarianceMethod::supplied;
  return est;
}

}  // namespace firm
