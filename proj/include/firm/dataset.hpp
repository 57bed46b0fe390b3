#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace firm {

/// Real-valued examples in rows. Column means are recorded at construction
/// so Gaussian FIRM can work in centered coordinates.
struct TabularDataset {
  Eigen::MatrixXd X;
  std::optional<Eigen::VectorXd> y;
  std::vector<std::string> names;
  Eigen::VectorXd column_means;
  bool binary_pm1 = false;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
  const Eigen::VectorXd& labels() const;
};

/// Validates and completes a dataset (default names x1..xd, means, ±1 flag).
TabularDataset make_tabular(Eigen::MatrixXd X,
                            std::optional<Eigen::VectorXd> y = std::nullopt,
                            std::vector<std::string> names = {});

/// Comma separated, header row, `.` decimals, no quoting. With `has_labels`
/// the last column holds the label.
TabularDataset parse_tabular(std::istream& in, bool has_labels,
                             const std::string& source = "<stream>");
TabularDataset load_tabular(const std::filesystem::path& path, bool has_labels);
void write_tabular(std::ostream& out, const TabularDataset& data);
void save_tabular(const std::filesystem::path& path, const TabularDataset& data);

inline constexpr const char* kDnaAlphabet = "ACGT";

struct SequenceDataset {
  std::string alphabet = kDnaAlphabet;
  std::vector<std::string> sequences;
  Eigen::VectorXd y;

  std::size_t size() const { return sequences.size(); }
  std::size_t length() const { return sequences.empty() ? 0 : sequences.front().size(); }
};

SequenceDataset make_sequences(std::vector<std::string> sequences, Eigen::VectorXd y,
                               std::string alphabet = kDnaAlphabet);

/// One `<sequence>\t<label>` pair per line, label in {+1, -1}.
SequenceDataset parse_sequences(std::istream& in, std::string alphabet = kDnaAlphabet,
                                const std::string& source = "<stream>");
SequenceDataset load_sequences(const std::filesystem::path& path,
                               std::string alphabet = kDnaAlphabet);
void write_sequences(std::ostream& out, const SequenceDataset& data);

enum class CovarianceMethod { empirical_uncentered, empirical_centered, shrunk, supplied };

std::string to_string(CovarianceMethod method);

struct CovarianceEstimate {
  Eigen::MatrixXd sigma;
  CovarianceMethod method = CovarianceMethod::supplied;
  /// Set iff method == shrunk.
  std::optional<double> shrinkage_lambda;
};

/// (1/n) XᵀX, optionally after subtracting column means.
CovarianceEstimate empirical_covariance(const Eigen::MatrixXd& X, bool centered);
CovarianceEstimate empirical_covariance(const TabularDataset& data, bool centered);

/// Shrinks the centered covariance toward its diagonal with the analytic
/// MSE-optimal intensity
///   λ* = Σ_{i≠j} Var(s_ij) / Σ_{i≠j} s_ij², clipped to [0, 1].
CovarianceEstimate shrinkage_covariance(const Eigen::MatrixXd& X);
CovarianceEstimate shrinkage_covariance(const TabularDataset& data);

/// Wraps a caller-provided matrix after checking symmetry and diagonal sign.
CovarianceEstimate supplied_covariance(Eigen::MatrixXd sigma);

}  // namespace firm
