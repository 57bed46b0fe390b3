#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace firm::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Parses a finite double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Square or rectangular matrix as tab-separated rows, no header.
void write_matrix_tsv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_tsv(std::istream& in, const std::string& source = "<stream>");
Eigen::MatrixXd load_matrix_tsv(const std::filesystem::path& path);

/// Collects a run's artifacts in a hidden staging directory and moves them
/// into place only on commit(). Without commit() the staging area is removed.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path target);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  /// Path inside the staging area for a relative artifact name.
  std::filesystem::path path(const std::filesystem::path& relative) const;
  void write(const std::filesystem::path& relative, std::string_view contents);
  void commit();

  const std::filesystem::path& target() const { return target_; }

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

/// Config echo plus library versions, written alongside every run.
nlohmann::json run_metadata(std::string_view command, nlohmann::json config);

}  // namespace firm::io
