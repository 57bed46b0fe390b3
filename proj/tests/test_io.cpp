#include "firm/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace firm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("formatted doubles parse back exactly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
      CHECK(io::parse_double(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::parse_double("+1") == 1.0);
    CHECK(io::parse_double(io::format_double(std::numeric_limits<double>::denorm_min())) ==
          std::numeric_limits<double>::denorm_min());
  }

  TEST_CASE("non-finite and malformed numbers are rejected") {
    CHECK_THROWS_AS(io::parse_double("nan"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_double("inf"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_double("1.0x"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_double(""), std::invalid_argument);
  }

  TEST_CASE("matrix TSV round trip is bit identical") {
    Eigen::MatrixXd m(3, 2);
    m << 1.0 / 3.0, -2e-17, 5, 7e300, -0.1, 0.2;
    std::ostringstream out;
    io::write_matrix_tsv(out, m);
    CHECK(out.str().find('\r') == std::string::npos);
    std::istringstream in(out.str());
    CHECK(io::read_matrix_tsv(in) == m);
  }

  TEST_CASE("malformed matrix TSV is rejected") {
    std::istringstream ragged("1\t2\n3\n");
    CHECK_THROWS(io::read_matrix_tsv(ragged));
    std::istringstream text("1\tfoo\n");
    CHECK_THROWS(io::read_matrix_tsv(text));
    std::istringstream empty("");
    CHECK_THROWS(io::read_matrix_tsv(empty));
  }

  TEST_CASE("staged output appears only after commit") {
    const auto target = fresh_dir("firm_staged_commit");
    {
      io::StagedOutput out(target);
      out.write("a.tsv", "x\n");
      out.write("sub/b.tsv", "y\n");
      CHECK_FALSE(fs::exists(target / "a.tsv"));
      out.commit();
    }
    CHECK(slurp(target / "a.tsv") == "x\n");
    CHECK(slurp(target / "sub" / "b.tsv") == "y\n");
    for (const auto& e : fs::directory_iterator(target.parent_path()))
      CHECK(e.path().filename().string().find("firm_staged_commit.staging") == std::string::npos);
    fs::remove_all(target);
  }

  TEST_CASE("abandoned staged output leaves nothing behind") {
    const auto target = fresh_dir("firm_staged_abandon");
    {
      io::StagedOutput out(target);
      out.write("a.tsv", "x\n");
    }
    CHECK_FALSE(fs::exists(target));
    for (const auto& e : fs::directory_iterator(target.parent_path()))
      CHECK(e.path().filename().string().find("firm_staged_abandon") == std::string::npos);
  }

  TEST_CASE("run metadata echoes config and versions") {
    auto m = io::run_metadata("analyze", {{"seed", 3}});
    CHECK(m["command"] == "analyze");
    CHECK(m["config"]["seed"] == 3);
    CHECK(m["versions"].contains("firm"));
    CHECK(m["versions"].contains("eigen"));
  }
}
