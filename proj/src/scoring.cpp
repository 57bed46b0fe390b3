#include "firm/scoring.hpp"
#include "firm/kernels.hpp"
#include "firm/detail/overloaded.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace firm {

using detail::overloaded;

void validate(const KernelSpec& kernel) {
  std::visit(overloaded{
                 [](const GaussianKernel& k) {
                   if (!(k.gamma > 0.0) || !std::isfinite(k.gamma))
                     throw std::invalid_argument("gaussian kernel needs gamma > 0");
                 },
                 [](const PolynomialKernel& k) {
                   if (k.degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
                   if (!(k.offset >= 0.0)) throw std::invalid_argument("polynomial offset must be >= 0");
                 },
             },
             kernel);
}

double kernel_value(const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& z) {
  return std::visit(overloaded{
                        [&](const GaussianKernel& k) {
                          return std::exp(-(x - z).squaredNorm() / (k.gamma * k.gamma));
                        },
                        [&](const PolynomialKernel& k) {
                          return std::pow(x.dot(z) + k.offset, k.degree);
                        },
                    },
                    kernel);
}

Eigen::VectorXd kernel_gradient(const KernelSpec& kernel,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& z) {
  return std::visit(overloaded{
                        [&](const GaussianKernel& k) -> Eigen::VectorXd {
                          const double g2 = k.gamma * k.gamma;
                          const double kv = std::exp(-(x - z).squaredNorm() / g2);
                          return (-2.0 * kv / g2) * (x - z);
                        },
                        [&](const PolynomialKernel& k) -> Eigen::VectorXd {
                          const double inner = x.dot(z) + k.offset;
                          return (k.degree * std::pow(inner, k.degree - 1)) * z;
                        },
                    },
                    kernel);
}

double PositionalKmerScorer::weight(std::size_t position, std::string_view kmer) const {
  if (position >= weights.size()) return 0.0;
  auto it = weights[position].find(kmer);
  return it == weights[position].end() ? 0.0 : it->second;
}

std::size_t PositionalKmerScorer::weight_count() const {
  std::size_t total = 0;
  for (const auto& m : weights) total += m.size();
  return total;
}

std::string_view scorer_type(const Scorer& scorer) {
  return std::visit(overloaded{
                        [](const LinearScorer&) { return std::string_view("linear"); },
                        [](const KernelExpansionScorer&) { return std::string_view("kernel_expansion"); },
                        [](const LabelOracleScorer&) { return std::string_view("label_oracle"); },
                        [](const PositionalKmerScorer&) { return std::string_view("positional_kmer"); },
                    },
                    scorer);
}

Eigen::Index input_dimension(const Scorer& scorer) {
  return std::visit(overloaded{
                        [](const LinearScorer& s) { return s.w.size(); },
                        [](const KernelExpansionScorer& s) { return s.points.cols(); },
                        [](const LabelOracleScorer& s) { return s.dim; },
                        [](const PositionalKmerScorer&) -> Eigen::Index {
                          throw std::invalid_argument("positional k-mer scorer takes sequences");
                        },
                    },
                    scorer);
}

namespace {

void check_dim(Eigen::Index expected, Eigen::Index got) {
  if (expected != got) {
    throw std::invalid_argument("dimension mismatch: scorer expects " + std::to_string(expected) +
                                ", input has " + std::to_string(got));
  }
}

}  // namespace

double score(const LinearScorer& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dim(s.w.size(), x.size());
  return s.w.dot(x) + s.b;
}

double score(const KernelExpansionScorer& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dim(s.points.cols(), x.size());
  double total = s.b;
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    total += s.alpha(i) * kernel_value(s.kernel, s.points.row(i).transpose(), x);
  }
  return total;
}

double score(const LabelOracleScorer& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dim(s.dim, x.size());
  std::vector<double> key(x.data(), x.data() + x.size());
  auto it = s.table.find(key);
  if (it == s.table.end()) throw std::invalid_argument("label oracle has no entry for input");
  return it->second;
}

double score(const PositionalKmerScorer& s, std::string_view x) {
  if (x.size() != s.length) {
    throw std::invalid_argument("sequence length " + std::to_string(x.size()) +
                                " does not match scorer length " + std::to_string(s.length));
  }
  double total = s.b;
  for (std::size_t i = 0; i < s.weights.size(); ++i) {
    const auto& at = s.weights[i];
    if (at.empty()) continue;
    for (std::size_t k = 1; k <= s.max_degree && i + k <= s.length; ++k) {
      auto it = at.find(x.substr(i, k));
      if (it != at.end()) total += it->second;
    }
  }
  return total;
}

double score(const Scorer& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit(overloaded{
                        [&](const PositionalKmerScorer&) -> double {
                          throw std::invalid_argument("positional k-mer scorer takes sequences");
                        },
                        [&](const auto& sc) -> double { return score(sc, x); },
                    },
                    s);
}

double score(const Scorer& s, std::string_view x) {
  if (auto* kmer = std::get_if<PositionalKmerScorer>(&s)) return score(*kmer, x);
  throw std::invalid_argument("scorer of type " + std::string(scorer_type(s)) +
                              " does not take sequences");
}

Eigen::VectorXd score_rows(const Scorer& s, const Eigen::MatrixXd& X) {
  check_dim(input_dimension(s), X.cols());
  Eigen::VectorXd out(X.rows());
  const Eigen::Index n = X.rows();
  if (std::holds_alternative<LabelOracleScorer>(s)) {
    // Lookups can miss and throw; keep them out of the parallel region.
    for (Eigen::Index i = 0; i < n; ++i) out(i) = score(s, X.row(i).transpose());
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = X.row(i).transpose();
    out(i) = score(s, row);
  }
  return out;
}

Eigen::VectorXd score_all(const Scorer& s, const TabularDataset& data) {
  return score_rows(s, data.X);
}

Eigen::VectorXd score_all(const Scorer& s, const SequenceDataset& data) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
  for (std::size_t n = 0; n < data.size(); ++n) out(n) = score(s, data.sequences[n]);
  return out;
}

bool is_differentiable(const Scorer& s) {
  return std::holds_alternative<LinearScorer>(s) ||
         std::holds_alternative<KernelExpansionScorer>(s);
}

Eigen::VectorXd gradient(const Scorer& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (auto* lin = std::get_if<LinearScorer>(&s)) {
    check_dim(lin->w.size(), x.size());
    return lin->w;
  }
  if (auto* ker = std::get_if<KernelExpansionScorer>(&s)) {
    check_dim(ker->points.cols(), x.size());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index i = 0; i < ker->points.rows(); ++i) {
      g += ker->alpha(i) * kernel_gradient(ker->kernel, x, ker->points.row(i).transpose());
    }
    return g;
  }
  throw std::invalid_argument("scorer of type " + std::string(scorer_type(s)) +
                              " is not differentiable");
}

Eigen::VectorXd gradient_at_zero(const Scorer& s) {
  return gradient(s, Eigen::VectorXd::Zero(input_dimension(s)));
}

LinearScorer train_least_squares(const TabularDataset& data) {
  const auto& y = data.labels();
  const auto n = data.rows();
  const auto d = data.cols();
  Eigen::MatrixXd A(n, d + 1);
  A.leftCols(d) = data.X;
  A.col(d).setOnes();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < d + 1) {
    throw std::invalid_argument("singular normal equations (rank " + std::to_string(qr.rank()) +
                                " < " + std::to_string(d + 1) + "); use ridge regression");
  }
  Eigen::VectorXd coef = qr.solve(y);
  LinearScorer s;
  s.w = coef.head(d);
  s.b = coef(d);
  return s;
}

LinearScorer train_ridge(const TabularDataset& data, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge lambda must be > 0");
  const auto& y = data.labels();
  const auto n = static_cast<double>(data.rows());
  Eigen::RowVectorXd mean = data.X.colwise().mean();
  Eigen::MatrixXd Xc = data.X.rowwise() - mean;
  const double ybar = y.mean();
  Eigen::MatrixXd G = Xc.transpose() * Xc;
  G.diagonal().array() += n * lambda;
  LinearScorer s;
  s.w = G.llt().solve(Xc.transpose() * (y.array() - ybar).matrix());
  s.b = ybar - mean.dot(s.w);
  return s;
}

KernelExpansionScorer train_kernel_ridge(const TabularDataset& data, const KernelSpec& kernel,
                                         double lambda) {
  validate(kernel);
  if (!(lambda > 0.0)) throw std::invalid_argument("kernel ridge lambda must be > 0");
  const auto& y = data.labels();
  const auto n = data.rows();
  Eigen::MatrixXd K = gram_matrix(kernel, data.X);
  K.diagonal().array() += static_cast<double>(n) * lambda;
  const double ybar = y.mean();
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw std::runtime_error("kernel ridge: factorization failed");
  KernelExpansionScorer s;
  s.points = data.X;
  s.alpha = llt.solve((y.array() - ybar).matrix());
  s.b = ybar;
  s.kernel = kernel;
  return s;
}

PositionalKmerScorer train_positional_kmer(const SequenceDataset& data, std::size_t max_degree,
                                           double lambda) {
  if (max_degree < 1) throw std::invalid_argument("K must be >= 1");
  const std::size_t L = data.length();
  if (max_degree > L) throw std::invalid_argument("K must not exceed the sequence length");
  if (!(lambda > 0.0)) throw std::invalid_argument("k-mer ridge lambda must be > 0");
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd K = kmer_gram_matrix(data.sequences, max_degree);
  K.diagonal().array() += static_cast<double>(n) * lambda;
  const double ybar = data.y.mean();
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw std::runtime_error("k-mer ridge: factorization failed");
  Eigen::VectorXd alpha = llt.solve((data.y.array() - ybar).matrix());

  PositionalKmerScorer s;
  s.alphabet = data.alphabet;
  s.length = L;
  s.max_degree = max_degree;
  s.weights.resize(L);
  s.b = ybar;
  for (Eigen::Index a = 0; a < n; ++a) {
    std::string_view seq = data.sequences[a];
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t k = 1; k <= max_degree && i + k <= L; ++k) {
        auto [it, inserted] = s.weights[i].try_emplace(std::string(seq.substr(i, k)), 0.0);
        it->second += alpha(a);
      }
    }
  }
  return s;
}

LabelOracleScorer make_label_oracle(const TabularDataset& data) {
  const auto& y = data.labels();
  std::map<std::vector<double>, std::pair<double, int>> acc;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    std::vector<double> key(data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) key[j] = data.X(i, j);
    auto& [sum, count] = acc[key];
    sum += y(i);
    ++count;
  }
  LabelOracleScorer s;
  s.dim = data.cols();
  for (auto& [key, sc] : acc) s.table.emplace(key, sc.first / sc.second);
  return s;
}

namespace {

double population_sd(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().mean());
}

}  // namespace

double score_sd(const Scorer& s, const TabularDataset& data) {
  return population_sd(score_all(s, data));
}

double score_sd(const Scorer& s, const SequenceDataset& data) {
  return population_sd(score_all(s, data));
}

Scorer scale(const Scorer& s, double factor) {
  return std::visit(overloaded{
                        [&](LinearScorer sc) -> Scorer {
                          sc.w *= factor;
                          sc.b *= factor;
                          return sc;
                        },
                        [&](KernelExpansionScorer sc) -> Scorer {
                          sc.alpha *= factor;
                          sc.b *= factor;
                          return sc;
                        },
                        [&](LabelOracleScorer sc) -> Scorer {
                          for (auto& [key, v] : sc.table) v *= factor;
                          return sc;
                        },
                        [&](PositionalKmerScorer sc) -> Scorer {
                          for (auto& at : sc.weights)
                            for (auto& [kmer, w] : at) w *= factor;
                          sc.b *= factor;
                          return sc;
                        },
                    },
                    s);
}

namespace {

Scorer standardize_by(const Scorer& s, const Eigen::VectorXd& scores) {
  const double sd = population_sd(scores);
  const double mag = scores.cwiseAbs().maxCoeff();
  if (!(sd > 1e-14 * std::max(1.0, mag))) throw std::invalid_argument("zero score variance");
  return scale(s, 1.0 / sd);
}

}  // namespace

Scorer standardize(const Scorer& s, const TabularDataset& data) {
  return standardize_by(s, score_all(s, data));
}

Scorer standardize(const Scorer& s, const SequenceDataset& data) {
  return standardize_by(s, score_all(s, data));
}

namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd json_vector(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json kernel_json(const KernelSpec& kernel) {
  return std::visit(overloaded{
                        [](const GaussianKernel& k) {
                          return nlohmann::json{{"type", "gaussian"}, {"gamma", k.gamma}};
                        },
                        [](const PolynomialKernel& k) {
                          return nlohmann::json{
                              {"type", "polynomial"}, {"degree", k.degree}, {"offset", k.offset}};
                        },
                    },
                    kernel);
}

KernelSpec json_kernel(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "gaussian") return GaussianKernel{j.at("gamma").get<double>()};
  if (type == "polynomial") {
    return PolynomialKernel{j.at("degree").get<int>(), j.at("offset").get<double>()};
  }
  throw std::invalid_argument("unknown kernel type '" + type + "'");
}

}  // namespace

nlohmann::json to_json(const Scorer& s) {
  nlohmann::json params = std::visit(
      overloaded{
          [](const LinearScorer& sc) {
            return nlohmann::json{{"w", vector_json(sc.w)}, {"b", sc.b}};
          },
          [](const KernelExpansionScorer& sc) {
            nlohmann::json points = nlohmann::json::array();
            for (Eigen::Index i = 0; i < sc.points.rows(); ++i)
              points.push_back(vector_json(sc.points.row(i).transpose()));
            return nlohmann::json{{"kernel", kernel_json(sc.kernel)},
                                  {"points", points},
                                  {"alpha", vector_json(sc.alpha)},
                                  {"b", sc.b}};
          },
          [](const LabelOracleScorer& sc) {
            nlohmann::json table = nlohmann::json::array();
            for (const auto& [key, v] : sc.table) table.push_back({{"x", key}, {"score", v}});
            return nlohmann::json{{"dim", sc.dim}, {"table", table}};
          },
          [](const PositionalKmerScorer& sc) {
            nlohmann::json weights = nlohmann::json::array();
            for (std::size_t i = 0; i < sc.weights.size(); ++i)
              for (const auto& [kmer, w] : sc.weights[i])
                weights.push_back({{"position", i}, {"kmer", kmer}, {"w", w}});
            return nlohmann::json{{"alphabet", sc.alphabet},
                                  {"length", sc.length},
                                  {"max_degree", sc.max_degree},
                                  {"weights", weights},
                                  {"b", sc.b}};
          },
      },
      s);
  return {{"type", std::string(scorer_type(s))}, {"parameters", params}};
}

Scorer scorer_from_json(const nlohmann::json& doc) {
  const auto type = doc.at("type").get<std::string>();
  const auto& p = doc.at("parameters");
  if (type == "linear") {
    return LinearScorer{json_vector(p.at("w")), p.at("b").get<double>()};
  }
  if (type == "kernel_expansion") {
    KernelExpansionScorer sc;
    const auto& pts = p.at("points");
    const auto m = static_cast<Eigen::Index>(pts.size());
    const auto d = m ? static_cast<Eigen::Index>(pts.at(0).size()) : 0;
    sc.points.resize(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      auto row = json_vector(pts.at(i));
      if (row.size() != d) throw std::invalid_argument("ragged kernel expansion points");
      sc.points.row(i) = row.transpose();
    }
    sc.alpha = json_vector(p.at("alpha"));
    if (sc.alpha.size() != m) throw std::invalid_argument("alpha size does not match points");
    sc.b = p.at("b").get<double>();
    sc.kernel = json_kernel(p.at("kernel"));
    validate(sc.kernel);
    return sc;
  }
  if (type == "label_oracle") {
    LabelOracleScorer sc;
    sc.dim = p.at("dim").get<Eigen::Index>();
    for (const auto& entry : p.at("table")) {
      sc.table.emplace(entry.at("x").get<std::vector<double>>(), entry.at("score").get<double>());
    }
    return sc;
  }
  if (type == "positional_kmer") {
    PositionalKmerScorer sc;
    sc.alphabet = p.at("alphabet").get<std::string>();
    sc.length = p.at("length").get<std::size_t>();
    sc.max_degree = p.at("max_degree").get<std::size_t>();
    sc.b = p.at("b").get<double>();
    sc.weights.resize(sc.length);
    for (const auto& entry : p.at("weights")) {
      const auto pos = entry.at("position").get<std::size_t>();
      auto kmer = entry.at("kmer").get<std::string>();
      if (kmer.empty() || pos + kmer.size() > sc.length || kmer.size() > sc.max_degree) {
        throw std::invalid_argument("k-mer weight '" + kmer + "' at " + std::to_string(pos) +
                                    " is out of range");
      }
      sc.weights[pos][kmer] = entry.at("w").get<double>();
    }
    return sc;
  }
  throw std::invalid_argument("unknown scorer type '" + type + "'");
}

}  // namespace firm
