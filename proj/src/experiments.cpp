#include "firm/experiments.hpp"
#include "firm/firm_binary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace firm {

namespace {

bool exceeds(double a, double b, double tolerance) {
  return a - b > tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double v) { return io::format_double(v); }

}  // namespace

std::size_t descending_rank(const std::vector<FirmResult>& results, std::size_t i,
                            double tolerance) {
  std::size_t rank = 1;
  for (const auto& r : results) rank += exceeds(r.q_signed, results.at(i).q_signed, tolerance);
  return rank;
}

std::size_t ascending_rank(const std::vector<FirmResult>& results, std::size_t i,
                           double tolerance) {
  std::size_t rank = 1;
  for (const auto& r : results) rank += exceeds(results.at(i).q_signed, r.q_signed, tolerance);
  return rank;
}

// ---------------------------------------------------------------------------
// Boolean formula

TabularDataset boolean_truth_table() {
  const auto cube = PointDistribution::uniform_cube(3);
  Eigen::VectorXd y(cube.points.rows());
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const bool x1 = cube.points(r, 0) > 0, x2 = cube.points(r, 1) > 0;
    y(r) = (x1 || (!x1 && !x2)) ? 1.0 : -1.0;
  }
  return make_tabular(cube.points, y);
}

BooleanExperimentResult run_boolean_experiment(const BooleanExperimentConfig& config) {
  BooleanExperimentResult res;
  res.table = boolean_truth_table();
  res.scorer = train_kernel_ridge(res.table, PolynomialKernel{config.degree, config.offset},
                                  config.lambda);
  const Scorer trained = res.scorer;
  const Scorer oracle = make_label_oracle(res.table);
  const auto dist = PointDistribution::empirical(res.table.X);

  for (std::size_t j = 0; j < 3; ++j) {
    for (bool pos : {true, false}) res.singles.emplace_back(SignedConjunction{{{j, pos}}});
  }
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = j + 1; k < 3; ++k) {
      for (bool pj : {true, false})
        for (bool pk : {true, false})
          res.pairs.emplace_back(SignedConjunction{{{j, pj}, {k, pk}}});
    }
  }
  for (const auto& f : res.singles) {
    res.trained_singles.push_back(firm_binary_exact(trained, f, dist));
    res.oracle_singles.push_back(firm_binary_exact(oracle, f, dist));
  }
  for (const auto& f : res.pairs) {
    res.trained_pairs.push_back(firm_binary_exact(trained, f, dist));
    res.oracle_pairs.push_back(firm_binary_exact(oracle, f, dist));
  }

  // s(x) = Σ α_i (x_iᵀx + c)² + b expands to 2c Σ α_i x_ij on x_j and
  // 2 Σ α_i x_ij x_ik on x_j x_k.
  if (config.degree == 2) {
    const auto& P = res.scorer.points;
    const auto& a = res.scorer.alpha;
    for (Eigen::Index j = 0; j < 3; ++j) {
      res.monomial_weights.emplace_back("x" + std::to_string(j + 1),
                                        2.0 * config.offset * a.dot(P.col(j)));
    }
    for (Eigen::Index j = 0; j < 3; ++j) {
      for (Eigen::Index k = j + 1; k < 3; ++k) {
        res.monomial_weights.emplace_back(
            "x" + std::to_string(j + 1) + "x" + std::to_string(k + 1),
            2.0 * a.dot(P.col(j).cwiseProduct(P.col(k))));
      }
    }
  }
  return res;
}

void write_boolean_artifacts(io::StagedOutput& out, const BooleanExperimentResult& res) {
  std::ostringstream table;
  write_tabular(table, res.table);
  out.write("truth_table.csv", table.str());
  out.write("scorer.json", to_json(res.scorer).dump(2) + "\n");

  std::ostringstream firm;
  firm << "feature\tq_trained\tq_labels\n";
  for (std::size_t i = 0; i < res.singles.size(); ++i) {
    firm << res.trained_singles[i].feature << '\t' << fmt(res.trained_singles[i].q_signed) << '\t'
         << fmt(res.oracle_singles[i].q_signed) << '\n';
  }
  for (std::size_t i = 0; i < res.pairs.size(); ++i) {
    firm << res.trained_pairs[i].feature << '\t' << fmt(res.trained_pairs[i].q_signed) << '\t'
         << fmt(res.oracle_pairs[i].q_signed) << '\n';
  }
  out.write("firm.tsv", firm.str());

  // Heat-map grids: one row per variable (or pair), one column per polarity.
  auto weight_of = [&](const std::string& name) {
    for (const auto& [n, w] : res.monomial_weights)
      if (n == name) return fmt(w);
    return std::string("NA");
  };
  std::ostringstream single;
  single << "variable\tw\ttrained_pos\ttrained_neg\tlabels_pos\tlabels_neg\n";
  for (std::size_t j = 0; j < 3; ++j) {
    const auto name = "x" + std::to_string(j + 1);
    single << name << '\t' << weight_of(name) << '\t' << fmt(res.trained_singles[2 * j].q_signed)
           << '\t' << fmt(res.trained_singles[2 * j + 1].q_signed) << '\t'
           << fmt(res.oracle_singles[2 * j].q_signed) << '\t'
           << fmt(res.oracle_singles[2 * j + 1].q_signed) << '\n';
  }
  out.write("heatmap_single.tsv", single.str());

  std::ostringstream pairs;
  pairs << "pair\tw";
  for (const char* who : {"trained", "labels"})
    for (const char* pol : {"pp", "pn", "np", "nn"}) pairs << '\t' << who << '_' << pol;
  pairs << '\n';
  const char* names[] = {"x1x2", "x1x3", "x2x3"};
  for (std::size_t p = 0; p < 3; ++p) {
    pairs << names[p] << '\t' << weight_of(names[p]);
    for (const auto* set : {&res.trained_pairs, &res.oracle_pairs})
      for (std::size_t c = 0; c < 4; ++c) pairs << '\t' << fmt((*set)[4 * p + c].q_signed);
    pairs << '\n';
  }
  out.write("heatmap_pairs.tsv", pairs.str());

  nlohmann::json cfg = {{"formula", "x1 or (not x1 and not x2)"},
                        {"encoding", "+1 true, -1 false"},
                        {"kernel", {{"type", "polynomial"}}}};
  if (const auto* k = std::get_if<PolynomialKernel>(&res.scorer.kernel)) {
    cfg["kernel"]["degree"] = k->degree;
    cfg["kernel"]["offset"] = k->offset;
  }
  out.write("metadata.json", io::run_metadata("experiment boolean", cfg).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Gaussian classes

GaussianExperimentResult run_gaussian_experiment(const GaussianExperimentConfig& config) {
  if (config.n_per_class < 2) throw std::invalid_argument("need at least 2 samples per class");
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(2 * config.n_per_class);
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double label = i < static_cast<Eigen::Index>(config.n_per_class) ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = label * config.class_mean(j) + normal(rng);
    y(i) = label;
  }

  GaussianExperimentResult res;
  res.data = make_tabular(std::move(X), std::move(y));
  res.scorer = train_least_squares(res.data);
  const Eigen::VectorXd scores = score_all(res.scorer, res.data);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Eigen::VectorXd f = res.data.X.col(j);
    const auto& name = res.data.names[static_cast<std::size_t>(j)];
    res.slope.push_back(firm_slope(scores, f, name));
    res.slope_standard_error.push_back(firm_slope_standard_error(scores, f));
    res.curves.push_back(conditional_curve(scores, f, config.bins));
    res.binned.push_back(firm_from_curve(res.curves.back(), name));
  }
  return res;
}

void write_gaussian_artifacts(io::StagedOutput& out, const GaussianExperimentResult& res,
                              const GaussianExperimentConfig& config) {
  std::ostringstream data;
  write_tabular(data, res.data);
  out.write("data.csv", data.str());
  out.write("scorer.json", to_json(res.scorer).dump(2) + "\n");

  std::ostringstream firm;
  firm << "feature\tq_signed\tq_abs\tmethod\tstandard_error\tq_binned\n";
  for (std::size_t j = 0; j < res.slope.size(); ++j) {
    firm << res.slope[j].feature << '\t' << fmt(res.slope[j].q_signed) << '\t'
         << fmt(res.slope[j].q_abs) << '\t' << to_string(res.slope[j].method) << '\t'
         << fmt(res.slope_standard_error[j]) << '\t' << fmt(res.binned[j].q_abs) << '\n';
  }
  out.write("firm.tsv", firm.str());

  const Eigen::VectorXd scores = score_all(res.scorer, res.data);
  std::ostringstream scatter;
  scatter << "x1\tx2\tx3\tlabel\tscore\n";
  for (Eigen::Index i = 0; i < res.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) scatter << fmt(res.data.X(i, j)) << '\t';
    scatter << fmt(res.data.labels()(i)) << '\t' << fmt(scores(i)) << '\n';
  }
  out.write("scores.tsv", scatter.str());

  for (std::size_t j = 0; j < res.curves.size(); ++j) {
    std::ostringstream curve;
    write_curve_tsv(curve, res.curves[j]);
    out.write("curves/" + res.data.names[j] + ".tsv", curve.str());
  }

  nlohmann::json cfg = {{"n_per_class", config.n_per_class},
                        {"seed", config.seed},
                        {"class_mean_positive",
                         {config.class_mean(0), config.class_mean(1), config.class_mean(2)}},
                        {"class_covariance", "identity"},
                        {"bins", config.bins},
                        {"scorer", "least_squares"}};
  out.write("metadata.json", io::run_metadata("experiment gaussian", cfg).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Planted motif

SequenceDataset generate_motif_sequences(const SequenceExperimentConfig& config,
                                         std::mt19937_64& rng,
                                         std::vector<std::size_t>* planted) {
  const std::string alphabet = kDnaAlphabet;
  const std::size_t m = config.motif.size();
  if (m == 0 || m > config.length) throw std::invalid_argument("motif does not fit the sequence length");
  std::uniform_int_distribution<std::size_t> letter(0, alphabet.size() - 1);
  std::uniform_int_distribution<std::size_t> offset(0, m - 1);
  std::normal_distribution<double> where(config.center, config.sd);
  const double last = static_cast<double>(config.length - m);

  std::vector<std::string> seqs;
  Eigen::VectorXd y(static_cast<Eigen::Index>(2 * config.n_per_class));
  for (std::size_t n = 0; n < 2 * config.n_per_class; ++n) {
    std::string s(config.length, 'A');
    for (auto& c : s) c = alphabet[letter(rng)];
    const bool positive = n < config.n_per_class;
    if (positive) {
      const auto pos = static_cast<std::size_t>(std::clamp(std::round(where(rng)), 0.0, last));
      s.replace(pos, m, config.motif);
      const std::size_t hit = offset(rng);
      s[pos + hit] = alphabet[letter(rng)];
      if (planted) planted->push_back(pos);
    }
    seqs.push_back(std::move(s));
    y(static_cast<Eigen::Index>(n)) = positive ? 1.0 : -1.0;
  }
  return make_sequences(std::move(seqs), std::move(y), alphabet);
}

double raw_weight_importance(const PositionalKmerScorer& scorer, std::string_view z,
                             std::size_t position) {
  double best = 0.0;
  for (std::size_t o = 0; o < z.size(); ++o) {
    for (std::size_t k = 1; k <= scorer.max_degree && o + k <= z.size(); ++k) {
      best = std::max(best, std::abs(scorer.weight(position + o, z.substr(o, k))));
    }
  }
  return best;
}

PositionalSeries positional_series(
    const PoimTable& table, std::string_view motif,
    const std::function<double(std::string_view, std::size_t)>& value) {
  if (motif.size() != table.k) throw std::invalid_argument("motif length must equal the table order");
  std::vector<std::string> edit1, edit2, irrelevant;
  for (std::size_t code = 0; code < table.oligomers(); ++code) {
    auto z = table.decode(code);
    std::size_t dist = 0;
    for (std::size_t m = 0; m < z.size(); ++m) dist += z[m] != motif[m];
    if (dist == 1) edit1.push_back(z);
    if (dist == 2) edit2.push_back(z);
    if (dist == z.size()) irrelevant.push_back(std::move(z));
  }
  PositionalSeries s;
  auto values_of = [&](const std::vector<std::string>& set, std::size_t j) {
    std::vector<double> v;
    v.reserve(set.size());
    for (const auto& z : set) v.push_back(value(z, j));
    return v;
  };
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  for (std::size_t j = 0; j < table.positions(); ++j) {
    s.exact.push_back(value(motif, j));
    s.edit1_mean.push_back(mean(values_of(edit1, j)));
    s.edit2_mean.push_back(mean(values_of(edit2, j)));
    const auto irr = values_of(irrelevant, j);
    const double mu = mean(irr);
    double ss = 0.0;
    for (double v : irr) ss += (v - mu) * (v - mu);
    s.irrelevant_mean.push_back(mu);
    s.irrelevant_sd.push_back(irr.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(irr.size())));
  }
  return s;
}

SequenceExperimentResult run_sequence_experiment(const SequenceExperimentConfig& config) {
  SequenceExperimentResult res;
  std::mt19937_64 rng(config.seed);
  res.data = generate_motif_sequences(config, rng, &res.planted_positions);
  res.scorer = train_positional_kmer(res.data, config.max_degree, config.lambda);
  const auto bg = MarkovBackground::uniform(res.data.alphabet);
  res.table = poim(res.scorer, bg, config.motif.size(), config.budget);
  res.firm = positional_series(res.table, config.motif, [&](std::string_view z, std::size_t j) {
    return res.table.firm_value(z, j);
  });
  res.weights = positional_series(res.table, config.motif, [&](std::string_view z, std::size_t j) {
    return raw_weight_importance(res.scorer, z, j);
  });
  return res;
}

namespace {

std::string series_tsv(const PositionalSeries& s) {
  std::ostringstream out;
  out << "j\texact\tedit1_mean\tedit2_mean\tirrelevant_mean\tirrelevant_sd\n";
  for (std::size_t j = 0; j < s.exact.size(); ++j) {
    out << j << '\t' << fmt(s.exact[j]) << '\t' << fmt(s.edit1_mean[j]) << '\t'
        << fmt(s.edit2_mean[j]) << '\t' << fmt(s.irrelevant_mean[j]) << '\t'
        << fmt(s.irrelevant_sd[j]) << '\n';
  }
  return out.str();
}

}  // namespace

void write_sequence_artifacts(io::StagedOutput& out, const SequenceExperimentResult& res,
                              const SequenceExperimentConfig& config) {
  std::ostringstream seqs;
  write_sequences(seqs, res.data);
  out.write("sequences.tsv", seqs.str());
  out.write("scorer.json", to_json(res.scorer).dump() + "\n");
  out.write("series_firm.tsv", series_tsv(res.firm));
  out.write("series_weights.tsv", series_tsv(res.weights));

  std::ostringstream summary;
  write_poim_summary_tsv(summary, res.table);
  out.write("poim_summary.tsv", summary.str());

  std::ostringstream top;
  top << "rank\tz\tj\tq\n";
  std::size_t rank = 1;
  for (const auto& r : ranked_oligomers(res.table, 50)) {
    top << rank++ << '\t' << r.oligomer << '\t' << r.position << '\t' << fmt(r.q) << '\n';
  }
  out.write("top_oligomers.tsv", top.str());

  nlohmann::json cfg = {{"n_per_class", config.n_per_class},
                        {"length", config.length},
                        {"max_degree", config.max_degree},
                        {"center", config.center},
                        {"sd", config.sd},
                        {"lambda", config.lambda},
                        {"motif", config.motif},
                        {"seed", config.seed},
                        {"poim_k", res.table.k},
                        {"background", "uniform order 0"},
                        {"positions", "0-based start positions"}};
  out.write("metadata.json", io::run_metadata("experiment sequence", cfg).dump(2) + "\n");
}

}  // namespace firm
