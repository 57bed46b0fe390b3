// firm: feature importance ranking from the command line.
//
//   firm analyze --input data.csv --method gaussian --scorer ridge --lambda 0.1 --out run/
//   firm experiment boolean|gaussian|sequence --out run/
//   firm covariance --input data.csv --method shrunk --out run/

#include "firm/dataset.hpp"
#include "firm/experiments.hpp"
#include "firm/features.hpp"
#include "firm/firm_binary.hpp"
#include "firm/firm_empirical.hpp"
#include "firm/firm_gaussian.hpp"
#include "firm/firm_sequence.hpp"
#include "firm/io.hpp"
#include "firm/scoring.hpp"
#include "firm/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace {

using namespace firm;
using nlohmann::json;

const std::vector<std::string> kMethods = {"binary", "gaussian", "empirical",
                                           "slope",  "poim",     "sensitivity"};

struct AnalyzeOptions {
  std::string input;
  bool unlabeled = false;
  std::string method = "slope";
  std::string scorer = "least_squares";
  std::string kernel = "gaussian";
  double gamma = 1.0;
  int degree = 2;
  double offset = 1.0;
  double lambda = 1e-2;
  std::size_t bins = 0;
  std::size_t k = 0;
  std::size_t top = 0;
  std::string covariance = "auto";
  bool standardize = false;
  std::vector<std::string> features;
  std::string alphabet = kDnaAlphabet;
  std::uint64_t budget = kDefaultPoimBudget;
  std::string out;
};

struct CovarianceOptions {
  std::string input;
  bool unlabeled = false;
  std::string method = "shrunk";
  std::string out;
};

struct ExperimentOptions {
  std::size_t n_per_class = 0;
  std::size_t seq_len = 50;
  std::size_t degree = 3;
  double lambda = -1.0;
  std::uint64_t seed = 1;
  std::size_t bins = 32;
  std::string out;
};

bool is_trained(const std::string& scorer) {
  return scorer == "least_squares" || scorer == "ridge" || scorer == "kernel_ridge" ||
         scorer == "kmer";
}

bool is_json_path(const std::string& scorer) {
  return scorer.size() > 5 && scorer.substr(scorer.size() - 5) == ".json";
}

// Rejects combinations that cannot work before any data is read.
void check_compatibility(const AnalyzeOptions& o) {
  if (std::find(kMethods.begin(), kMethods.end(), o.method) == kMethods.end()) {
    throw std::invalid_argument("unknown method '" + o.method + "'");
  }
  if (!is_trained(o.scorer) && o.scorer != "labels" && !is_json_path(o.scorer)) {
    throw std::invalid_argument("unknown scorer '" + o.scorer +
                                "' (least_squares, ridge, kernel_ridge, kmer, labels or a .json file)");
  }
  const bool sequence = o.method == "poim";
  if (sequence && (o.scorer != "kmer" && !is_json_path(o.scorer))) {
    throw std::invalid_argument("method poim requires a positional k-mer scorer");
  }
  if (!sequence && o.scorer == "kmer") {
    throw std::invalid_argument("scorer kmer requires method poim");
  }
  if ((o.method == "gaussian" || o.method == "sensitivity") && o.scorer == "labels") {
    throw std::invalid_argument("method " + o.method + " requires a differentiable scorer");
  }
  if (o.unlabeled && (is_trained(o.scorer) || o.scorer == "labels")) {
    throw std::invalid_argument("scorer " + o.scorer + " needs labelled input");
  }
  if (o.method != "gaussian" && o.covariance != "auto") {
    throw std::invalid_argument("--covariance only applies to method gaussian");
  }
  if (o.kernel != "gaussian" && o.kernel != "polynomial") {
    throw std::invalid_argument("unknown kernel '" + o.kernel + "'");
  }
  if (sequence && !o.features.empty()) {
    throw std::invalid_argument("--features does not apply to method poim");
  }
}

Scorer load_scorer_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return scorer_from_json(doc);
}

Scorer tabular_scorer(const AnalyzeOptions& o, const TabularDataset& data) {
  if (o.scorer == "least_squares") return train_least_squares(data);
  if (o.scorer == "ridge") return train_ridge(data, o.lambda);
  if (o.scorer == "labels") return make_label_oracle(data);
  if (o.scorer == "kernel_ridge") {
    KernelSpec kernel = o.kernel == "gaussian" ? KernelSpec{GaussianKernel{o.gamma}}
                                               : KernelSpec{PolynomialKernel{o.degree, o.offset}};
    return train_kernel_ridge(data, kernel, o.lambda);
  }
  Scorer s = load_scorer_json(o.scorer);
  if (std::holds_alternative<PositionalKmerScorer>(s)) {
    throw std::invalid_argument("a sequence scorer cannot score tabular input");
  }
  if (input_dimension(s) != data.cols()) {
    throw std::invalid_argument("scorer expects " + std::to_string(input_dimension(s)) +
                                " inputs but the data have " + std::to_string(data.cols()) +
                                " columns");
  }
  return s;
}

std::string curve_file_name(const std::string& feature) {
  std::string out;
  for (char c : feature) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
      out += c;
    } else if (c == '+') {
      out += 'p';
    } else if (c == '-') {
      out += 'm';
    } else if (c == '@') {
      out += "_at_";
    } else {
      out += '_';
    }
  }
  return out;
}

json to_json(const FirmResult& r) {
  json j = {{"feature", r.feature},
            {"q_signed", r.q_signed},
            {"q_abs", r.q_abs},
            {"method", std::string(to_string(r.method))}};
  if (r.extras) {
    j["q_a"] = r.extras->q_a;
    j["q_b"] = r.extras->q_b;
    j["p_a"] = r.extras->p_a;
    j["p_b"] = r.extras->p_b;
  }
  if (r.q_standardized) j["q_standardized"] = *r.q_standardized;
  return j;
}

// Orders by descending |Q| (stable) and keeps the first `top` rows.
void rank_and_trim(std::vector<FirmResult>& results, std::size_t top) {
  std::stable_sort(results.begin(), results.end(),
                   [](const FirmResult& a, const FirmResult& b) { return a.q_abs > b.q_abs; });
  if (top > 0 && results.size() > top) results.resize(top);
}

void write_results(io::StagedOutput& out, const std::vector<FirmResult>& results,
                   std::optional<double> score_sd) {
  const bool standardized = std::any_of(results.begin(), results.end(),
                                        [](const FirmResult& r) { return r.q_standardized; });
  std::ostringstream tsv;
  tsv << "feature\tq_signed\tq_abs\tmethod" << (standardized ? "\tq_standardized" : "") << '\n';
  for (const auto& r : results) {
    tsv << r.feature << '\t' << io::format_double(r.q_signed) << '\t'
        << io::format_double(r.q_abs) << '\t' << to_string(r.method);
    if (standardized) tsv << '\t' << io::format_double(r.q_standardized.value_or(0.0));
    tsv << '\n';
  }
  out.write("firm.tsv", tsv.str());

  json doc = {{"results", json::array()}};
  for (const auto& r : results) doc["results"].push_back(to_json(r));
  if (score_sd) doc["score_sd"] = *score_sd;
  out.write("firm.json", doc.dump(2) + "\n");
}

std::vector<FeatureFunction> requested_features(const AnalyzeOptions& o,
                                                const TabularDataset& data) {
  if (o.features.empty()) return all_projections(data.cols());
  std::vector<FeatureFunction> fs;
  for (const auto& text : o.features) {
    auto f = parse_feature(text);
    if (is_sequence_feature(f)) throw std::invalid_argument("feature " + text + " needs sequence input");
    validate_feature(f, data.cols());
    fs.push_back(std::move(f));
  }
  return fs;
}

// Tabular features keep the column header as their name when they are plain
// projections.
std::string display_name(const FeatureFunction& f, const TabularDataset& data) {
  if (const auto* p = std::get_if<Projection>(&f)) return data.names.at(p->index);
  return feature_name(f);
}

CovarianceEstimate covariance_for(const std::string& choice, const TabularDataset& data) {
  if (choice == "auto") return fit_gaussian_model(data, CovarianceChoice::automatic).sigma;
  if (choice == "empirical") return empirical_covariance(data, true);
  if (choice == "shrunk") return shrinkage_covariance(data);
  if (choice == "diagonal") {
    auto est = empirical_covariance(data, true);
    est.sigma = Eigen::MatrixXd(est.sigma.diagonal().asDiagonal());
    return est;
  }
  auto est = supplied_covariance(io::load_matrix_tsv(choice));
  if (est.sigma.rows() != data.cols()) {
    throw std::invalid_argument("covariance file " + choice + " is " +
                                std::to_string(est.sigma.rows()) + "x" +
                                std::to_string(est.sigma.cols()) + " but the data have " +
                                std::to_string(data.cols()) + " columns");
  }
  return est;
}

void require_projections(const std::vector<FeatureFunction>& fs, const std::string& method) {
  for (const auto& f : fs) {
    if (!std::holds_alternative<Projection>(f)) {
      throw std::invalid_argument("method " + method + " supports only single-column features");
    }
  }
}

json analyze_config(const AnalyzeOptions& o) {
  json c = {{"input", o.input},         {"method", o.method},   {"scorer", o.scorer},
            {"lambda", o.lambda},       {"bins", o.bins},       {"top", o.top},
            {"covariance", o.covariance}, {"standardize", o.standardize},
            {"features", o.features},   {"unlabeled", o.unlabeled}};
  if (o.scorer == "kernel_ridge") {
    c["kernel"] = o.kernel;
    if (o.kernel == "gaussian") {
      c["gamma"] = o.gamma;
    } else {
      c["degree"] = o.degree;
      c["offset"] = o.offset;
    }
  }
  if (o.method == "poim") {
    c["k"] = o.k;
    c["degree"] = o.degree;
    c["alphabet"] = o.alphabet;
  }
  return c;
}

void analyze_sequences(const AnalyzeOptions& o, io::StagedOutput& out) {
  const auto data = load_sequences(o.input, o.alphabet);
  PositionalKmerScorer scorer;
  if (o.scorer == "kmer") {
    if (o.degree < 1) throw std::invalid_argument("--degree must be >= 1 for the k-mer scorer");
    scorer = train_positional_kmer(data, static_cast<std::size_t>(o.degree), o.lambda);
  } else {
    auto s = load_scorer_json(o.scorer);
    if (!std::holds_alternative<PositionalKmerScorer>(s)) {
      throw std::invalid_argument("method poim requires a positional k-mer scorer");
    }
    scorer = std::get<PositionalKmerScorer>(std::move(s));
  }
  const std::size_t k = o.k > 0 ? o.k : scorer.max_degree;
  const auto table = poim(scorer, MarkovBackground::fitted(data), k, o.budget);

  const std::size_t top = o.top > 0 ? o.top : 20;
  std::vector<FirmResult> results;
  std::optional<double> sd;
  if (o.standardize) {
    sd = score_sd(Scorer{scorer}, data);
    if (!(*sd > 0.0)) throw std::invalid_argument("zero score variance; cannot standardize");
  }
  for (const auto& r : ranked_oligomers(table, top)) {
    FirmResult res = make_result(feature_name(PositionalOligomer{r.oligomer, r.position}), r.q,
                                 FirmMethod::poim);
    if (sd) res.q_standardized = r.q / *sd;
    results.push_back(std::move(res));
  }
  write_results(out, results, sd);

  std::ostringstream full, summary;
  write_poim_tsv(full, table);
  write_poim_summary_tsv(summary, table);
  out.write("poim.tsv", full.str());
  out.write("poim_summary.tsv", summary.str());
  out.write("scorer.json", firm::to_json(Scorer{scorer}).dump() + "\n");
}

void analyze_tabular(const AnalyzeOptions& o, io::StagedOutput& out) {
  const auto data = load_tabular(o.input, !o.unlabeled);
  const auto features = requested_features(o, data);
  const Scorer scorer = tabular_scorer(o, data);
  const Eigen::VectorXd scores = score_all(scorer, data);

  std::vector<FirmResult> results;
  if (o.method == "binary") {
    const auto dist = PointDistribution::empirical(data.X);
    for (const auto& f : features) {
      auto fv = evaluate_all(f, data.X);
      results.push_back(firm_binary_from_values(display_name(f, data), scores, fv, dist.prob));
    }
  } else if (o.method == "gaussian" || o.method == "sensitivity") {
    require_projections(features, o.method);
    if (!is_differentiable(scorer)) {
      throw std::invalid_argument("method " + o.method + " requires a differentiable scorer");
    }
    std::vector<FirmResult> all;
    if (o.method == "gaussian") {
      const auto model = make_gaussian_model(covariance_for(o.covariance, data), data.column_means);
      if (const auto* lin = std::get_if<LinearScorer>(&scorer)) {
        all = firm_gaussian_linear(lin->w, lin->b, model);
      } else {
        all = firm_gaussian_general(scorer, model);
      }
    } else {
      all = sensitivity_results(scorer, data);
    }
    for (const auto& f : features) {
      const auto j = std::get<Projection>(f).index;
      FirmResult r = all.at(j);
      r.feature = data.names.at(j);
      results.push_back(std::move(r));
    }
  } else if (o.method == "empirical") {
    const std::size_t bins = o.bins > 0 ? o.bins : default_bin_count(static_cast<std::size_t>(data.rows()));
    for (const auto& f : features) {
      const auto name = display_name(f, data);
      const auto curve = conditional_curve(scores, evaluate_all(f, data.X), bins);
      std::ostringstream tsv;
      write_curve_tsv(tsv, curve);
      out.write("curves/" + curve_file_name(name) + ".tsv", tsv.str());
      results.push_back(firm_from_curve(curve, name));
    }
  } else if (o.method == "slope") {
    for (const auto& f : features) {
      results.push_back(firm_slope(scores, evaluate_all(f, data.X), display_name(f, data)));
    }
  }

  std::optional<double> sd;
  if (o.standardize) {
    sd = score_sd(scorer, data);
    if (!(*sd > 1e-14 * std::max(1.0, scores.cwiseAbs().maxCoeff()))) {
      throw std::invalid_argument("zero score variance; cannot standardize");
    }
    for (auto& r : results) r.q_standardized = r.q_signed / *sd;
  }
  rank_and_trim(results, o.top);
  write_results(out, results, sd);
  out.write("scorer.json", firm::to_json(scorer).dump(2) + "\n");
}

void run_analyze(const AnalyzeOptions& o) {
  check_compatibility(o);
  io::StagedOutput out(o.out);
  if (o.method == "poim") {
    analyze_sequences(o, out);
  } else {
    analyze_tabular(o, out);
  }
  out.write("metadata.json", io::run_metadata("analyze", analyze_config(o)).dump(2) + "\n");
  out.commit();
}

void run_covariance(const CovarianceOptions& o) {
  CovarianceEstimate est;
  if (o.method == "file") {
    est = supplied_covariance(io::load_matrix_tsv(o.input));
  } else if (o.method == "empirical" || o.method == "shrunk") {
    const auto data = load_tabular(o.input, !o.unlabeled);
    est = o.method == "shrunk" ? shrinkage_covariance(data) : empirical_covariance(data, true);
  } else {
    throw std::invalid_argument("unknown covariance method '" + o.method + "'");
  }
  io::StagedOutput out(o.out);
  std::ostringstream tsv;
  io::write_matrix_tsv(tsv, est.sigma);
  out.write("covariance.tsv", tsv.str());

  json doc = {{"method", to_string(est.method)}, {"dim", est.sigma.rows()}};
  doc["shrinkage_lambda"] = est.shrinkage_lambda ? json(*est.shrinkage_lambda) : json(nullptr);
  doc["matrix"] = json::array();
  for (Eigen::Index i = 0; i < est.sigma.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < est.sigma.cols(); ++j) r.push_back(est.sigma(i, j));
    doc["matrix"].push_back(std::move(r));
  }
  out.write("covariance.json", doc.dump(2) + "\n");
  out.write("metadata.json",
            io::run_metadata("covariance", {{"input", o.input}, {"method", o.method}}).dump(2) +
                "\n");
  out.commit();
}

void run_experiment(const std::string& which, const ExperimentOptions& o) {
  io::StagedOutput out(o.out);
  if (which == "boolean") {
    BooleanExperimentConfig cfg;
    if (o.lambda >= 0.0) cfg.lambda = o.lambda;
    write_boolean_artifacts(out, run_boolean_experiment(cfg));
  } else if (which == "gaussian") {
    GaussianExperimentConfig cfg;
    if (o.n_per_class > 0) cfg.n_per_class = o.n_per_class;
    cfg.seed = o.seed;
    cfg.bins = o.bins;
    write_gaussian_artifacts(out, run_gaussian_experiment(cfg), cfg);
  } else {
    SequenceExperimentConfig cfg;
    if (o.n_per_class > 0) cfg.n_per_class = o.n_per_class;
    if (o.lambda >= 0.0) cfg.lambda = o.lambda;
    cfg.length = o.seq_len;
    cfg.max_degree = o.degree;
    cfg.seed = o.seed;
    write_sequence_artifacts(out, run_sequence_experiment(cfg), cfg);
  }
  out.commit();
}

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature importance ranking measure (FIRM)"};
  app.set_version_flag("--version", std::string(firm::kVersion));
  app.require_subcommand(1);

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "Importance of features of a dataset under a scorer");
  analyze->add_option("--input", ao.input, "CSV table (label last) or, for poim, seq<TAB>label lines")
      ->required();
  analyze->add_flag("--unlabeled", ao.unlabeled, "The table has no label column");
  analyze->add_option("--method", ao.method, "binary|gaussian|empirical|slope|poim|sensitivity")
      ->capture_default_str();
  analyze->add_option("--scorer", ao.scorer,
                      "least_squares|ridge|kernel_ridge|kmer|labels or a scorer .json file")
      ->capture_default_str();
  analyze->add_option("--kernel", ao.kernel, "gaussian|polynomial (kernel_ridge)")->capture_default_str();
  analyze->add_option("--gamma", ao.gamma, "Gaussian kernel width")->capture_default_str();
  analyze->add_option("--degree", ao.degree, "Polynomial degree, or K for the k-mer scorer")
      ->capture_default_str();
  analyze->add_option("--offset", ao.offset, "Polynomial kernel offset")->capture_default_str();
  analyze->add_option("--lambda", ao.lambda, "Ridge penalty")->capture_default_str();
  analyze->add_option("--bins", ao.bins, "Quantile bins for empirical (0: max(5, sqrt n), <= 64)");
  analyze->add_option("--k", ao.k, "Oligomer length for poim (0: scorer degree)");
  analyze->add_option("--top", ao.top, "Keep the top rows only (0: all; poim default 20)");
  analyze->add_option("--covariance", ao.covariance,
                      "auto|empirical|shrunk|diagonal or a TSV matrix file (gaussian)")
      ->capture_default_str();
  analyze->add_flag("--standardize", ao.standardize, "Also report Q divided by the score sd");
  analyze->add_option("--features", ao.features, "Feature strings, e.g. x3 'and(+1,-2)' 'kmer(GAT@4)'");
  analyze->add_option("--alphabet", ao.alphabet, "Sequence alphabet (poim)")->capture_default_str();
  analyze->add_option("--budget", ao.budget, "Maximum POIM table cells")->capture_default_str();
  analyze->add_option("--out", ao.out, "Output directory")->required();

  CovarianceOptions co;
  auto* cov = app.add_subcommand("covariance", "Estimate or check a covariance matrix");
  cov->add_option("--input", co.input, "CSV table, or TSV matrix for --method file")->required();
  cov->add_flag("--unlabeled", co.unlabeled, "The table has no label column");
  cov->add_option("--method", co.method, "empirical|shrunk|file")->capture_default_str();
  cov->add_option("--out", co.out, "Output directory")->required();

  ExperimentOptions eo;
  std::string which;
  auto* exp = app.add_subcommand("experiment", "Run one of the simulation studies");
  exp->add_option("name", which, "boolean|gaussian|sequence")
      ->required()
      ->check(CLI::IsMember({"boolean", "gaussian", "sequence"}));
  exp->add_option("--n-per-class", eo.n_per_class, "Samples per class (gaussian 2000, sequence 500)");
  exp->add_option("--seq-len", eo.seq_len, "Sequence length")->capture_default_str();
  exp->add_option("--degree", eo.degree, "K of the k-mer scorer")->capture_default_str();
  exp->add_option("--lambda", eo.lambda, "Ridge penalty (boolean 1e-3, sequence 1e-2)");
  exp->add_option("--seed", eo.seed, "Random seed")->capture_default_str();
  exp->add_option("--bins", eo.bins, "Bins of the gaussian conditional curves")->capture_default_str();
  exp->add_option("--out", eo.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (*analyze) run_analyze(ao);
    if (*cov) run_covariance(co);
    if (*exp) run_experiment(which, eo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
