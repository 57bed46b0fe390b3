#include "firm/features.hpp"
#include "firm/io.hpp"
#include "firm/detail/overloaded.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

namespace firm {

using detail::overloaded;

bool is_sequence_feature(const FeatureFunction& f) {
  return std::holds_alternative<PositionalOligomer>(f);
}

namespace {

void check_index(std::size_t index, Eigen::Index dim) {
  if (static_cast<Eigen::Index>(index) >= dim) {
    throw std::invalid_argument("feature index " + std::to_string(index + 1) +
                                " out of range for " + std::to_string(dim) + " columns");
  }
}

}  // namespace

void validate_feature(const FeatureFunction& f, Eigen::Index dim) {
  std::visit(overloaded{
                 [&](const Projection& p) { check_index(p.index, dim); },
                 [&](const SignedConjunction& c) {
                   if (c.literals.empty()) throw std::invalid_argument("conjunction has no literals");
                   std::set<std::size_t> seen;
                   for (const auto& l : c.literals) {
                     check_index(l.index, dim);
                     if (!seen.insert(l.index).second) {
                       throw std::invalid_argument("conjunction repeats index " +
                                                   std::to_string(l.index + 1));
                     }
                   }
                 },
                 [&](const Xor& x) {
                   check_index(x.first, dim);
                   check_index(x.second, dim);
                   if (x.first == x.second) throw std::invalid_argument("xor needs distinct indices");
                 },
                 [&](const Threshold& t) { check_index(t.index, dim); },
                 [&](const PositionalOligomer&) {
                   throw std::invalid_argument("oligomer feature applies to sequences only");
                 },
             },
             f);
}

void validate_feature(const FeatureFunction& f, std::size_t length, std::string_view alphabet) {
  const auto* o = std::get_if<PositionalOligomer>(&f);
  if (!o) throw std::invalid_argument("feature " + feature_name(f) + " applies to tabular data only");
  if (o->oligomer.empty() || o->position + o->oligomer.size() > length) {
    throw std::invalid_argument("oligomer " + feature_name(f) + " does not fit length " +
                                std::to_string(length));
  }
  for (char c : o->oligomer) {
    if (alphabet.find(c) == std::string_view::npos) {
      throw std::invalid_argument(std::string("symbol ") + c + " not in alphabet");
    }
  }
}

double evaluate(const FeatureFunction& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  validate_feature(f, x.size());
  return std::visit(overloaded{
                        [&](const Projection& p) { return x(p.index); },
                        [&](const SignedConjunction& c) {
                          for (const auto& l : c.literals) {
                            if (x(l.index) != (l.positive ? 1.0 : -1.0)) return 0.0;
                          }
                          return 1.0;
                        },
                        [&](const Xor& e) { return x(e.first) != x(e.second) ? 1.0 : 0.0; },
                        [&](const Threshold& t) { return x(t.index) > t.tau ? 1.0 : 0.0; },
                        [&](const PositionalOligomer&) -> double {
                          throw std::invalid_argument("oligomer feature applies to sequences only");
                        },
                    },
                    f);
}

double evaluate(const FeatureFunction& f, std::string_view x) {
  const auto* o = std::get_if<PositionalOligomer>(&f);
  if (!o) throw std::invalid_argument("feature " + feature_name(f) + " applies to tabular data only");
  if (o->position + o->oligomer.size() > x.size()) {
    throw std::invalid_argument("oligomer " + feature_name(f) + " does not fit the sequence");
  }
  return x.substr(o->position, o->oligomer.size()) == o->oligomer ? 1.0 : 0.0;
}

Eigen::VectorXd evaluate_all(const FeatureFunction& f, const Eigen::MatrixXd& X) {
  validate_feature(f, X.cols());
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = evaluate(f, X.row(i).transpose());
  return out;
}

Eigen::VectorXd evaluate_all(const FeatureFunction& f, const TabularDataset& data) {
  return evaluate_all(f, data.X);
}

Eigen::VectorXd evaluate_all(const FeatureFunction& f, const SequenceDataset& data) {
  validate_feature(f, data.length(), data.alphabet);
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
  for (std::size_t n = 0; n < data.size(); ++n) out(n) = evaluate(f, data.sequences[n]);
  return out;
}

std::optional<BinarySupport> binary_support(const Eigen::VectorXd& fvals,
                                            const Eigen::VectorXd& probs) {
  const bool uniform = probs.size() == 0;
  if (!uniform && probs.size() != fvals.size()) {
    throw std::invalid_argument("probabilities do not match feature values");
  }
  std::map<double, double> mass;
  const double u = fvals.size() ? 1.0 / static_cast<double>(fvals.size()) : 0.0;
  for (Eigen::Index i = 0; i < fvals.size(); ++i) {
    const double p = uniform ? u : probs(i);
    if (p > 0.0) mass[fvals(i)] += p;
    if (mass.size() > 2) return std::nullopt;
  }
  if (mass.empty()) throw std::invalid_argument("feature has no support");
  BinarySupport s;
  s.low = mass.begin()->first;
  s.high = mass.rbegin()->first;
  if (mass.size() == 1) {
    s.p_low = 1.0;
    s.p_high = 0.0;
    return s;
  }
  const double total = mass.begin()->second + mass.rbegin()->second;
  s.p_low = mass.begin()->second / total;
  s.p_high = mass.rbegin()->second / total;
  return s;
}

std::optional<BinarySupport> is_binary(const FeatureFunction& f, const TabularDataset& data) {
  return binary_support(evaluate_all(f, data));
}

std::optional<BinarySupport> is_binary(const FeatureFunction& f, const SequenceDataset& data) {
  return binary_support(evaluate_all(f, data));
}

namespace {

std::string strip(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::size_t parse_index(std::string_view s, std::string_view whole) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw std::invalid_argument("bad index '" + std::string(s) + "' in feature '" +
                                std::string(whole) + "'");
  }
  const auto v = std::stoul(std::string(s));
  if (v == 0) throw std::invalid_argument("feature indices are 1-based: '" + std::string(whole) + "'");
  return v - 1;
}

std::vector<std::string_view> arguments(std::string_view text, std::string_view head) {
  if (text.size() < head.size() + 2 || text.back() != ')') {
    throw std::invalid_argument("malformed feature '" + std::string(text) + "'");
  }
  return io::split(text.substr(head.size() + 1, text.size() - head.size() - 2), ',');
}

}  // namespace

FeatureFunction parse_feature(std::string_view raw) {
  const std::string text = strip(raw);
  std::string_view t = text;
  if (t.size() >= 2 && t[0] == 'x' && std::isdigit(static_cast<unsigned char>(t[1]))) {
    return Projection{parse_index(t.substr(1), t)};
  }
  if (t.rfind("and(", 0) == 0) {
    SignedConjunction c;
    for (auto a : arguments(t, "and")) {
      bool positive = true;
      if (!a.empty() && (a.front() == '+' || a.front() == '-')) {
        positive = a.front() == '+';
        a.remove_prefix(1);
      }
      c.literals.push_back({parse_index(a, t), positive});
    }
    return c;
  }
  if (t.rfind("xor(", 0) == 0) {
    auto args = arguments(t, "xor");
    if (args.size() != 2) throw std::invalid_argument("xor takes two indices: '" + text + "'");
    return Xor{parse_index(args[0], t), parse_index(args[1], t)};
  }
  if (t.rfind("thr(", 0) == 0) {
    auto args = arguments(t, "thr");
    if (args.size() != 2) throw std::invalid_argument("thr takes an index and a threshold: '" + text + "'");
    return Threshold{parse_index(args[0], t), io::parse_double(args[1])};
  }
  if (t.rfind("kmer(", 0) == 0) {
    auto args = arguments(t, "kmer");
    auto at = args.size() == 1 ? args[0].find('@') : std::string_view::npos;
    if (at == std::string_view::npos || at == 0) {
      throw std::invalid_argument("kmer takes <oligomer>@<position>: '" + text + "'");
    }
    return PositionalOligomer{std::string(args[0].substr(0, at)),
                              parse_index(args[0].substr(at + 1), t)};
  }
  throw std::invalid_argument("unknown feature '" + text + "'");
}

std::string feature_name(const FeatureFunction& f) {
  return std::visit(overloaded{
                        [](const Projection& p) { return "x" + std::to_string(p.index + 1); },
                        [](const SignedConjunction& c) {
                          std::string s = "and(";
                          for (std::size_t i = 0; i < c.literals.size(); ++i) {
                            if (i) s += ',';
                            s += c.literals[i].positive ? '+' : '-';
                            s += std::to_string(c.literals[i].index + 1);
                          }
                          return s + ")";
                        },
                        [](const Xor& x) {
                          return "xor(" + std::to_string(x.first + 1) + "," +
                                 std::to_string(x.second + 1) + ")";
                        },
                        [](const Threshold& t) {
                          return "thr(" + std::to_string(t.index + 1) + "," +
                                 io::format_double(t.tau) + ")";
                        },
                        [](const PositionalOligomer& o) {
                          return "kmer(" + o.oligomer + "@" + std::to_string(o.position + 1) + ")";
                        },
                    },
                    f);
}

std::vector<FeatureFunction> all_projections(Eigen::Index dim) {
  std::vector<FeatureFunction> out;
  for (Eigen::Index j = 0; j < dim; ++j) out.emplace_back(Projection{static_cast<std::size_t>(j)});
  return out;
}

}  // namespace firm
