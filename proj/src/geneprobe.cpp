#include "sambandit/geneprobe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace sambandit {

namespace {

constexpr double kTailFloor = 1e-300;

double beta_cont_frac(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0))
    throw ConfigError("regularized_incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_frac(a, b, x) / a;
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double student_t_tail(double t, double dof) {
  if (!(dof > 0.0)) throw ConfigError("student_t_tail: dof must be positive");
  const double t2 = t * t;
  if (!std::isfinite(t2)) return kTailFloor;
  const double x = dof / (dof + t2);
  const double p = regularized_incomplete_beta(0.5 * dof, 0.5, x);
  return std::clamp(p, kTailFloor, 1.0);
}

WelchResult welch_t(const std::vector<double>& x1, const std::vector<double>& x2) {
  const auto n1 = static_cast<double>(x1.size());
  const auto n2 = static_cast<double>(x2.size());
  if (x1.size() < 2 || x2.size() < 2)
    throw ConfigError("welch_t: each sample needs at least 2 entries");
  for (double v : x1)
    if (!std::isfinite(v)) throw NumericError("welch_t: non-finite entry in sample 1");
  for (double v : x2)
    if (!std::isfinite(v)) throw NumericError("welch_t: non-finite entry in sample 2");

  const double mean1 = std::accumulate(x1.begin(), x1.end(), 0.0) / n1;
  const double mean2 = std::accumulate(x2.begin(), x2.end(), 0.0) / n2;
  double v1 = 0.0, v2 = 0.0;
  for (double v : x1) v1 += (v - mean1) * (v - mean1);
  for (double v : x2) v2 += (v - mean2) * (v - mean2);
  v1 /= (n1 - 1.0);
  v2 /= (n2 - 1.0);

  const double se1 = v1 / n1;
  const double se2 = v2 / n2;
  const double se = se1 + se2;

  WelchResult result;
  if (se == 0.0) {
    result.dof = n1 + n2 - 2.0;
    if (mean1 == mean2) {
      result.t_stat = 0.0;
      result.p_value = 1.0;
    } else {
      result.t_stat = mean1 > mean2 ? 1e15 : -1e15;
      result.p_value = kTailFloor;
    }
    return result;
  }

  result.t_stat = (mean1 - mean2) / std::sqrt(se);
  const double denom = se1 * se1 / (n1 - 1.0) + se2 * se2 / (n2 - 1.0);
  result.dof = se * se / denom;
  result.p_value = student_t_tail(result.t_stat, result.dof);
  return result;
}

double logit_reward(double p_value) {
  const double p = std::clamp(p_value, 1e-12, 1.0 - 1e-12);
  return std::log((1.0 - p) / p);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError("expression file: non-numeric cell at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  if (!std::isfinite(value))
    throw ParseError("expression file: non-finite value at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  return value;
}

}  // namespace

ExpressionDataset load_expression(const std::string& path, bool log1p_transform) {
  std::ifstream in(path);
  if (!in) throw ParseError("expression file: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("expression file: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_tabs(line);
  if (header.size() < 2)
    throw ParseError("expression file: header needs at least one sample column");

  std::vector<std::string> labels;
  std::vector<int> column_class(header.size() - 1, 0);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& label = header[c];
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      labels.push_back(label);
      it = std::prev(labels.end());
    }
    column_class[c - 1] = static_cast<int>(it - labels.begin());
  }
  if (labels.size() != 2)
    throw ParseError("expression file: header must carry exactly two class labels, got " +
                     std::to_string(labels.size()));

  std::vector<int> class1_cols, class2_cols;
  for (std::size_t c = 0; c < column_class.size(); ++c)
    (column_class[c] == 0 ? class1_cols : class2_cols).push_back(static_cast<int>(c));
  if (class1_cols.size() < 2 || class2_cols.size() < 2)
    throw ParseError("expression file: each class needs at least 2 replicate columns");

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_tabs(line);
    if (cells.size() != header.size())
      throw ParseError("expression file: row " + std::to_string(row_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    ids.push_back(cells[0]);
    std::vector<double> row(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = parse_cell(cells[c], row_no, c + 1);
      if (log1p_transform) {
        if (v < 0.0)
          throw ParseError("expression file: negative raw count at row " +
                           std::to_string(row_no) + ", column " + std::to_string(c + 1));
        v = std::log1p(v);
      }
      row[c - 1] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("expression file: no probe rows");

  ExpressionDataset dataset;
  dataset.m1 = static_cast<int>(class1_cols.size());
  dataset.m2 = static_cast<int>(class2_cols.size());
  dataset.probe_ids = std::move(ids);
  dataset.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(class1_cols.size() + class2_cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index out_col = 0;
    for (int c : class1_cols) dataset.values(static_cast<Eigen::Index>(r), out_col++) = rows[r][c];
    for (int c : class2_cols) dataset.values(static_cast<Eigen::Index>(r), out_col++) = rows[r][c];
  }
  return dataset;
}

void write_expression(const ExpressionDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("expression file: cannot write " + path);
  out << "id";
  for (int c = 0; c < dataset.m1; ++c) out << "\tc1";
  for (int c = 0; c < dataset.m2; ++c) out << "\tc2";
  out << "\n";
  char buf[32];
  for (int r = 0; r < dataset.probes(); ++r) {
    out << (r < static_cast<int>(dataset.probe_ids.size()) ? dataset.probe_ids[r]
                                                           : std::to_string(r));
    for (int c = 0; c < dataset.samples(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), dataset.values(r, c));
      out << '\t' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << "\n";
  }
}

std::vector<double> full_data_p_values(const ExpressionDataset& dataset) {
  std::vector<double> out(static_cast<std::size_t>(dataset.probes()), 1.0);
  std::vector<double> c1, c2;
  for (int r = 0; r < dataset.probes(); ++r) {
    c1.clear();
    c2.clear();
    for (int c = 0; c < dataset.m1; ++c)
      if (dataset.values(r, c) != 0.0) c1.push_back(dataset.values(r, c));
    for (int c = dataset.m1; c < dataset.samples(); ++c)
      if (dataset.values(r, c) != 0.0) c2.push_back(dataset.values(r, c));
    if (c1.size() < 2 || c2.size() < 2) continue;  // non-discriminative by convention
    out[static_cast<std::size_t>(r)] = welch_t(c1, c2).p_value;
  }
  return out;
}

double probe_reward(const ExpressionDataset& dataset, int probe_index, Rng& rng,
                    double noise_sd) {
  if (probe_index < 0 || probe_index >= dataset.probes())
    throw ConfigError("probe_reward: probe index out of range");
  std::vector<double> c1, c2;
  c1.reserve(static_cast<std::size_t>(dataset.m1));
  c2.reserve(static_cast<std::size_t>(dataset.m2));
  for (int k = 0; k < dataset.m1; ++k) {
    const double v = dataset.values(probe_index, rng.below(dataset.m1));
    if (v != 0.0) c1.push_back(v);
  }
  for (int k = 0; k < dataset.m2; ++k) {
    const double v =
        dataset.values(probe_index, dataset.m1 + rng.below(dataset.m2));
    if (v != 0.0) c2.push_back(v);
  }
  double p = 1.0;
  if (c1.size() >= 2 && c2.size() >= 2) p = welch_t(c1, c2).p_value;
  double r = logit_reward(p);
  if (noise_sd > 0.0) r += noise_sd * rng.normal();
  return r;
}

SuccessSeries run_probe_selection(const ExpressionDataset& dataset,
                                  const ProbeSelectionConfig& config,
                                  const std::string& policy, int trials,
                                  std::uint64_t seed) {
  if (trials < 1) throw ConfigError("run_probe_selection: trials must be >= 1");
  if (config.pulls < 1) throw ConfigError("run_probe_selection: pulls must be >= 1");
  if (policy == "oracle")
    throw ConfigError("oracle baseline needs true contexts, which expression data never reveals");
  if (policy != "sam" && policy != "naive_lasso" && policy != "ols")
    throw ConfigError("run_probe_selection: unknown policy " + policy);

  const int n = dataset.probes();
  const int d = dataset.samples();
  const int arms = config.arms_per_round <= 0 ? n : std::min(config.arms_per_round, n);

  const std::vector<double> p_full = full_data_p_values(dataset);
  std::vector<char> significant(p_full.size());
  bool any = false;
  for (std::size_t i = 0; i < p_full.size(); ++i) {
    significant[i] = p_full[i] < config.alpha ? 1 : 0;
    any = any || significant[i];
  }

  SuccessSeries series;
  series.trials = trials;
  series.any_significant = any;
  series.success_rate.assign(static_cast<std::size_t>(config.pulls), 0.0);

  for (int trial = 0; trial < trials; ++trial) {
    Rng env_rng(seed_stream(seed, static_cast<std::uint64_t>(trial), 0xE17));
    Rng reward_rng(seed_stream(seed, static_cast<std::uint64_t>(trial), 0x8E4));

    BanditConfig bcfg = config.bandit;
    bcfg.d = d;
    if (policy == "naive_lasso") bcfg.adjust_moments = false;
    const bool use_ols = policy == "ols";
    SamBandit lasso(bcfg);
    OlsBandit ols(d, config.ols_ridge, bcfg.zeta_floor);

    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> offered(static_cast<std::size_t>(arms));
    ContextRound round;
    round.x.resize(arms, d);
    round.u.resize(arms, d);

    for (std::int64_t t = 0; t < config.pulls; ++t) {
      if (arms == n) {
        std::iota(offered.begin(), offered.end(), 0);
      } else {
        for (int k = 0; k < arms; ++k) {
          const std::int64_t pick = k + env_rng.below(n - k);
          std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
          offered[static_cast<std::size_t>(k)] = pool[static_cast<std::size_t>(k)];
        }
      }
      for (int i = 0; i < arms; ++i) {
        round.x.row(i) = dataset.values.row(offered[static_cast<std::size_t>(i)]);
        for (int j = 0; j < d; ++j)
          round.u(i, j) = round.x(i, j) != 0.0 ? 1.0 : 0.0;
      }
      round.z = round.x;  // zeros already mark the missing entries

      const RewardFn fn = [&](int a) {
        RewardFeedback fb;
        fb.reward = probe_reward(dataset, offered[static_cast<std::size_t>(a)],
                                 reward_rng, config.reward_noise_sd);
        return fb;
      };
      const RoundOutcome outcome = use_ols ? ols.step(round, fn) : lasso.step(round, fn);
      if (significant[static_cast<std::size_t>(offered[static_cast<std::size_t>(outcome.chosen_arm)])])
        series.success_rate[static_cast<std::size_t>(t)] += 1.0;
    }
  }
  for (double& v : series.success_rate) v /= static_cast<double>(trials);
  return series;
}

}  // namespace sambandit
