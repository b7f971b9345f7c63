#include "sambandit/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sambandit {

using nlohmann::json;

double BanditTunables::resolved_radius(int d, double b) const {
  if (radius > 0.0) return radius;
  return 2.0 * b * std::sqrt(std::sqrt(static_cast<double>(d)));
}

BanditConfig BanditTunables::to_bandit_config(int d, double b) const {
  BanditConfig cfg;
  cfg.d = d;
  cfg.eta1 = eta1;
  cfg.radius = resolved_radius(d, b);
  cfg.zeta_floor = zeta_floor;
  if (cadence == "every_round") {
    cfg.cadence = ResolveCadence::EveryRound;
  } else if (cadence == "doubling") {
    cfg.cadence = ResolveCadence::Doubling;
  } else {
    throw ConfigError("bandit.cadence must be 'every_round' or 'doubling', got '" +
                      cadence + "'");
  }
  cfg.solver.rel_tol = solver.rel_tol;
  cfg.solver.max_iter = solver.max_iter;
  return cfg;
}

namespace {

const std::set<std::string> kModes = {"simulate", "sweep", "geneprobe"};
const std::set<std::string> kPolicies = {"sam", "naive_lasso", "ols", "oracle"};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& section) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError("config: unknown key '" + item.key() + "' in " + section);
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Eigen::VectorXd read_zeta(const json& value, int d) {
  if (value.is_number()) {
    const double z = value.get<double>();
    return Eigen::VectorXd::Constant(d, z);
  }
  if (value.is_array()) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i)
      z[static_cast<Eigen::Index>(i)] = value[i].get<double>();
    return z;
  }
  throw ConfigError("config: env.zeta must be a number or an array");
}

json zeta_to_json(const Eigen::VectorXd& zeta) {
  if (zeta.size() > 0 && (zeta.array() == zeta[0]).all()) return json(zeta[0]);
  json arr = json::array();
  for (Eigen::Index i = 0; i < zeta.size(); ++i) arr.push_back(zeta[i]);
  return arr;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kModes.count(mode))
    throw ConfigError("config: mode must be simulate, sweep, or geneprobe, got '" +
                      mode + "'");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (output_dir.empty()) throw ConfigError("config: output_dir must be non-empty");
  if (policies.empty()) throw ConfigError("config: policies must be non-empty");
  for (const std::string& p : policies)
    if (!kPolicies.count(p))
      throw ConfigError("config: unknown policy '" + p + "'");
  bandit.to_bandit_config(std::max(env.d, 1), std::max(env.b, 1e-12));  // checks cadence
  if (bandit.eta1 <= 0.0) throw ConfigError("config: bandit.eta1 must be positive");
  if (bandit.zeta_floor <= 0.0 || bandit.zeta_floor > 1.0)
    throw ConfigError("config: bandit.zeta_floor must lie in (0, 1]");
  if (bandit.ols_ridge <= 0.0)
    throw ConfigError("config: bandit.ols_ridge must be positive");
  if (bandit.solver.rel_tol <= 0.0)
    throw ConfigError("config: bandit.solver.rel_tol must be positive");
  if (bandit.solver.max_iter < 1)
    throw ConfigError("config: bandit.solver.max_iter must be >= 1");

  if (mode == "simulate" || mode == "sweep") env.validate();
  if (mode == "sweep") {
    if (zeta_grid.empty()) throw ConfigError("config: sweep.zeta_grid must be non-empty");
    for (double z : zeta_grid)
      if (!(z > 0.0 && z <= 1.0))
        throw ConfigError("config: sweep.zeta_grid entries must lie in (0, 1]");
  }
  if (mode == "geneprobe") {
    if (geneprobe.dataset.empty())
      throw ConfigError("config: geneprobe.dataset path is required");
    if (!std::filesystem::exists(geneprobe.dataset))
      throw ConfigError("config: geneprobe.dataset not found: " + geneprobe.dataset);
    if (geneprobe.arms_per_round < 0)
      throw ConfigError("config: geneprobe.arms_per_round must be >= 0");
    if (geneprobe.pulls < 1) throw ConfigError("config: geneprobe.pulls must be >= 1");
    if (!(geneprobe.alpha > 0.0 && geneprobe.alpha < 1.0))
      throw ConfigError("config: geneprobe.alpha must lie in (0, 1)");
    if (geneprobe.reward_noise_sd < 0.0)
      throw ConfigError("config: geneprobe.reward_noise_sd must be >= 0");
    for (const std::string& p : policies)
      if (p == "oracle")
        throw ConfigError("config: the oracle policy needs true contexts and cannot "
                          "run on expression data");
  }
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["mode"] = mode;
  j["trials"] = trials;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["policies"] = policies;
  j["env"] = {{"K", env.K},         {"d", env.d},
              {"s0", env.s0},       {"b", env.b},
              {"rho", env.rho},     {"noise_sd", env.noise_sd},
              {"zeta", zeta_to_json(env.zeta)}, {"T", env.T}};
  j["bandit"] = {{"eta1", bandit.eta1},
                 {"radius", bandit.radius},
                 {"zeta_floor", bandit.zeta_floor},
                 {"ols_ridge", bandit.ols_ridge},
                 {"cadence", bandit.cadence},
                 {"solver", {{"rel_tol", bandit.solver.rel_tol},
                             {"max_iter", bandit.solver.max_iter}}}};
  j["sweep"] = {{"zeta_grid", zeta_grid}};
  j["geneprobe"] = {{"dataset", geneprobe.dataset},
                    {"raw_counts", geneprobe.raw_counts},
                    {"arms_per_round", geneprobe.arms_per_round},
                    {"pulls", geneprobe.pulls},
                    {"alpha", geneprobe.alpha},
                    {"reward_noise_sd", geneprobe.reward_noise_sd}};
  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config: invalid JSON: ") + err.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown_keys(j, {"mode", "trials", "seed", "output_dir", "policies", "env",
                          "bandit", "sweep", "geneprobe"},
                      "top level");

  ExperimentConfig cfg;
  try {
    read_if(j, "mode", cfg.mode);
    read_if(j, "trials", cfg.trials);
    read_if(j, "seed", cfg.seed);
    read_if(j, "output_dir", cfg.output_dir);
    read_if(j, "policies", cfg.policies);

    if (j.contains("env")) {
      const json& e = j.at("env");
      reject_unknown_keys(e, {"K", "d", "s0", "b", "rho", "noise_sd", "zeta", "T"},
                          "env");
      read_if(e, "K", cfg.env.K);
      read_if(e, "d", cfg.env.d);
      read_if(e, "s0", cfg.env.s0);
      read_if(e, "b", cfg.env.b);
      read_if(e, "rho", cfg.env.rho);
      read_if(e, "noise_sd", cfg.env.noise_sd);
      read_if(e, "T", cfg.env.T);
      if (e.contains("zeta")) cfg.env.zeta = read_zeta(e.at("zeta"), cfg.env.d);
    }
    if (cfg.env.zeta.size() == 0)
      cfg.env.zeta = Eigen::VectorXd::Constant(cfg.env.d, 1.0);

    if (j.contains("bandit")) {
      const json& b = j.at("bandit");
      reject_unknown_keys(
          b, {"eta1", "radius", "zeta_floor", "ols_ridge", "cadence", "solver"},
          "bandit");
      read_if(b, "eta1", cfg.bandit.eta1);
      read_if(b, "radius", cfg.bandit.radius);
      read_if(b, "zeta_floor", cfg.bandit.zeta_floor);
      read_if(b, "ols_ridge", cfg.bandit.ols_ridge);
      read_if(b, "cadence", cfg.bandit.cadence);
      if (b.contains("solver")) {
        const json& s = b.at("solver");
        reject_unknown_keys(s, {"rel_tol", "max_iter"}, "bandit.solver");
        read_if(s, "rel_tol", cfg.bandit.solver.rel_tol);
        read_if(s, "max_iter", cfg.bandit.solver.max_iter);
      }
    }

    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      reject_unknown_keys(s, {"zeta_grid"}, "sweep");
      read_if(s, "zeta_grid", cfg.zeta_grid);
    }

    if (j.contains("geneprobe")) {
      const json& g = j.at("geneprobe");
      reject_unknown_keys(g,
                          {"dataset", "raw_counts", "arms_per_round", "pulls",
                           "alpha", "reward_noise_sd"},
                          "geneprobe");
      read_if(g, "dataset", cfg.geneprobe.dataset);
      read_if(g, "raw_counts", cfg.geneprobe.raw_counts);
      read_if(g, "arms_per_round", cfg.geneprobe.arms_per_round);
      read_if(g, "pulls", cfg.geneprobe.pulls);
      read_if(g, "alpha", cfg.geneprobe.alpha);
      read_if(g, "reward_noise_sd", cfg.geneprobe.reward_noise_sd);
    }
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path);
  out << to_json_text();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.mode == b.mode && a.trials == b.trials && a.seed == b.seed &&
         a.output_dir == b.output_dir && a.policies == b.policies &&
         a.env.K == b.env.K && a.env.d == b.env.d && a.env.s0 == b.env.s0 &&
         a.env.b == b.env.b && a.env.rho == b.env.rho &&
         a.env.noise_sd == b.env.noise_sd && a.env.T == b.env.T &&
         a.env.zeta.size() == b.env.zeta.size() && a.env.zeta == b.env.zeta &&
         a.bandit.eta1 == b.bandit.eta1 && a.bandit.radius == b.bandit.radius &&
         a.bandit.zeta_floor == b.bandit.zeta_floor &&
         a.bandit.ols_ridge == b.bandit.ols_ridge &&
         a.bandit.cadence == b.bandit.cadence &&
         a.bandit.solver.rel_tol == b.bandit.solver.rel_tol &&
         a.bandit.solver.max_iter == b.bandit.solver.max_iter &&
         a.zeta_grid == b.zeta_grid && a.geneprobe.dataset == b.geneprobe.dataset &&
         a.geneprobe.raw_counts == b.geneprobe.raw_counts &&
         a.geneprobe.arms_per_round == b.geneprobe.arms_per_round &&
         a.geneprobe.pulls == b.geneprobe.pulls &&
         a.geneprobe.alpha == b.geneprobe.alpha &&
         a.geneprobe.reward_noise_sd == b.geneprobe.reward_noise_sd;
}

}  // namespace sambandit
