#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmkf/noise_model.hpp"

namespace gmkf {

/// Mixture parameters as configured, before scaling by the separation
/// multiplier. Weights may optionally be normalized on build (some published
/// parameter sets round to three digits and do not sum to one exactly).
struct MixtureSpec {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  bool scale_means_by_c = false;
  bool normalize_weights = false;

  GaussianMixture build(double c) const {
    if (weights.size() != means.size() || weights.size() != covs.size())
      throw ConfigError("mixture spec lists must have equal length");
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (normalize_weights && !(sum > 0.0))
      throw ConfigError("mixture weights must have positive sum");
    std::vector<GaussianComponent> comps;
    comps.reserve(weights.size());
    const double scale = scale_means_by_c ? c : 1.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      GaussianComponent comp;
      comp.weight = normalize_weights ? weights[k] / sum : weights[k];
      comp.mean = scale * means[k];
      comp.cov = covs[k];
      comps.push_back(std::move(comp));
    }
    return GaussianMixture(std::move(comps));
  }
};

/// A named experiment configuration: system, noise mixtures, separation
/// multiplier, horizon and seed.
struct Scenario {
  std::string name;
  double dt = 0.1080;
  int horizon = 500;
  std::uint64_t seed = 1;
  double c = 1.0;
  ProcessEmbedding embedding = ProcessEmbedding::RandomWalkVelocity;
  MixtureSpec process;
  MixtureSpec measurement;

  LinearSystem system() const { return position_velocity_system(dt); }

  NoiseModel noise() const {
    NoiseModel n{process.build(c), measurement.build(c), embedding};
    if (embedding == ProcessEmbedding::RandomWalkVelocity && n.process.dim() != 1)
      throw ConfigError("random-walk-velocity scenarios need scalar process noise");
    return n;
  }

  Scenario with_c(double new_c) const {
    Scenario s = *this;
    s.c = new_c;
    return s;
  }

  void validate() const {
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    system().validate();
    noise();
  }
};

namespace detail {

inline MixtureSpec scalar_spec(std::vector<double> w, std::vector<double> m,
                               std::vector<double> v, bool scale_by_c) {
  MixtureSpec s;
  s.weights = std::move(w);
  s.scale_means_by_c = scale_by_c;
  for (std::size_t k = 0; k < s.weights.size(); ++k) {
    s.means.push_back(Vector::Constant(1, m[k]));
    s.covs.push_back(Matrix::Constant(1, 1, v[k]));
  }
  return s;
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "model1", "model2", "model3", "maneuvering", "glint", "uwb_x", "uwb_y"};
  return names;
}

/// Built-in scenario presets. The three synthetic models use the same
/// mixture for process and measurement noise with means scaled by c; the
/// remaining presets have fixed parameters.
inline Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "model1") {
    s.process = detail::scalar_spec({0.2, 0.2, 0.2, 0.2, 0.2}, {-50, -30, 0, 30, 50},
                                    {1, 1, 1, 1, 1}, true);
    s.measurement = s.process;
  } else if (name == "model2") {
    s.process = detail::scalar_spec({0.1, 0.1, 0.6, 0.1, 0.1}, {-50, -30, 0, 30, 50},
                                    {1, 1, 1, 1, 1}, true);
    s.measurement = s.process;
  } else if (name == "model3") {
    s.process = detail::scalar_spec({0.5, 0.1, 0.1, 0.1, 0.2}, {-50, 10, 30, 50, 80},
                                    {1, 1, 1, 1, 1}, true);
    s.measurement = s.process;
  } else if (name == "maneuvering") {
    s.process = detail::scalar_spec({0.8, 0.2}, {0, 0}, {0.01, 1.0}, false);
    s.measurement = detail::scalar_spec({1.0}, {0.0}, {0.1}, false);
  } else if (name == "glint") {
    s.process = detail::scalar_spec({1.0}, {0.0}, {1.0}, false);
    s.measurement = detail::scalar_spec({0.1, 0.9}, {0.0, 0.0}, {0.01, 1.0}, false);
  } else if (name == "uwb_x") {
    s.process = detail::scalar_spec({0.13, 0.77, 0.099}, {-41.44, 0.51, 49.79},
                                    {148.24, 48.38, 83.75}, false);
    s.process.normalize_weights = true;  // published weights sum to 0.999
    s.measurement = detail::scalar_spec({0.07, 0.85, 0.08}, {-300.01, -17.06, 207.37},
                                        {8163.20, 3611.99, 5677.21}, false);
  } else if (name == "uwb_y") {
    s.process = detail::scalar_spec(
        {0.01, 0.06, 0.03, 0.03, 0.72, 0.04, 0.02, 0.06, 0.03},
        {-63.38, -48.73, -35.65, -17.40, -0.32, 9.52, 30.09, 44.24, 54.35},
        {24.34, 21.53, 18.18, 23.62, 3.13, 12.16, 18.81, 12.96, 15.44}, false);
    s.measurement = detail::scalar_spec({0.98, 0.02}, {-125.93, 147.25},
                                        {8500.19, 10809.10}, false);
  } else {
    throw ConfigError("unknown scenario preset: " + name);
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || (it.key() == k);
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

inline MixtureSpec mixture_spec_from_json(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"weights", "means", "covs", "scale_means_by_c", "normalize_weights"}, where);
  if (!j.contains("weights") || !j.contains("means") || !j.contains("covs"))
    throw ConfigError(where + " requires weights, means and covs");
  MixtureSpec s;
  s.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& m : j.at("means")) {
    const auto vals = m.get<std::vector<double>>();
    s.means.push_back(Eigen::Map<const Vector>(vals.data(), vals.size()));
  }
  for (const auto& cv : j.at("covs")) {
    const auto rows = cv.get<std::vector<std::vector<double>>>();
    Matrix c(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != static_cast<std::size_t>(c.cols()))
        throw ConfigError(where + " covariance rows have unequal length");
      for (std::size_t cc = 0; cc < rows[r].size(); ++cc) c(r, cc) = rows[r][cc];
    }
    s.covs.push_back(std::move(c));
  }
  s.scale_means_by_c = j.value("scale_means_by_c", false);
  s.normalize_weights = j.value("normalize_weights", false);
  return s;
}

inline nlohmann::json mixture_spec_to_json(const MixtureSpec& s) {
  nlohmann::json j;
  j["weights"] = s.weights;
  auto& means = j["means"] = nlohmann::json::array();
  for (const auto& m : s.means)
    means.push_back(std::vector<double>(m.data(), m.data() + m.size()));
  auto& covs = j["covs"] = nlohmann::json::array();
  for (const auto& c : s.covs) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      std::vector<double> row(c.cols());
      for (Eigen::Index cc = 0; cc < c.cols(); ++cc) row[cc] = c(r, cc);
      rows.push_back(row);
    }
    covs.push_back(rows);
  }
  j["scale_means_by_c"] = s.scale_means_by_c;
  j["normalize_weights"] = s.normalize_weights;
  return j;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  detail::check_keys(
      j, {"name", "dt", "horizon", "seed", "c", "embedding", "process", "measurement"},
      "scenario");
  Scenario s;
  s.name = j.value("name", std::string("unnamed"));
  s.dt = j.value("dt", 0.1080);
  s.horizon = j.value("horizon", 500);
  s.seed = j.value("seed", std::uint64_t{1});
  s.c = j.value("c", 1.0);
  const std::string emb = j.value("embedding", std::string("random_walk_velocity"));
  if (emb == "random_walk_velocity")
    s.embedding = ProcessEmbedding::RandomWalkVelocity;
  else if (emb == "none")
    s.embedding = ProcessEmbedding::None;
  else
    throw ConfigError("unknown embedding: " + emb);
  if (!j.contains("process") || !j.contains("measurement"))
    throw ConfigError("scenario requires process and measurement mixtures");
  s.process = detail::mixture_spec_from_json(j.at("process"), "process");
  s.measurement = detail::mixture_spec_from_json(j.at("measurement"), "measurement");
  s.validate();
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["dt"] = s.dt;
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  j["c"] = s.c;
  j["embedding"] =
      s.embedding == ProcessEmbedding::RandomWalkVelocity ? "random_walk_velocity" : "none";
  j["process"] = detail::mixture_spec_to_json(s.process);
  j["measurement"] = detail::mixture_spec_to_json(s.measurement);
  return j;
}

/// Resolve a scenario reference: a path to a JSON file, a JSON file named
/// `<ref>.json` under `preset_dir`, or a built-in preset name.
inline Scenario load_scenario(const std::string& ref, const std::string& preset_dir = "") {
  auto try_file = [](const std::string& path) -> Scenario {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad scenario JSON in " + path + ": " + e.what());
    }
    return scenario_from_json(j);
  };
  if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json") return try_file(ref);
  if (!preset_dir.empty()) {
    const std::string candidate = preset_dir + "/" + ref + ".json";
    if (std::ifstream(candidate).good()) return try_file(candidate);
  }
  return preset(ref);
}

}  // namespace gmkf
