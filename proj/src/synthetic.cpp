#include "holeburn/io/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace holeburn::io {

DecayTrace generate_synthetic(const fit::ModelAdapter& adapter,
                              const Eigen::VectorXd& truth,
                              const SyntheticRequest& req, NoiseRng& rng) {
  if (req.n_points < 2) {
    throw std::invalid_argument("synthetic trace needs >= 2 points");
  }
  if (req.noise_frac < 0.0) {
    throw std::invalid_argument("noise_frac must be >= 0");
  }
  if (!(req.x_max > req.x_min)) {
    throw std::invalid_argument("x_max must exceed x_min");
  }
  if (req.log_spacing && !(req.x_min > 0.0)) {
    throw std::invalid_argument("log spacing requires x_min > 0");
  }
  if (truth.size() != static_cast<Eigen::Index>(adapter.params.size())) {
    throw std::invalid_argument("truth vector size does not match adapter");
  }
  if (!adapter.accepts_kind(req.kind)) {
    throw std::invalid_argument("adapter " + to_string(adapter.name) +
                                " does not produce traces of kind " +
                                to_string(req.kind));
  }

  DecayTrace trace;
  trace.kind = req.kind;
  trace.temperature_k = req.temperature_k;
  trace.metadata = req.metadata;
  trace.has_sigma = req.noise_frac > 0.0;
  trace.samples.reserve(req.n_points);

  // noise floor keeps weights finite where the model crosses zero
  double max_abs_model = 0.0;
  std::vector<double> xs(req.n_points), ms(req.n_points);
  for (int i = 0; i < req.n_points; ++i) {
    const double f = static_cast<double>(i) / (req.n_points - 1);
    const double x = req.log_spacing
                         ? req.x_min * std::pow(req.x_max / req.x_min, f)
                         : req.x_min + f * (req.x_max - req.x_min);
    xs[i] = x;
    ms[i] = adapter.model(x, truth);
    max_abs_model = std::max(max_abs_model, std::abs(ms[i]));
  }
  const double sigma_floor = req.noise_frac * max_abs_model * 1e-3;

  for (int i = 0; i < req.n_points; ++i) {
    DecayTrace::Sample s;
    s.x = xs[i];
    if (trace.has_sigma) {
      const double sigma =
          std::max(req.noise_frac * std::abs(ms[i]), sigma_floor);
      s.y = ms[i] + sigma * rng.gauss();
      s.sigma_y = sigma;
    } else {
      s.y = ms[i];
    }
    trace.samples.push_back(s);
  }
  return trace;
}

std::string truth_record_json(const fit::ModelAdapter& adapter,
                              const Eigen::VectorXd& truth,
                              const SyntheticRequest& req,
                              std::uint64_t seed) {
  nlohmann::json j;
  j["model"] = to_string(adapter.name);
  nlohmann::json params;
  for (std::size_t i = 0; i < adapter.params.size(); ++i) {
    params[adapter.params[i].name] = truth[static_cast<Eigen::Index>(i)];
  }
  j["params"] = params;
  j["kind"] = to_string(req.kind);
  j["noise_frac"] = req.noise_frac;
  j["n_points"] = req.n_points;
  j["x_min"] = req.x_min;
  j["x_max"] = req.x_max;
  j["seed"] = seed;
  return j.dump(2);
}

}  // namespace holeburn::io
