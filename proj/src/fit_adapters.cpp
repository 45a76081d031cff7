#include "holeburn/fit/adapters.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "holeburn/chirp.hpp"
#include "holeburn/dynamics.hpp"
#include "holeburn/observables.hpp"

namespace holeburn::fit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double first_y(const DecayTrace& t) { return t.samples.front().y; }
double last_y(const DecayTrace& t) { return t.samples.back().y; }

double tail_mean(const DecayTrace& t, double frac = 0.2) {
  const std::size_t n = t.samples.size();
  const std::size_t start =
      std::min(n - 1, static_cast<std::size_t>(n * (1.0 - frac)));
  double sum = 0.0;
  for (std::size_t i = start; i < n; ++i) sum += t.samples[i].y;
  return sum / static_cast<double>(n - start);
}

double median_y(const DecayTrace& t) {
  std::vector<double> v;
  v.reserve(t.samples.size());
  for (const auto& s : t.samples) v.push_back(s.y);
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// abscissa where y first crosses the given level, for decay-time guesses
double crossing_x(const DecayTrace& t, double level) {
  for (const auto& s : t.samples) {
    if (s.y <= level) return s.x;
  }
  return t.samples.back().x;
}

}  // namespace

std::string to_string(AdapterName name) {
  switch (name) {
    case AdapterName::FFHoleDecay: return "FFHoleDecay";
    case AdapterName::SLRHoleDecay: return "SLRHoleDecay";
    case AdapterName::SLR3PE: return "SLR3PE";
    case AdapterName::Echo2P: return "Echo2P";
    case AdapterName::OffsetExponential: return "OffsetExponential";
    case AdapterName::PowerLawRate: return "PowerLawRate";
    case AdapterName::GammaHvsT: return "GammaHvsT";
    case AdapterName::EchoTrainCorrection: return "EchoTrainCorrection";
    case AdapterName::LorentzianProfile: return "LorentzianProfile";
  }
  return "unknown";
}

AdapterName adapter_name_from_string(const std::string& s) {
  static const std::map<std::string, AdapterName> table = {
      {"FFHoleDecay", AdapterName::FFHoleDecay},
      {"SLRHoleDecay", AdapterName::SLRHoleDecay},
      {"SLR3PE", AdapterName::SLR3PE},
      {"Echo2P", AdapterName::Echo2P},
      {"OffsetExponential", AdapterName::OffsetExponential},
      {"PowerLawRate", AdapterName::PowerLawRate},
      {"GammaHvsT", AdapterName::GammaHvsT},
      {"EchoTrainCorrection", AdapterName::EchoTrainCorrection},
      {"LorentzianProfile", AdapterName::LorentzianProfile},
  };
  auto it = table.find(s);
  if (it == table.end()) {
    throw std::invalid_argument("unknown model adapter '" + s + "'");
  }
  return it->second;
}

bool ModelAdapter::accepts_kind(TraceKind kind) const {
  return std::find(accepts.begin(), accepts.end(), kind) != accepts.end();
}

int ModelAdapter::index_of(const std::string& pname) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == pname) return static_cast<int>(i);
  }
  throw std::invalid_argument("adapter " + to_string(name) +
                              " has no parameter '" + pname + "'");
}

void ModelAdapter::fix(const std::string& pname, double value) {
  auto& p = params[static_cast<std::size_t>(index_of(pname))];
  p.init = value;
  p.frozen = true;
}

void ModelAdapter::thaw(const std::string& pname) {
  params[static_cast<std::size_t>(index_of(pname))].frozen = false;
}

ModelAdapter make_adapter(AdapterName name, const AdapterDefaults& d) {
  ModelAdapter a;
  a.name = name;
  switch (name) {
    case AdapterName::FFHoleDecay: {
      a.params = {
          {"t_ff_s", 2e-3, 1e-7, 1e3, false},
          {"scale", 1.0, 0.0, kInf, false},
          {"t_opt_s", d.t_opt_s, 0.0, kInf, true},
          {"beta14", d.ff_beta14, 0.0, 1.0, true},
          {"beta11_plus_12", d.ff_beta11_plus_12, 0.0, 1.0, true},
      };
      a.accepts = {TraceKind::HoleArea};
      a.model = [](double t, const Eigen::VectorXd& p) {
        const FfParams fp{p[0], 1.0, p[3], p[4], p[2], 1.0};
        return p[1] * ff_population_deficit(fp, t);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        p[1] = std::max(first_y(tr), 1e-300);
        p[0] = std::max(crossing_x(tr, 0.5 * first_y(tr)), 1e-6);
      };
      break;
    }
    case AdapterName::SLRHoleDecay: {
      a.params = {
          {"t_spin_s", 1e-3, 1e-8, 1e3, false},
          {"scale", 1.0, 0.0, kInf, false},
          {"t_opt_s", d.t_opt_s, 0.0, kInf, true},
          {"beta14", d.slr_beta14, 0.0, 1.0, true},
          {"beta_bar", d.slr_beta_bar, 0.0, 1.0, true},
      };
      a.accepts = {TraceKind::HoleArea};
      a.model = [](double t, const Eigen::VectorXd& p) {
        const SlrParams sp{p[0], 1.0, p[3], p[4], p[2]};
        return p[1] * slr_population_deficit(sp, t);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        p[1] = std::max(first_y(tr), 1e-300);
        p[0] = std::max(crossing_x(tr, 0.5 * first_y(tr)), 1e-7);
      };
      break;
    }
    case AdapterName::SLR3PE: {
      a.params = {
          {"t_spin_s", 1e-3, 1e-8, 1e3, false},
          {"scale", 1.0, 0.0, kInf, false},  // I0'*N^2/4
          {"t_opt_s", d.t_opt_s, 0.0, kInf, true},
          {"beta14", d.slr_beta14, 0.0, 1.0, true},
          {"beta_bar", d.slr_beta_bar, 0.0, 1.0, true},
      };
      a.accepts = {TraceKind::Echo3P_vs_TW};
      a.model = [](double t, const Eigen::VectorXd& p) {
        const SlrParams sp{p[0], 1.0, p[3], p[4], p[2]};
        const double grating =
            slr_population_1e(sp, t) + slr_population_deficit(sp, t);
        return p[1] * grating * grating;
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        p[1] = std::max(0.25 * first_y(tr), 1e-300);
        p[0] = std::max(crossing_x(tr, 0.25 * first_y(tr)), 1e-7);
      };
      break;
    }
    case AdapterName::Echo2P: {
      a.params = {
          {"gamma_h_hz", 1e3, 0.0, kInf, false},
          {"i0", 1.0, 0.0, kInf, false},
      };
      a.accepts = {TraceKind::Echo2P, TraceKind::Echo3P_vs_tau};
      a.model = [](double tau, const Eigen::VectorXd& p) {
        return echo2_intensity(p[0], tau, p[1]);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        const double y0 = std::max(first_y(tr), 1e-300);
        const double y1 = std::max(last_y(tr), 1e-300 * y0);
        const double dx = tr.samples.back().x - tr.samples.front().x;
        p[1] = y0;
        p[0] = std::max(std::log(y0 / y1) / (4.0 * kPi * dx), 1e-3);
      };
      break;
    }
    case AdapterName::OffsetExponential: {
      a.params = {
          {"a", 0.0, -kInf, kInf, false},
          {"b", 1.0, -kInf, kInf, false},
          {"t_opt_s", d.site1_t_opt_s, 0.0, kInf, true},
      };
      a.accepts = {TraceKind::HoleArea};
      a.model = [](double t, const Eigen::VectorXd& p) {
        return p[0] + p[1] * std::exp(-t / p[2]);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        p[0] = tail_mean(tr);
        p[1] = first_y(tr) - p[0];
      };
      break;
    }
    case AdapterName::PowerLawRate: {
      a.params = {
          {"coefficient", 1.0, 0.0, kInf, false},
          {"exponent", 9.0, 0.0, 20.0, true},
      };
      a.accepts = {TraceKind::TemperatureSeries};
      a.model = [](double temp, const Eigen::VectorXd& p) {
        return p[0] * std::pow(temp, p[1]);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        // geometric mean of y/x^exponent over the series
        double acc = 0.0;
        int cnt = 0;
        for (const auto& s : tr.samples) {
          if (s.x > 0.0 && s.y > 0.0) {
            acc += std::log(s.y) - p[1] * std::log(s.x);
            ++cnt;
          }
        }
        if (cnt > 0) p[0] = std::exp(acc / cnt);
      };
      break;
    }
    case AdapterName::GammaHvsT: {
      a.params = {
          {"gamma_h0_hz", 100.0, 0.0, kInf, false},
          {"gamma_r", 1e-5, 0.0, kInf, false},
          {"exponent", 9.0, 0.0, 20.0, true},
      };
      a.accepts = {TraceKind::TemperatureSeries};
      a.model = [](double temp, const Eigen::VectorXd& p) {
        return p[0] + p[1] * std::pow(temp, p[2]);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        double ymin = kInf, ymax = -kInf, xmax = 0.0;
        for (const auto& s : tr.samples) {
          ymin = std::min(ymin, s.y);
          if (s.y > ymax) {
            ymax = s.y;
            xmax = s.x;
          }
        }
        p[0] = std::max(ymin, 1e-300);
        p[1] = std::max((ymax - ymin) / std::pow(std::max(xmax, 1.0), p[2]),
                        1e-300);
      };
      break;
    }
    case AdapterName::EchoTrainCorrection: {
      // decay_per_pulse = 1/c; kept linear so a non-decaying train shows up
      // as a non-positive rate instead of a divergent c
      a.params = {
          {"a", 0.5, -kInf, kInf, false},
          {"b", 0.5, -kInf, kInf, false},
          {"decay_per_pulse", 0.02, -1.0, 1.0, false},
      };
      a.accepts = {TraceKind::EchoTrain};
      a.model = [](double n, const Eigen::VectorXd& p) {
        return p[0] + p[1] * std::exp(-p[2] * n);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        p[0] = tail_mean(tr);
        p[1] = first_y(tr) - p[0];
        const double span = tr.samples.back().x - tr.samples.front().x;
        p[2] = 3.0 / std::max(span, 1.0);
      };
      break;
    }
    case AdapterName::LorentzianProfile: {
      a.params = {
          {"center_hz", 0.0, -kInf, kInf, false},
          {"fwhm_hz", 1e4, 0.0, kInf, false},
          {"amplitude", 1.0, -kInf, kInf, false},
          {"offset", 0.0, -kInf, kInf, false},
      };
      a.accepts = {TraceKind::HoleProfile};
      a.model = [](double f, const Eigen::VectorXd& p) {
        return p[3] + p[2] * lorentzian_unit(f, p[0], p[1]);
      };
      a.init_guess = [](const DecayTrace& tr, Eigen::VectorXd& p) {
        const double med = median_y(tr);
        double best = 0.0, center = tr.samples.front().x;
        for (const auto& s : tr.samples) {
          if (std::abs(s.y - med) > std::abs(best)) {
            best = s.y - med;
            center = s.x;
          }
        }
        // half-amplitude width around the extremum
        const double half = med + 0.5 * best;
        double lo = center, hi = center;
        for (const auto& s : tr.samples) {
          const bool above = (best > 0) ? (s.y > half) : (s.y < half);
          if (above) {
            lo = std::min(lo, s.x);
            hi = std::max(hi, s.x);
          }
        }
        p[0] = center;
        p[1] = std::max(hi - lo,
                        2.0 * (tr.samples[1].x - tr.samples[0].x));
        p[2] = best;
        p[3] = med;
      };
      break;
    }
  }
  return a;
}

FitResult fit(const ModelAdapter& adapter, const DecayTrace& trace,
              const std::map<std::string, double>& init,
              const LmOptions& opts) {
  if (trace.samples.empty()) {
    throw std::invalid_argument("cannot fit an empty trace");
  }
  if (!adapter.accepts_kind(trace.kind)) {
    throw std::invalid_argument("adapter " + to_string(adapter.name) +
                                " does not accept traces of kind " +
                                to_string(trace.kind));
  }

  std::vector<FreeParam> params = adapter.params;
  Eigen::VectorXd guess(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) guess[i] = params[i].init;
  if (adapter.init_guess) adapter.init_guess(trace, guess);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].frozen) params[i].init = guess[i];
  }
  for (const auto& [name, value] : init) {
    bool found = false;
    for (auto& p : params) {
      if (p.name == name) {
        p.init = value;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("init override for unknown parameter '" +
                                  name + "'");
    }
  }

  const auto& model = adapter.model;
  const DecayTrace* tr = &trace;
  const auto residuals = [tr, &model](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(tr->samples.size());
    for (std::size_t i = 0; i < tr->samples.size(); ++i) {
      const auto& s = tr->samples[i];
      const double sigma = tr->has_sigma ? s.sigma_y : 1.0;
      r[static_cast<Eigen::Index>(i)] = (s.y - model(s.x, p)) / sigma;
    }
    return r;
  };

  return lm_fit(residuals, std::move(params),
                static_cast<int>(trace.samples.size()), opts);
}

std::string fit_result_to_json(const FitResult& result,
                               const std::string& model_name) {
  nlohmann::json j;
  j["model"] = model_name;
  nlohmann::json params;
  for (std::size_t i = 0; i < result.param_names.size(); ++i) {
    params[result.param_names[i]] = {
        {"value", result.values[static_cast<Eigen::Index>(i)]},
        {"stderr", result.stderrs[static_cast<Eigen::Index>(i)]},
    };
  }
  j["params"] = params;
  j["chi2"] = result.chi2;
  j["dof"] = result.dof;
  j["converged"] = result.converged;
  j["n_iter"] = result.n_iter;
  return j.dump(2);
}

PowerLawFit fit_power_law_exponent(
    std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) {
    throw std::invalid_argument("power-law fit needs at least 4 points");
  }
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd lx(m), ly(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& [x, y] = points[static_cast<std::size_t>(i)];
    if (!(x > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument(
          "power-law fit requires strictly positive points");
    }
    lx[i] = std::log(x);
    ly[i] = std::log(y);
  }
  const double xm = lx.mean();
  const double ym = ly.mean();
  const double sxx = (lx.array() - xm).square().sum();
  const double sxy = ((lx.array() - xm) * (ly.array() - ym)).sum();
  const double slope = sxy / sxx;
  const double intercept = ym - slope * xm;

  double ssr = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ssr += r * r;
  }
  const double s2 = ssr / static_cast<double>(m - 2);

  PowerLawFit out;
  out.exponent = slope;
  out.coefficient = std::exp(intercept);
  // covariance of (intercept, slope) for the log-log regression
  const double var_slope = s2 / sxx;
  const double var_intercept = s2 * (1.0 / m + xm * xm / sxx);
  const double cov_is = -s2 * xm / sxx;
  out.covariance << var_intercept, cov_is, cov_is, var_slope;
  out.exponent_stderr = std::sqrt(var_slope);
  out.coefficient_stderr = out.coefficient * std::sqrt(var_intercept);
  return out;
}

EchoTrainResult correct_echo_train(
    std::span<const std::pair<double, double>> peaks) {
  if (peaks.size() < 5) {
    throw std::invalid_argument("echo-train correction needs >= 5 peaks");
  }
  DecayTrace train;
  train.kind = TraceKind::EchoTrain;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (i > 0 && !(peaks[i].first > peaks[i - 1].first)) {
      throw std::invalid_argument("pulse indices must be increasing");
    }
    train.samples.push_back({peaks[i].first, peaks[i].second, 0.0});
  }

  EchoTrainResult out;
  const auto identity = [&](const std::string& note) {
    out.identity = true;
    out.note = note;
    out.a = tail_mean(train);
    out.b = 0.0;
    out.c = 0.0;
    out.max_correction = 0.0;
    for (const auto& [n, y] : peaks) out.corrected.emplace_back(n, y);
    return out;
  };

  const ModelAdapter adapter = make_adapter(AdapterName::EchoTrainCorrection);
  const double span = peaks.back().first - peaks.front().first;
  FitResult res;
  try {
    // two starts: a decaying and a growing exponential; keep the better fit
    res = fit(adapter, train);
    const auto rising =
        fit(adapter, train, {{"decay_per_pulse", -3.0 / std::max(span, 1.0)}});
    if (rising.chi2 < res.chi2) res = rising;
  } catch (const std::runtime_error& e) {
    return identity(std::string("degenerate train: ") + e.what());
  }

  const double a = res.value_of("a");
  const double b = res.value_of("b");
  const double k = res.value_of("decay_per_pulse");
  if (!(k > 1e-9)) {
    return identity("no pumping decay detected (c <= 0)");
  }
  if (1.0 / k > 100.0 * span) {
    return identity("no pumping decay resolvable within the train");
  }
  const double scale_y =
      std::max(std::abs(first_y(train)), std::abs(a));
  if (std::abs(b) < 1e-6 * scale_y) {
    return identity("no pumping decay detected (b ~ 0)");
  }
  if (!(a > 0.0)) {
    return identity("non-positive asymptote; correction undefined");
  }

  out.a = a;
  out.b = b;
  out.c = 1.0 / k;
  for (const auto& [n, y] : peaks) {
    const double pn = a + b * std::exp(-k * n);
    const double factor = a / pn;
    out.corrected.emplace_back(n, y * factor);
    out.max_correction = std::max(out.max_correction, std::abs(factor - 1.0));
  }
  out.exceeds_30_percent = out.max_correction > 0.30;
  if (out.exceeds_30_percent) {
    out.note = "correction exceeds 30% of the raw value";
  }
  return out;
}

SharedScaleResult shared_scale_fit(const ModelAdapter& slr_adapter,
                                   const std::vector<DecayTrace>& traces,
                                   std::size_t reference,
                                   const LmOptions& opts) {
  if (traces.size() < 2) {
    throw std::invalid_argument("shared-scale fit needs >= 2 traces");
  }
  if (reference >= traces.size()) {
    throw std::invalid_argument("reference trace index out of range");
  }

  // identical burn parameters across the data sets
  std::map<std::string, std::string> burn_ref;
  for (const auto& [k, v] : traces[0].metadata) {
    if (k.rfind("burn_", 0) == 0) burn_ref[k] = v;
  }
  for (std::size_t i = 1; i < traces.size(); ++i) {
    std::map<std::string, std::string> burn;
    for (const auto& [k, v] : traces[i].metadata) {
      if (k.rfind("burn_", 0) == 0) burn[k] = v;
    }
    if (burn != burn_ref) {
      throw std::invalid_argument(
          "burn metadata mismatch between traces 1 and " +
          std::to_string(i + 1) + "; shared scale is not justified");
    }
  }

  SharedScaleResult out;
  const FitResult ref_fit = fit(slr_adapter, traces[reference], {}, opts);
  out.scale = ref_fit.value_of("scale");
  out.scale_stderr = ref_fit.stderr_of("scale");

  ModelAdapter frozen = slr_adapter;
  frozen.fix("scale", out.scale);

  std::vector<std::future<FitResult>> futures;
  futures.reserve(traces.size());
  for (const auto& trace : traces) {
    futures.push_back(std::async(std::launch::async, [&frozen, &trace,
                                                      &opts] {
      return fit(frozen, trace, {}, opts);
    }));
  }
  out.per_trace.reserve(traces.size());
  for (auto& f : futures) out.per_trace.push_back(f.get());
  return out;
}

}  // namespace holeburn::fit
