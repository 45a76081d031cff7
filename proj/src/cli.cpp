#include "holeburn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>

#include "holeburn/chirp.hpp"
#include "holeburn/dynamics.hpp"
#include "holeburn/fit/adapters.hpp"
#include "holeburn/io/config.hpp"
#include "holeburn/io/synthetic.hpp"
#include "holeburn/io/trace_csv.hpp"
#include "holeburn/observables.hpp"

namespace holeburn::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnconverged = 3;
constexpr int kExitUsage = 64;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> traces;
  std::string model;
  std::vector<std::string> fixes;
  std::vector<std::string> frees;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "TOML-style config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "RNG seed (64-bit)")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--trace", args.traces, "input trace CSV (repeatable)");
  cmd->add_option("--model", args.model, "model adapter name");
  cmd->add_option("--fix", args.fixes,
                  "freeze a parameter, NAME=VALUE (repeatable)");
  cmd->add_option("--free", args.frees, "thaw a parameter (repeatable)");
}

io::RunConfig load_config(const CommonArgs& args) {
  io::RunConfig rc;
  if (!args.config_path.empty()) {
    rc = io::RunConfig::from_file(io::parse_config(args.config_path));
  }
  if (!args.out_dir.empty()) rc.out_dir = args.out_dir;
  if (args.seed_given) rc.seed = args.seed;
  if (!args.model.empty()) rc.model_name = args.model;
  return rc;
}

std::pair<std::string, double> parse_fix(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("--fix expects NAME=VALUE, got '" + spec +
                                "'");
  }
  std::size_t pos = 0;
  const std::string value = spec.substr(eq + 1);
  const double v = std::stod(value, &pos);
  if (pos != value.size()) {
    throw std::invalid_argument("--fix: cannot parse value '" + value + "'");
  }
  return {spec.substr(0, eq), v};
}

fit::ModelAdapter build_adapter(const io::RunConfig& rc,
                                const CommonArgs& args) {
  if (rc.model_name.empty()) {
    throw std::invalid_argument(
        "no model selected; use --model or [model].name in the config");
  }
  fit::AdapterDefaults defaults;
  defaults.t_opt_s = rc.system.t_opt_s;
  if (rc.branching_given) {
    defaults.ff_beta14 = rc.system.beta14();
    defaults.ff_beta11_plus_12 = rc.system.beta11_plus_12();
    defaults.slr_beta14 = rc.system.beta14();
    defaults.slr_beta_bar = rc.system.beta_bar();
  }
  auto adapter = fit::make_adapter(
      fit::adapter_name_from_string(rc.model_name), defaults);
  // config-provided overrides are lenient (the table may serve several
  // models); command-line ones are strict
  for (const auto& [name, value] : rc.param_overrides) {
    try {
      adapter.fix(name, value);
    } catch (const std::invalid_argument&) {
    }
  }
  for (const auto& spec : args.fixes) {
    const auto [name, value] = parse_fix(spec);
    adapter.fix(name, value);
  }
  for (const auto& name : args.frees) adapter.thaw(name);
  return adapter;
}

fs::path prepare_out_dir(const io::RunConfig& rc,
                         const std::vector<std::string>& argv) {
  const fs::path dir(rc.out_dir);
  fs::create_directories(dir);
  // timestamps are confined to this sidecar log so data files stay
  // byte-reproducible
  std::ofstream log(dir / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::now();
  log << std::chrono::duration_cast<std::chrono::seconds>(
             now.time_since_epoch())
             .count()
      << " |";
  for (const auto& a : argv) log << ' ' << a;
  log << '\n';
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

Eigen::VectorXd adapter_inits(const fit::ModelAdapter& adapter) {
  Eigen::VectorXd v(adapter.params.size());
  for (std::size_t i = 0; i < adapter.params.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = adapter.params[i].init;
  }
  return v;
}

json fit_result_json_obj(const FitResult& result,
                         const std::string& model_name) {
  return json::parse(fit::fit_result_to_json(result, model_name));
}

int run_validate(const CommonArgs& args) {
  if (args.config_path.empty()) {
    std::cerr << "error: validate requires --config\n";
    return kExitValidation;
  }
  io::RunConfig rc;
  try {
    rc = io::RunConfig::from_file(io::parse_config(args.config_path));
  } catch (const std::exception& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitValidation;
  }
  const auto violations = validate_system(rc.system);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid: " << v << "\n";
    return kExitValidation;
  }
  std::cout << "OK\n";
  return kExitOk;
}

struct GridArgs {
  double x_min = std::numeric_limits<double>::quiet_NaN();
  double x_max = std::numeric_limits<double>::quiet_NaN();
  int n_points = 0;
};

io::SyntheticRequest make_request(const io::RunConfig& rc,
                                  const fit::ModelAdapter& adapter,
                                  const GridArgs& grid) {
  io::SyntheticRequest req;
  req.kind = adapter.accepts.front();
  req.x_min = std::isnan(grid.x_min) ? rc.x_min : grid.x_min;
  req.x_max = std::isnan(grid.x_max) ? rc.x_max : grid.x_max;
  req.n_points = grid.n_points > 0 ? grid.n_points : rc.n_points;
  req.log_spacing = rc.log_spacing;
  if (adapter.name == fit::AdapterName::LorentzianProfile) {
    req.metadata["abscissa"] = "f_hz";  // profiles live on a frequency axis
  }
  return req;
}

int run_simulate(const CommonArgs& args, const GridArgs& grid,
                 const std::vector<std::string>& argv) {
  const auto rc = load_config(args);
  const auto adapter = build_adapter(rc, args);
  const auto dir = prepare_out_dir(rc, argv);

  auto req = make_request(rc, adapter, grid);
  req.noise_frac = 0.0;
  io::NoiseRng rng(rc.seed);
  const auto trace =
      io::generate_synthetic(adapter, adapter_inits(adapter), req, rng);
  const auto path = dir / ("simulate_" + to_string(adapter.name) + ".csv");
  io::write_trace(path.string(), trace);
  std::cout << path.string() << "\n";
  return kExitOk;
}

int run_gen_synthetic(const CommonArgs& args, const GridArgs& grid,
                      double noise, const std::string& tag,
                      double temperature_k,
                      const std::vector<std::string>& argv) {
  const auto rc = load_config(args);
  const auto adapter = build_adapter(rc, args);
  const auto dir = prepare_out_dir(rc, argv);

  auto req = make_request(rc, adapter, grid);
  req.noise_frac = noise >= 0.0 ? noise : rc.noise_frac;
  req.temperature_k = temperature_k;

  io::NoiseRng rng(rc.seed);
  const auto truth = adapter_inits(adapter);
  const auto trace = io::generate_synthetic(adapter, truth, req, rng);
  io::write_trace((dir / (tag + ".csv")).string(), trace);
  write_text(dir / (tag + ".truth.json"),
             io::truth_record_json(adapter, truth, req, rc.seed));
  std::cout << (dir / (tag + ".csv")).string() << "\n";
  return kExitOk;
}

int run_fit(const CommonArgs& args, int max_iter,
            const std::vector<std::string>& argv) {
  if (args.traces.size() != 1) {
    std::cerr << "error: fit requires exactly one --trace\n";
    return kExitValidation;
  }
  const auto rc = load_config(args);
  const auto trace = io::read_trace(args.traces[0]);
  const auto adapter = build_adapter(rc, args);
  fit::LmOptions opts;
  if (max_iter > 0) opts.max_iter = max_iter;
  const auto result = fit::fit(adapter, trace, {}, opts);
  const auto dir = prepare_out_dir(rc, argv);
  const std::string js =
      fit::fit_result_to_json(result, to_string(adapter.name));
  write_text(dir / ("fit_" + to_string(adapter.name) + ".json"), js);
  std::cout << js << "\n";
  return result.converged ? kExitOk : kExitUnconverged;
}

int run_fit_series(const CommonArgs& args, std::size_t reference,
                   const std::vector<std::string>& argv) {
  if (args.traces.size() < 2) {
    std::cerr << "error: fit-series requires at least two --trace inputs\n";
    return kExitValidation;
  }
  const auto rc = load_config(args);
  const auto adapter = build_adapter(rc, args);

  std::vector<DecayTrace> traces;
  traces.reserve(args.traces.size());
  for (const auto& path : args.traces) traces.push_back(io::read_trace(path));

  json out;
  out["model"] = to_string(adapter.name);
  bool all_converged = true;

  std::vector<FitResult> fits;
  if (adapter.name == fit::AdapterName::SLRHoleDecay) {
    const auto shared = fit::shared_scale_fit(adapter, traces, reference);
    out["shared_scale"] = {{"value", shared.scale},
                           {"stderr", shared.scale_stderr}};
    fits = shared.per_trace;
  } else {
    // independent fits, one worker per trace
    std::vector<std::future<FitResult>> futures;
    futures.reserve(traces.size());
    for (const auto& tr : traces) {
      futures.push_back(std::async(std::launch::async, [&adapter, &tr] {
        return fit::fit(adapter, tr);
      }));
    }
    for (auto& f : futures) fits.push_back(f.get());
  }

  json per_trace = json::array();
  std::vector<std::pair<double, double>> rate_points;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& r = fits[i];
    all_converged = all_converged && r.converged;
    json item = fit_result_json_obj(r, to_string(adapter.name));
    item["trace"] = args.traces[i];
    item["temperature_K"] = traces[i].temperature_k;
    per_trace.push_back(item);
    if (traces[i].temperature_k > 0.0) {
      for (std::size_t p = 0; p < r.param_names.size(); ++p) {
        if (r.param_names[p] == "t_spin_s") {
          rate_points.emplace_back(
              traces[i].temperature_k,
              1.0 / r.values[static_cast<Eigen::Index>(p)]);
        }
      }
    }
  }
  out["traces"] = per_trace;

  const auto dir = prepare_out_dir(rc, argv);
  if (rate_points.size() >= 4) {
    std::sort(rate_points.begin(), rate_points.end());
    const auto pl = fit::fit_power_law_exponent(rate_points);
    out["power_law"] = {{"coefficient", pl.coefficient},
                        {"coefficient_stderr", pl.coefficient_stderr},
                        {"exponent", pl.exponent},
                        {"exponent_stderr", pl.exponent_stderr}};
    DecayTrace rates;
    rates.kind = TraceKind::TemperatureSeries;
    for (const auto& [t, rate] : rate_points) {
      rates.samples.push_back({t, rate, 0.0});
    }
    io::write_trace((dir / "rates.csv").string(), rates);
  }
  write_text(dir / "fit_series.json", out.dump(2));
  std::cout << out.dump(2) << "\n";
  return all_converged ? kExitOk : kExitUnconverged;
}

int run_deconvolve(const CommonArgs& args, double span_hz, double duration_s,
                   const std::vector<std::string>& argv) {
  if (args.traces.size() != 1) {
    std::cerr << "error: deconvolve requires exactly one --trace\n";
    return kExitValidation;
  }
  const auto rc = load_config(args);
  const auto trace = io::read_trace(args.traces[0]);

  ChirpReadout chirp = rc.chirp;
  const auto meta_or = [&](const char* key, double fallback) {
    const auto it = trace.metadata.find(key);
    return it != trace.metadata.end() ? std::stod(it->second) : fallback;
  };
  chirp.span_hz = meta_or("chirp_span_hz", chirp.span_hz);
  chirp.duration_s = meta_or("chirp_duration_s", chirp.duration_s);
  if (!std::isnan(span_hz)) chirp.span_hz = span_hz;
  if (!std::isnan(duration_s)) chirp.duration_s = duration_s;
  int n_fft = 1024;
  while (n_fft < static_cast<int>(trace.samples.size())) n_fft <<= 1;
  chirp.n_samples = n_fft;

  const auto profile = deconvolve_chirp(trace, chirp);
  const auto dir = prepare_out_dir(rc, argv);
  io::write_trace((dir / "deconvolved.csv").string(),
                  profile_to_trace(profile));

  const auto lorentz = fit::make_adapter(fit::AdapterName::LorentzianProfile);
  const auto result = fit::fit(lorentz, profile_to_trace(profile));
  json out = fit_result_json_obj(result, "LorentzianProfile");
  out["ringing_metric"] = profile.ringing_metric;
  out["recovered_fwhm_hz"] = result.value_of("fwhm_hz");
  out["recovered_center_hz"] = result.value_of("center_hz");
  write_text(dir / "hole_fit.json", out.dump(2));
  std::cout << out.dump(2) << "\n";
  return result.converged ? kExitOk : kExitUnconverged;
}

int run_decompose(const CommonArgs& args, double t_min, double t_max,
                  int n_temps, const std::vector<std::string>& argv) {
  const auto rc = load_config(args);
  if (rc.linewidth.gamma_r_hz_per_k9 <= 0.0 ||
      rc.rate_law.alpha_r_hz_per_k9 <= 0.0) {
    std::cerr << "error: decompose-linewidth needs [linewidth].gamma_r and "
                 "[ratelaw].alpha_r > 0\n";
    return kExitValidation;
  }
  const auto dir = prepare_out_dir(rc, argv);

  const double fraction =
      rc.rate_law.alpha_r_hz_per_k9 / (kPi * rc.linewidth.gamma_r_hz_per_k9);
  std::ostringstream csv;
  csv << "T_K,gamma_h_hz,gamma_direct_hz,gamma_elastic_raman_hz,residual_hz\n";
  char buf[256];
  for (int i = 0; i < n_temps; ++i) {
    const double t =
        n_temps == 1
            ? t_min
            : t_min + (t_max - t_min) * static_cast<double>(i) / (n_temps - 1);
    const double gamma_h = gamma_h_of_temperature(rc.linewidth, t);
    const double ts = slr_time(rc.rate_law, t);
    const double direct = direct_contribution(SpinRegime::HighTemperature,
                                              rc.system.t_opt_s, ts);
    const double elastic = (rc.linewidth.gamma_r_hz_per_k9 -
                            rc.rate_law.alpha_r_hz_per_k9 / kPi) *
                           std::pow(t, 9);
    const double residual = gamma_h - direct - elastic;
    std::snprintf(buf, sizeof(buf), "%.6g,%.12e,%.12e,%.12e,%.12e\n", t,
                  gamma_h, direct, elastic, residual);
    csv << buf;
  }
  write_text(dir / "linewidth_decomposition.csv", csv.str());

  json out;
  out["direct_fraction_of_T9"] = fraction;
  out["gamma_h0_hz"] = rc.linewidth.gamma_h0_hz;
  out["gamma_r_hz_per_k9"] = rc.linewidth.gamma_r_hz_per_k9;
  out["alpha_r_hz_per_k9"] = rc.rate_law.alpha_r_hz_per_k9;
  write_text(dir / "linewidth_decomposition.json", out.dump(2));
  std::cout << "direct fraction of the T^9 linewidth: " << fraction << "\n"
            << (dir / "linewidth_decomposition.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"spectral hole burning and photon echo analysis toolkit",
               "holeburn"};
  app.require_subcommand(1);

  CommonArgs common;
  GridArgs grid;
  double noise = -1.0;
  std::string tag = "synthetic";
  double temperature_k = 0.0;
  std::size_t reference = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double span_hz = nan, duration_s = nan;
  double t_min = 6.0, t_max = 10.0;
  int n_temps = 9;

  std::function<int()> action;

  auto* validate = app.add_subcommand("validate", "check a config file");
  add_common(validate, common);
  validate->callback([&] { action = [&] { return run_validate(common); }; });

  auto* simulate =
      app.add_subcommand("simulate", "write noiseless model curves as CSV");
  add_common(simulate, common);
  simulate->add_option("--x-min", grid.x_min, "grid start");
  simulate->add_option("--x-max", grid.x_max, "grid end");
  simulate->add_option("--n", grid.n_points, "number of grid points");
  simulate->callback(
      [&] { action = [&] { return run_simulate(common, grid, argv); }; });

  auto* gen = app.add_subcommand("gen-synthetic",
                                 "generate a noisy trace plus truth record");
  add_common(gen, common);
  gen->add_option("--x-min", grid.x_min, "grid start");
  gen->add_option("--x-max", grid.x_max, "grid end");
  gen->add_option("--n", grid.n_points, "number of grid points");
  gen->add_option("--noise", noise, "relative gaussian noise (e.g. 0.01)");
  gen->add_option("--name", tag, "output file tag");
  gen->add_option("--temperature", temperature_k, "temperature_K metadata");
  gen->callback([&] {
    action = [&] {
      return run_gen_synthetic(common, grid, noise, tag, temperature_k, argv);
    };
  });

  int max_iter = 0;
  auto* fit_cmd = app.add_subcommand("fit", "fit one model to one trace");
  add_common(fit_cmd, common);
  fit_cmd->add_option("--max-iter", max_iter, "iteration cap (default 200)");
  fit_cmd->callback(
      [&] { action = [&] { return run_fit(common, max_iter, argv); }; });

  auto* series = app.add_subcommand(
      "fit-series", "fit several traces; shared scale for SLR hole decays");
  add_common(series, common);
  series->add_option("--ref", reference, "reference trace index (0-based)");
  series->callback([&] {
    action = [&] { return run_fit_series(common, reference, argv); };
  });

  auto* deconv = app.add_subcommand(
      "deconvolve", "invert the fast-chirp distortion of a readout trace");
  add_common(deconv, common);
  deconv->add_option("--span", span_hz, "chirp span in Hz");
  deconv->add_option("--duration", duration_s, "chirp duration in s");
  deconv->callback([&] {
    action = [&] { return run_deconvolve(common, span_hz, duration_s, argv); };
  });

  auto* decomp = app.add_subcommand(
      "decompose-linewidth",
      "tabulate gamma_h against its direct and elastic-Raman parts");
  add_common(decomp, common);
  decomp->add_option("--t-min", t_min, "lowest temperature (K)");
  decomp->add_option("--t-max", t_max, "highest temperature (K)");
  decomp->add_option("--n-temps", n_temps, "number of temperatures");
  decomp->callback([&] {
    action = [&] { return run_decompose(common, t_min, t_max, n_temps, argv); };
  });

  std::vector<char*> cargv;
  cargv.reserve(argv.size());
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
    return kExitUsage;
  }

  if (!action) {
    std::cerr << app.help() << "\n";
    return kExitUsage;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace holeburn::cli
