// soris: command-line front end for the channel acquisition toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "soris/budget.hpp"
#include "soris/csv.hpp"
#include "soris/error.hpp"
#include "soris/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace soris;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Raised for user errors found after parsing; maps to exit code 1.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit_json(const json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  const fs::path p(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << doc.dump(2) << '\n';
}

// Loads --config (if any) and validates it; exits via InvalidInput listing all
// violations.
ExperimentConfig load_config(const std::string& path, const json& patch = json::object()) {
  json raw = path.empty() ? json::object() : read_json_file(path);
  raw.merge_patch(patch);
  const ConfigDiagnostics d = validate_config(raw);
  if (!d.ok()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : d.violations) msg += "\n  " + v;
    throw InvalidInput(msg);
  }
  return *d.config;
}

// Accepts inline JSON, a JSON file, or preset:<id>.
ActiveSet parse_set_spec(const std::string& spec, const GridSpec& grid) {
  if (spec.rfind("preset:", 0) == 0) return preset_set(spec.substr(7), grid);
  json doc;
  if (!spec.empty() && (spec.front() == '{' || spec.front() == '[')) {
    try {
      doc = json::parse(spec);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("set spec: ") + e.what());
    }
  } else {
    doc = read_json_file(spec);
  }
  if (doc.is_object()) doc = doc.at("elements");
  return ActiveSet(grid, elements_from_json(doc));
}

struct DatasetInfo {
  GridSpec grid;
  double kappa_db = 8.0;
  std::vector<ChannelRealization> channels;
};

DatasetInfo load_dataset(const fs::path& dir) {
  const json m = read_json_file(dir / "manifest.json");
  DatasetInfo d;
  try {
    d.grid = GridSpec::from_fraction(m.at("grid").at("rows").get<int>(),
                                     m.at("grid").at("cols").get<int>(),
                                     m.at("spacing_frac").get<double>());
    d.kappa_db = m.at("kappa_db").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("dataset manifest: " + std::string(e.what()));
  }
  const auto down = read_complex_rows(dir / "downlink.csv");
  const auto up = read_complex_rows(dir / "uplink.csv");
  if (down.size() != up.size()) throw ConfigError("dataset link files differ in length");
  for (std::size_t i = 0; i < down.size(); ++i) {
    if (down[i].size() != d.grid.size() || up[i].size() != d.grid.size())
      throw ConfigError("dataset row width does not match the grid");
    d.channels.push_back({down[i], up[i]});
  }
  return d;
}

json wiring_json(const WiringReport& r) {
  return {{"inputs",
           {{"n", r.inputs.n}, {"n_f", r.inputs.n_f}, {"b_p", r.inputs.b_p},
            {"b_m", r.inputs.b_m}, {"bus_rate", r.inputs.bus_rate},
            {"switch_latency", r.inputs.switch_latency}}},
          {"total_wires", r.total_wires},
          {"signaling_overhead",
           {{"num", r.signaling_overhead.num},
            {"den", r.signaling_overhead.den},
            {"seconds", r.signaling_overhead.value()}}},
          {"control_latency", r.control_latency}};
}

json complexity_json(const ComplexityReport& r) {
  return {{"runtime_order", r.runtime_order},
          {"training_order", r.training_order},
          {"space_order", r.space_order},
          {"runtime", {{"correlation", r.runtime_correlation},
                       {"acquisition", r.runtime_acquisition},
                       {"total", r.runtime_total},
                       {"dominant", r.runtime_dominant}}},
          {"training_ops", r.training_ops},
          {"inference_ops", r.inference_ops},
          {"space", {{"correlation", r.space_correlation},
                     {"model", r.space_model},
                     {"total", r.space_total},
                     {"dominant", r.space_dominant}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-organized RIS channel acquisition and prediction"};
  app.require_subcommand(1);

  // correlation
  auto* corr_cmd = app.add_subcommand("correlation", "Write the spatial correlation matrix as CSV");
  int c_rows = 8, c_cols = 8;
  double c_frac = 0.5;
  std::string c_out;
  corr_cmd->add_option("--rows", c_rows)->check(CLI::PositiveNumber);
  corr_cmd->add_option("--cols", c_cols)->check(CLI::PositiveNumber);
  corr_cmd->add_option("--spacing-frac", c_frac)->check(CLI::PositiveNumber);
  corr_cmd->add_option("--out", c_out)->required();

  // select
  auto* sel_cmd = app.add_subcommand("select", "Choose the active elements");
  std::string s_method = "min-corr", s_out;
  int s_count = 8, s_rows = 8, s_cols = 8;
  double s_frac = 0.5;
  std::optional<int> s_start;
  sel_cmd->add_option("--method", s_method, "preset:<id> | min-corr | diagonal");
  sel_cmd->add_option("--count", s_count);
  sel_cmd->add_option("--rows", s_rows)->check(CLI::PositiveNumber);
  sel_cmd->add_option("--cols", s_cols)->check(CLI::PositiveNumber);
  sel_cmd->add_option("--spacing-frac", s_frac)->check(CLI::PositiveNumber);
  sel_cmd->add_option("--start", s_start, "diagonal start k");
  sel_cmd->add_option("--out", s_out);

  // gen-dataset
  auto* gen_cmd = app.add_subcommand("gen-dataset", "Sample correlated Rician channels");
  int g_samples = 10000, g_rows = 8, g_cols = 8;
  std::uint64_t g_seed = 1;
  double g_kappa = 8.0, g_frac = 0.5;
  std::string g_out;
  gen_cmd->add_option("--samples", g_samples)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", g_seed);
  gen_cmd->add_option("--kappa-db", g_kappa);
  gen_cmd->add_option("--spacing-frac", g_frac)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--rows", g_rows)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", g_cols)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", g_out)->required();

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "Pilot-based estimation on a dataset");
  std::string e_dataset, e_set, e_out;
  int e_pilots = 10;
  double e_noise = 1e-4, e_sigma = 0.0;
  std::uint64_t e_seed = 1;
  est_cmd->add_option("--dataset", e_dataset)->required();
  est_cmd->add_option("--set", e_set)->required();
  est_cmd->add_option("--pilots", e_pilots)->check(CLI::PositiveNumber);
  est_cmd->add_option("--noise-var", e_noise)->check(CLI::NonNegativeNumber);
  est_cmd->add_option("--sigma", e_sigma, "extra estimator error std")->check(CLI::NonNegativeNumber);
  est_cmd->add_option("--seed", e_seed);
  est_cmd->add_option("--out", e_out, "output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a network on a dataset");
  std::string t_model = "rnn", t_dataset, t_set, t_config, t_out;
  train_cmd->add_option("--model", t_model)->check(CLI::IsMember({"rnn", "cnn"}));
  train_cmd->add_option("--dataset", t_dataset)->required();
  train_cmd->add_option("--set", t_set)->required();
  train_cmd->add_option("--config", t_config);
  train_cmd->add_option("--out", t_out)->required();

  // predict
  auto* pred_cmd = app.add_subcommand("predict", "Apply a trained network to estimates");
  std::string p_model, p_csi, p_out;
  pred_cmd->add_option("--model", p_model)->required();
  pred_cmd->add_option("--csi", p_csi, "CSV, one estimate vector per line")->required();
  pred_cmd->add_option("--out", p_out)->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Monte Carlo AMSE or BER");
  std::string v_kind, v_scenario, v_model = "rnn", v_out;
  int v_trials = 0;
  std::optional<std::uint64_t> v_seed;
  std::vector<double> v_snr{kBerSnrDb};
  std::int64_t v_bits = 100000;
  eval_cmd->add_option("kind", v_kind)->required()->check(CLI::IsMember({"amse", "ber"}));
  eval_cmd->add_option("--scenario", v_scenario, "experiment config JSON");
  eval_cmd->add_option("--model", v_model, "model.json | rnn | cnn | li | ideal");
  eval_cmd->add_option("--trials", v_trials)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", v_seed, "evaluation seed");
  eval_cmd->add_option("--snr-db", v_snr)->expected(1, -1);
  eval_cmd->add_option("--bits", v_bits);
  eval_cmd->add_option("--out", v_out)->required();

  // wiring
  auto* wire_cmd = app.add_subcommand("wiring", "Control wiring and signaling overhead");
  std::int64_t w_n = 256, w_nf = 8, w_bp = 2, w_bm = 1, w_rate = 1000000000;
  double w_tw = 0.0;
  std::string w_out;
  wire_cmd->add_option("--n", w_n);
  wire_cmd->add_option("--nf", w_nf);
  wire_cmd->add_option("--bp", w_bp);
  wire_cmd->add_option("--bm", w_bm);
  wire_cmd->add_option("--rate", w_rate, "bus rate in bit/s");
  wire_cmd->add_option("--tw", w_tw, "phase switching latency in seconds");
  wire_cmd->add_option("--out", w_out);

  // complexity
  auto* cx_cmd = app.add_subcommand("complexity", "Operation and storage counts");
  ComplexityInputs cx{64, 8, 10, 10, 100, 10000, 64, 64};
  std::string cx_out;
  cx_cmd->add_option("--n", cx.n);
  cx_cmd->add_option("--nf", cx.n_f);
  cx_cmd->add_option("--l", cx.pilots_down);
  cx_cmd->add_option("--lu", cx.pilots_up);
  cx_cmd->add_option("--ne", cx.epochs);
  cx_cmd->add_option("--ns", cx.train_samples);
  cx_cmd->add_option("--lh", cx.hidden_width);
  cx_cmd->add_option("--rh", cx.hidden_units);
  cx_cmd->add_option("--out", cx_out);

  // replicate
  auto* rep_cmd = app.add_subcommand("replicate", "Regenerate a figure's data table");
  std::string r_figure, r_overrides, r_out = "replication";
  rep_cmd->add_option("--figure", r_figure)->required();
  rep_cmd->add_option("--overrides", r_overrides, "JSON object or file");
  rep_cmd->add_option("--out", r_out);

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Check an experiment config");
  std::string val_config;
  val_cmd->add_option("--config", val_config)->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline for a config");
  std::string run_config;
  run_cmd->add_option("--config", run_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    configure_threads();

    if (*corr_cmd) {
      const GridSpec grid = GridSpec::from_fraction(c_rows, c_cols, c_frac);
      write_matrix_csv(c_out, correlation_values(grid));
    } else if (*sel_cmd) {
      const GridSpec grid = GridSpec::from_fraction(s_rows, s_cols, s_frac);
      ActiveSet set;
      json meta{{"method", s_method}};
      if (s_method.rfind("preset:", 0) == 0) {
        set = preset_set(s_method.substr(7), grid);
      } else if (s_method == "min-corr") {
        set = select_min_correlation(correlation_matrix(grid), s_count);
        meta["count"] = s_count;
      } else if (s_method == "diagonal") {
        const CorrelationModel corr = correlation_matrix(grid);
        set = select_diagonal(grid, corr, s_count, s_start);
        const int k = s_start.value_or(default_diagonal_start(grid));
        meta["count"] = s_count;
        meta["start"] = k;
        meta["step"] = diagonal_step(corr, k);
      } else {
        throw InvalidInput("unknown method '" + s_method +
                           "' (allowed: preset:<id>, min-corr, diagonal)");
      }
      emit_json({{"elements", set_to_json(set)},
                 {"grid", {{"rows", s_rows}, {"cols", s_cols}, {"spacing_frac", s_frac}}},
                 {"selection", meta}},
                s_out);
    } else if (*gen_cmd) {
      const GridSpec grid = GridSpec::from_fraction(g_rows, g_cols, g_frac);
      RicianConfig rician;
      rician.kappa_db = g_kappa;
      const auto channels = channel_dataset(g_seed, correlation_matrix(grid), grid, rician,
                                            static_cast<std::size_t>(g_samples));
      std::vector<ComplexVector> down, up;
      for (const auto& ch : channels) {
        down.push_back(ch.downlink);
        up.push_back(ch.uplink);
      }
      const fs::path dir(g_out);
      write_complex_rows(dir / "downlink.csv", down);
      write_complex_rows(dir / "uplink.csv", up);
      emit_json({{"schema_version", kConfigSchemaVersion},
                 {"grid", {{"rows", g_rows}, {"cols", g_cols}}},
                 {"spacing_frac", g_frac},
                 {"kappa_db", g_kappa},
                 {"seed", g_seed},
                 {"samples", g_samples}},
                (dir / "manifest.json").string());
    } else if (*est_cmd) {
      const DatasetInfo d = load_dataset(e_dataset);
      const ActiveSet set = parse_set_spec(e_set, d.grid);
      PilotConfig pilots;
      pilots.pilots_down = pilots.pilots_up = e_pilots;
      pilots.noise_variance = e_noise;
      const auto est = estimate_dataset(e_seed, d.channels, set, pilots, e_sigma);
      std::vector<ComplexVector> down, up;
      for (const auto& e : est) {
        down.push_back(e.first.values);
        up.push_back(e.second.values);
      }
      const fs::path dir(e_out);
      write_complex_rows(dir / "downlink.csv", down);
      write_complex_rows(dir / "uplink.csv", up);
      emit_json({{"active_set", set_to_json(set)},
                 {"pilots", e_pilots},
                 {"noise_variance", e_noise},
                 {"sigma", e_sigma},
                 {"seed", e_seed},
                 {"latency_seconds", csi_latency(set.size(), e_pilots, pilots.symbol_period)}},
                (dir / "manifest.json").string());
    } else if (*train_cmd) {
      const DatasetInfo d = load_dataset(t_dataset);
      const ActiveSet set = parse_set_spec(t_set, d.grid);
      set.require_proper();
      const ExperimentConfig cfg = load_config(t_config);
      ModelSpec spec = model_spec(cfg);
      spec.kind = t_model;
      const auto est = estimate_dataset(split_seed(cfg.seed_train, "train-estimates"),
                                        d.channels, set, cfg.pilots, cfg.train_sigma);
      Corpus corpus;
      corpus.channels = d.channels;
      for (const auto& e : est) corpus.estimates.push_back(e.first);
      const StoredModel model = train_model(spec, corpus, set);
      save_model(model, t_out);
      std::cout << "final loss " << format_double(model.loss_trace.back()) << '\n';
    } else if (*pred_cmd) {
      const ModelPredictor predictor(load_model(p_model));
      const ActiveSet& set = predictor.model().set;
      std::vector<ComplexVector> out;
      for (const auto& row : read_complex_rows(p_csi)) {
        if (row.size() != set.size())
          throw ConfigError("estimate rows must have one value per active element");
        out.push_back(predictor.predict({row, LinkDirection::downlink}, set, {}).complex_view());
      }
      write_complex_rows(p_out, out);
    } else if (*eval_cmd) {
      ExperimentConfig cfg = load_config(v_scenario);
      if (v_trials > 0) cfg.trials = v_trials;
      if (v_seed) cfg.seed_eval = *v_seed;
      if (cfg.seed_eval == cfg.seed_train)
        throw InvalidInput("evaluation seed must differ from the training seed");
      const GridSpec grid = cfg.grid();
      const CorrelationModel corr = correlation_matrix(grid);
      const ActiveSet set = resolve_selection(cfg.selection, corr);
      set.require_proper();

      std::shared_ptr<const ChannelPredictor> predictor;
      if (v_model == "ideal" || v_model == "li") {
        predictor = make_baseline(v_model);
      } else if (v_model == "rnn" || v_model == "cnn") {
        cfg.predictor = v_model;
        const Corpus corpus = training_corpus(cfg.seed_train, make_scenario(cfg, set, cfg.train_sigma),
                                              corr, cfg.training.train_samples);
        predictor = std::make_shared<ModelPredictor>(train_model(model_spec(cfg), corpus, set));
      } else {
        predictor = std::make_shared<ModelPredictor>(load_model(v_model));
      }

      Table t;
      if (v_kind == "amse") {
        t.columns = {"link", "spacing_frac", "n_f", "sigma", "trials",
                     "e_h", "stderr_h", "e_theta", "stderr_theta", "e_theta_wrapped"};
        for (double sigma : cfg.sigmas) {
          const AmseResult r =
              amse_monte_carlo(cfg.seed_eval, make_scenario(cfg, set, sigma), corr, *predictor, cfg.trials);
          for (const auto& [link, rep] : {std::pair{"downlink", &r.downlink},
                                          std::pair{"uplink", &r.uplink},
                                          std::pair{"combined", &r.combined}})
            t.add_row({link, format_double(cfg.spacing_frac), std::to_string(set.size()),
                       format_double(sigma), std::to_string(rep->trials),
                       format_double(rep->e_h_mean),
                       rep->std_err_defined ? format_double(rep->std_err_h) : "nan",
                       format_double(rep->e_theta_mean),
                       rep->std_err_defined ? format_double(rep->std_err_theta) : "nan",
                       format_double(rep->e_theta_wrapped_mean)});
        }
      } else {
        t.columns = {"predictor", "n", "n_f", "spacing_frac", "sigma", "snr_db", "bits",
                     "ber", "stderr", "ci_low", "ci_high"};
        for (double sigma : cfg.sigmas)
          for (double snr : v_snr) {
            const BerResult b = ber_simulation(cfg.seed_eval, make_scenario(cfg, set, sigma), corr,
                                               *predictor, snr, v_bits);
            t.add_row({predictor->name(), std::to_string(grid.size()), std::to_string(set.size()),
                       format_double(cfg.spacing_frac), format_double(sigma), format_double(snr),
                       std::to_string(b.bits), format_double(b.ber), format_double(b.std_err),
                       format_double(b.ci_low), format_double(b.ci_high)});
          }
      }
      write_table(v_out, t);
    } else if (*wire_cmd) {
      emit_json(wiring_json(wiring_report(w_n, w_nf, w_bp, w_bm, w_rate, w_tw)), w_out);
    } else if (*cx_cmd) {
      emit_json(complexity_json(complexity_report(cx)), cx_out);
    } else if (*rep_cmd) {
      json ov = json::object();
      if (!r_overrides.empty())
        ov = r_overrides.front() == '{' ? json::parse(r_overrides) : read_json_file(r_overrides);
      ReplicateOptions opt = apply_overrides(ReplicateOptions{}, ov);
      if (!ov.contains("output_dir")) opt.output_dir = r_out;
      const Table t = replicate_figure(r_figure, opt);
      std::cout << t.rows.size() << " rows written to " << (opt.output_dir / (r_figure + ".csv")).string()
                << '\n';
    } else if (*val_cmd) {
      const ConfigDiagnostics d = validate_config(read_json_file(val_config));
      for (const auto& s : d.defaults_applied) std::cerr << "default: " << s << '\n';
      if (!d.ok()) {
        for (const auto& v : d.violations) std::cerr << "violation: " << v << '\n';
        return kExitValidation;
      }
      std::cout << config_to_json(*d.config).dump(2) << '\n';
    } else if (*run_cmd) {
      const ExperimentConfig cfg = load_config(run_config);
      const RunManifest m = run_pipeline(cfg, fs::path(run_config));
      std::cout << "run complete: " << cfg.output_dir << " (" << m.artifacts.size()
                << " artifacts)\n";
    }
  } catch (const InvalidInput& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BoundsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
