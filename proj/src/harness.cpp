#include "soris/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <omp.h>
#include <openssl/evp.h>

#include "soris/error.hpp"

namespace soris {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Typed field access that records problems instead of throwing.
class Reader {
public:
  explicit Reader(ConfigDiagnostics& diag) : diag_(diag) {}

  const json* object(const json& parent, const std::string& key, const std::string& path,
                     std::initializer_list<const char*> allowed) {
    if (!parent.contains(key)) {
      diag_.defaults_applied.push_back(path + " (all defaults)");
      return nullptr;
    }
    const json& obj = parent.at(key);
    if (!obj.is_object()) {
      violation(path, "expected an object");
      return nullptr;
    }
    check_keys(obj, path, allowed);
    return &obj;
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
      if (!ok.count(item.key()))
        violation(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }

  int integer(const json* obj, const char* key, const std::string& path, int def) {
    const json* v = field(obj, key, path, json(def));
    if (!v) return def;
    if (!v->is_number_integer()) {
      violation(path, "expected an integer");
      return def;
    }
    const auto x = v->get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      violation(path, "integer out of range");
      return def;
    }
    return static_cast<int>(x);
  }

  std::uint64_t seed(const json* obj, const char* key, const std::string& path,
                     std::uint64_t def) {
    const json* v = field(obj, key, path, json(def));
    if (!v) return def;
    if (!v->is_number_unsigned()) {
      violation(path, "expected a non-negative integer");
      return def;
    }
    return v->get<std::uint64_t>();
  }

  double real(const json* obj, const char* key, const std::string& path, double def) {
    const json* v = field(obj, key, path, json(def));
    if (!v) return def;
    if (!v->is_number()) {
      violation(path, "expected a number");
      return def;
    }
    return v->get<double>();
  }

  std::string text(const json* obj, const char* key, const std::string& path,
                   const std::string& def) {
    const json* v = field(obj, key, path, json(def));
    if (!v) return def;
    if (!v->is_string()) {
      violation(path, "expected a string");
      return def;
    }
    return v->get<std::string>();
  }

  bool has(const json* obj, const char* key) const { return obj && obj->contains(key); }

  void violation(const std::string& path, const std::string& what) {
    diag_.violations.push_back(path + ": " + what);
  }

private:
  const json* field(const json* obj, const char* key, const std::string& path,
                    const json& def) {
    if (!obj || !obj->contains(key)) {
      diag_.defaults_applied.push_back(path + " = " + def.dump());
      return nullptr;
    }
    return &obj->at(key);
  }

  ConfigDiagnostics& diag_;
};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string pilot_pattern_name(PilotPattern p) {
  return p == PilotPattern::constant ? "constant" : "alternating";
}

json selection_to_json(const SelectionSpec& s) {
  json j{{"method", s.method}};
  if (s.method == "preset") j["preset"] = s.preset;
  if (s.method == "min-corr" || s.method == "diagonal") j["count"] = s.count;
  if (s.method == "diagonal" && s.start) j["start"] = *s.start;
  if (s.method == "explicit") {
    json el = json::array();
    for (const auto& e : s.elements) el.push_back({e.row, e.col});
    j["elements"] = el;
  }
  return j;
}

std::string stderr_cell(const AmseReport& r, double v) {
  return r.std_err_defined ? format_double(v) : "nan";
}

}  // namespace

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ConfigDiagnostics validate_config(const json& raw) {
  ConfigDiagnostics diag;
  Reader rd(diag);
  if (!raw.is_object()) {
    diag.violations.push_back("document: expected a JSON object");
    return diag;
  }
  rd.check_keys(raw, "",
                {"schema_version", "grid", "spacing_frac", "kappa_db", "selection", "pilots",
                 "sigmas", "train_sigma", "predictor", "model", "training", "trials", "seeds",
                 "output_dir"});
  ExperimentConfig c;
  const json* root = &raw;

  const int schema = rd.integer(root, "schema_version", "schema_version", kConfigSchemaVersion);
  if (schema != kConfigSchemaVersion)
    rd.violation("schema_version", "unsupported version " + std::to_string(schema) +
                                       " (expected " + std::to_string(kConfigSchemaVersion) + ")");

  const json* grid = rd.object(raw, "grid", "grid", {"rows", "cols"});
  c.rows = rd.integer(grid, "rows", "grid.rows", c.rows);
  c.cols = rd.integer(grid, "cols", "grid.cols", c.cols);
  const bool grid_ok = c.rows >= 1 && c.cols >= 1;
  if (c.rows < 1) rd.violation("grid.rows", "must be >= 1");
  if (c.cols < 1) rd.violation("grid.cols", "must be >= 1");

  c.spacing_frac = rd.real(root, "spacing_frac", "spacing_frac", c.spacing_frac);
  const bool spacing_ok = c.spacing_frac > 0.0 && std::isfinite(c.spacing_frac);
  if (!spacing_ok) rd.violation("spacing_frac", "must be a positive finite number");
  c.kappa_db = rd.real(root, "kappa_db", "kappa_db", c.kappa_db);
  if (!std::isfinite(c.kappa_db)) rd.violation("kappa_db", "must be finite");

  const json* sel = rd.object(raw, "selection", "selection",
                              {"method", "preset", "count", "start", "elements"});
  SelectionSpec& s = c.selection;
  s.method = rd.text(sel, "method", "selection.method", s.method);
  const std::vector<std::string> methods{"preset", "min-corr", "diagonal", "explicit"};
  const bool method_ok = std::find(methods.begin(), methods.end(), s.method) != methods.end();
  if (!method_ok)
    rd.violation("selection.method", "unknown method '" + s.method + "' (allowed: " +
                                         join(methods) + ")");
  if (s.method == "preset") s.preset = rd.text(sel, "preset", "selection.preset", s.preset);
  if (s.method == "min-corr" || s.method == "diagonal")
    s.count = rd.integer(sel, "count", "selection.count", s.count);
  if (s.method == "diagonal" && rd.has(sel, "start"))
    s.start = rd.integer(sel, "start", "selection.start", 1);
  if (s.method == "explicit") {
    if (!rd.has(sel, "elements") || !sel->at("elements").is_array()) {
      rd.violation("selection.elements", "explicit selection needs an array of [row, col]");
    } else {
      for (const auto& e : sel->at("elements")) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer()) {
          rd.violation("selection.elements", "each entry must be [row, col] integers");
          continue;
        }
        s.elements.push_back({e[0].get<int>(), e[1].get<int>()});
      }
    }
  }

  if (grid_ok && spacing_ok && method_ok) {
    const GridSpec g = c.grid();
    const int n = g.size();
    try {
      int n_f = 0;
      if (s.method == "preset") {
        n_f = preset_set(s.preset, g).size();
      } else if (s.method == "explicit") {
        n_f = ActiveSet(g, s.elements).size();
      } else {
        n_f = s.count;
        if (s.count < 1) rd.violation("selection.count", "must be >= 1");
        if (s.method == "diagonal" && s.count >= 1 && s.count < n) {
          CorrelationModel light{g, correlation_values(g), {}, 0.0, 0.0, 0.0};
          select_diagonal(g, light, s.count, s.start);
        }
      }
      if (n_f >= n)
        rd.violation("selection", "N_f = " + std::to_string(n_f) + " must be below N = " +
                                      std::to_string(n));
    } catch (const std::exception& e) {
      std::string what = e.what();
      if (s.method == "preset") what += " (allowed: " + join(preset_names()) + ")";
      rd.violation("selection", what);
    }
  }

  const json* pil = rd.object(raw, "pilots", "pilots",
                              {"pilots_down", "pilots_up", "pilot_power", "noise_variance",
                               "symbol_period", "pattern"});
  PilotConfig& p = c.pilots;
  p.pilots_down = rd.integer(pil, "pilots_down", "pilots.pilots_down", p.pilots_down);
  p.pilots_up = rd.integer(pil, "pilots_up", "pilots.pilots_up", p.pilots_up);
  p.pilot_power = rd.real(pil, "pilot_power", "pilots.pilot_power", p.pilot_power);
  p.noise_variance = rd.real(pil, "noise_variance", "pilots.noise_variance", p.noise_variance);
  p.symbol_period = rd.real(pil, "symbol_period", "pilots.symbol_period", p.symbol_period);
  const std::string pattern = rd.text(pil, "pattern", "pilots.pattern", "constant");
  if (pattern == "alternating") p.pattern = PilotPattern::alternating;
  else if (pattern != "constant")
    rd.violation("pilots.pattern", "unknown pattern '" + pattern + "' (allowed: constant, alternating)");
  try {
    p.validate();
  } catch (const std::exception& e) {
    rd.violation("pilots", e.what());
  }

  if (raw.contains("sigmas")) {
    const json& sg = raw.at("sigmas");
    if (!sg.is_array() || sg.empty()) {
      rd.violation("sigmas", "expected a non-empty array of numbers");
    } else {
      c.sigmas.clear();
      for (const auto& v : sg) {
        if (!v.is_number() || !(v.get<double>() >= 0.0) || !std::isfinite(v.get<double>())) {
          rd.violation("sigmas", "entries must be finite numbers >= 0");
          continue;
        }
        c.sigmas.push_back(v.get<double>());
      }
    }
  } else {
    diag.defaults_applied.push_back("sigmas = [0]");
  }
  c.train_sigma = rd.real(root, "train_sigma", "train_sigma", c.train_sigma);
  if (!(c.train_sigma >= 0.0) || !std::isfinite(c.train_sigma))
    rd.violation("train_sigma", "must be a finite number >= 0");

  c.predictor = rd.text(root, "predictor", "predictor", c.predictor);
  const auto& names = predictor_names();
  if (std::find(names.begin(), names.end(), c.predictor) == names.end())
    rd.violation("predictor", "unknown predictor '" + c.predictor + "' (allowed: " +
                                  join(names) + ")");

  const json* model = rd.object(raw, "model", "model", {"hidden", "dense"});
  c.hidden = rd.integer(model, "hidden", "model.hidden", c.hidden);
  c.dense = rd.integer(model, "dense", "model.dense", c.dense);
  if (c.hidden < 1) rd.violation("model.hidden", "must be >= 1");
  if (c.dense < 1) rd.violation("model.dense", "must be >= 1");

  const json* tr = rd.object(raw, "training", "training",
                             {"learning_rate", "epochs", "batch_size", "train_samples"});
  TrainConfig& t = c.training;
  t.learning_rate = rd.real(tr, "learning_rate", "training.learning_rate", t.learning_rate);
  t.epochs = rd.integer(tr, "epochs", "training.epochs", t.epochs);
  t.batch_size = rd.integer(tr, "batch_size", "training.batch_size", t.batch_size);
  t.train_samples = rd.integer(tr, "train_samples", "training.train_samples", t.train_samples);
  if (!(t.learning_rate >= 0.0) || !std::isfinite(t.learning_rate))
    rd.violation("training.learning_rate", "must be a finite number >= 0");
  if (t.epochs < 1) rd.violation("training.epochs", "must be >= 1");
  if (t.batch_size < 1) rd.violation("training.batch_size", "must be >= 1");
  if (t.train_samples < 1) rd.violation("training.train_samples", "must be >= 1");

  c.trials = rd.integer(root, "trials", "trials", c.trials);
  if (c.trials < 1) rd.violation("trials", "must be >= 1");

  const json* seeds = rd.object(raw, "seeds", "seeds", {"train", "eval"});
  c.seed_train = rd.seed(seeds, "train", "seeds.train", c.seed_train);
  c.seed_eval = rd.seed(seeds, "eval", "seeds.eval", c.seed_eval);
  if (c.seed_train == c.seed_eval)
    rd.violation("seeds", "train and eval seeds must differ so the data regimes stay disjoint");
  t.seed = c.seed_train;

  c.output_dir = rd.text(root, "output_dir", "output_dir", c.output_dir);
  if (c.output_dir.empty()) rd.violation("output_dir", "must not be empty");

  if (diag.ok()) diag.config = c;
  return diag;
}

json config_to_json(const ExperimentConfig& c) {
  return {
      {"schema_version", kConfigSchemaVersion},
      {"grid", {{"rows", c.rows}, {"cols", c.cols}}},
      {"spacing_frac", c.spacing_frac},
      {"kappa_db", c.kappa_db},
      {"selection", selection_to_json(c.selection)},
      {"pilots",
       {{"pilots_down", c.pilots.pilots_down},
        {"pilots_up", c.pilots.pilots_up},
        {"pilot_power", c.pilots.pilot_power},
        {"noise_variance", c.pilots.noise_variance},
        {"symbol_period", c.pilots.symbol_period},
        {"pattern", pilot_pattern_name(c.pilots.pattern)}}},
      {"sigmas", c.sigmas},
      {"train_sigma", c.train_sigma},
      {"predictor", c.predictor},
      {"model", {{"hidden", c.hidden}, {"dense", c.dense}}},
      {"training",
       {{"learning_rate", c.training.learning_rate},
        {"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"train_samples", c.training.train_samples}}},
      {"trials", c.trials},
      {"seeds", {{"train", c.seed_train}, {"eval", c.seed_eval}}},
      {"output_dir", c.output_dir},
  };
}

ActiveSet resolve_selection(const SelectionSpec& spec, const CorrelationModel& corr) {
  if (spec.method == "preset") return preset_set(spec.preset, corr.grid);
  if (spec.method == "min-corr") return select_min_correlation(corr, spec.count);
  if (spec.method == "diagonal") return select_diagonal(corr.grid, corr, spec.count, spec.start);
  if (spec.method == "explicit") return ActiveSet(corr.grid, spec.elements);
  throw ConfigError("unknown selection method '" + spec.method + "'");
}

Scenario make_scenario(const ExperimentConfig& config, const ActiveSet& set, double sigma) {
  Scenario s;
  s.grid = config.grid();
  s.rician.kappa_db = config.kappa_db;
  s.set = set;
  s.pilots = config.pilots;
  s.sigma = sigma;
  return s;
}

ModelSpec model_spec(const ExperimentConfig& config) {
  ModelSpec m;
  m.kind = config.predictor;
  m.hidden = config.hidden;
  m.dense = config.dense;
  m.training = config.training;
  m.training.seed = config.seed_train;
  return m;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

json RunManifest::to_json() const {
  json arts = json::array();
  for (const auto& a : artifacts)
    arts.push_back({{"path", a.path}, {"role", a.role}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  json j{{"tool_version", tool_version},
         {"schema_version", schema_version},
         {"config", config},
         {"started", started},
         {"finished", finished},
         {"wall_seconds", wall_seconds},
         {"status", status},
         {"artifacts", arts},
         {"notes", notes}};
  if (status == "failed") j["failure"] = {{"stage", failed_stage}, {"cause", failure}};
  return j;
}

RunManifest run_pipeline(const ExperimentConfig& config,
                         const std::optional<fs::path>& config_file) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  RunManifest m;
  m.config = config_to_json(config);
  m.started = now_utc();
  const auto t0 = std::chrono::steady_clock::now();

  auto record = [&](const fs::path& p, const std::string& role) {
    ArtifactRecord a;
    const fs::path rel = p.lexically_relative(dir);
    a.path = (!rel.empty() && *rel.begin() != "..") ? rel.generic_string() : p.generic_string();
    a.role = role;
    a.sha256 = sha256_file(p);
    a.bytes = fs::file_size(p);
    m.artifacts.push_back(std::move(a));
  };
  auto finish = [&] {
    m.finished = now_utc();
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(dir / "manifest.json", m.to_json());
  };

  std::string stage = "setup";
  try {
    if (config_file) record(*config_file, "input");
    write_json(dir / "config.json", m.config);
    record(dir / "config.json", "output");

    stage = "correlation";
    const GridSpec grid = config.grid();
    const CorrelationModel corr = correlation_matrix(grid);
    write_matrix_csv(dir / "correlation.csv", corr.matrix);
    record(dir / "correlation.csv", "output");
    if (corr.clamped_mass > 0.0)
      m.notes.push_back("negative eigenvalues clamped, total mass " +
                        format_double(corr.clamped_mass));

    stage = "selection";
    const ActiveSet set = resolve_selection(config.selection, corr);
    set.require_proper();
    json set_doc{{"elements", set_to_json(set)},
                 {"method", selection_to_json(config.selection)},
                 {"grid", {{"rows", grid.rows}, {"cols", grid.cols}}}};
    write_json(dir / "set.json", set_doc);
    record(dir / "set.json", "output");

    std::shared_ptr<const ChannelPredictor> predictor;
    if (config.predictor == "rnn" || config.predictor == "cnn") {
      stage = "dataset";
      const Scenario train_scn = make_scenario(config, set, config.train_sigma);
      Corpus corpus;
      corpus.channels =
          channel_dataset(split_seed(config.seed_train, "train"), corr, grid, train_scn.rician,
                          static_cast<std::size_t>(config.training.train_samples));
      std::vector<ComplexVector> down, up;
      for (const auto& ch : corpus.channels) {
        down.push_back(ch.downlink);
        up.push_back(ch.uplink);
      }
      write_complex_rows(dir / "dataset" / "downlink.csv", down);
      write_complex_rows(dir / "dataset" / "uplink.csv", up);
      write_json(dir / "dataset" / "manifest.json",
                 {{"schema_version", kConfigSchemaVersion},
                  {"grid", {{"rows", grid.rows}, {"cols", grid.cols}}},
                  {"spacing_frac", config.spacing_frac},
                  {"kappa_db", config.kappa_db},
                  {"seed", split_seed(config.seed_train, "train")},
                  {"samples", corpus.channels.size()}});
      for (const char* f : {"downlink.csv", "uplink.csv", "manifest.json"})
        record(dir / "dataset" / f, "output");

      stage = "estimation";
      auto est = estimate_dataset(split_seed(config.seed_train, "train-estimates"),
                                  corpus.channels, set, config.pilots, config.train_sigma);
      std::vector<ComplexVector> est_down, est_up;
      for (auto& e : est) {
        est_down.push_back(e.first.values);
        est_up.push_back(e.second.values);
        corpus.estimates.push_back(std::move(e.first));
      }
      write_complex_rows(dir / "estimates" / "downlink.csv", est_down);
      write_complex_rows(dir / "estimates" / "uplink.csv", est_up);
      write_json(dir / "estimates" / "manifest.json",
                 {{"active_set", set_to_json(set)},
                  {"pilots_down", config.pilots.pilots_down},
                  {"noise_variance", config.pilots.noise_variance},
                  {"sigma", config.train_sigma},
                  {"latency_seconds", csi_latency(set.size(), config.pilots.pilots_down,
                                                  config.pilots.symbol_period)}});
      for (const char* f : {"downlink.csv", "uplink.csv", "manifest.json"})
        record(dir / "estimates" / f, "output");

      stage = "train";
      StoredModel model = train_model(model_spec(config), corpus, set);
      save_model(model, dir / "model.json");
      record(dir / "model.json", "output");
      Table loss{{"epoch", "loss"}, {}};
      for (std::size_t e = 0; e < model.loss_trace.size(); ++e)
        loss.add_row({std::to_string(e + 1), format_double(model.loss_trace[e])});
      write_table(dir / "loss.csv", loss);
      record(dir / "loss.csv", "output");
      predictor = std::make_shared<ModelPredictor>(std::move(model));
    } else {
      predictor = make_baseline(config.predictor);
    }

    stage = "evaluate";
    Table amse{{"link", "spacing_frac", "n_f", "sigma", "trials", "e_h", "stderr_h", "e_theta",
                "stderr_theta", "e_theta_wrapped"},
               {}};
    for (double sigma : config.sigmas) {
      const AmseResult r = amse_monte_carlo(config.seed_eval, make_scenario(config, set, sigma),
                                            corr, *predictor, config.trials);
      for (const auto& [link, rep] : {std::pair{"downlink", &r.downlink},
                                      std::pair{"uplink", &r.uplink},
                                      std::pair{"combined", &r.combined}}) {
        amse.add_row({link, format_double(config.spacing_frac), std::to_string(set.size()),
                      format_double(sigma), std::to_string(rep->trials),
                      format_double(rep->e_h_mean), stderr_cell(*rep, rep->std_err_h),
                      format_double(rep->e_theta_mean), stderr_cell(*rep, rep->std_err_theta),
                      format_double(rep->e_theta_wrapped_mean)});
      }
    }
    write_table(dir / "amse.csv", amse);
    record(dir / "amse.csv", "output");
    m.status = "complete";
  } catch (const std::exception& e) {
    m.status = "failed";
    m.failed_stage = stage;
    m.failure = e.what();
    finish();
    throw StageError(stage, e.what());
  }
  finish();
  return m;
}

ReplicateOptions apply_overrides(ReplicateOptions o, const json& ov) {
  if (ov.is_null()) return o;
  if (!ov.is_object()) throw ConfigError("overrides must be a JSON object");
  for (const auto& [key, v] : ov.items()) {
    try {
      if (key == "output_dir") o.output_dir = v.get<std::string>();
      else if (key == "trials") o.trials = v.get<int>();
      else if (key == "train_samples") o.train_samples = v.get<int>();
      else if (key == "epochs") o.epochs = v.get<int>();
      else if (key == "batch_size") o.batch_size = v.get<int>();
      else if (key == "learning_rate") o.learning_rate = v.get<double>();
      else if (key == "hidden") o.hidden = v.get<int>();
      else if (key == "dense") o.dense = v.get<int>();
      else if (key == "seed_train") o.seed_train = v.get<std::uint64_t>();
      else if (key == "seed_eval") o.seed_eval = v.get<std::uint64_t>();
      else if (key == "bits") o.bits = v.get<std::int64_t>();
      else if (key == "snr_db") o.snr_db = v.get<double>();
      else if (key == "surface_sides") o.surface_sides = v.get<std::vector<int>>();
      else if (key == "noise_variance") o.pilots.noise_variance = v.get<double>();
      else if (key == "pilots") o.pilots.pilots_down = o.pilots.pilots_up = v.get<int>();
      else throw ConfigError("unknown override '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("override '" + key + "': " + e.what());
    }
  }
  if (o.trials < 1 || o.train_samples < 1 || o.epochs < 1 || o.batch_size < 1 ||
      o.hidden < 1 || o.dense < 1 || o.bits < 1000 || !(o.learning_rate >= 0.0))
    throw ConfigError("replication options out of range");
  if (o.seed_train == o.seed_eval) throw ConfigError("train and eval seeds must differ");
  o.pilots.validate();
  return o;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig5", "fig6", "fig8", "fig9",
                                            "fig10", "fig11", "fig12"};
  return ids;
}

namespace {

const std::vector<std::pair<std::string, double>> kSpacings{
    {"1/2", 0.5}, {"1/4", 0.25}, {"1/8", 0.125}, {"1/16", 0.0625}};

const std::vector<std::string> kFig10Presets{"p4-fig10", "p8-fig10", "p16-fig10", "p32-fig10"};

struct Recipe {
  const ReplicateOptions& opt;
  PredictorCache& cache;
  std::string id;

  TrainingRequest request(const Scenario& scn, const std::string& kind) const {
    TrainingRequest r;
    r.scenario = scn;
    r.scenario.sigma = 0.0;
    r.model.kind = kind;
    r.model.hidden = opt.hidden;
    r.model.dense = opt.dense;
    r.model.training.learning_rate = opt.learning_rate;
    r.model.training.epochs = opt.epochs;
    r.model.training.batch_size = opt.batch_size;
    r.model.training.train_samples = opt.train_samples;
    r.model.training.seed = opt.seed_train;
    r.seed = opt.seed_train;
    return r;
  }

  Scenario scenario(const GridSpec& grid, const ActiveSet& set, double sigma) const {
    Scenario s;
    s.grid = grid;
    s.set = set;
    s.pilots = opt.pilots;
    s.sigma = sigma;
    return s;
  }

  static Table amse_table() {
    return {{"figure", "predictor", "set", "n", "n_f", "spacing_frac", "sigma", "trials", "e_h",
             "stderr_h", "e_theta", "stderr_theta", "e_theta_wrapped"},
            {}};
  }

  void amse_row(Table& t, const std::string& kind, const std::string& label,
                const GridSpec& grid, const ActiveSet& set, double sigma) {
    const Scenario scn = scenario(grid, set, sigma);
    const auto predictor = cache.get(request(scn, kind));
    const AmseReport r = amse_monte_carlo(opt.seed_eval, scn, cache.correlation(grid),
                                          *predictor, opt.trials)
                             .combined;
    t.add_row({id, kind, label, std::to_string(grid.size()), std::to_string(set.size()),
               format_double(grid.spacing_fraction()), format_double(sigma),
               std::to_string(r.trials), format_double(r.e_h_mean),
               stderr_cell(r, r.std_err_h), format_double(r.e_theta_mean),
               stderr_cell(r, r.std_err_theta), format_double(r.e_theta_wrapped_mean)});
  }

  Table spacing_sweep(const std::vector<std::string>& presets) {
    Table t = amse_table();
    for (const auto& preset : presets)
      for (const auto& [name, frac] : kSpacings) {
        const GridSpec grid = GridSpec::from_fraction(8, 8, frac);
        amse_row(t, "rnn", preset, grid, preset_set(preset, grid), 0.0);
      }
    return t;
  }

  Table predictors() {
    Table t = amse_table();
    const GridSpec grid = GridSpec::from_fraction(8, 8, 0.125);
    for (const char* kind : {"cnn", "li", "rnn"})
      for (const auto& preset : kFig10Presets)
        amse_row(t, kind, preset, grid, preset_set(preset, grid), 0.0);
    return t;
  }

  Table robustness() {
    Table t = amse_table();
    const GridSpec grid = GridSpec::from_fraction(8, 8, 0.0625);
    for (const auto& preset : kFig10Presets)
      for (int k = 0; k <= 10; ++k)
        amse_row(t, "rnn", preset, grid, preset_set(preset, grid), 0.01 * k);
    return t;
  }

  Table ber() {
    Table t{{"figure", "predictor", "set", "n", "n_f", "spacing_frac", "snr_db", "bits", "ber",
             "stderr", "ci_low", "ci_high"},
            {}};
    for (int side : opt.surface_sides) {
      const GridSpec grid = GridSpec::from_fraction(side, side, 0.125);
      const CorrelationModel& corr = cache.correlation(grid);
      auto set_for = [&](int n_f) {
        return side == 8 ? preset_set("p" + std::to_string(n_f) + "-fig10", grid)
                         : select_diagonal(grid, corr, n_f);
      };
      auto row = [&](const std::string& kind, const ActiveSet& set) {
        const Scenario scn = scenario(grid, set, 0.0);
        const auto predictor = cache.get(request(scn, kind));
        const BerResult b =
            ber_simulation(opt.seed_eval, scn, corr, *predictor, opt.snr_db, opt.bits);
        t.add_row({id, kind, side == 8 ? "p" + std::to_string(set.size()) + "-fig10" : "diagonal",
                   std::to_string(grid.size()), std::to_string(set.size()),
                   format_double(grid.spacing_fraction()), format_double(opt.snr_db),
                   std::to_string(b.bits), format_double(b.ber), format_double(b.std_err),
                   format_double(b.ci_low), format_double(b.ci_high)});
      };
      for (int n_f : {4, 8, 16}) row("rnn", set_for(n_f));
      row("ideal", set_for(16));
    }
    return t;
  }
};

}  // namespace

Table replicate_figure(const std::string& id, const ReplicateOptions& options,
                       PredictorCache* cache) {
  PredictorCache local;
  Recipe recipe{options, cache ? *cache : local, id};
  const std::string started = now_utc();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> notes;
  Table table;
  if (id == "fig5" || id == "fig6") {
    table = recipe.spacing_sweep(kFig10Presets);
    notes.push_back("active sets are the listed fig10 presets (4, 8, 16, 32 elements)");
    notes.push_back(id == "fig5" ? "plotted metric: e_h" : "plotted metric: e_theta");
  } else if (id == "fig8") {
    table = recipe.spacing_sweep({"p4-set1", "p4-set2", "p4-set3", "p4-set4"});
  } else if (id == "fig9") {
    table = recipe.spacing_sweep({"p8-set1", "p8-set2", "p8-set3", "p8-set4"});
  } else if (id == "fig10") {
    table = recipe.predictors();
    notes.push_back("spacing lambda/8");
  } else if (id == "fig11") {
    table = recipe.robustness();
    notes.push_back("spacing lambda/16; one network per N_f trained on error-free estimates, "
                    "sigma applied at evaluation with common random numbers");
  } else if (id == "fig12") {
    table = recipe.ber();
    notes.push_back("x axis is N = side^2; 8x8 uses fig10 presets, larger grids the diagonal "
                    "lattice selection; BPSK with coherent detection");
  } else {
    throw ConfigError("unknown figure '" + id + "' (allowed: " + join(figure_ids()) + ")");
  }
  notes.push_back("AMSE columns are the mean over downlink and uplink");

  const fs::path csv = options.output_dir / (id + ".csv");
  write_table(csv, table);
  json opts{{"trials", options.trials},       {"train_samples", options.train_samples},
            {"epochs", options.epochs},       {"batch_size", options.batch_size},
            {"learning_rate", options.learning_rate},
            {"hidden", options.hidden},       {"dense", options.dense},
            {"seed_train", options.seed_train}, {"seed_eval", options.seed_eval},
            {"bits", options.bits},           {"snr_db", options.snr_db},
            {"surface_sides", options.surface_sides},
            {"pilots", options.pilots.pilots_down},
            {"noise_variance", options.pilots.noise_variance}};
  json manifest{{"figure", id},
                {"tool_version", kToolVersion},
                {"schema_version", kConfigSchemaVersion},
                {"options", opts},
                {"notes", notes},
                {"started", started},
                {"finished", now_utc()},
                {"wall_seconds",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                {"artifacts",
                 json::array({{{"path", csv.filename().string()},
                               {"role", "output"},
                               {"sha256", sha256_file(csv)},
                               {"bytes", fs::file_size(csv)}}})}};
  write_json(options.output_dir / (id + "_manifest.json"), manifest);
  return table;
}

int configure_threads() {
  if (const char* env = std::getenv("SORIS_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError("SORIS_THREADS must be a positive integer");
    omp_set_num_threads(static_cast<int>(n));
  }
  return omp_get_max_threads();
}

}  // namespace soris
