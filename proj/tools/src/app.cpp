#include "app.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcgpp/diagnostics.hpp"
#include "mcgpp/errors.hpp"
#include "mcgpp/io.hpp"

namespace mcgpp::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads typed members of a JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidParameter("config: '" + path_ + "' must be an object");
  }

  template <class T>
  void get(const std::string& key, T& target) {
    seen_.push_back(key);
    if (!j_.contains(key)) return;
    try {
      target = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidParameter("config: '" + where(key) + "' has the wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw InvalidParameter("config: unknown key '" + where(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

CovFamily family_of(const std::string& name, const std::string& key) {
  try {
    return family_from_string(name);
  } catch (const Error&) {
    throw InvalidParameter("config: '" + key + "' is not a covariance family: " + name);
  }
}

std::vector<ModelConfig> models_by_name(const std::vector<std::string>& names) {
  const auto all = comparison_models();
  std::vector<ModelConfig> out;
  for (const auto& n : names) {
    auto it = std::find_if(all.begin(), all.end(), [&](const ModelConfig& m) { return m.name == n; });
    if (it == all.end()) throw InvalidParameter("config: unknown simulation model '" + n + "'");
    out.push_back(*it);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const DataError*>(&e)) return "DataError";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const InvalidParameter*>(&e)) return "InvalidParameter";
  if (dynamic_cast<const SingularCovariance*>(&e)) return "SingularCovariance";
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const UnsupportedData*>(&e)) return "UnsupportedData";
  if (dynamic_cast<const FitError*>(&e)) return "FitError";
  if (dynamic_cast<const NumericalFailure*>(&e)) return "NumericalFailure";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  ObjectReader top(root, "");
  std::string data, fitted, points, out;
  top.get("data", data);
  top.get("fitted", fitted);
  top.get("points", points);
  top.get("out", out);
  top.get("no_intercept", cfg.no_intercept);
  top.get("seed", cfg.seed);
  if (!data.empty()) cfg.data = data;
  if (!fitted.empty()) cfg.fitted = fitted;
  if (!points.empty()) cfg.points = points;
  if (!out.empty()) cfg.out = out;

  if (const json* m = top.child("model")) {
    ObjectReader r(*m, "model");
    std::string kind = "mcgpp", shared = "sqexp", eta1 = "sqexp", eta2 = "sqexp";
    r.get("kind", kind);
    r.get("shared", shared);
    r.get("eta1", eta1);
    r.get("eta2", eta2);
    r.get("optimize_shape", cfg.model.optimize_shape);
    r.finish();
    try {
      cfg.model.kind = model_kind_from_string(kind);
    } catch (const Error&) {
      throw InvalidParameter("config: 'model.kind' must be mcgpp, cdr or indep");
    }
    cfg.model.shared = family_of(shared, "model.shared");
    cfg.model.eta1 = family_of(eta1, "model.eta1");
    cfg.model.eta2 = family_of(eta2, "model.eta2");
  }

  if (const json* o = top.child("optimizer")) {
    ObjectReader r(*o, "optimizer");
    auto& opt = cfg.optimizer;
    r.get("max_iter", opt.max_iter);
    r.get("grad_step", opt.grad_step);
    r.get("grad_tol", opt.grad_tol);
    r.get("mode_tol", opt.mode_tol);
    r.get("outer_tol", opt.outer_tol);
    r.get("mode_max_iter", opt.mode_max_iter);
    r.get("n_starts", opt.n_starts);
    r.finish();
    if (opt.n_starts < 1) throw InvalidParameter("config: 'optimizer.n_starts' must be >= 1");
    if (!(opt.grad_step > 0.0) || !(opt.mode_tol > 0.0))
      throw InvalidParameter("config: optimizer steps and tolerances must be positive");
  }

  if (const json* s = top.child("simulation")) {
    ObjectReader r(*s, "simulation");
    auto& sim = cfg.simulation;
    int scenario = 1;
    std::vector<std::string> models;
    r.get("scenario", scenario);
    r.get("n1", sim.n1);
    r.get("n2", sim.n2);
    r.get("replications", sim.n_replications);
    r.get("threads", sim.threads);
    r.get("amplitude", sim.generator.amplitude);
    r.get("precision", sim.generator.precision);
    r.get("gamma", sim.generator.gamma);
    r.get("mean_input_scale", sim.generator.mean_input_scale);
    r.get("n_test", sim.generator.n_test);
    r.get("models", models);
    r.finish();
    if (scenario != 1 && scenario != 2)
      throw InvalidParameter("config: 'simulation.scenario' must be 1 or 2");
    sim.scenario = scenario == 1 ? Scenario::One : Scenario::Two;
    if (!models.empty()) sim.models = models_by_name(models);
  }

  if (const json* d = top.child("diagnostics")) {
    ObjectReader r(*d, "diagnostics");
    auto& dg = cfg.diagnose;
    std::vector<std::string> families;
    r.get("families", families);
    r.get("amplitude", dg.amplitude);
    r.get("precision", dg.precision);
    r.get("delta", dg.delta);
    r.get("min_n", dg.min_n);
    r.get("max_n", dg.max_n);
    r.get("n_sizes", dg.n_sizes);
    r.get("draws", dg.draws);
    r.get("audit_draws", dg.audit_draws);
    r.finish();
    if (!families.empty()) {
      dg.families.clear();
      for (const auto& f : families) dg.families.push_back(family_of(f, "diagnostics.families"));
    }
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

int run_fit(const RunConfig& cfg) {
  if (cfg.data.empty()) throw InvalidParameter("fit needs a dataset (--data or config 'data')");
  const Dataset data = load_dataset(cfg.data, !cfg.no_intercept);
  OptimOptions opts = cfg.optimizer;
  opts.seed = cfg.seed;
  const FittedModel model = fit(data, cfg.model, opts);
  prepare_out(cfg.out);
  save_model(cfg.out / "model.json", model, data);
  write_text(cfg.out / "summary.txt", model_summary(model));
  return 0;
}

int run_predict(const RunConfig& cfg) {
  if (cfg.fitted.empty()) throw InvalidParameter("predict needs --fitted <model.json>");
  if (cfg.points.empty()) throw InvalidParameter("predict needs --points <points.csv>");
  const auto [model, data] = load_model(cfg.fitted);
  const auto points = load_points(cfg.points, !cfg.no_intercept);
  const auto results = predict_batch(model, data, points);
  prepare_out(cfg.out);
  std::ofstream out(cfg.out / "predictions.csv", std::ios::binary);
  if (!out) throw DataError("cannot write predictions.csv");
  write_predictions_csv(out, results);
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  ScenarioConfig sim = cfg.simulation;
  sim.seed = cfg.seed;
  sim.optim = cfg.optimizer;
  if (cfg.model_filter) {
    std::vector<ModelConfig> kept;
    for (const auto& m : sim.models)
      if (m.spec.kind == *cfg.model_filter) kept.push_back(m);
    sim.models = kept;
  }
  const ResultsTable table = run_replications(sim);
  prepare_out(cfg.out);
  write_text(cfg.out / "results.csv", table.to_csv());
  write_text(cfg.out / "rmse_plot_data.csv", table.plot_data_csv());
  std::ostringstream failures;
  failures << "model,replication,error\n";
  for (const auto& r : table.records) {
    if (r.ok) continue;
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    failures << r.model << ',' << r.replication << ',' << msg << '\n';
  }
  write_text(cfg.out / "failures.csv", failures.str());
  return 0;
}

int run_diagnose(const RunConfig& cfg) {
  const auto& dg = cfg.diagnose;
  prepare_out(cfg.out);
  const auto sizes = log_spaced_sizes(dg.min_n, dg.max_n, dg.n_sizes);
  std::ostringstream audit;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (std::size_t f = 0; f < dg.families.size(); ++f) {
    const CovFamily family = dg.families[f];
    const MCGPHyperparams theta = uniform_family_theta(family, dg.amplitude, dg.precision, 1);
    const RegretCurve curve =
        regret_growth(theta, sizes, dg.delta, derive_seed(cfg.seed, f), dg.draws);
    write_text(cfg.out / ("regret_" + std::string(to_string(family)) + ".csv"), curve.to_csv());

    int raw_ok = 0, jitter_ok = 0;
    double worst = 0.0;
    for (int k = 0; k < dg.audit_draws; ++k) {
      StackedInputs inputs{Matrix(10, 1), Matrix(10, 1)};
      for (Eigen::Index i = 0; i < 10; ++i) {
        inputs.x1(i, 0) = unif(rng);
        inputs.x2(i, 0) = unif(rng);
      }
      const PdAudit a = pd_audit(assemble_K(inputs, theta));
      raw_ok += a.cholesky_raw;
      jitter_ok += a.cholesky_jittered;
      worst = std::min(worst, a.relative_min_eigenvalue());
    }
    audit << "family " << to_string(family) << "\n"
          << "  draws " << dg.audit_draws << "\n"
          << "  cholesky_raw_ok " << raw_ok << "\n"
          << "  cholesky_jittered_ok " << jitter_ok << "\n"
          << "  worst_relative_min_eigenvalue " << worst << "\n";
  }
  write_text(cfg.out / "pd_audit.txt", audit.str());
  return 0;
}

int main(int argc, char** argv) {
  CLI::App cli{"Multivariate convolved Gaussian process Poisson models"};
  cli.require_subcommand(1);

  std::string config_path, data, fitted, points, out, model, scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications, threads;
  bool no_intercept = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out, "output directory");
  };
  CLI::App* fit_cmd = cli.add_subcommand("fit", "fit a model to a dataset CSV");
  CLI::App* predict_cmd = cli.add_subcommand("predict", "predict at new points from a fitted model");
  CLI::App* sim_cmd = cli.add_subcommand("simulate", "run the simulation study");
  CLI::App* diag_cmd = cli.add_subcommand("diagnose", "regret growth curves and PD audits");
  for (auto* sub : {fit_cmd, predict_cmd, sim_cmd, diag_cmd}) add_common(sub);
  for (auto* sub : {fit_cmd, sim_cmd})
    sub->add_option("--model", model, "mcgpp | cdr | indep")
        ->check(CLI::IsMember({"mcgpp", "cdr", "indep"}));
  fit_cmd->add_option("--data", data, "dataset CSV");
  for (auto* sub : {fit_cmd, predict_cmd})
    sub->add_flag("--no-intercept", no_intercept, "do not prepend an intercept column");
  predict_cmd->add_option("--fitted", fitted, "fitted-model JSON");
  predict_cmd->add_option("--points", points, "new-point CSV");
  sim_cmd->add_option("--replications", replications, "number of replications");
  sim_cmd->add_option("--scenario", scenario, "1 or 2")->check(CLI::IsMember({"1", "2"}));
  sim_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e);
  }

  fs::path out_dir = out.empty() ? fs::path(".") : fs::path(out);
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out.empty()) cfg.out = out;
    out_dir = cfg.out;
    if (seed) cfg.seed = *seed;
    if (!data.empty()) cfg.data = data;
    if (!fitted.empty()) cfg.fitted = fitted;
    if (!points.empty()) cfg.points = points;
    if (no_intercept) cfg.no_intercept = true;
    if (replications) cfg.simulation.n_replications = *replications;
    if (threads) cfg.simulation.threads = static_cast<unsigned>(*threads);
    if (!scenario.empty()) cfg.simulation.scenario = scenario == "1" ? Scenario::One : Scenario::Two;
    if (!model.empty()) {
      const ModelKind kind = model_kind_from_string(model);
      if (*fit_cmd) {
        if (kind == ModelKind::Cdr) cfg.model = ModelSpec::cdr();
        else if (kind == ModelKind::Indep) cfg.model = ModelSpec::indep();
        else cfg.model.kind = ModelKind::Mcgpp;
      } else {
        cfg.model_filter = kind;
      }
    }

    if (*fit_cmd) return run_fit(cfg);
    if (*predict_cmd) return run_predict(cfg);
    if (*sim_cmd) return run_simulate(cfg);
    return run_diagnose(cfg);
  } catch (const std::exception& e) {
    json report{{"status", "error"}, {"type", error_kind(e)}, {"message", e.what()}};
    if (const auto* de = dynamic_cast<const DataError*>(&e); de && de->row())
      report["row"] = de->row();
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e))
      report["grad_norm"] = ce->grad_norm();
    std::cerr << report.dump() << std::endl;
    std::error_code ec;
    if (fs::is_directory(out_dir, ec)) {
      std::ofstream f(out_dir / "error.json");
      f << report.dump(2) << "\n";
    }
    return 1;
  }
}

}  // namespace mcgpp::app
