#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gpfewshot/bounds.hpp"
#include "gpfewshot/config.hpp"
#include "gpfewshot/errors.hpp"
#include "gpfewshot/figures.hpp"
#include "gpfewshot/jsonout.hpp"
#include "gpfewshot/sim_harness.hpp"
#include "gpfewshot/validate.hpp"

namespace {

using namespace gpfewshot;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitDomain = 2;
constexpr int kExitResource = 3;
constexpr int kExitValidation = 4;

struct GlobalOptions {
  std::uint64_t seed = validate::kDefaultMasterSeed;
  bool seed_set = false;
  int threads = 0;
  std::string out;
};

int effective_threads(int flag_value) {
  // The environment variable wins over the flag.
  if (const char* env = std::getenv("GPFEWSHOT_THREADS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed > 0) return parsed;
    } catch (const std::exception&) {
      throw ConfigError("GPFEWSHOT_THREADS is not a positive integer");
    }
  }
  return flag_value;
}

void emit(const GlobalOptions& global, const std::string& text) {
  if (!global.out.empty()) {
    jsonout::write_text_atomic(global.out, text);
  } else {
    std::cout << text;
  }
}

struct BoundArgs {
  std::string kind;
  double n = 0.0, t = 0.0, lk = 0.0, sigma = 0.0, target = 0.0;
  int d = 0;
};

int run_bound(const GlobalOptions& global, const BoundArgs& args) {
  jsonout::Value inputs = jsonout::Value::object();
  double value = 0.0;

  auto need = [&](double v, const char* flag) {
    if (v == 0.0) {
      throw ConfigError(std::string("bound --kind ") + args.kind +
                        " requires " + flag);
    }
    return v;
  };

  if (args.kind == "thm1" || args.kind == "cor1" || args.kind == "lower-iid" ||
      args.kind == "lower-pi") {
    const double n = need(args.n, "--n");
    const double t = need(args.t, "--t");
    inputs.add("n", jsonout::Value::num(n));
    inputs.add("t", jsonout::Value::num(t));
    if (args.kind == "thm1") value = bounds::extremization_regret_bound(n, t);
    else if (args.kind == "cor1") value = bounds::maximization_normreg_bound(n, t);
    else if (args.kind == "lower-iid") value = bounds::iid_lower_bound(n, t);
    else value = bounds::prior_independent_lower_bound(n, t);
  } else if (args.kind == "required-t") {
    const double n = need(args.n, "--n");
    inputs.add("n", jsonout::Value::num(n));
    inputs.add("target_normreg", jsonout::Value::num(args.target));
    value = bounds::required_evaluations_envelope(n, args.target);
  } else if (args.kind == "grunewalder") {
    const int d = args.d > 0 ? args.d : 1;
    const double t = need(args.t, "--t");
    const double lk = need(args.lk, "--lk");
    inputs.add("d", jsonout::Value::integer(d));
    inputs.add("t", jsonout::Value::num(t));
    inputs.add("lk", jsonout::Value::num(lk));
    value = bounds::grunewalder_bound(d, t, lk);
  } else if (args.kind == "thm2") {
    const int d = args.d > 0 ? args.d : 1;
    const double t = need(args.t, "--t");
    const double lk = need(args.lk, "--lk");
    const double sigma = args.sigma > 0.0 ? args.sigma : 1.0;
    inputs.add("d", jsonout::Value::integer(d));
    inputs.add("t", jsonout::Value::num(t));
    inputs.add("lk", jsonout::Value::num(lk));
    inputs.add("sigma", jsonout::Value::num(sigma));
    value = bounds::continuous_regret_bound(d, t, lk, sigma);
  } else {
    throw ConfigError("unknown bound kind: " + args.kind);
  }

  jsonout::Value doc = jsonout::Value::object();
  doc.add("kind", jsonout::Value::str(args.kind));
  doc.add("inputs", std::move(inputs));
  doc.add("value", jsonout::Value::num(value));
  emit(global, doc.dump_pretty());
  return kExitOk;
}

int run_figure(const GlobalOptions& global, int figure_id,
               const std::string& out_path) {
  const std::string csv = figures::figure_csv(figure_id);
  const std::string path = !out_path.empty() ? out_path : global.out;
  if (path.empty()) {
    std::cout << csv;
  } else {
    jsonout::write_text_atomic(path, csv);
  }
  return kExitOk;
}

int run_simulate(const GlobalOptions& global, const std::string& config_path,
                 bool dump_trajectories) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + config_path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  sim::SimConfig sim_config = config::parse_sim_config(text);
  config::OutputConfig output = config::parse_output_config(text);
  if (global.seed_set) sim_config.master_seed = global.seed;
  sim_config.threads = effective_threads(global.threads);
  if (dump_trajectories) output.dump_trajectories = true;

  std::vector<sim::TrajectoryDump> dumps;
  const sim::RegretReport report = sim::run_experiment(
      sim_config, output.dump_trajectories ? &dumps : nullptr,
      output.trajectory_episode_limit);

  const std::string rendered = config::report_to_json(report).dump_pretty();
  const std::string report_path =
      !global.out.empty() ? global.out : output.report_path;
  if (!report_path.empty()) {
    jsonout::write_text_atomic(report_path, rendered);
  }
  std::cout << rendered;

  if (output.dump_trajectories) {
    const std::string trajectory_path = !output.trajectory_path.empty()
                                            ? output.trajectory_path
                                            : "trajectories.csv";
    jsonout::write_text_atomic(trajectory_path,
                               config::trajectories_to_csv(dumps));
  }
  return kExitOk;
}

int run_validate(const GlobalOptions& global, bool quick) {
  validate::ValidateOptions options;
  options.quick = quick;
  options.threads = effective_threads(global.threads);
  options.master_seed = global.seed;
  const validate::Summary summary =
      validate::run_acceptance(options, &std::cout);
  if (summary.all_passed) return kExitOk;

  std::ostringstream failed;
  for (const auto& r : summary.results) {
    if (!r.passed) failed << (failed.tellp() > 0 ? ", " : "") << r.name;
  }
  std::cerr << "failed criteria: " << failed.str() << "\n";
  return kExitValidation;
}

jsonout::Value error_json(const char* category, const std::string& message) {
  jsonout::Value doc = jsonout::Value::object();
  doc.add("error", jsonout::Value::str(category));
  doc.add("message", jsonout::Value::str(message));
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process optimization in the few-evaluations regime: "
               "closed-form regret bounds, seeded policy simulations, and "
               "figure data"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "master seed for seeded subcommands")
      ->each([&global](const std::string&) { global.seed_set = true; });
  app.add_option("--threads", global.threads,
                 "worker threads (0 = hardware); GPFEWSHOT_THREADS overrides");
  app.add_option("--out", global.out, "write primary output to this file");

  BoundArgs bound_args;
  CLI::App* bound = app.add_subcommand("bound", "evaluate one closed-form bound");
  bound->add_option("--kind", bound_args.kind,
                    "thm1|cor1|lower-iid|lower-pi|thm2|grunewalder|required-t")
      ->required();
  bound->add_option("--n", bound_args.n, "number of arms N");
  bound->add_option("--t", bound_args.t, "number of evaluations T");
  bound->add_option("--d", bound_args.d, "dimension D");
  bound->add_option("--lk", bound_args.lk, "Lipschitz constant");
  bound->add_option("--sigma", bound_args.sigma, "variance cap sigma");
  bound->add_option("--target-normreg", bound_args.target,
                    "target normalized regret");

  int figure_id = 0;
  std::string figure_out;
  CLI::App* figure = app.add_subcommand("figure", "emit figure data as CSV");
  figure->add_option("--figure", figure_id, "figure id: 1, 2 or 3")->required();
  figure->add_option("--out", figure_out, "output CSV path");

  std::string config_path;
  bool dump_trajectories = false;
  CLI::App* simulate =
      app.add_subcommand("simulate", "run a seeded Monte Carlo experiment");
  simulate->add_option("config", config_path, "config file (JSON or TOML)")
      ->required();
  simulate->add_flag("--dump-trajectories", dump_trajectories,
                     "also write per-step trajectory CSV");

  bool quick = false;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the acceptance criteria");
  validate_cmd->add_flag("--quick", quick, "reduced episode counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("config", e.what()).dump_pretty();
    return kExitDomain;
  }

  try {
    if (bound->parsed()) return run_bound(global, bound_args);
    if (figure->parsed()) return run_figure(global, figure_id, figure_out);
    if (simulate->parsed())
      return run_simulate(global, config_path, dump_trajectories);
    if (validate_cmd->parsed()) return run_validate(global, quick);
    std::cerr << error_json("config", "no subcommand given").dump_pretty();
    return kExitDomain;
  } catch (const DomainError& e) {
    std::cerr << error_json("domain", e.what()).dump_pretty();
    return kExitDomain;
  } catch (const ConfigError& e) {
    std::cerr << error_json("config", e.what()).dump_pretty();
    return kExitDomain;
  } catch (const ResourceError& e) {
    std::cerr << error_json("resource", e.what()).dump_pretty();
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump_pretty();
    return kExitInternal;
  }
}
