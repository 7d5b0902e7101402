#include "priorsense/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "priorsense/io.hpp"
#include "priorsense/oracle.hpp"
#include "priorsense/sim_engine.hpp"

namespace priorsense {

namespace {

struct HelpRequested {
  std::string text;
};

std::map<std::string, std::string> parse_key_values(std::string_view body) {
  std::map<std::string, std::string> kv;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw UsageError(fmt::format("instance spec: expected key=value, got '{}'", item));
    }
    kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return kv;
}

template <class T>
T parse_number(const std::string& text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError(fmt::format("invalid {} '{}'", what, text));
  return value;
}

double take_double(std::map<std::string, std::string>& kv, const std::string& key, std::optional<double> fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (!fallback) throw UsageError(fmt::format("instance spec: missing '{}'", key));
    return *fallback;
  }
  const double v = parse_number<double>(it->second, key);
  kv.erase(it);
  return v;
}

std::int64_t take_int(std::map<std::string, std::string>& kv, const std::string& key,
                      std::optional<std::int64_t> fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (!fallback) throw UsageError(fmt::format("instance spec: missing '{}'", key));
    return *fallback;
  }
  const auto v = parse_number<std::int64_t>(it->second, key);
  kv.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, std::string>& kv) {
  if (!kv.empty()) throw UsageError(fmt::format("instance spec: unknown key '{}'", kv.begin()->first));
}

PriorCase case_flag(const std::string& text) {
  try {
    return parse_prior_case(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path path(dir.empty() ? "." : dir);
  std::filesystem::create_directories(path);
  return path;
}

}  // namespace

InstanceBundle parse_instance_spec(std::string_view spec, std::int64_t horizon) {
  const auto colon = spec.find(':');
  const auto head = spec.substr(0, colon);
  if (colon != std::string_view::npos && (head == "thm2" || head == "thm3")) {
    auto kv = parse_key_values(spec.substr(colon + 1));
    const double p = take_double(kv, "p", std::nullopt);
    const auto t = take_int(kv, "T", horizon);
    reject_leftovers(kv);
    return head == "thm2" ? make_poor_prior_instance(p, t) : make_good_prior_instance(p, t);
  }
  if (colon != std::string_view::npos && (head == "poor" || head == "good")) {
    auto kv = parse_key_values(spec.substr(colon + 1));
    const auto n = take_int(kv, "N", std::nullopt);
    const double p = take_double(kv, "p", std::nullopt);
    const double delta = take_double(kv, "delta", 0.05);
    const auto seed = take_int(kv, "seed", 1);
    reject_leftovers(kv);
    if (n < 2) throw UsageError("instance spec: N must be >= 2");
    const auto which = head == "poor" ? PriorCase::Poor : PriorCase::Good;
    Rng rng(stream_seed(static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(n)));
    auto bundle = make_scaling_instance(static_cast<std::size_t>(n), delta, which, rng);
    bundle.prior = BeliefState::with_true_mass(static_cast<std::size_t>(n), p);
    return bundle;
  }
  const std::string path(spec);
  if (!std::filesystem::exists(path)) throw UsageError(fmt::format("unknown instance spec '{}'", spec));
  return instance_from_json(read_file(path));
}

double fit_threshold(PriorCase which) { return which == PriorCase::Poor ? 0.95 : 0.90; }

Command cli_parse(const std::vector<std::string>& args) {
  CLI::App app{"Thompson Sampling prior-sensitivity simulator", "priorsense"};
  app.require_subcommand(1);
  app.fallthrough();
  Command command;
  app.add_option("--threads", command.threads, "Worker threads (default: PRIORSENSE_THREADS or all cores)");

  SimulateCommand sim;
  std::string agent_text = "ts";
  auto* simulate = app.add_subcommand("simulate", "Run Thompson Sampling, EXP4 or a fixed arm on one instance");
  simulate->add_option("--instance", sim.instance, "thm2:p=..|thm3:p=..|poor:N=..,p=..|good:N=..,p=..|file.json")
      ->required();
  simulate->add_option("--agent", agent_text, "ts, exp4 or fixed:<idx>");
  simulate->add_option("--T", sim.horizon, "Horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--runs", sim.runs, "Episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--out-dir", sim.out_dir, "Write trajectory.csv here (single run)");

  VerifyCommand ver;
  auto* verify = app.add_subcommand("verify", "Run the diagnostic battery");
  verify->add_option("--seed", ver.options.seed, "Master seed");
  verify->add_flag("--quick", ver.options.quick, "Smaller Monte Carlo run counts");
  verify->add_option("--out-dir", ver.out_dir, "Write verify.csv here");

  OracleCommand orc;
  double alpha = 0.0;
  auto* oracle = app.add_subcommand("oracle", "Exact Thompson Sampling regret by dynamic programming");
  oracle->add_option("--instance", orc.instance, "thm2:p=..|thm3:p=..|file.json")->required();
  auto* alpha_opt = oracle->add_option("--alpha", alpha, "Prior mass on the first model");
  oracle->add_option("--T", orc.horizon, "Horizon")->check(CLI::NonNegativeNumber);
  oracle->add_option("--cap", orc.cap, "Largest horizon allowed");

  std::string case_text = "poor";
  std::string config_path, out_dir;
  std::uint64_t exp_seed = 1;
  std::int64_t exp_horizon = 0;
  std::size_t exp_runs = 0;
  double exp_delta = 0.0;
  std::vector<std::size_t> n_list;
  std::vector<double> p_list;
  bool check = false;
  auto* experiment = app.add_subcommand("experiment", "Regret scaling in the prior mass of the true model");
  auto* case_opt = experiment->add_option("--case", case_text, "poor, good or both");
  experiment->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = experiment->add_option("--seed", exp_seed, "Master seed");
  auto* t_opt = experiment->add_option("--T", exp_horizon, "Horizon")->check(CLI::PositiveNumber);
  auto* runs_opt = experiment->add_option("--runs", exp_runs, "Episodes per point");
  auto* delta_opt = experiment->add_option("--delta", exp_delta, "Gap");
  auto* n_opt = experiment->add_option("--N", n_list, "Model counts")->delimiter(',');
  auto* p_opt = experiment->add_option("--p", p_list, "Prior masses on the true model")->delimiter(',');
  auto* out_opt = experiment->add_option("--out-dir", out_dir, "Output directory");
  experiment->add_flag("--check", check, "Exit 1 when a fit misses its R^2 threshold");

  BoundCheckCommand bnd;
  std::string kind_text = "both";
  double bound_p = 0.0;
  auto* bound = app.add_subcommand("bound-check", "Compare Monte Carlo regret with the closed-form bounds");
  bound->add_option("--kind", kind_text, "thm2, thm3 or both");
  auto* bound_p_opt = bound->add_option("--p", bound_p, "Prior mass on the true model");
  bound->add_option("--T", bnd.horizon, "Horizon")->check(CLI::PositiveNumber);
  bound->add_option("--runs", bnd.runs, "Episodes");
  bound->add_option("--seed", bnd.seed, "Master seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    throw HelpRequested{parsed.empty() ? app.help() : parsed.back()->help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (simulate->parsed()) {
    try {
      sim.agent = AgentKind::parse(agent_text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    command.action = sim;
  } else if (verify->parsed()) {
    ver.options.workers = command.threads;
    command.action = ver;
  } else if (oracle->parsed()) {
    if (alpha_opt->count() > 0) orc.alpha = alpha;
    command.action = orc;
  } else if (experiment->parsed()) {
    ExperimentCommand exp;
    exp.check = check;
    std::vector<ExperimentConfig> base;
    if (!config_path.empty()) {
      try {
        base.push_back(config_from_json(read_file(config_path)));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (case_opt->count() > 0 && case_flag(case_text) != base.front().which) {
        throw UsageError("--case disagrees with the case in --config");
      }
    } else if (case_text == "both") {
      base = {ExperimentConfig::defaults(PriorCase::Poor), ExperimentConfig::defaults(PriorCase::Good)};
    } else {
      base.push_back(ExperimentConfig::defaults(case_flag(case_text)));
    }
    for (auto& c : base) {
      if (seed_opt->count() > 0) c.master_seed = exp_seed;
      if (t_opt->count() > 0) c.horizon = exp_horizon;
      if (runs_opt->count() > 0) c.runs = exp_runs;
      if (delta_opt->count() > 0) c.delta = exp_delta;
      if (n_opt->count() > 0) c.n_list = n_list;
      if (p_opt->count() > 0) c.p_list = p_list;
      if (out_opt->count() > 0) c.out_dir = out_dir;
      try {
        c.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    exp.configs = std::move(base);
    command.action = exp;
  } else {
    if (kind_text == "thm2") {
      bnd.kinds = {BoundKind::Thm2};
    } else if (kind_text == "thm3") {
      bnd.kinds = {BoundKind::Thm3};
    } else if (kind_text == "both") {
      bnd.kinds = {BoundKind::Thm2, BoundKind::Thm3};
    } else {
      throw UsageError(fmt::format("unknown bound kind '{}' (expected thm2, thm3 or both)", kind_text));
    }
    if (bound_p_opt->count() > 0) {
      if (bnd.kinds.size() > 1) throw UsageError("--p needs a single --kind");
      bnd.p = bound_p;
    }
    if (bnd.runs < 2) throw UsageError("--runs must be >= 2");
    command.action = bnd;
  }
  return command;
}

namespace {

int run(const SimulateCommand& c, unsigned workers, std::ostream& out) {
  const auto bundle = parse_instance_spec(c.instance, c.horizon);
  if (c.runs == 1) {
    const auto traj = run_episode(bundle, c.agent, c.horizon, c.seed, bundle.space.model_count() == 2);
    if (!c.out_dir.empty()) {
      std::ofstream file(ensure_dir(c.out_dir) / "trajectory.csv", std::ios::binary);
      write_trajectory_csv(file, traj);
    }
    out << fmt::format("agent={} T={} regret={}\n", c.agent.to_string(), c.horizon,
                       format_double(traj.cumulative_regret));
    return kExitOk;
  }
  const auto mc = monte_carlo(bundle, c.agent, c.horizon, c.runs, c.seed, workers);
  out << fmt::format("agent={} T={} runs={} mean_regret={} std_error={}\n", c.agent.to_string(), c.horizon,
                     mc.run_count, format_double(mc.mean_regret), format_double(mc.std_error));
  return kExitOk;
}

int run(const VerifyCommand& c, std::ostream& out) {
  const auto results = run_verification_battery(c.options);
  print_check_table(out, results);
  if (!c.out_dir.empty()) {
    std::ofstream file(ensure_dir(c.out_dir) / "verify.csv", std::ios::binary);
    write_check_csv(file, results);
  }
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? kExitOk : kExitAssertion;
}

int run(const OracleCommand& c, std::ostream& out) {
  const auto bundle = parse_instance_spec(c.instance, c.horizon);
  const double alpha = c.alpha.value_or(bundle.prior[0]);
  const double regret = exact_ts_regret(bundle, alpha, c.horizon, c.cap);
  out << fmt::format("alpha={} T={} delta={} exact_regret={}\n", format_double(alpha), c.horizon,
                     format_double(bundle.delta), format_double(regret));
  return kExitOk;
}

int run(const ExperimentCommand& c, unsigned workers, std::ostream& out) {
  std::vector<ScalingResult> results;
  bool ok = true;
  for (const auto& config : c.configs) {
    auto result = run_scaling_experiment(config, workers);
    const auto dir = ensure_dir(config.out_dir);
    const std::string tag = to_string(config.which);
    {
      std::ofstream file(dir / fmt::format("summary_{}.csv", tag), std::ios::binary);
      write_summary_csv(file, result.rows);
    }
    {
      std::ofstream file(dir / fmt::format("fit_{}.csv", tag), std::ios::binary);
      write_fit_csv(file, config.which, result.fits);
    }
    for (const auto& r : result.rows) {
      out << fmt::format("{} p={} mean_regret={:.4f} se={:.4f}\n", r.instance_id, r.p, r.mean_regret, r.std_error);
    }
    for (const auto& f : result.fits) {
      if (f.fit) {
        const bool pass = f.fit->r_squared >= fit_threshold(config.which);
        ok = ok && pass;
        out << fmt::format("fit {} N={} points={} slope={:.4f} intercept={:.4f} r2={:.4f}{}\n", tag, f.n_models,
                           f.points, f.fit->slope, f.fit->intercept, f.fit->r_squared,
                           c.check ? (pass ? " PASS" : " FAIL") : "");
      } else {
        ok = false;
        out << fmt::format("fit {} N={} insufficient points\n", tag, f.n_models);
      }
    }
    results.push_back(std::move(result));
  }
  const ScalingResult* poor = nullptr;
  const ScalingResult* good = nullptr;
  for (const auto& r : results) (r.which == PriorCase::Poor ? poor : good) = &r;
  write_file((ensure_dir(c.configs.front().out_dir) / "scaling.svg").string(), render_scaling_svg(poor, good));
  return (c.check && !ok) ? kExitAssertion : kExitOk;
}

int run(const BoundCheckCommand& c, unsigned workers, std::ostream& out) {
  bool ok = true;
  for (auto kind : c.kinds) {
    const bool poor = kind == BoundKind::Thm2;
    const double p = c.p.value_or(poor ? 0.01 : 0.999);
    const auto r = run_bound_check(kind, p, c.horizon, c.runs, c.seed, workers);
    out << fmt::format("{} p={} T={} delta={:.6f} mean={:.4f} se={:.4f} lower={:.4f} {} upper={:.4f} {}\n",
                       poor ? "thm2" : "thm3", p, c.horizon, r.delta, r.mean_regret, r.std_error, r.lower_bound,
                       r.lower_ok ? "PASS" : "FAIL", r.upper_bound, r.upper_ok ? "PASS" : "FAIL");
    ok = ok && r.lower_ok && r.upper_ok;
  }
  return ok ? kExitOk : kExitAssertion;
}

}  // namespace

int run_command(const Command& command, std::ostream& out, std::ostream&) {
  const unsigned workers = command.threads;
  return std::visit(
      [&](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SimulateCommand>) return run(c, workers, out);
        else if constexpr (std::is_same_v<T, VerifyCommand>) return run(c, out);
        else if constexpr (std::is_same_v<T, OracleCommand>) return run(c, out);
        else if constexpr (std::is_same_v<T, ExperimentCommand>) return run(c, workers, out);
        else return run(c, workers, out);
      },
      command.action);
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command command;
  try {
    command = cli_parse(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return run_command(command, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "argument error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}

}  // namespace priorsense
