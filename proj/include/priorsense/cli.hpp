#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "priorsense/agents.hpp"
#include "priorsense/experiments.hpp"
#include "priorsense/model_space.hpp"
#include "priorsense/oracle.hpp"
#include "priorsense/verify.hpp"

namespace priorsense {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Instance specs:
///   thm2:p=<p>[,T=<T>]   poor-prior lower-bound instance (T defaults to `horizon`)
///   thm3:p=<p>[,T=<T>]   good-prior lower-bound instance
///   poor:N=<n>,p=<p>[,delta=<d>][,seed=<s>]   scaling instance, prior p on the truth
///   good:N=<n>,p=<p>[,delta=<d>][,seed=<s>]
///   <path>               instance JSON file
InstanceBundle parse_instance_spec(std::string_view spec, std::int64_t horizon);

struct SimulateCommand {
  std::string instance;
  AgentKind agent;
  std::int64_t horizon = 1000;
  std::size_t runs = 1;
  std::uint64_t seed = 1;
  std::string out_dir;  ///< trajectory.csv is written here when runs == 1
};

struct VerifyCommand {
  BatteryOptions options;
  std::string out_dir;  ///< verify.csv is written here when set
};

struct OracleCommand {
  std::string instance;
  std::optional<double> alpha;  ///< defaults to the instance prior on model 0
  std::int64_t horizon = 8;
  std::int64_t cap = kDefaultOracleCap;
};

struct ExperimentCommand {
  std::vector<ExperimentConfig> configs;
  /// Exit 1 unless every fit meets its R^2 threshold.
  bool check = false;
};

struct BoundCheckCommand {
  std::vector<BoundKind> kinds;
  std::optional<double> p;
  std::int64_t horizon = 10000;
  std::size_t runs = 2000;
  std::uint64_t seed = 1;
};

struct Command {
  std::variant<SimulateCommand, VerifyCommand, OracleCommand, ExperimentCommand, BoundCheckCommand> action;
  unsigned threads = 0;  ///< 0 = PRIORSENSE_THREADS or hardware concurrency
};

/// Parses arguments after the program name. Throws UsageError.
Command cli_parse(const std::vector<std::string>& args);

/// Runs a parsed command; returns the process exit code.
int run_command(const Command& command, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map errors to exit codes.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// R^2 thresholds applied by `experiment --check`.
double fit_threshold(PriorCase which);

}  // namespace priorsense
