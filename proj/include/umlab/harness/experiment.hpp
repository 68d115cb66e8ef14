#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "umlab/attacks/attacks.hpp"

namespace umlab::harness {

using attacks::ForgePoint;
using attacks::StrategyKind;
using proto::ProtocolKind;

struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::Kex3;
  std::optional<StrategyKind> strategy;  // nullopt: honest AM runs
  std::string group = "toy256";
  KemMode kem_mode = KemMode::Deterministic;
  unsigned n_e = 16;
  std::uint32_t trials = 100;
  std::optional<std::uint64_t> budget;  // default 2^(n_e+4)
  std::uint64_t seed = 0;
  unsigned threads = 1;
  proto::EntropyPolicy policy = proto::EntropyPolicy::Figure;
  ForgePoint point = ForgePoint::Default;

  /// Throws ConfigError for zero trials, bad n_e, unknown group or an
  /// inapplicable strategy.
  void validate() const;
  std::uint64_t effective_budget() const;
};

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// 95% Wilson score interval.
Interval wilson95(std::uint64_t successes, std::uint64_t trials);

enum class Verdict : std::uint8_t { WithinBound, ViolatesBound };
std::string_view to_string(Verdict v);

struct TrialSummary {
  ExperimentConfig config;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0;
  Interval wilson;
  double mean_iterations = 0;  // over successful trials
  std::uint64_t max_iterations = 0;
  double bound = 0;            // 2 * 2^-n_e for attacks, 1.0 for honest runs
  Verdict verdict = Verdict::WithinBound;
  bool expected_demonstration = false;  // violating the bound is the point (kex2, kem2)
  std::string criterion;                // success tag, "completion" for honest runs
  std::uint64_t aborted = 0;
  std::uint64_t successes_keys_equal = 0;
  double wall_time_s = 0;  // not deterministic; reported outside the hashed region

  /// A defended protocol fell: the CLI turns this into exit code 2.
  bool gate_failure() const { return verdict == Verdict::ViolatesBound && !expected_demonstration; }
};

proto::ProtocolConfig protocol_config(const ExperimentConfig& config);

/// The AM world of honest trial i, fully delivered. run uses it for
/// transcript export; the experiment loop uses the same seeds.
model::World honest_world(const ExperimentConfig& config, std::uint64_t trial_index);

/// Deterministic in the master seed: trial i runs under derive_seed(seed, i)
/// and aggregation is order independent, so threads do not change results.
TrialSummary run_experiment(const ExperimentConfig& config);

/// One summary per n_e. Throws ConfigError for an empty list.
std::vector<TrialSummary> sweep(const ExperimentConfig& base, const std::vector<unsigned>& n_e_values);

/// Report schema identifier written into every JSON report.
inline constexpr std::string_view kReportSchema = "umlab.report/1";

std::string to_json(const std::vector<TrialSummary>& summaries, const std::string& command);
std::string to_csv(const std::vector<TrialSummary>& summaries);

}  // namespace umlab::harness
