#include "umlab/harness/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "umlab/primitives/error.hpp"

namespace umlab::harness {

namespace {

struct TrialResult {
  bool success = false;
  bool aborted = false;
  bool keys_equal = false;
  std::uint64_t iterations = 0;
};

TrialResult honest_trial(const ExperimentConfig& c, std::uint64_t index) {
  const model::World w = honest_world(c, index);
  const auto recs = w.records();
  TrialResult r;
  if (recs.size() != 2) return r;
  const auto& ra = recs[0];
  const auto& rb = recs[1];
  r.aborted = ra.status == model::Status::Aborted || rb.status == model::Status::Aborted;
  r.keys_equal = ra.key && ra.key == rb.key;
  r.success = ra.status == model::Status::Completed && rb.status == model::Status::Completed && r.keys_equal &&
              ra.entropies == rb.entropies;
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be at least 1");
  require_entropy_bits(n_e);
  GroupParams::by_name(group);
  proto::ProtocolConfig pc;
  pc.n_e = n_e;
  pc.policy = policy;
  pc.validate(protocol);
  if (strategy) {
    attacks::check_combination(*strategy, protocol, point);
  } else if (point != ForgePoint::Default) {
    throw ConfigError("a forge point needs a strategy");
  }
}

proto::ProtocolConfig protocol_config(const ExperimentConfig& config) {
  proto::ProtocolConfig pc;
  pc.group = GroupParams::by_name(config.group);
  pc.n_e = config.n_e;
  pc.kem_mode = config.kem_mode;
  pc.policy = config.policy;
  return pc;
}

model::World honest_world(const ExperimentConfig& config, std::uint64_t trial_index) {
  const std::uint64_t seed = derive_seed(config.seed, trial_index);
  model::WorldConfig wc;
  wc.kind = config.protocol;
  wc.protocol = protocol_config(config);
  wc.model = model::ExecModel::AM;
  wc.seed = derive_seed(seed, "world");
  wc.challenge_seed = derive_seed(seed, "challenge");
  model::World w(wc);
  model::open_run(w, PartyId("alice"), PartyId("bob"), model::nonce_from_u64(derive_seed(seed, "nonce")));
  model::deliver_all(w);
  return w;
}

std::uint64_t ExperimentConfig::effective_budget() const {
  if (budget) return *budget;
  return std::uint64_t{1} << std::min(n_e + 4, 62u);
}

Interval wilson95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0, 1};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  // The closed form is exact at the ends but rounds a hair inside them.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

std::string_view to_string(Verdict v) { return v == Verdict::WithinBound ? "within-bound" : "violates-bound"; }

TrialSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const proto::ProtocolConfig pc = protocol_config(config);
  const std::uint64_t budget = config.effective_budget();

  std::vector<TrialResult> results(config.trials);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < results.size(); i += step) {
      if (!config.strategy) {
        results[i] = honest_trial(config, i);
        continue;
      }
      const std::uint64_t seed = derive_seed(config.seed, i);
      attacks::TrialParams tp{config.protocol, pc, *config.strategy, config.point, budget, seed};
      auto o = attacks::run_attack_trial(tp);
      results[i] = TrialResult{o.success, o.aborted, o.keys_equal, o.iterations};
    }
  };
  const unsigned threads = std::clamp(config.threads, 1u, 64u);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  TrialSummary s;
  s.config = config;
  s.config.budget = config.strategy ? std::optional(budget) : std::nullopt;
  s.trials = config.trials;
  std::uint64_t iter_sum = 0;
  for (const auto& r : results) {
    if (r.aborted) ++s.aborted;
    if (!r.success) continue;
    ++s.successes;
    if (r.keys_equal) ++s.successes_keys_equal;
    iter_sum += r.iterations;
    s.max_iterations = std::max(s.max_iterations, r.iterations);
  }
  s.rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
  s.wilson = wilson95(s.successes, s.trials);
  s.mean_iterations = s.successes ? static_cast<double>(iter_sum) / static_cast<double>(s.successes) : 0.0;
  if (config.strategy) {
    s.bound = 2.0 * std::ldexp(1.0, -static_cast<int>(config.n_e));
    s.criterion = std::string(attacks::to_string(attacks::make_strategy(*config.strategy, config.protocol,
                                                                        config.point, budget)->criterion()));
    s.expected_demonstration = !proto::info(config.protocol).defended;
  } else {
    s.bound = 1.0;
    s.criterion = "completion";
  }
  s.verdict = s.wilson.lo > s.bound ? Verdict::ViolatesBound : Verdict::WithinBound;
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

std::vector<TrialSummary> sweep(const ExperimentConfig& base, const std::vector<unsigned>& n_e_values) {
  if (n_e_values.empty()) throw ConfigError("sweep needs at least one n_e value");
  std::vector<TrialSummary> out;
  for (unsigned ne : n_e_values) {
    ExperimentConfig c = base;
    c.n_e = ne;
    c.validate();
    out.push_back(run_experiment(c));
  }
  return out;
}

namespace {

nlohmann::ordered_json summary_json(const TrialSummary& s) {
  const auto& c = s.config;
  nlohmann::ordered_json j;
  j["protocol"] = proto::to_string(c.protocol);
  j["strategy"] = c.strategy ? std::string(attacks::to_string(*c.strategy)) : "honest";
  j["forge_point"] = attacks::to_string(c.point);
  j["policy"] = proto::to_string(c.policy);
  j["group"] = c.group;
  j["mode"] = to_string(c.kem_mode);
  j["n_e"] = c.n_e;
  j["budget"] = c.budget ? nlohmann::ordered_json(*c.budget) : nlohmann::ordered_json(nullptr);
  j["seed"] = c.seed;
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["rate"] = s.rate;
  j["wilson95"] = {s.wilson.lo, s.wilson.hi};
  j["mean_iterations"] = s.mean_iterations;
  j["max_iterations"] = s.max_iterations;
  j["bound"] = s.bound;
  j["verdict"] = to_string(s.verdict);
  j["expected_demonstration"] = s.expected_demonstration;
  j["criterion"] = s.criterion;
  j["aborted"] = s.aborted;
  j["successes_keys_equal"] = s.successes_keys_equal;
  return j;
}

}  // namespace

std::string to_json(const std::vector<TrialSummary>& summaries, const std::string& command) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["summaries"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json timing = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    j["summaries"].push_back(summary_json(s));
    timing.push_back(s.wall_time_s);
  }
  j["timing"] = {{"wall_time_s", timing}};
  return j.dump(2) + "\n";
}

std::string to_csv(const std::vector<TrialSummary>& summaries) {
  std::ostringstream os;
  os << "protocol,strategy,forge_point,policy,group,mode,n_e,budget,seed,trials,successes,rate,wilson_lo,"
        "wilson_hi,mean_iterations,max_iterations,bound,verdict,expected_demonstration,criterion,aborted,"
        "successes_keys_equal,wall_time_s\n";
  os << std::setprecision(17);
  for (const auto& s : summaries) {
    const auto& c = s.config;
    os << proto::to_string(c.protocol) << ',' << (c.strategy ? attacks::to_string(*c.strategy) : "honest") << ','
       << attacks::to_string(c.point) << ',' << proto::to_string(c.policy) << ',' << c.group << ','
       << to_string(c.kem_mode) << ',' << c.n_e << ',' << (c.budget ? std::to_string(*c.budget) : "") << ','
       << c.seed << ',' << s.trials << ',' << s.successes << ',' << s.rate << ',' << s.wilson.lo << ','
       << s.wilson.hi << ',' << s.mean_iterations << ',' << s.max_iterations << ',' << s.bound << ','
       << to_string(s.verdict) << ',' << (s.expected_demonstration ? "true" : "false") << ',' << s.criterion
       << ',' << s.aborted << ',' << s.successes_keys_equal << ',' << s.wall_time_s << '\n';
  }
  return os.str();
}

}  // namespace umlab::harness
