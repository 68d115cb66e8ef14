#include "umlab/acceptance/acceptance.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "umlab/harness/experiment.hpp"
#include "umlab/primitives/commitment.hpp"
#include "umlab/primitives/error.hpp"
#include "umlab/protocols/compile.hpp"

namespace umlab::acceptance {

namespace {

using attacks::StrategyKind;
using harness::ExperimentConfig;
using proto::ProtocolKind;

// Three-sigma binomial ceiling around p over n trials.
double three_sigma_ceiling(double p, double n) { return 2 * p + 3 * std::sqrt(p * (1 - p) / n); }

ExperimentConfig attack_config(ProtocolKind target, StrategyKind s, unsigned n_e, std::uint32_t trials,
                               std::uint64_t seed) {
  ExperimentConfig c;
  c.protocol = target;
  c.strategy = s;
  c.n_e = n_e;
  c.trials = trials;
  c.seed = seed;
  return c;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

void honest_completeness(Check& ck) {
  const auto t0 = std::chrono::steady_clock::now();
  for (auto k : proto::all_protocols()) {
    ExperimentConfig c;
    c.protocol = k;
    c.trials = 1000;
    c.seed = 101;
    const auto s = harness::run_experiment(c);
    ck.detail << proto::to_string(k) << '=' << s.successes << ' ';
    ck.require(s.successes == 1000, std::string(proto::to_string(k)) + " completions");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ck.require(secs <= 30, "runtime <= 30 s");
}

void kex2_falls(Check& ck) {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = attack_config(ProtocolKind::Kex2, StrategyKind::Kex2EntropyCollision, 8, 50, 102);
  c.budget = 100000;
  const auto s = harness::run_experiment(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ck.detail << "rate=" << s.rate << " mean_iter=" << s.mean_iterations << ' ';
  ck.require(s.rate >= 0.99, "rate >= 0.99");
  ck.require(s.mean_iterations >= 128 && s.mean_iterations <= 512, "mean iterations in [128, 512]");
  ck.require(secs <= 60, "runtime <= 60 s");
}

void kem_same_key(Check& ck) {
  auto c = attack_config(ProtocolKind::Kem2, StrategyKind::KemSameKey, 16, 100, 103);
  c.policy = proto::EntropyPolicy::KeyOnly;
  const auto key_only = harness::run_experiment(c);
  ck.detail << "key-only=" << key_only.successes << "/100 equal=" << key_only.successes_keys_equal << ' ';
  ck.require(key_only.successes == 100 && key_only.successes_keys_equal == 100, "key-only same key 100/100");

  // n_e = 32 so that a chance entropy collision (2^-n_e per trial) is not
  // what is being measured.
  auto full = attack_config(ProtocolKind::Kem2, StrategyKind::KemSameKey, 32, 10000, 104);
  full.kem_mode = KemMode::Deterministic;
  const auto s = harness::run_experiment(full);
  ck.detail << "full-entropy det=" << s.successes << "/10000 ";
  ck.require(s.successes == 0, "full-entropy det 0 successes");
}

void replica(Check& ck) {
  auto c = attack_config(ProtocolKind::Kem2, StrategyKind::Kem2Replica, 8, 50, 105);
  c.budget = 100000;
  const auto det = harness::run_experiment(c);
  ck.detail << "replica rate=" << det.rate << " keys_equal=" << det.successes_keys_equal << ' ';
  ck.require(det.rate >= 0.99, "replica rate >= 0.99");
  ck.require(det.successes > 0 && det.successes_keys_equal == 0, "det successes all have A-key != B-key");

  auto p = attack_config(ProtocolKind::Kem2, StrategyKind::Kem2Combined, 8, 50, 106);
  p.budget = 100000;
  p.kem_mode = KemMode::Probabilistic;
  const auto prob = harness::run_experiment(p);
  ck.detail << "combined successes=" << prob.successes << " equal=" << prob.successes_keys_equal << ' ';
  ck.require(prob.successes == 50, "50 successful combined trials");
  ck.require(prob.successes_keys_equal >= 1, ">= 1 success with equal keys and matched entropy");
}

void defended_hold(Check& ck) {
  const auto t0 = std::chrono::steady_clock::now();
  const double ceiling = three_sigma_ceiling(std::ldexp(1.0, -8), 10000);
  std::uint64_t seed = 200;
  for (auto k : {ProtocolKind::Kex3, ProtocolKind::Kem3TwoEntropy, ProtocolKind::Kem3Commit, ProtocolKind::Kem4,
                 ProtocolKind::Kem6}) {
    for (auto s : {StrategyKind::RandomForge, StrategyKind::Redirect}) {
      const auto r = harness::run_experiment(attack_config(k, s, 8, 10000, seed++));
      ck.detail << proto::to_string(k) << '/' << attacks::to_string(s) << '=' << r.successes << ' ';
      ck.require(r.rate <= ceiling, std::string(proto::to_string(k)) + " " + std::string(attacks::to_string(s)));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ck.require(secs <= 600, "runtime <= 10 min");
}

void kem3commit_abort(Check& ck) {
  const std::uint64_t master = 107;
  proto::ProtocolConfig pc;
  pc.n_e = 16;
  std::uint64_t aborts = 0;
  const std::uint64_t trials = 10000;
  for (std::uint64_t i = 0; i < trials; ++i) {
    attacks::TrialParams tp{ProtocolKind::Kem3Commit, pc, StrategyKind::RandomForge, attacks::ForgePoint::Ciphertext,
                            0, derive_seed(master, i)};
    const auto o = attacks::run_attack_trial(tp);
    bool fired = false;
    for (const auto& rec : o.sessions)
      for (const auto& e : rec.log)
        if (e.type == model::EventType::Aborted && e.detail.find("x != x'") != std::string::npos) fired = true;
    if (fired && !o.success) ++aborts;
  }
  ck.detail << "aborts=" << aborts << '/' << trials << ' ';
  ck.require(aborts == trials, "abort on x != x' in every trial");
}

std::size_t sent_count(const model::World& w) {
  std::size_t n = 0;
  for (const auto& r : w.records())
    for (const auto& e : r.log)
      if (e.type == model::EventType::Sent) ++n;
  return n;
}

void compiler_equivalence(Check& ck) {
  ExperimentConfig c;
  c.seed = 108;
  std::uint32_t identical = 0;
  const std::uint32_t runs = 1000;
  bool flow_sizes = true;
  for (std::uint32_t i = 0; i < runs; ++i) {
    c.protocol = ProtocolKind::Kem4;
    const auto w4 = harness::honest_world(c, i);
    c.protocol = ProtocolKind::Kem6;
    const auto w6 = harness::honest_world(c, i);
    if (i == 0) flow_sizes = sent_count(w4) == 4 && sent_count(w6) == 6;
    const auto r4 = w4.records();
    const auto r6 = w6.records();
    bool same = r4.size() == 2 && r6.size() == 2;
    for (std::size_t j = 0; same && j < r4.size(); ++j) {
      same = r4[j].self == r6[j].self && r4[j].key && r4[j].key == r6[j].key &&
             r4[j].entropies.size() == 2 && r4[j].entropies == r6[j].entropies;
    }
    if (same) ++identical;
  }
  const auto compiled = proto::compile_mt(ProtocolKind::Kem2);
  ck.detail << "identical=" << identical << '/' << runs << " compiled_messages=" << compiled.messages << ' ';
  ck.require(identical == runs, "Kem4 and Kem6 agree on (E_A, E_B, kappa)");
  ck.require(compiled.messages == 6 && compiled.outer == ProtocolKind::Kem6, "compile_mt(Kem2) has 6 messages");
  ck.require(flow_sizes, "observed flows of 4 and 6 messages");
}

void commitment_properties(Check& ck) {
  Rng rng(109);
  const Bytes m = rng.bytes(32);
  const auto cr = commit(m, rng);
  std::uint64_t forged = 0;
  for (int i = 0; i < 100000; ++i) {
    Opening d{rng.bytes(32), rng.array<kBlinderBytes>()};
    if (d.message == m) continue;
    if (open(cr.commitment, d)) ++forged;
  }
  ck.detail << "binding=" << forged << "/100000 ";
  ck.require(forged == 0, "binding search finds nothing");

  // Distinguisher without the blinder: try the zero blinder on both
  // candidates, fall back to a parity guess.
  const Bytes m0(32, 0x00), m1(32, 0xff);
  const Blinder zero{};
  const auto c0 = commit_with_blinder(m0, zero).commitment;
  const auto c1 = commit_with_blinder(m1, zero).commitment;
  const int trials = 10000;
  int correct = 0;
  for (int i = 0; i < trials; ++i) {
    const int b = static_cast<int>(rng() & 1);
    const auto c = commit(b ? m1 : m0, rng).commitment;
    int guess = c.digest[0] & 1;
    if (c == c0) guess = 0;
    if (c == c1) guess = 1;
    if (guess == b) ++correct;
  }
  const double rate = static_cast<double>(correct) / trials;
  const double tol = 3 * std::sqrt(0.25 / trials);
  ck.detail << "hiding=" << rate << ' ';
  ck.require(std::fabs(rate - 0.5) <= tol, "hiding distinguisher within 0.5 +- 3 sigma");
}

void sweep_sanity(Check& ck) {
  const std::pair<unsigned, std::uint32_t> points[] = {{4, 100000}, {8, 10000}, {12, 10000}};
  std::uint64_t seed = 110;
  for (auto [ne, trials] : points) {
    const auto s = harness::run_experiment(attack_config(ProtocolKind::Kex3, StrategyKind::RandomForge, ne, trials,
                                                         seed++));
    const double p = std::ldexp(1.0, -static_cast<int>(ne));
    ck.detail << "n_e=" << ne << ":" << s.successes << '/' << trials << " [" << s.wilson.lo << ',' << s.wilson.hi
              << "] ";
    ck.require(s.wilson.lo <= p && p <= s.wilson.hi, "2^-" + std::to_string(ne) + " inside the Wilson interval");
  }
}

std::string without_timing(const std::string& json_text) {
  auto j = nlohmann::ordered_json::parse(json_text);
  j.erase("timing");
  return j.dump(2);
}

void reproducibility(Check& ck, const CliFn& cli) {
  const std::vector<std::vector<std::string>> commands = {
      {"run", "--protocol", "kem6", "--ne", "12", "--trials", "50", "--seed", "11", "--out", "-"},
      {"attack", "--strategy", "random-forge", "--protocol", "kem4", "--ne", "8", "--trials", "300", "--seed", "11",
       "--out", "-"},
      {"attack", "--strategy", "kex2-collision", "--ne", "6", "--trials", "20", "--seed", "11", "--threads", "3",
       "--out", "-"},
      {"sweep", "--strategy", "redirect", "--protocol", "mtauth", "--ne", "4,6", "--trials", "200", "--seed", "11",
       "--out", "-"},
  };
  for (const auto& cmd : commands) {
    std::ostringstream o1, e1, o2, e2;
    const int r1 = cli(cmd, o1, e1);
    const int r2 = cli(cmd, o2, e2);
    bool same = r1 == r2 && r1 == 0;
    try {
      same = same && without_timing(o1.str()) == without_timing(o2.str());
      // The raw text differs at most inside the timing object.
      const auto cut1 = o1.str().find("\"timing\"");
      const auto cut2 = o2.str().find("\"timing\"");
      same = same && cut1 != std::string::npos && o1.str().substr(0, cut1) == o2.str().substr(0, cut2);
    } catch (const std::exception&) {
      same = false;
    }
    ck.require(same, cmd[0] + " output repeats byte for byte");
  }
  ck.detail << commands.size() << " commands repeated ";
}

}  // namespace

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

std::string criterion_name(int id) {
  switch (id) {
    case 1: return "honest completeness";
    case 2: return "kex2 entropy collision";
    case 3: return "kem same-key attack";
    case 4: return "kem2 replica and combined";
    case 5: return "defended protocols hold";
    case 6: return "kem3commit abort on tampered ct";
    case 7: return "kem4 / compiled kem6 equivalence";
    case 8: return "commitment binding and hiding";
    case 9: return "sweep sanity";
    case 10: return "reproducibility";
    default: throw ConfigError("no acceptance criterion " + std::to_string(id));
  }
}

CriterionResult run_criterion(int id, const CliFn& cli) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: honest_completeness(ck); break;
      case 2: kex2_falls(ck); break;
      case 3: kem_same_key(ck); break;
      case 4: replica(ck); break;
      case 5: defended_hold(ck); break;
      case 6: kem3commit_abort(ck); break;
      case 7: compiler_equivalence(ck); break;
      case 8: commitment_properties(ck); break;
      case 9: sweep_sanity(ck); break;
      case 10: reproducibility(ck, cli); break;
    }
  } catch (const std::exception& e) {
    ck.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

int run_suite(const std::vector<int>& ids, const CliFn& cli, std::ostream& out) {
  int fails = 0;
  for (int id : ids) {
    const auto r = run_criterion(id, cli);
    if (!r.pass) ++fails;
    out << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << ") " << r.detail << "["
        << std::fixed << std::setprecision(1) << r.seconds << " s]\n";
    out.unsetf(std::ios::floatfield);
    out.flush();
  }
  return fails;
}

}  // namespace umlab::acceptance
