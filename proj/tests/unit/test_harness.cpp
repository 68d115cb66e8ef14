#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "math_oracle.hpp"
#include "umlab/harness/experiment.hpp"
#include "umlab/primitives/error.hpp"

using namespace umlab;
using namespace umlab::harness;

namespace {

ExperimentConfig attack(ProtocolKind k, StrategyKind s, unsigned n_e, std::uint32_t trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.protocol = k;
  c.strategy = s;
  c.n_e = n_e;
  c.trials = trials;
  c.seed = seed;
  return c;
}

nlohmann::json strip_timing(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  j.erase("timing");
  return j;
}

}  // namespace

TEST_SUITE("statistics") {
  TEST_CASE("Wilson interval agrees with the bisection oracle") {
    for (auto [k, n] : {std::pair<std::uint64_t, std::uint64_t>{0, 10}, {1, 10}, {5, 10}, {10, 10}, {0, 10000},
                        {3, 10000}, {39, 10000}, {6250, 100000}, {50, 50}}) {
      CAPTURE(k);
      CAPTURE(n);
      const auto w = wilson95(k, n);
      CHECK(w.lo == doctest::Approx(oracle::wilson_root(k, n, false)).epsilon(1e-9));
      CHECK(w.hi == doctest::Approx(oracle::wilson_root(k, n, true)).epsilon(1e-9));
      CHECK(w.lo <= static_cast<double>(k) / n);
      CHECK(w.hi >= static_cast<double>(k) / n);
    }
    // Zero successes over 10^4: the upper end is about z^2 / n.
    CHECK(wilson95(0, 10000).hi == doctest::Approx(3.8415 / 10003.8415).epsilon(1e-4));
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("config validation") {
    ExperimentConfig c;
    c.trials = 0;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c.trials = 1;
    c.n_e = 65;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c.n_e = 16;
    c.group = "toy128";
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    CHECK_THROWS_AS(run_experiment(attack(ProtocolKind::Kex3, StrategyKind::KemSameKey, 8, 1, 1)), ConfigError);
    ExperimentConfig honest;
    honest.point = ForgePoint::Ciphertext;
    CHECK_THROWS_AS(run_experiment(honest), ConfigError);
  }

  TEST_CASE("default budget is 2^(n_e+4)") {
    ExperimentConfig c;
    c.n_e = 8;
    CHECK(c.effective_budget() == 4096);
    c.budget = 7;
    CHECK(c.effective_budget() == 7);
  }

  TEST_CASE("honest kex3 completes every trial") {
    ExperimentConfig c;
    c.protocol = ProtocolKind::Kex3;
    c.trials = 1000;
    c.seed = 7;
    const auto s = run_experiment(c);
    CHECK(s.successes == 1000);
    CHECK(s.rate == 1.0);
    CHECK(s.bound == 1.0);
    CHECK(s.verdict == Verdict::WithinBound);
    CHECK(s.criterion == "completion");
    CHECK_FALSE(s.config.budget);
  }

  TEST_CASE("kex2 collision is labelled as an expected demonstration") {
    auto c = attack(ProtocolKind::Kex2, StrategyKind::Kex2EntropyCollision, 8, 30, 8);
    const auto s = run_experiment(c);
    CHECK(s.rate >= 0.99);
    CHECK(s.verdict == Verdict::ViolatesBound);
    CHECK(s.expected_demonstration);
    CHECK_FALSE(s.gate_failure());
    CHECK(s.bound == doctest::Approx(2.0 / 256));
    CHECK(s.max_iterations >= s.mean_iterations);
    CHECK(*s.config.budget == 4096);
  }

  TEST_CASE("a defended protocol falling is a gate failure") {
    auto c = attack(ProtocolKind::MtAuth, StrategyKind::Redirect, 8, 20, 9);
    c.policy = proto::EntropyPolicy::StripIdentity;
    const auto s = run_experiment(c);
    CHECK(s.verdict == Verdict::ViolatesBound);
    CHECK(s.gate_failure());
  }

  TEST_CASE("same seed, same summary; threads do not matter") {
    auto c = attack(ProtocolKind::Kem4, StrategyKind::RandomForge, 6, 300, 10);
    const auto a = run_experiment(c);
    c.threads = 4;
    const auto b = run_experiment(c);
    CHECK(a.successes == b.successes);
    CHECK(a.mean_iterations == b.mean_iterations);
    CHECK(a.aborted == b.aborted);
    c.threads = 1;
    c.seed = 11;
    const auto d = run_experiment(c);
    CHECK(d.trials == a.trials);
  }

  TEST_CASE("random forge on kex3 tracks 2^-n_e") {
    const auto s = run_experiment(attack(ProtocolKind::Kex3, StrategyKind::RandomForge, 4, 4000, 12));
    const double p = 1.0 / 16;
    CHECK(std::fabs(s.rate - p) <= 4 * oracle::binomial_sigma(p, 4000));
  }
}

TEST_SUITE("sweep and reports") {
  TEST_CASE("sweep gives one summary per width, non-increasing within CI overlap") {
    const auto base = attack(ProtocolKind::Kex3, StrategyKind::RandomForge, 4, 3000, 13);
    CHECK_THROWS_AS(sweep(base, {}), ConfigError);
    CHECK_THROWS_AS(sweep(base, {4, 70}), ConfigError);
    const auto s = sweep(base, {4, 6, 8});
    REQUIRE(s.size() == 3);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].config.n_e == 4 + 2 * i);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].wilson.lo <= s[i - 1].wilson.hi);
  }

  TEST_CASE("JSON report carries schema, config echo and summary fields") {
    const auto s = run_experiment(attack(ProtocolKind::Kex3, StrategyKind::RandomForge, 8, 50, 14));
    const auto text = to_json({s}, "attack --strategy random-forge");
    const auto j = nlohmann::json::parse(text);
    CHECK(j["schema"] == std::string(kReportSchema));
    CHECK(j["command"] == "attack --strategy random-forge");
    REQUIRE(j["summaries"].size() == 1);
    const auto& r = j["summaries"][0];
    for (const char* key : {"protocol", "strategy", "n_e", "mode", "trials", "successes", "mean_iterations", "bound",
                            "seed", "rate", "wilson95", "verdict", "max_iterations", "group", "budget"})
      CHECK_MESSAGE(r.contains(key), key);
    CHECK(r["protocol"] == "kex3");
    CHECK(r["strategy"] == "random-forge");
    CHECK(r["trials"] == 50);
    CHECK(j["timing"]["wall_time_s"].size() == 1);
    CHECK_FALSE(r.contains("wall_time_s"));
  }

  TEST_CASE("JSON is reproducible outside the timing block") {
    const auto c = attack(ProtocolKind::Kem6, StrategyKind::Redirect, 8, 100, 15);
    const auto a = to_json({run_experiment(c)}, "x");
    const auto b = to_json({run_experiment(c)}, "x");
    CHECK(strip_timing(a) == strip_timing(b));
    CHECK(a.substr(0, a.find("\"timing\"")) == b.substr(0, b.find("\"timing\"")));
  }

  TEST_CASE("CSV has a header and one row per summary") {
    const auto base = attack(ProtocolKind::Kex3, StrategyKind::RandomForge, 4, 100, 16);
    const auto csv = to_csv(sweep(base, {4, 5}));
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    const auto cols = std::count(lines[0].begin(), lines[0].end(), ',');
    CHECK(std::count(lines[1].begin(), lines[1].end(), ',') == cols);
    CHECK(lines[1].rfind("kex3,random-forge,", 0) == 0);
  }
}
