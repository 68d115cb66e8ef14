#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "math_oracle.hpp"
#include "umlab/attacks/attacks.hpp"
#include "umlab/primitives/error.hpp"

using namespace umlab;
using namespace umlab::attacks;
using proto::ProtocolKind;

namespace {

TrialParams params(ProtocolKind target, StrategyKind s, unsigned n_e, std::uint64_t seed,
                   std::uint64_t budget = 1 << 16) {
  TrialParams p;
  p.target = target;
  p.strategy = s;
  p.protocol.n_e = n_e;
  p.budget = budget;
  p.seed = seed;
  return p;
}

int successes(TrialParams p, int trials) {
  int n = 0;
  const std::uint64_t base = p.seed;
  for (int i = 0; i < trials; ++i) {
    p.seed = derive_seed(base, static_cast<std::uint64_t>(i));
    if (run_attack_trial(p).success) ++n;
  }
  return n;
}

// The adversary handle must not expose session state.
template <typename V>
concept ExposesRecords = requires(V v) { v.records(); };
template <typename V>
concept ExposesMachines = requires(V v, PartyId p, model::SessionId s) { v.machine(p, s); };
template <typename V>
concept ExposesRecord = requires(V v, PartyId p, model::SessionId s) { v.record(p, s); };
static_assert(!ExposesRecords<AdversaryView>);
static_assert(!ExposesMachines<AdversaryView>);
static_assert(!ExposesRecord<AdversaryView>);

}  // namespace

TEST_SUITE("configuration") {
  TEST_CASE("names round trip") {
    for (auto s : {StrategyKind::Kex2EntropyCollision, StrategyKind::KemSameKey, StrategyKind::Kem2Replica,
                   StrategyKind::Kem2Combined, StrategyKind::RandomForge, StrategyKind::Redirect})
      CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS_AS(parse_strategy("brute"), ConfigError);
    CHECK(parse_forge_point("ciphertext") == ForgePoint::Ciphertext);
    CHECK_THROWS_AS(parse_forge_point("nonce"), ConfigError);
  }

  TEST_CASE("invalid combinations") {
    CHECK_THROWS_AS(check_combination(StrategyKind::KemSameKey, ProtocolKind::Kex3), ConfigError);
    CHECK_THROWS_AS(check_combination(StrategyKind::Kex2EntropyCollision, ProtocolKind::Kem2), ConfigError);
    CHECK_THROWS_AS(check_combination(StrategyKind::RandomForge, ProtocolKind::Kex2), ConfigError);
    CHECK_THROWS_AS(check_combination(StrategyKind::RandomForge, ProtocolKind::Kex3, ForgePoint::Ciphertext),
                    ConfigError);
    CHECK_NOTHROW(check_combination(StrategyKind::RandomForge, ProtocolKind::Kem3Commit, ForgePoint::Ciphertext));
    CHECK_NOTHROW(check_combination(StrategyKind::Redirect, ProtocolKind::Kem2));
    CHECK_THROWS_AS(run_attack_trial(params(ProtocolKind::Kex3, StrategyKind::KemSameKey, 8, 1)), ConfigError);
  }

  TEST_CASE("success criteria are tagged per strategy") {
    CHECK(make_strategy(StrategyKind::KemSameKey, ProtocolKind::Kem2, ForgePoint::Default, 1)->criterion() ==
          SuccessCriterion::SameKeyThreeParties);
    CHECK(make_strategy(StrategyKind::Kem2Replica, ProtocolKind::Kem2, ForgePoint::Default, 1)->criterion() ==
          SuccessCriterion::EntropyMatch);
    CHECK(make_strategy(StrategyKind::RandomForge, ProtocolKind::Kem3Commit, ForgePoint::Ciphertext, 1)
              ->criterion() == SuccessCriterion::KeyMismatchUndetected);
  }
}

TEST_SUITE("undefended protocols") {
  TEST_CASE("kex2 collision loop follows the geometric law") {
    const unsigned n_e = 6;
    double sum = 0;
    int wins = 0;
    for (std::uint64_t i = 0; i < 220; ++i) {
      const auto o = run_attack_trial(params(ProtocolKind::Kex2, StrategyKind::Kex2EntropyCollision, n_e,
                                             derive_seed(41, i), 1 << 14));
      if (!o.success) continue;
      ++wins;
      sum += static_cast<double>(o.iterations);
      CHECK(o.attacker_knows_key);
      CHECK_FALSE(o.keys_equal);
    }
    REQUIRE(wins >= 200);
    const double mean = sum / wins;
    const double theory = oracle::geometric_mean(std::ldexp(1.0, -static_cast<int>(n_e)));
    CHECK(mean >= theory / 2);
    CHECK(mean <= theory * 2);
  }

  TEST_CASE("zero budget gives up") {
    const auto o = run_attack_trial(params(ProtocolKind::Kex2, StrategyKind::Kex2EntropyCollision, 8, 3, 0));
    CHECK_FALSE(o.success);
    CHECK(o.iterations == 0);
  }

  TEST_CASE("same-key attack on key-only kem2") {
    auto p = params(ProtocolKind::Kem2, StrategyKind::KemSameKey, 16, 5);
    p.protocol.policy = proto::EntropyPolicy::KeyOnly;
    const auto o = run_attack_trial(p);
    CHECK(o.success);
    CHECK(o.keys_equal);
    CHECK(o.attacker_knows_key);
    CHECK(o.sessions.size() == 2);
  }

  TEST_CASE("same-key attack against full-figure entropy fails at n_e = 32") {
    CHECK(successes(params(ProtocolKind::Kem2, StrategyKind::KemSameKey, 32, 6), 200) == 0);
  }

  TEST_CASE("replica attack in deterministic mode matches entropy with different keys") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto o = run_attack_trial(params(ProtocolKind::Kem2, StrategyKind::Kem2Replica, 8, 70 + s));
      REQUIRE(o.success);
      CHECK_FALSE(o.keys_equal);
      CHECK(o.attacker_knows_key);
    }
  }

  TEST_CASE("combined attack in probabilistic mode reaches equal keys") {
    auto p = params(ProtocolKind::Kem2, StrategyKind::Kem2Combined, 8, 80);
    p.protocol.kem_mode = KemMode::Probabilistic;
    const auto o = run_attack_trial(p);
    CHECK(o.success);
    CHECK(o.keys_equal);
  }

  TEST_CASE("redirect succeeds where the receiver is not in G") {
    CHECK(successes(params(ProtocolKind::Kem2, StrategyKind::Redirect, 16, 90), 20) == 20);
    auto p = params(ProtocolKind::MtAuth, StrategyKind::Redirect, 16, 91);
    p.protocol.policy = proto::EntropyPolicy::StripIdentity;
    CHECK(successes(p, 20) == 20);
  }
}

TEST_SUITE("defended protocols") {
  TEST_CASE("redirect against mtauth with identity fails at n_e = 32") {
    CHECK(successes(params(ProtocolKind::MtAuth, StrategyKind::Redirect, 32, 92), 100) == 0);
  }

  TEST_CASE("random forge on kex3 succeeds at about 2^-n_e") {
    const int n = 2000;
    const double p = std::ldexp(1.0, -4);
    const int k = successes(params(ProtocolKind::Kex3, StrategyKind::RandomForge, 4, 93), n);
    const double sigma = oracle::binomial_sigma(p, n) * n;
    CHECK(std::fabs(k - p * n) <= 4 * sigma);
  }

  TEST_CASE("every defended target resists at n_e = 32") {
    for (auto k : {ProtocolKind::MtAuth, ProtocolKind::Kex3, ProtocolKind::Kem3TwoEntropy, ProtocolKind::Kem3Commit,
                   ProtocolKind::Kem4, ProtocolKind::Kem6}) {
      CAPTURE(proto::to_string(k));
      CHECK(successes(params(k, StrategyKind::RandomForge, 32, 94), 30) == 0);
      CHECK(successes(params(k, StrategyKind::Redirect, 32, 95), 30) == 0);
    }
  }

  TEST_CASE("kem3commit ciphertext tampering always aborts") {
    auto p = params(ProtocolKind::Kem3Commit, StrategyKind::RandomForge, 8, 96);
    p.point = ForgePoint::Ciphertext;
    for (int i = 0; i < 50; ++i) {
      p.seed = derive_seed(96, static_cast<std::uint64_t>(i));
      const auto o = run_attack_trial(p);
      CHECK_FALSE(o.success);
      CHECK(o.aborted);
    }
  }

  TEST_CASE("trials are reproducible") {
    const auto p = params(ProtocolKind::Kem4, StrategyKind::RandomForge, 8, 97);
    const auto a = run_attack_trial(p);
    const auto b = run_attack_trial(p);
    CHECK(a.success == b.success);
    CHECK(a.iterations == b.iterations);
    CHECK(a.sessions == b.sessions);
  }
}
