#include "umlab/attacks/attacks.hpp"
#include "umlab/primitives/error.hpp"

namespace umlab::attacks {

namespace {

struct StrategyName {
  StrategyKind kind;
  std::string_view name;
};

constexpr StrategyName kStrategies[] = {
    {StrategyKind::Kex2EntropyCollision, "kex2-collision"},
    {StrategyKind::KemSameKey, "kem-same-key"},
    {StrategyKind::Kem2Replica, "kem2-replica"},
    {StrategyKind::Kem2Combined, "kem2-combined"},
    {StrategyKind::RandomForge, "random-forge"},
    {StrategyKind::Redirect, "redirect"},
};

}  // namespace

std::string_view to_string(StrategyKind s) {
  for (const auto& e : kStrategies)
    if (e.kind == s) return e.name;
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (const auto& e : kStrategies)
    if (e.name == name) return e.kind;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(ForgePoint p) {
  switch (p) {
    case ForgePoint::Default: return "default";
    case ForgePoint::PublicKey: return "public-key";
    case ForgePoint::Ciphertext: return "ciphertext";
  }
  return "?";
}

ForgePoint parse_forge_point(std::string_view name) {
  for (auto p : {ForgePoint::Default, ForgePoint::PublicKey, ForgePoint::Ciphertext})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown forge point '" + std::string(name) + "'");
}

std::string_view to_string(SuccessCriterion c) {
  switch (c) {
    case SuccessCriterion::EntropyMatch: return "entropy-match";
    case SuccessCriterion::SameKeyThreeParties: return "same-key-three-parties";
    case SuccessCriterion::KeyMismatchUndetected: return "key-mismatch-undetected";
  }
  return "?";
}

void check_combination(StrategyKind s, ProtocolKind target, ForgePoint point) {
  auto fail = [&] {
    throw ConfigError(std::string(to_string(s)) + " does not apply to " + std::string(proto::to_string(target)));
  };
  switch (s) {
    case StrategyKind::Kex2EntropyCollision:
      if (target != ProtocolKind::Kex2) fail();
      break;
    case StrategyKind::KemSameKey:
    case StrategyKind::Kem2Replica:
    case StrategyKind::Kem2Combined:
      if (target != ProtocolKind::Kem2) fail();
      break;
    case StrategyKind::RandomForge:
      if (target == ProtocolKind::Kex2 || target == ProtocolKind::Kem2) fail();
      break;
    case StrategyKind::Redirect: break;
  }
  if (point != ForgePoint::Default && (s != StrategyKind::RandomForge || target != ProtocolKind::Kem3Commit))
    throw ConfigError("a forge point only applies to random-forge against kem3commit");
}

AttackOutcome run_attack_trial(const TrialParams& p) {
  auto strategy = make_strategy(p.strategy, p.target, p.point, p.budget);
  model::WorldConfig wc;
  wc.kind = p.target;
  wc.protocol = p.protocol;
  wc.model = model::ExecModel::UM;
  wc.seed = derive_seed(p.seed, "world");
  wc.challenge_seed = derive_seed(p.seed, "challenge");
  model::World world(wc);

  Scenario sc;
  sc.nonce = model::nonce_from_u64(derive_seed(p.seed, "nonce"));
  Rng attacker(derive_seed(p.seed, "attacker"));
  AdversaryView view(world);
  StrategyResult r = strategy->run(view, sc, attacker);

  AttackOutcome out;
  out.criterion = strategy->criterion();
  out.iterations = r.iterations;
  const auto& a = world.record(r.first.first, r.first.second);
  const auto& b = world.record(r.second.first, r.second.second);
  out.sessions = {a, b};
  out.both_completed = a.status == model::Status::Completed && b.status == model::Status::Completed;
  out.aborted = a.status == model::Status::Aborted || b.status == model::Status::Aborted;
  out.keys_equal = out.both_completed && a.key == b.key;
  for (const auto& k : r.attacker_keys)
    if ((a.key && *a.key == k) || (b.key && *b.key == k)) out.attacker_knows_key = true;

  switch (out.criterion) {
    case SuccessCriterion::EntropyMatch: out.success = out.both_completed; break;
    case SuccessCriterion::SameKeyThreeParties: {
      bool attacker_same = false;
      for (const auto& k : r.attacker_keys)
        if (a.key && *a.key == k) attacker_same = true;
      out.success = out.keys_equal && attacker_same;
      break;
    }
    case SuccessCriterion::KeyMismatchUndetected: out.success = out.both_completed && !out.keys_equal; break;
  }
  return out;
}

}  // namespace umlab::attacks
