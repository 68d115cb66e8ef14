#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "umlab/model/world.hpp"

namespace umlab::attacks {

using model::MessageEnvelope;
using proto::ProtocolKind;

enum class StrategyKind : std::uint8_t {
  Kex2EntropyCollision,
  KemSameKey,
  Kem2Replica,
  Kem2Combined,
  RandomForge,
  Redirect,
};

/// Where RandomForge tampers. Only Kem3Commit has a choice: substituting the
/// public key (same-key relay through Decaps*) or the ciphertext alone.
enum class ForgePoint : std::uint8_t { Default, PublicKey, Ciphertext };

enum class SuccessCriterion : std::uint8_t { EntropyMatch, SameKeyThreeParties, KeyMismatchUndetected };

std::string_view to_string(StrategyKind s);
std::string_view to_string(ForgePoint p);
std::string_view to_string(SuccessCriterion c);
StrategyKind parse_strategy(std::string_view name);
ForgePoint parse_forge_point(std::string_view name);

/// Throws ConfigError when the strategy does not apply to the target.
void check_combination(StrategyKind s, ProtocolKind target, ForgePoint point = ForgePoint::Default);

/// The only handle a strategy gets: M, the scheduler, public parameters and
/// I_f verdicts. No session state, no keys.
class AdversaryView {
 public:
  explicit AdversaryView(model::World& w) : w_(w) {}

  std::vector<MessageEnvelope> pending() const { return w_.pending(); }
  model::ActionResult apply(const model::AdversaryAction& a) { return w_.apply(a); }
  ProtocolKind kind() const { return w_.config().kind; }
  const proto::ProtocolConfig& params() const { return w_.config().protocol; }
  std::vector<model::OobVerification> verdicts() const { return w_.verdicts(); }

 private:
  model::World& w_;
};

struct Scenario {
  PartyId alice{"alice"};
  PartyId bob{"bob"};
  PartyId carol{"carol"};
  model::SessionNonce nonce{};
};

struct StrategyResult {
  std::uint64_t iterations = 0;
  std::vector<SharedKey> attacker_keys;  // keys the attacker computed itself
  /// The two half-sessions the attack targets, in (initiator, responder) order.
  std::pair<PartyId, model::SessionId> first;
  std::pair<PartyId, model::SessionId> second;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual StrategyKind kind() const = 0;
  virtual SuccessCriterion criterion() const = 0;
  /// Opens the sessions and drives M until it is empty.
  virtual StrategyResult run(AdversaryView& view, const Scenario& sc, Rng& rng) = 0;
};

std::unique_ptr<Strategy> make_strategy(StrategyKind s, ProtocolKind target, ForgePoint point, std::uint64_t budget);

struct AttackOutcome {
  bool success = false;
  SuccessCriterion criterion = SuccessCriterion::EntropyMatch;
  std::uint64_t iterations = 0;
  std::vector<model::SessionRecord> sessions;  // copies of the two targeted half-sessions
  bool both_completed = false;
  bool aborted = false;         // some targeted session aborted (protocol abort or I_f reject)
  bool keys_equal = false;      // both completed with bitwise-equal keys
  bool attacker_knows_key = false;
};

struct TrialParams {
  ProtocolKind target = ProtocolKind::Kex2;
  proto::ProtocolConfig protocol;
  StrategyKind strategy = StrategyKind::Kex2EntropyCollision;
  ForgePoint point = ForgePoint::Default;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
};

/// One trial in a fresh UM world. The evaluator here, not the strategy,
/// reads the parties' records to judge success.
AttackOutcome run_attack_trial(const TrialParams& p);

}  // namespace umlab::attacks
