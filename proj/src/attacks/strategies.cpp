#include "umlab/attacks/attacks.hpp"
#include "umlab/primitives/commitment.hpp"
#include "umlab/primitives/error.hpp"
#include "umlab/primitives/pke.hpp"

namespace umlab::attacks {

namespace {

using model::SessionId;
using proto::EntropyPolicy;
using proto::Message;
using proto::Role;
namespace act = model::action;

Bytes key_bytes(const SharedKey& k) { return Bytes(k.bytes.begin(), k.bytes.end()); }
Bytes digest_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }
Bytes blinder_bytes(const Blinder& b) { return Bytes(b.begin(), b.end()); }

/// Drives M in FIFO order and lets the concrete strategy decide what to do
/// with each envelope. Every envelope must be consumed by exactly one of
/// deliver / modify / drop.
class Relay : public Strategy {
 public:
  Relay(ProtocolKind target, std::uint64_t budget) : target_(target), budget_(budget) {}

  StrategyResult run(AdversaryView& v, const Scenario& sc, Rng& rng) override {
    sc_ = sc;
    open(v);
    for (int guard = 0; guard < 64; ++guard) {
      auto p = v.pending();
      if (p.empty()) break;
      on_envelope(v, p.front(), Message::decode(p.front().payload), rng);
    }
    return result_;
  }

 protected:
  virtual void on_envelope(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) = 0;

  virtual void open(AdversaryView& v) {
    SessionId sid{sc_.alice, sc_.bob, sc_.nonce};
    const bool b_first = proto::info(target_).first_sender == Role::Responder;
    act::NewSession a{sc_.alice, sc_.bob, Role::Initiator, sc_.nonce};
    act::NewSession b{sc_.bob, sc_.alice, Role::Responder, sc_.nonce};
    v.apply(b_first ? model::AdversaryAction(a) : model::AdversaryAction(b));
    v.apply(b_first ? model::AdversaryAction(b) : model::AdversaryAction(a));
    result_.first = {sc_.alice, sid};
    result_.second = {sc_.bob, sid};
  }

  void deliver(AdversaryView& v, const MessageEnvelope& env) { v.apply(act::Deliver{env.id}); }
  void modify(AdversaryView& v, const MessageEnvelope& env, std::uint8_t step,
              std::vector<std::pair<std::string, Bytes>> fields) {
    v.apply(act::Modify{env.id, Message{static_cast<std::uint8_t>(target_), step, std::move(fields)}.encode()});
  }
  void drop(AdversaryView& v, const MessageEnvelope& env) { v.apply(act::Drop{env.id}); }

  bool from_alice(const MessageEnvelope& env) const { return env.sender == sc_.alice; }

  std::optional<PartyId> rcv(const AdversaryView& v, const PartyId& p) const {
    if (v.params().policy == EntropyPolicy::StripIdentity) return std::nullopt;
    return p;
  }
  EntropyValue G(const AdversaryView& v, std::optional<PartyId> r, std::vector<LabeledElement> els) const {
    return entropy(r, els, v.params().n_e);
  }
  EntropyValue kem2_entropy(const AdversaryView& v, const Bytes& pk, const Bytes& ct, const SharedKey& k) const {
    switch (v.params().policy) {
      case EntropyPolicy::KeyOnly: return G(v, std::nullopt, {{"K", key_bytes(k)}});
      case EntropyPolicy::WithIdentity: return G(v, sc_.bob, {{"pk", pk}, {"ct", ct}, {"K", key_bytes(k)}});
      default: return G(v, std::nullopt, {{"pk", pk}, {"ct", ct}, {"K", key_bytes(k)}});
    }
  }

  ProtocolKind target_;
  std::uint64_t budget_;
  Scenario sc_;
  StrategyResult result_;
};

// pk_eb toward B, then grind attacker key pairs toward A until the two
// entropies collide.
class Kex2Collision : public Relay {
 public:
  using Relay::Relay;
  StrategyKind kind() const override { return StrategyKind::Kex2EntropyCollision; }
  SuccessCriterion criterion() const override { return SuccessCriterion::EntropyMatch; }

 protected:
  void on_envelope(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) override {
    const auto& g = *v.params().group;
    if (msg.step == 1) {
      pk_a_ = msg.get("pk_a");
      eb_ = kex_keygen(g, rng);
      modify(v, env, 1, {{"pk_a", g.encode(eb_.public_element)}});
      return;
    }
    Bytes pk_b = msg.get("pk_b");
    SharedKey k_eb = kex_agree(g, eb_, g.decode(pk_b));
    result_.attacker_keys.push_back(k_eb);
    const EntropyValue target =
        G(v, rcv(v, sc_.bob), {{"pk_a", g.encode(eb_.public_element)}, {"pk_b", pk_b}, {"K", key_bytes(k_eb)}});
    if (budget_ == 0) {
      drop(v, env);
      return;
    }
    const GroupElement pk_a = g.decode(pk_a_);
    Bytes candidate;
    SharedKey k_ea;
    for (std::uint64_t i = 0; i < budget_; ++i) {
      ++result_.iterations;
      KexKeyPair ea = kex_keygen(g, rng);
      k_ea = kex_agree(g, ea, pk_a);
      candidate = g.encode(ea.public_element);
      if (G(v, rcv(v, sc_.bob), {{"pk_a", pk_a_}, {"pk_b", candidate}, {"K", key_bytes(k_ea)}}) == target) break;
    }
    result_.attacker_keys.push_back(k_ea);
    modify(v, env, 2, {{"pk_b", candidate}});
  }

 private:
  Bytes pk_a_;
  KexKeyPair eb_;
};

// The three Kem2 attacks share the first half: pk_e toward B, then Decaps*
// of B's ciphertext.
class Kem2Attack : public Relay {
 public:
  Kem2Attack(StrategyKind k, ProtocolKind target, std::uint64_t budget) : Relay(target, budget), kind_(k) {}
  StrategyKind kind() const override { return kind_; }
  SuccessCriterion criterion() const override {
    return kind_ == StrategyKind::Kem2Replica ? SuccessCriterion::EntropyMatch
                                              : SuccessCriterion::SameKeyThreeParties;
  }

 protected:
  void on_envelope(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) override {
    const auto& g = *v.params().group;
    const KemMode mode = v.params().kem_mode;
    if (msg.step == 1) {
      pk_a_ = msg.get("pk");
      e_ = kem_keygen(g, rng);
      modify(v, env, 1, {{"pk", g.encode(e_.public_key)}});
      return;
    }
    const Bytes ct_b = msg.get("ct");
    auto dec = kem_decaps_star(g, e_.secret, decode_encapsulation(g, ct_b));
    const GroupElement pk_a = g.decode(pk_a_);

    if (kind_ == StrategyKind::KemSameKey) {
      result_.iterations = 1;
      result_.attacker_keys.push_back(dec.key);
      auto enc = kem_encaps_star(g, pk_a, dec.secret, mode, rng);
      modify(v, env, 2, {{"ct", encode_encapsulation(g, enc.ct)}});
      return;
    }

    const EntropyValue target = kem2_entropy(v, g.encode(e_.public_key), ct_b, dec.key);
    result_.attacker_keys.push_back(dec.key);
    if (budget_ == 0) {
      drop(v, env);
      return;
    }
    Bytes candidate;
    SharedKey k;
    for (std::uint64_t i = 0; i < budget_; ++i) {
      ++result_.iterations;
      // Replica: fresh x every time. Combined: keep B's x, only r moves.
      auto enc = kind_ == StrategyKind::Kem2Replica ? kem_encaps(g, pk_a, mode, rng)
                                                    : kem_encaps_star(g, pk_a, dec.secret, mode, rng);
      candidate = encode_encapsulation(g, enc.ct);
      k = enc.key;
      if (kem2_entropy(v, pk_a_, candidate, k) == target) break;
      if (kind_ == StrategyKind::Kem2Combined && mode == KemMode::Deterministic) break;  // one candidate only
    }
    if (kind_ == StrategyKind::Kem2Replica) result_.attacker_keys.push_back(k);
    modify(v, env, 2, {{"ct", candidate}});
  }

 private:
  StrategyKind kind_;
  Bytes pk_a_;
  KemKeyPair e_;
};

// Substitutes attacker material at the one point the protocol leaves open
// and hopes for a collision of G.
class RandomForge : public Relay {
 public:
  RandomForge(ProtocolKind target, ForgePoint point, std::uint64_t budget) : Relay(target, budget), point_(point) {}
  StrategyKind kind() const override { return StrategyKind::RandomForge; }
  SuccessCriterion criterion() const override {
    return point_ == ForgePoint::Ciphertext ? SuccessCriterion::KeyMismatchUndetected
                                            : SuccessCriterion::EntropyMatch;
  }

 protected:
  void on_envelope(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) override {
    result_.iterations = std::max<std::uint64_t>(result_.iterations, 1);
    if (msg.step == 1 && msg.has("c")) c_ = msg.get("c");
    switch (target_) {
      case ProtocolKind::MtAuth: return mtauth(v, env, msg, rng);
      case ProtocolKind::Kex3: return kex3(v, env, msg, rng);
      case ProtocolKind::Kem3TwoEntropy: return kem3two(v, env, msg, rng);
      case ProtocolKind::Kem3Commit: return kem3commit(v, env, msg, rng);
      case ProtocolKind::Kem4:
      case ProtocolKind::Kem6: return kem_commit_ct(v, env, msg, rng);
      default: throw ConfigError("random-forge does not target this protocol");
    }
  }

 private:
  // B is made to accept the attacker's m' in place of A's m.
  void mtauth(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) {
    if (msg.step == 1) {
      Bytes m = rng.bytes(32);
      own_ = commit(m, rng);
      modify(v, env, 1, {{"c", digest_bytes(own_.commitment.digest)}});
    } else if (msg.step == 3) {
      modify(v, env, 3, {{"m", own_.opening.message}, {"r", blinder_bytes(own_.opening.blinder)}});
    } else {
      deliver(v, env);
    }
  }

  void kex3(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) {
    const auto& g = *v.params().group;
    if (msg.step == 2) {
      KexKeyPair e = kex_keygen(g, rng);
      kex_e_ = e;
      modify(v, env, 2, {{"pk_a", g.encode(e.public_element)}});
    } else {
      if (msg.step == 3) result_.attacker_keys.push_back(kex_agree(g, kex_e_, g.decode(msg.get("pk_b"))));
      deliver(v, env);
    }
  }

  // pk_e toward B. Once N is opened, E_B1 is decided; only when it already
  // matches is it worth grinding ciphertexts for E_B2.
  void kem3two(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) {
    const auto& g = *v.params().group;
    if (msg.step == 2) {
      pk_a_ = msg.get("pk");
      kem_e_ = kem_keygen(g, rng);
      modify(v, env, 2, {{"pk", g.encode(kem_e_.public_key)}});
      return;
    }
    if (msg.step != 3) return deliver(v, env);
    const Bytes &ct_b = msg.get("ct"), &n = msg.get("N"), &r = msg.get("r");
    const auto rA = rcv(v, sc_.alice);
    SharedKey k_b = kem_decaps(g, kem_e_.secret, decode_encapsulation(g, ct_b));
    result_.attacker_keys.push_back(k_b);
    const Bytes pk_e = g.encode(kem_e_.public_key);
    const bool first_matches =
        G(v, rA, {{"N", n}, {"pk", pk_e}, {"c", c_}}) == G(v, rA, {{"N", n}, {"pk", pk_a_}, {"c", c_}});
    const EntropyValue target2 = G(v, rA, {{"ct", ct_b}, {"K", key_bytes(k_b)}});
    const std::uint64_t tries = first_matches ? std::max<std::uint64_t>(budget_, 1) : 1;
    Bytes candidate;
    SharedKey k;
    result_.iterations = 0;
    for (std::uint64_t i = 0; i < tries; ++i) {
      ++result_.iterations;
      auto enc = kem_encaps(g, g.decode(pk_a_), v.params().kem_mode, rng);
      candidate = encode_encapsulation(g, enc.ct);
      k = enc.key;
      if (G(v, rA, {{"ct", candidate}, {"K", key_bytes(k)}}) == target2) break;
    }
    result_.attacker_keys.push_back(k);
    modify(v, env, 3, {{"ct", candidate}, {"N", n}, {"r", r}});
  }

  void kem3commit(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) {
    const auto& g = *v.params().group;
    const KemMode mode = v.params().kem_mode;
    if (msg.step == 2 && point_ != ForgePoint::Ciphertext) {
      pk_a_ = msg.get("pk");
      kem_e_ = kem_keygen(g, rng);
      modify(v, env, 2, {{"pk", g.encode(kem_e_.public_key)}});
      return;
    }
    if (msg.step == 2) pk_a_ = msg.get("pk");
    if (msg.step != 3) return deliver(v, env);
    const GroupElement pk_a = g.decode(pk_a_);
    if (point_ == ForgePoint::Ciphertext) {
      // fresh encapsulation, ct_d left as B produced it
      auto enc = kem_encaps(g, pk_a, mode, rng);
      result_.attacker_keys.push_back(enc.key);
      modify(v, env, 3, {{"ct", encode_encapsulation(g, enc.ct)}, {"ct_d", msg.get("ct_d")}});
      return;
    }
    // Both halves decrypt under sk_e; re-encrypt them to A.
    Bytes m = pke_decrypt(g, kem_e_.secret, msg.get("ct_d"));
    auto dec = kem_decaps_star(g, kem_e_.secret, decode_encapsulation(g, msg.get("ct")));
    result_.attacker_keys.push_back(dec.key);
    auto enc = kem_encaps_star(g, pk_a, dec.secret, mode, rng);
    modify(v, env, 3, {{"ct", encode_encapsulation(g, enc.ct)}, {"ct_d", pke_encrypt(g, pk_a, m, rng)}});
  }

  // Kem4 / Kem6: A receives a commitment to the attacker's own encapsulation
  // and later its opening.
  void kem_commit_ct(AdversaryView& v, const MessageEnvelope& env, const Message& msg, Rng& rng) {
    const auto& g = *v.params().group;
    const bool kem4 = target_ == ProtocolKind::Kem4;
    if (msg.step == 1) pk_a_ = msg.get("pk");
    const std::uint8_t commit_step = kem4 ? 2 : 4;
    const std::uint8_t open_step = kem4 ? 4 : 6;
    if (msg.step == commit_step) {
      auto enc = kem_encaps(g, g.decode(pk_a_), v.params().kem_mode, rng);
      result_.attacker_keys.push_back(enc.key);
      own_ = commit(encode_encapsulation(g, enc.ct), rng);
      std::vector<std::pair<std::string, Bytes>> fields{{"c_ct", digest_bytes(own_.commitment.digest)}};
      if (kem4) fields.emplace_back("N_B", msg.get("N_B"));
      modify(v, env, commit_step, std::move(fields));
    } else if (msg.step == open_step) {
      modify(v, env, open_step, {{"ct", own_.opening.message}, {"r_ct", blinder_bytes(own_.opening.blinder)}});
    } else {
      deliver(v, env);
    }
  }

  ForgePoint point_;
  CommitResult own_;
  KexKeyPair kex_e_;
  KemKeyPair kem_e_;
  Bytes pk_a_;
  Bytes c_;
};

// Relays the victim's flow, unmodified, to Carol in the intended peer's role.
class Redirect : public Relay {
 public:
  using Relay::Relay;
  StrategyKind kind() const override { return StrategyKind::Redirect; }
  SuccessCriterion criterion() const override { return SuccessCriterion::EntropyMatch; }

 protected:
  void open(AdversaryView& v) override {
    // The victim is whoever sends first.
    const Role victim_role = proto::info(target_).first_sender;
    const PartyId& victim = victim_role == Role::Initiator ? sc_.alice : sc_.bob;
    const PartyId& intended = victim_role == Role::Initiator ? sc_.bob : sc_.alice;
    const Role carol_role = victim_role == Role::Initiator ? Role::Responder : Role::Initiator;
    victim_ = victim;
    intended_ = intended;
    victim_sid_ = victim_role == Role::Initiator ? SessionId{victim, intended, sc_.nonce}
                                                 : SessionId{intended, victim, sc_.nonce};
    carol_sid_ = carol_role == Role::Initiator ? SessionId{sc_.carol, victim, sc_.nonce}
                                               : SessionId{victim, sc_.carol, sc_.nonce};
    v.apply(act::NewSession{sc_.carol, victim, carol_role, sc_.nonce});
    v.apply(act::NewSession{victim, intended, victim_role, sc_.nonce});
    auto ini = victim_role == Role::Initiator ? std::pair{victim, victim_sid_} : std::pair{sc_.carol, carol_sid_};
    auto rsp = victim_role == Role::Initiator ? std::pair{sc_.carol, carol_sid_} : std::pair{victim, victim_sid_};
    result_.first = ini;
    result_.second = rsp;
    result_.iterations = 1;
  }

  void on_envelope(AdversaryView& v, const MessageEnvelope& env, const Message&, Rng&) override {
    drop(v, env);
    MessageEnvelope fwd = env;
    if (env.sender == victim_) {
      fwd.receiver = sc_.carol;
      fwd.session = carol_sid_;
    } else {
      fwd.sender = intended_;
      fwd.receiver = victim_;
      fwd.session = victim_sid_;
    }
    v.apply(act::Inject{fwd});
  }

 private:
  PartyId victim_;
  PartyId intended_;
  SessionId victim_sid_;
  SessionId carol_sid_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(StrategyKind s, ProtocolKind target, ForgePoint point, std::uint64_t budget) {
  check_combination(s, target, point);
  switch (s) {
    case StrategyKind::Kex2EntropyCollision: return std::make_unique<Kex2Collision>(target, budget);
    case StrategyKind::KemSameKey:
    case StrategyKind::Kem2Replica:
    case StrategyKind::Kem2Combined: return std::make_unique<Kem2Attack>(s, target, budget);
    case StrategyKind::RandomForge:
      if (point == ForgePoint::Default) point = ForgePoint::PublicKey;
      if (target != ProtocolKind::Kem3Commit) point = ForgePoint::Default;
      return std::make_unique<RandomForge>(target, point, budget);
    case StrategyKind::Redirect: return std::make_unique<Redirect>(target, budget);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace umlab::attacks
