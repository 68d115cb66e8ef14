#include <algorithm>

#include "internal.hpp"
#include "umlab/primitives/error.hpp"
#include "umlab/primitives/kex.hpp"
#include "umlab/primitives/pke.hpp"

namespace umlab::proto {

namespace detail {

Commitment commitment_from_wire(const Bytes& b) {
  if (b.size() != std::tuple_size_v<Digest>) throw ProtocolError("commitment has wrong length");
  Commitment c;
  std::copy(b.begin(), b.end(), c.digest.begin());
  return c;
}

Blinder blinder_from_wire(const Bytes& b) {
  if (b.size() != kBlinderBytes) throw ProtocolError("blinder has wrong length");
  Blinder r{};
  std::copy(b.begin(), b.end(), r.begin());
  return r;
}

Bytes blinder_bytes(const Blinder& b) { return Bytes(b.begin(), b.end()); }

Bytes open_or_abort(const Bytes& commitment, const Bytes& message, const Bytes& blinder, const char* what) {
  auto m = open(commitment_from_wire(commitment), Opening{message, blinder_from_wire(blinder)});
  if (!m) throw ProtocolError(std::string("opening rejected: ") + what);
  return *m;
}

}  // namespace detail

namespace {

using namespace detail;

constexpr std::size_t kNonceBytes = 32;

Bytes key_bytes(const SharedKey& k) { return Bytes(k.bytes.begin(), k.bytes.end()); }

// c -> N -> (m, r). A transmits m to B.
class MtAuthMachine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    if (context().role != Role::Initiator) return std::nullopt;
    Bytes m = rng().bytes(kNonceBytes);
    auto com = commit(m, rng());
    store("m", m);
    store("r", blinder_bytes(com.opening.blinder));
    store("c", digest_bytes(com.commitment.digest));
    return send(1, {{"c", stored("c")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    if (context().role == Role::Responder) {
      if (!has_c_) {
        auto msg = receive(payload, 1, {"c"});
        commitment_from_wire(msg.get("c"));
        store("c", msg.get("c"));
        store("N", rng().bytes(kNonceBytes));
        has_c_ = true;
        return send(2, {{"N", stored("N")}});
      }
      auto msg = receive(payload, 3, {"m", "r"});
      Bytes m = open_or_abort(stored("c"), msg.get("m"), msg.get("r"), "c does not open to m");
      store("m", m);
      compute();
      block_on("E_A");
      return std::nullopt;
    }
    auto msg = receive(payload, 2, {"N"});
    if (msg.get("N").size() != kNonceBytes) throw ProtocolError("nonce has wrong length");
    store("N", msg.get("N"));
    compute();
    set_key(key_from_bytes(stored("m")));
    finish_flow();
    return send(3, {{"m", stored("m")}, {"r", stored("r")}});
  }

  std::optional<Bytes> resume(std::string_view) override {
    set_delivered(stored("m"));
    set_key(key_from_bytes(stored("m")));
    finish_flow();
    return std::nullopt;
  }

 private:
  void compute() {
    set_entropy("E_A", receiver('B'), {{"c", stored("c")}, {"N", stored("N")}, {"m", stored("m")}});
    open_gate("E_A", {"E_A"});
  }

  bool has_c_ = false;
};

// pk_a -> pk_b
class Kex2Machine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    kp_ = kex_keygen(group(), rng());
    store("sk", mpz_to_bytes(kp_.secret));
    if (context().role != Role::Initiator) return std::nullopt;
    store("pk_a", group().encode(kp_.public_element));
    return send(1, {{"pk_a", stored("pk_a")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    std::optional<Bytes> out;
    if (context().role == Role::Responder) {
      auto msg = receive(payload, 1, {"pk_a"});
      store("pk_a", msg.get("pk_a"));
      store("pk_b", group().encode(kp_.public_element));
      peer_ = group().decode(msg.get("pk_a"));
      out = send(2, {{"pk_b", stored("pk_b")}});
    } else {
      auto msg = receive(payload, 2, {"pk_b"});
      store("pk_b", msg.get("pk_b"));
      peer_ = group().decode(msg.get("pk_b"));
    }
    SharedKey k = kex_agree(group(), kp_, peer_);
    set_key(k);
    set_entropy("E", receiver('B'), {{"pk_a", stored("pk_a")}, {"pk_b", stored("pk_b")}, {"K", key_bytes(k)}});
    open_gate("E", {"E"});
    finish_flow();
    return out;
  }

 private:
  KexKeyPair kp_;
  GroupElement peer_;
};

// c(pk_b) -> pk_a -> (pk_b, r); B speaks first.
class Kex3Machine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    kp_ = kex_keygen(group(), rng());
    store("sk", mpz_to_bytes(kp_.secret));
    if (context().role != Role::Responder) return std::nullopt;
    store("pk_b", group().encode(kp_.public_element));
    auto com = commit(stored("pk_b"), rng());
    store("c", digest_bytes(com.commitment.digest));
    store("r", blinder_bytes(com.opening.blinder));
    return send(1, {{"c", stored("c")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    if (context().role == Role::Initiator) {
      if (!stored_has_c_) {
        auto msg = receive(payload, 1, {"c"});
        commitment_from_wire(msg.get("c"));
        store("c", msg.get("c"));
        store("pk_a", group().encode(kp_.public_element));
        stored_has_c_ = true;
        return send(2, {{"pk_a", stored("pk_a")}});
      }
      auto msg = receive(payload, 3, {"pk_b", "r"});
      store("pk_b", open_or_abort(stored("c"), msg.get("pk_b"), msg.get("r"), "c does not open to pk_b"));
      finish(group().decode(stored("pk_b")));
      return std::nullopt;
    }
    auto msg = receive(payload, 2, {"pk_a"});
    store("pk_a", msg.get("pk_a"));
    finish(group().decode(msg.get("pk_a")));
    return send(3, {{"pk_b", stored("pk_b")}, {"r", stored("r")}});
  }

 private:
  void finish(const GroupElement& peer) {
    set_key(kex_agree(group(), kp_, peer));
    set_entropy("E_B", receiver('A'), {{"pk_a", stored("pk_a")}, {"pk_b", stored("pk_b")}, {"c", stored("c")}});
    open_gate("E_B", {"E_B"});
    finish_flow();
  }

  KexKeyPair kp_;
  bool stored_has_c_ = false;
};

// pk -> ct
class Kem2Machine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    if (context().role != Role::Initiator) return std::nullopt;
    kp_ = kem_keygen(group(), rng());
    store("sk", mpz_to_bytes(kp_.secret));
    store("pk", group().encode(kp_.public_key));
    return send(1, {{"pk", stored("pk")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    if (context().role == Role::Responder) {
      auto msg = receive(payload, 1, {"pk"});
      store("pk", msg.get("pk"));
      auto enc = kem_encaps(group(), group().decode(msg.get("pk")), config().kem_mode, rng());
      store("x", group().encode(enc.secret));
      store("ct", encode_encapsulation(group(), enc.ct));
      finish(enc.key);
      return send(2, {{"ct", stored("ct")}});
    }
    auto msg = receive(payload, 2, {"ct"});
    store("ct", msg.get("ct"));
    finish(kem_decaps(group(), kp_.secret, decode_encapsulation(group(), msg.get("ct"))));
    return std::nullopt;
  }

 private:
  void finish(const SharedKey& k) {
    set_key(k);
    std::vector<LabeledElement> els;
    std::optional<PartyId> rcv;
    switch (config().policy) {
      case EntropyPolicy::KeyOnly: els = {{"K", key_bytes(k)}}; break;
      case EntropyPolicy::WithIdentity: rcv = receiver('B'); [[fallthrough]];
      default: els = {{"pk", stored("pk")}, {"ct", stored("ct")}, {"K", key_bytes(k)}};
    }
    set_entropy("E", rcv, std::move(els));
    open_gate("E", {"E"});
    finish_flow();
  }

  KemKeyPair kp_;
};

// c(N) -> pk -> (ct, N, r); B speaks first, two entropies in one gate.
class Kem3TwoEntropyMachine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    if (context().role != Role::Responder) return std::nullopt;
    store("N", rng().bytes(kNonceBytes));
    auto com = commit(stored("N"), rng());
    store("c", digest_bytes(com.commitment.digest));
    store("r", blinder_bytes(com.opening.blinder));
    return send(1, {{"c", stored("c")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    if (context().role == Role::Initiator) {
      if (!has_c_) {
        auto msg = receive(payload, 1, {"c"});
        commitment_from_wire(msg.get("c"));
        store("c", msg.get("c"));
        kp_ = kem_keygen(group(), rng());
        store("sk", mpz_to_bytes(kp_.secret));
        store("pk", group().encode(kp_.public_key));
        has_c_ = true;
        return send(2, {{"pk", stored("pk")}});
      }
      auto msg = receive(payload, 3, {"ct", "N", "r"});
      store("N", open_or_abort(stored("c"), msg.get("N"), msg.get("r"), "c does not open to N"));
      store("ct", msg.get("ct"));
      finish(kem_decaps(group(), kp_.secret, decode_encapsulation(group(), msg.get("ct"))));
      return std::nullopt;
    }
    auto msg = receive(payload, 2, {"pk"});
    store("pk", msg.get("pk"));
    auto enc = kem_encaps(group(), group().decode(msg.get("pk")), config().kem_mode, rng());
    store("x", group().encode(enc.secret));
    store("ct", encode_encapsulation(group(), enc.ct));
    finish(enc.key);
    return send(3, {{"ct", stored("ct")}, {"N", stored("N")}, {"r", stored("r")}});
  }

 private:
  void finish(const SharedKey& k) {
    set_key(k);
    set_entropy("E_B1", receiver('A'), {{"N", stored("N")}, {"pk", stored("pk")}, {"c", stored("c")}});
    set_entropy("E_B2", receiver('A'), {{"ct", stored("ct")}, {"K", key_bytes(k)}});
    open_gate("E_B", {"E_B1", "E_B2"});
    finish_flow();
  }

  KemKeyPair kp_;
  bool has_c_ = false;
};

// c = H(x || m) -> pk -> (ct = Encaps*(pk, x), ct_d = Enc(pk, m)); B speaks first.
class Kem3CommitMachine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    if (context().role != Role::Responder) return std::nullopt;
    x_ = group().random_element(rng());
    Blinder m = rng().array<kBlinderBytes>();
    store("x", group().encode(x_));
    store("m", blinder_bytes(m));
    store("c", digest_bytes(commit_with_blinder(stored("x"), m).commitment.digest));
    return send(1, {{"c", stored("c")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    if (context().role == Role::Initiator) {
      if (!has_c_) {
        auto msg = receive(payload, 1, {"c"});
        commitment_from_wire(msg.get("c"));
        store("c", msg.get("c"));
        kp_ = kem_keygen(group(), rng());
        store("sk", mpz_to_bytes(kp_.secret));
        store("pk", group().encode(kp_.public_key));
        has_c_ = true;
        return send(2, {{"pk", stored("pk")}});
      }
      auto msg = receive(payload, 3, {"ct", "ct_d"});
      Bytes m = pke_decrypt(group(), kp_.secret, msg.get("ct_d"));
      auto dec = kem_decaps_star(group(), kp_.secret, decode_encapsulation(group(), msg.get("ct")));
      store("ct", msg.get("ct"));
      store("x", group().encode(dec.secret));
      if (m.size() != kBlinderBytes) throw ProtocolError("abort: x != x' (decrypted m has wrong length)");
      if (!open(commitment_from_wire(stored("c")), Opening{stored("x"), blinder_from_wire(m)}))
        throw ProtocolError("abort: x != x'");
      finish(dec.key);
      return std::nullopt;
    }
    auto msg = receive(payload, 2, {"pk"});
    store("pk", msg.get("pk"));
    GroupElement pk = group().decode(msg.get("pk"));
    auto enc = kem_encaps_star(group(), pk, x_, config().kem_mode, rng());
    store("ct", encode_encapsulation(group(), enc.ct));
    Bytes ct_d = pke_encrypt(group(), pk, stored("m"), rng());
    finish(enc.key);
    return send(3, {{"ct", stored("ct")}, {"ct_d", ct_d}});
  }

 private:
  void finish(const SharedKey& k) {
    set_key(k);
    set_entropy("E", receiver('A'), {{"pk", stored("pk")}, {"c", stored("c")}, {"K", key_bytes(k)}});
    open_gate("E", {"E"});
    finish_flow();
  }

  KemKeyPair kp_;
  GroupElement x_;
  bool has_c_ = false;
};

// (pk, c(m)) -> (c(ct), N_B) -> (m, r_m, N_A) -> (ct, r_ct)
class Kem4Machine : public SessionMachine {
 public:
  using SessionMachine::SessionMachine;

  std::optional<Bytes> start() override {
    if (context().role != Role::Initiator) return std::nullopt;
    kp_ = kem_keygen(group(), rng());
    store("sk", mpz_to_bytes(kp_.secret));
    store("pk", group().encode(kp_.public_key));
    store("m", rng().bytes(kNonceBytes));
    auto com = commit(stored("m"), rng());
    store("c_m", digest_bytes(com.commitment.digest));
    store("r_m", blinder_bytes(com.opening.blinder));
    return send(1, {{"pk", stored("pk")}, {"c_m", stored("c_m")}});
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    if (context().role == Role::Initiator) {
      if (step_ == 0) {
        auto msg = receive(payload, 2, {"c_ct", "N_B"});
        commitment_from_wire(msg.get("c_ct"));
        if (msg.get("N_B").size() != kNonceBytes) throw ProtocolError("nonce has wrong length");
        store("c_ct", msg.get("c_ct"));
        store("N_B", msg.get("N_B"));
        entropy_a();
        store("N_A", rng().bytes(kNonceBytes));
        step_ = 1;
        return send(3, {{"m", stored("m")}, {"r_m", stored("r_m")}, {"N_A", stored("N_A")}});
      }
      auto msg = receive(payload, 4, {"ct", "r_ct"});
      store("ct", open_or_abort(stored("c_ct"), msg.get("ct"), msg.get("r_ct"), "c_ct does not open to ct"));
      set_key(kem_decaps(group(), kp_.secret, decode_encapsulation(group(), stored("ct"))));
      entropy_b();
      finish_flow();
      return std::nullopt;
    }
    if (step_ == 0) {
      auto msg = receive(payload, 1, {"pk", "c_m"});
      commitment_from_wire(msg.get("c_m"));
      store("pk", msg.get("pk"));
      store("c_m", msg.get("c_m"));
      store("N_B", rng().bytes(kNonceBytes));
      auto enc = kem_encaps(group(), group().decode(msg.get("pk")), config().kem_mode, rng());
      store("x", group().encode(enc.secret));
      store("ct", encode_encapsulation(group(), enc.ct));
      auto com = commit(stored("ct"), rng());
      store("c_ct", digest_bytes(com.commitment.digest));
      store("r_ct", blinder_bytes(com.opening.blinder));
      key_ = enc.key;
      step_ = 1;
      return send(2, {{"c_ct", stored("c_ct")}, {"N_B", stored("N_B")}});
    }
    auto msg = receive(payload, 3, {"m", "r_m", "N_A"});
    store("m", open_or_abort(stored("c_m"), msg.get("m"), msg.get("r_m"), "c_m does not open to m"));
    if (msg.get("N_A").size() != kNonceBytes) throw ProtocolError("nonce has wrong length");
    store("N_A", msg.get("N_A"));
    entropy_a();
    entropy_b();
    set_key(key_);
    finish_flow();
    return send(4, {{"ct", stored("ct")}, {"r_ct", stored("r_ct")}});
  }

 private:
  void entropy_a() {
    set_entropy("E_A", receiver('B'),
                {{"m", stored("m")}, {"c_m", stored("c_m")}, {"N_B", stored("N_B")}, {"pk", stored("pk")}});
    open_gate("E_A", {"E_A"});
  }
  void entropy_b() {
    set_entropy("E_B", receiver('A'), {{"ct", stored("ct")}, {"c_ct", stored("c_ct")}, {"N_A", stored("N_A")}});
    open_gate("E_B", {"E_B"});
  }

  KemKeyPair kp_;
  SharedKey key_;
  int step_ = 0;
};

}  // namespace

namespace detail {

std::unique_ptr<SessionMachine> make_basic(ProtocolKind kind, const ProtocolConfig& config, SessionContext ctx,
                                           std::shared_ptr<Rng> rng) {
  switch (kind) {
    case ProtocolKind::MtAuth: return std::make_unique<MtAuthMachine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kex2: return std::make_unique<Kex2Machine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kex3: return std::make_unique<Kex3Machine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kem2: return std::make_unique<Kem2Machine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kem3TwoEntropy:
      return std::make_unique<Kem3TwoEntropyMachine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kem3Commit: return std::make_unique<Kem3CommitMachine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kem4: return std::make_unique<Kem4Machine>(kind, config, std::move(ctx), rng);
    case ProtocolKind::Kem6: break;
  }
  throw ConfigError("no basic machine for this protocol");
}

}  // namespace detail

std::unique_ptr<SessionMachine> make_machine(ProtocolKind kind, const ProtocolConfig& config, SessionContext ctx) {
  if (kind == ProtocolKind::Kem6) return detail::make_compiled_kem6(config, std::move(ctx));
  return detail::make_basic(kind, config, std::move(ctx), nullptr);
}

}  // namespace umlab::proto
