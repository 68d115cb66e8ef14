#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "umlab/primitives/entropy.hpp"
#include "umlab/primitives/group.hpp"
#include "umlab/primitives/identity.hpp"
#include "umlab/primitives/kem.hpp"
#include "umlab/protocols/wire.hpp"

namespace umlab::proto {

enum class ProtocolKind : std::uint8_t {
  MtAuth = 1,
  Kex2,
  Kex3,
  Kem2,
  Kem3TwoEntropy,
  Kem3Commit,
  Kem4,
  Kem6,
};

/// Initiator is "A", responder is "B". Who sends first is a property of the
/// protocol, not of the role.
enum class Role : std::uint8_t { Initiator, Responder };

/// What goes into G beyond the figure.
///   Figure        exactly the figure's list (plus the receiver where shipped)
///   KeyOnly       Kem2 only: G(K), the configuration the same-key attack needs
///   WithIdentity  Kem2 only: adds the responder B as receiver
///   StripIdentity negative control: drops the receiver everywhere
enum class EntropyPolicy : std::uint8_t { Figure, KeyOnly, WithIdentity, StripIdentity };

std::string_view to_string(ProtocolKind kind);
std::string_view to_string(Role role);
std::string_view to_string(EntropyPolicy policy);
ProtocolKind parse_protocol(std::string_view name);
EntropyPolicy parse_policy(std::string_view name);
std::span<const ProtocolKind> all_protocols();

struct ProtocolConfig {
  std::shared_ptr<const GroupParams> group = GroupParams::toy256();
  unsigned n_e = 16;
  KemMode kem_mode = KemMode::Deterministic;
  EntropyPolicy policy = EntropyPolicy::Figure;

  /// Throws ConfigError for a bad n_e, a null group, or a Kem2-only policy
  /// on another protocol.
  void validate(ProtocolKind kind) const;
};

/// Where an entropy element gets fixed on the wire: the step that first
/// carries it or a commitment to it. Derived values (keys) carry step 0.
struct EntropyElementSpec {
  std::string label;
  std::uint8_t bound_step = 0;
  bool derived = false;
};

struct EntropySpec {
  std::string name;
  char receiver = 0;  // 'A', 'B' or 0 for none
  std::vector<EntropyElementSpec> elements;
  std::uint8_t flow_last_step = 0;
  bool exempt = false;  // built from the last message on purpose
};

struct ProtocolInfo {
  ProtocolKind kind;
  std::string_view cli_name;
  unsigned messages;
  Role first_sender;
  bool defended;  // expected to hold at the 2^-n_e bound in the UM
  std::vector<std::vector<std::string>> step_fields;
  std::vector<EntropySpec> entropies;                   // under EntropyPolicy::Figure
  std::vector<std::pair<std::string, std::vector<std::string>>> gates;  // gate -> entropy names
};

const ProtocolInfo& info(ProtocolKind kind);

struct SessionContext {
  PartyId self;
  PartyId peer;
  Role role = Role::Initiator;
  std::uint64_t seed = 0;
};

/// An I_f checkpoint. It exists once the session holds every entropy the
/// gate compares; `value` is their concatenation.
struct Gate {
  std::string name;
  std::vector<std::string> entropy_names;
  Bytes value;
  std::optional<bool> verdict;
};

/// One party's run of one protocol. Message driven: the model calls start()
/// once, then on_message() per delivered payload and on_verified() when an
/// I_f gate accepts. Failures surface as ProtocolError.
class SessionMachine {
 public:
  SessionMachine(ProtocolKind kind, ProtocolConfig config, SessionContext ctx, std::shared_ptr<Rng> rng = {});
  virtual ~SessionMachine() = default;
  SessionMachine(const SessionMachine&) = delete;
  SessionMachine& operator=(const SessionMachine&) = delete;

  ProtocolKind kind() const { return kind_; }
  const SessionContext& context() const { return ctx_; }
  const ProtocolConfig& config() const { return config_; }

  virtual std::optional<Bytes> start() = 0;
  std::optional<Bytes> on_message(ByteView payload);
  std::optional<Bytes> on_verified(std::string_view gate);
  void on_rejected(std::string_view gate);

  const std::map<std::string, EntropyValue>& entropies() const { return entropies_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const Gate* gate(std::string_view name) const;
  bool gates_accepted() const;
  const std::optional<SharedKey>& key() const { return key_; }
  /// MtAuth: the message the responder accepted as coming from the initiator.
  const std::optional<Bytes>& delivered() const { return delivered_; }
  bool flow_done() const { return flow_done_; }
  const std::optional<std::string>& blocked_on() const { return blocked_on_; }
  /// Intermediate values, secrets included (what RevealState hands out).
  Bytes state_blob() const;

 protected:
  virtual std::optional<Bytes> handle(ByteView payload) = 0;
  virtual std::optional<Bytes> resume(std::string_view gate);
  virtual void append_state(ByteWriter& w) const;

  Rng& rng() { return *rng_; }
  std::shared_ptr<Rng> shared_rng() const { return rng_; }
  const GroupParams& group() const { return *config_.group; }
  std::uint8_t kind_byte() const { return static_cast<std::uint8_t>(kind_); }

  PartyId party(char letter) const;
  /// The receiver to hash, after the policy has had its say.
  std::optional<PartyId> receiver(char letter) const;

  const EntropyValue& set_entropy(const std::string& name, std::optional<PartyId> receiver,
                                  std::vector<LabeledElement> elements);
  void open_gate(const std::string& name, std::vector<std::string> entropy_names);
  void block_on(const std::string& gate) { blocked_on_ = gate; }
  void set_key(const SharedKey& k) { key_ = k; }
  void set_delivered(Bytes m) { delivered_ = std::move(m); }
  void finish_flow() { flow_done_ = true; }
  void store(const std::string& label, Bytes value) { stored_[label] = std::move(value); }
  const Bytes& stored(const std::string& label) const;

  Bytes send(std::uint8_t step, std::vector<std::pair<std::string, Bytes>> fields) const;
  Message receive(ByteView payload, std::uint8_t step, std::initializer_list<std::string_view> labels) const;

 private:
  ProtocolKind kind_;
  ProtocolConfig config_;
  SessionContext ctx_;
  std::shared_ptr<Rng> rng_;
  std::map<std::string, EntropyValue> entropies_;
  std::vector<Gate> gates_;
  std::map<std::string, Bytes> stored_;
  std::optional<SharedKey> key_;
  std::optional<Bytes> delivered_;
  std::optional<std::string> blocked_on_;
  bool flow_done_ = false;
};

std::unique_ptr<SessionMachine> make_machine(ProtocolKind kind, const ProtocolConfig& config, SessionContext ctx);

/// Shared helper for keys that are not a group element (MtAuth).
SharedKey key_from_bytes(ByteView data);

}  // namespace umlab::proto
