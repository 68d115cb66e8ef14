#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "umlab/primitives/kex.hpp"
#include "umlab/primitives/suite.hpp"
#include "umlab/protocols/protocol.hpp"

namespace umlab::model {

using proto::ProtocolKind;
using proto::Role;

enum class ExecModel : std::uint8_t { AM, UM };

std::string_view to_string(ExecModel m);

inline constexpr std::size_t kSessionNonceBytes = 8;
using SessionNonce = std::array<std::uint8_t, kSessionNonceBytes>;

struct SessionId {
  PartyId initiator;
  PartyId responder;
  SessionNonce nonce{};

  friend bool operator==(const SessionId&, const SessionId&) = default;
  friend auto operator<=>(const SessionId&, const SessionId&) = default;
};

SessionNonce nonce_from_u64(std::uint64_t v);

struct MessageEnvelope {
  std::uint64_t id = 0;
  PartyId sender;
  PartyId receiver;
  SessionId session;
  std::uint32_t seq = 0;
  Bytes payload;

  friend bool operator==(const MessageEnvelope&, const MessageEnvelope&) = default;
};

enum class Status : std::uint8_t { InProcess, Completed, Aborted };
std::string_view to_string(Status s);

enum class EventType : std::uint8_t {
  Created,
  Sent,
  Received,
  Verified,
  Corrupted,
  RevealedKey,
  RevealedState,
  Expired,
  Tested,
  Completed,
  Aborted,
};
std::string_view to_string(EventType t);

struct Event {
  std::uint64_t counter = 0;  // global, strictly increasing
  EventType type = EventType::Created;
  std::uint32_t seq = 0;      // envelope sequence for Sent / Received
  Bytes payload;
  std::string detail;

  friend bool operator==(const Event&, const Event&) = default;
};

/// One I_f run for one gate.
struct OobVerification {
  std::string gate;
  Bytes initiator_value;
  Bytes responder_value;
  bool accept = false;
  bool override_flag = false;

  friend bool operator==(const OobVerification&, const OobVerification&) = default;
};

struct SessionRecord {
  PartyId self;
  PartyId peer;
  SessionId id;
  Role role = Role::Initiator;
  ProtocolKind kind = ProtocolKind::MtAuth;
  Status status = Status::InProcess;
  std::optional<SharedKey> key;
  std::map<std::string, EntropyValue> entropies;
  std::vector<OobVerification> verifications;
  std::optional<Bytes> delivered;
  std::vector<Event> log;

  Bytes serialize() const;
  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

namespace action {
struct NewSession {
  PartyId party;
  PartyId peer;
  Role role = Role::Initiator;
  SessionNonce nonce{};
};
struct Deliver {
  std::uint64_t envelope;
};
struct Modify {
  std::uint64_t envelope;
  Bytes payload;
};
/// A forged envelope; its id is ignored and reassigned.
struct Inject {
  MessageEnvelope envelope;
};
struct Drop {
  std::uint64_t envelope;
};
struct Corrupt {
  PartyId party;
};
struct RevealKey {
  PartyId party;
  SessionId session;
};
struct RevealState {
  PartyId party;
  SessionId session;
};
struct Expire {
  PartyId party;
  SessionId session;
};
struct Test {
  PartyId party;
  SessionId session;
};
}  // namespace action

struct WorldConfig;

using AdversaryAction = std::variant<action::NewSession, action::Deliver, action::Modify, action::Inject,
                                     action::Drop, action::Corrupt, action::RevealKey, action::RevealState,
                                     action::Expire, action::Test>;

Bytes serialize_action(const AdversaryAction& a);
Bytes serialize_config(const WorldConfig& c);
WorldConfig deserialize_config(ByteView bytes);
AdversaryAction deserialize_action(ByteReader& r);

/// What the adversary observes from one scheduled action.
struct ActionResult {
  std::vector<std::uint64_t> new_envelopes;
  std::vector<OobVerification> verdicts;
  std::optional<SharedKey> key;     // RevealKey / Test
  std::optional<Bytes> state;       // RevealState
  std::vector<Bytes> corrupted_state;
  bool ignored = false;             // delivery to a finished session
};

struct WorldConfig {
  ProtocolKind kind = ProtocolKind::Kex3;
  proto::ProtocolConfig protocol;
  ExecModel model = ExecModel::AM;
  std::uint64_t seed = 0;
  std::uint64_t challenge_seed = 0;  // harness-held, drives the Test bit
};

/// A single run: parties' sessions, the undelivered set M, and the I_f
/// channel. Strictly sequential; independent Worlds share nothing.
class World {
 public:
  explicit World(WorldConfig config);
  ~World();
  World(World&&) noexcept;
  World& operator=(World&&) noexcept;

  const WorldConfig& config() const { return config_; }

  /// Applies one action. Illegal actions throw before any state changes:
  /// ModelError (wrong model, unknown envelope or session), RuleError
  /// (session-key game rules, corrupted receiver).
  ActionResult apply(const AdversaryAction& a);

  /// Undelivered envelopes in send order.
  std::vector<MessageEnvelope> pending() const;
  std::optional<MessageEnvelope> find_pending(std::uint64_t id) const;

  std::vector<SessionRecord> records() const;
  const SessionRecord& record(const PartyId& party, const SessionId& id) const;
  std::vector<OobVerification> verdicts() const { return verdicts_; }
  bool corrupted(const PartyId& p) const { return corrupted_.count(p) != 0; }
  /// Hidden challenge bit, for the harness and tests only.
  std::optional<bool> test_bit() const { return test_bit_; }

  const std::vector<AdversaryAction>& actions() const { return actions_; }

  Bytes export_transcript() const;

  // Harness-side accessors. Attack strategies never see the World.
  const proto::SessionMachine& machine(const PartyId& party, const SessionId& id) const;

 private:
  struct Session;
  using Key = std::pair<PartyId, SessionId>;

  Session& session(const PartyId& party, const SessionId& id);
  const Session& session(const PartyId& party, const SessionId& id) const;
  void log(Session& s, EventType t, std::uint32_t seq = 0, Bytes payload = {}, std::string detail = {});
  void send(Session& s, Bytes payload, ActionResult& out);
  void deliver(const MessageEnvelope& env, ActionResult& out);
  void abort(Session& s, const std::string& reason);
  void settle(ActionResult& out);
  bool run_gates(ActionResult& out);
  Session* partner(const Session& s);
  void sync(Session& s);

  WorldConfig config_;
  std::map<Key, std::unique_ptr<Session>> sessions_;
  std::vector<Session*> order_;
  std::deque<MessageEnvelope> pending_;
  std::map<Key, std::uint32_t> seq_;
  std::set<PartyId> corrupted_;
  std::vector<OobVerification> verdicts_;
  std::vector<AdversaryAction> actions_;
  std::uint64_t next_envelope_ = 1;
  std::uint64_t counter_ = 0;
  std::optional<bool> test_bit_;
  bool tested_ = false;
};

/// AM driver: delivers the oldest pending envelope until M is empty.
void deliver_all(World& w, std::size_t max_steps = 1000);

/// Creates both sessions of one run between a (initiator) and b (responder)
/// with the given nonce, in the order the protocol needs.
SessionId open_run(World& w, const PartyId& a, const PartyId& b, SessionNonce nonce);

struct TranscriptHeader {
  std::uint16_t version = 0;
  SuiteHeader suite;
  WorldConfig config;
};

inline constexpr std::uint16_t kTranscriptVersion = 1;

struct ParsedTranscript {
  TranscriptHeader header;
  std::vector<AdversaryAction> actions;
  std::vector<Bytes> record_blobs;  // SessionRecord::serialize() at export time
};

/// Throws ReplayError on bad magic, version or suite mismatch, or truncation.
ParsedTranscript parse_transcript(ByteView bytes);

/// Rebuilds a World by re-applying the recorded actions, optionally under a
/// different seed.
World replay_transcript(ByteView bytes, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace umlab::model
