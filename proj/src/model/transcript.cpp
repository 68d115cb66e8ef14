#include "umlab/model/world.hpp"
#include "umlab/primitives/error.hpp"

namespace umlab::model {

namespace {

constexpr std::string_view kMagic = "UMLT";

void put_sid(ByteWriter& w, const SessionId& id) {
  w.str(id.initiator.name()).str(id.responder.name()).raw(view(id.nonce));
}

SessionId get_sid(ByteReader& r) {
  SessionId id;
  id.initiator = PartyId(r.str());
  id.responder = PartyId(r.str());
  Bytes n = r.raw(kSessionNonceBytes);
  std::copy(n.begin(), n.end(), id.nonce.begin());
  return id;
}

void put_envelope(ByteWriter& w, const MessageEnvelope& e) {
  w.u64(e.id).str(e.sender.name()).str(e.receiver.name());
  put_sid(w, e.session);
  w.u32(e.seq).blob(e.payload);
}

MessageEnvelope get_envelope(ByteReader& r) {
  MessageEnvelope e;
  e.id = r.u64();
  e.sender = PartyId(r.str());
  e.receiver = PartyId(r.str());
  e.session = get_sid(r);
  e.seq = r.u32();
  e.payload = r.blob();
  return e;
}

template <typename E>
E checked_enum(std::uint8_t v, std::uint8_t lo, std::uint8_t hi, const char* what) {
  if (v < lo || v > hi) throw DecodeError(std::string("bad ") + what + " code");
  return static_cast<E>(v);
}

}  // namespace

Bytes SessionRecord::serialize() const {
  ByteWriter w;
  w.str(self.name()).str(peer.name());
  put_sid(w, id);
  w.u8(static_cast<std::uint8_t>(role)).u8(static_cast<std::uint8_t>(kind)).u8(static_cast<std::uint8_t>(status));
  w.u8(key ? 1 : 0);
  if (key) w.raw(view(key->bytes));
  w.u32(static_cast<std::uint32_t>(entropies.size()));
  for (const auto& [label, e] : entropies) w.str(label).u64(e.value).u8(static_cast<std::uint8_t>(e.bits));
  w.u32(static_cast<std::uint32_t>(verifications.size()));
  for (const auto& v : verifications)
    w.str(v.gate).blob(v.initiator_value).blob(v.responder_value).u8(v.accept).u8(v.override_flag);
  w.u8(delivered ? 1 : 0);
  if (delivered) w.blob(*delivered);
  w.u32(static_cast<std::uint32_t>(log.size()));
  for (const auto& e : log)
    w.u64(e.counter).u8(static_cast<std::uint8_t>(e.type)).u32(e.seq).blob(e.payload).str(e.detail);
  return w.take();
}

Bytes serialize_action(const AdversaryAction& a) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(a.index()));
  std::visit(
      [&](const auto& act) {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, action::NewSession>) {
          w.str(act.party.name()).str(act.peer.name()).u8(static_cast<std::uint8_t>(act.role)).raw(view(act.nonce));
        } else if constexpr (std::is_same_v<T, action::Deliver> || std::is_same_v<T, action::Drop>) {
          w.u64(act.envelope);
        } else if constexpr (std::is_same_v<T, action::Modify>) {
          w.u64(act.envelope).blob(act.payload);
        } else if constexpr (std::is_same_v<T, action::Inject>) {
          put_envelope(w, act.envelope);
        } else if constexpr (std::is_same_v<T, action::Corrupt>) {
          w.str(act.party.name());
        } else {
          w.str(act.party.name());
          put_sid(w, act.session);
        }
      },
      a);
  return w.take();
}

AdversaryAction deserialize_action(ByteReader& r) {
  const auto tag = r.u8();
  switch (tag) {
    case 0: {
      action::NewSession s;
      s.party = PartyId(r.str());
      s.peer = PartyId(r.str());
      s.role = checked_enum<Role>(r.u8(), 0, 1, "role");
      Bytes n = r.raw(kSessionNonceBytes);
      std::copy(n.begin(), n.end(), s.nonce.begin());
      return s;
    }
    case 1: return action::Deliver{r.u64()};
    case 2: {
      auto id = r.u64();
      return action::Modify{id, r.blob()};
    }
    case 3: return action::Inject{get_envelope(r)};
    case 4: return action::Drop{r.u64()};
    case 5: return action::Corrupt{PartyId(r.str())};
    default: break;
  }
  if (tag > 9) throw DecodeError("unknown action tag");
  PartyId p(r.str());
  SessionId id = get_sid(r);
  switch (tag) {
    case 6: return action::RevealKey{p, id};
    case 7: return action::RevealState{p, id};
    case 8: return action::Expire{p, id};
    default: return action::Test{p, id};
  }
}

Bytes serialize_config(const WorldConfig& c) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(c.kind)).blob(c.protocol.group->serialize());
  w.u8(static_cast<std::uint8_t>(c.protocol.n_e)).u8(static_cast<std::uint8_t>(c.protocol.kem_mode));
  w.u8(static_cast<std::uint8_t>(c.protocol.policy)).u8(static_cast<std::uint8_t>(c.model));
  w.u64(c.seed).u64(c.challenge_seed);
  return w.take();
}

WorldConfig deserialize_config(ByteView bytes) {
  ByteReader r(bytes);
  WorldConfig c;
  c.kind = checked_enum<ProtocolKind>(r.u8(), 1, 8, "protocol");
  auto group = GroupParams::deserialize(r.blob());
  if (group.name() == "toy256" && group.p() == GroupParams::toy256()->p())
    c.protocol.group = GroupParams::toy256();
  else if (group.name() == "modp2048" && group.p() == GroupParams::modp2048()->p())
    c.protocol.group = GroupParams::modp2048();
  else
    c.protocol.group = std::make_shared<const GroupParams>(std::move(group));
  c.protocol.n_e = r.u8();
  c.protocol.kem_mode = checked_enum<KemMode>(r.u8(), 0, 1, "KEM mode");
  c.protocol.policy = checked_enum<proto::EntropyPolicy>(r.u8(), 0, 3, "policy");
  c.model = checked_enum<ExecModel>(r.u8(), 0, 1, "model");
  c.seed = r.u64();
  c.challenge_seed = r.u64();
  r.expect_done();
  return c;
}

Bytes World::export_transcript() const {
  ByteWriter w;
  w.raw(to_bytes(kMagic)).u16(kTranscriptVersion);
  w.blob(current_suite().serialize());
  w.blob(serialize_config(config_));
  w.u32(static_cast<std::uint32_t>(actions_.size()));
  for (const auto& a : actions_) w.blob(serialize_action(a));
  const auto recs = records();
  w.u32(static_cast<std::uint32_t>(recs.size()));
  for (const auto& rec : recs) w.blob(rec.serialize());
  return w.take();
}

ParsedTranscript parse_transcript(ByteView bytes) {
  try {
    ByteReader r(bytes);
    if (r.raw(kMagic.size()) != to_bytes(kMagic)) throw ReplayError("not a transcript (bad magic)");
    ParsedTranscript t;
    t.header.version = r.u16();
    if (t.header.version != kTranscriptVersion)
      throw ReplayError("transcript version " + std::to_string(t.header.version) + " is not supported");
    t.header.suite = SuiteHeader::deserialize(r.blob());
    if (!(t.header.suite == current_suite())) throw ReplayError("transcript was produced under another suite");
    t.header.config = deserialize_config(r.blob());
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      Bytes blob = r.blob();
      ByteReader ar(blob);
      t.actions.push_back(deserialize_action(ar));
      ar.expect_done();
    }
    const auto m = r.u32();
    for (std::uint32_t i = 0; i < m; ++i) t.record_blobs.push_back(r.blob());
    r.expect_done();
    return t;
  } catch (const ReplayError&) {
    throw;
  } catch (const Error& e) {
    throw ReplayError(std::string("corrupt transcript: ") + e.what());
  }
}

World replay_transcript(ByteView bytes, std::optional<std::uint64_t> seed_override) {
  ParsedTranscript t = parse_transcript(bytes);
  WorldConfig c = t.header.config;
  if (seed_override) c.seed = *seed_override;
  World w(c);
  for (const auto& a : t.actions) w.apply(a);
  return w;
}

}  // namespace umlab::model
