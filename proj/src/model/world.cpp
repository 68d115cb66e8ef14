#include "umlab/model/world.hpp"

#include <algorithm>

#include "umlab/primitives/error.hpp"

namespace umlab::model {

std::string_view to_string(ExecModel m) { return m == ExecModel::AM ? "AM" : "UM"; }

std::string_view to_string(Status s) {
  switch (s) {
    case Status::InProcess: return "in-process";
    case Status::Completed: return "completed";
    case Status::Aborted: return "aborted";
  }
  return "?";
}

std::string_view to_string(EventType t) {
  static constexpr std::string_view names[] = {"created",        "sent",    "received", "verified",
                                               "corrupted",      "revealed-key", "revealed-state",
                                               "expired",        "tested",  "completed", "aborted"};
  return names[static_cast<std::size_t>(t)];
}

SessionNonce nonce_from_u64(std::uint64_t v) {
  SessionNonce n{};
  for (int i = 7; i >= 0; --i, v >>= 8) n[i] = static_cast<std::uint8_t>(v);
  return n;
}

struct World::Session {
  SessionRecord rec;
  std::unique_ptr<proto::SessionMachine> m;
  bool expired = false;
  bool revealed = false;
};

World::World(WorldConfig config) : config_(std::move(config)) { config_.protocol.validate(config_.kind); }
World::~World() = default;
World::World(World&&) noexcept = default;
World& World::operator=(World&&) noexcept = default;

World::Session& World::session(const PartyId& party, const SessionId& id) {
  auto it = sessions_.find({party, id});
  if (it == sessions_.end()) throw ModelError("no session for party " + party.name());
  return *it->second;
}

const World::Session& World::session(const PartyId& party, const SessionId& id) const {
  auto it = sessions_.find({party, id});
  if (it == sessions_.end()) throw ModelError("no session for party " + party.name());
  return *it->second;
}

const SessionRecord& World::record(const PartyId& party, const SessionId& id) const {
  return session(party, id).rec;
}

const proto::SessionMachine& World::machine(const PartyId& party, const SessionId& id) const {
  return *session(party, id).m;
}

std::vector<SessionRecord> World::records() const {
  std::vector<SessionRecord> out;
  for (const auto* s : order_) out.push_back(s->rec);
  return out;
}

std::vector<MessageEnvelope> World::pending() const { return {pending_.begin(), pending_.end()}; }

std::optional<MessageEnvelope> World::find_pending(std::uint64_t id) const {
  for (const auto& e : pending_)
    if (e.id == id) return e;
  return std::nullopt;
}

void World::log(Session& s, EventType t, std::uint32_t seq, Bytes payload, std::string detail) {
  s.rec.log.push_back(Event{++counter_, t, seq, std::move(payload), std::move(detail)});
}

void World::send(Session& s, Bytes payload, ActionResult& out) {
  MessageEnvelope env{next_envelope_++, s.rec.self, s.rec.peer, s.rec.id, ++seq_[{s.rec.self, s.rec.id}],
                      std::move(payload)};
  log(s, EventType::Sent, env.seq, env.payload);
  out.new_envelopes.push_back(env.id);
  pending_.push_back(std::move(env));
}

void World::abort(Session& s, const std::string& reason) {
  if (s.rec.status != Status::InProcess) return;
  s.rec.status = Status::Aborted;
  s.rec.key.reset();
  log(s, EventType::Aborted, 0, {}, reason);
}

void World::sync(Session& s) {
  s.rec.entropies = s.m->entropies();
  s.rec.delivered = s.m->delivered();
  if (s.rec.status == Status::InProcess && s.m->flow_done() && s.m->key() && s.m->gates_accepted()) {
    s.rec.status = Status::Completed;
    s.rec.key = *s.m->key();
    log(s, EventType::Completed);
  }
}

void World::deliver(const MessageEnvelope& env, ActionResult& out) {
  Session& s = session(env.receiver, env.session);
  if (s.rec.status != Status::InProcess) {
    log(s, EventType::Received, env.seq, env.payload, "ignored: session finished");
    out.ignored = true;
    return;
  }
  log(s, EventType::Received, env.seq, env.payload);
  try {
    if (auto reply = s.m->on_message(env.payload)) send(s, std::move(*reply), out);
  } catch (const Error& e) {
    abort(s, e.what());
  }
}

World::Session* World::partner(const Session& s) {
  Session* fallback = nullptr;
  for (auto* o : order_) {
    if (o == &s || o->rec.id.nonce != s.rec.id.nonce || o->rec.role == s.rec.role || o->rec.self == s.rec.self)
      continue;
    if (o->rec.self == s.rec.peer) return o;
    if (!fallback) fallback = o;
  }
  return fallback;
}

bool World::run_gates(ActionResult& out) {
  auto resume = [&](Session& s, const std::string& gate) {
    try {
      if (auto msg = s.m->on_verified(gate)) send(s, std::move(*msg), out);
    } catch (const Error& e) {
      abort(s, e.what());
    }
  };
  for (auto* s : order_) {
    if (s->rec.status != Status::InProcess) continue;
    for (const auto& g : s->m->gates()) {
      if (g.verdict) continue;
      if (corrupted(s->rec.peer)) {
        OobVerification v{g.name, {}, {}, true, true};
        (s->rec.role == Role::Initiator ? v.initiator_value : v.responder_value) = g.value;
        s->rec.verifications.push_back(v);
        verdicts_.push_back(v);
        out.verdicts.push_back(v);
        log(*s, EventType::Verified, 0, {}, g.name + " accept (override)");
        resume(*s, std::string(g.name));
        return true;
      }
      Session* p = partner(*s);
      if (!p || p->rec.status != Status::InProcess) continue;
      const proto::Gate* pg = p->m->gate(g.name);
      if (!pg || pg->verdict) continue;
      Session& ini = s->rec.role == Role::Initiator ? *s : *p;
      Session& rsp = s->rec.role == Role::Initiator ? *p : *s;
      const std::string name = g.name;
      OobVerification v{name, ini.m->gate(name)->value, rsp.m->gate(name)->value, false, false};
      v.accept = v.initiator_value == v.responder_value;
      verdicts_.push_back(v);
      out.verdicts.push_back(v);
      for (Session* x : {&ini, &rsp}) {
        x->rec.verifications.push_back(v);
        log(*x, EventType::Verified, 0, {}, name + (v.accept ? " accept" : " reject"));
      }
      if (v.accept) {
        resume(ini, name);
        resume(rsp, name);
      } else {
        for (Session* x : {&ini, &rsp}) {
          x->m->on_rejected(name);
          abort(*x, "I_f rejected " + name);
        }
      }
      return true;
    }
  }
  return false;
}

void World::settle(ActionResult& out) {
  for (int guard = 0; guard < 64; ++guard) {
    for (auto* s : order_) sync(*s);
    if (!run_gates(out)) break;
  }
  for (auto* s : order_) sync(*s);
}

ActionResult World::apply(const AdversaryAction& a) {
  ActionResult out;
  const bool um = config_.model == ExecModel::UM;

  auto take_pending = [&](std::uint64_t id) {
    auto it = std::find_if(pending_.begin(), pending_.end(), [&](const auto& e) { return e.id == id; });
    if (it == pending_.end()) throw ModelError("envelope " + std::to_string(id) + " is not in M");
    return it;
  };
  auto check_receiver = [&](const MessageEnvelope& env) {
    if (corrupted(env.receiver)) throw RuleError("receiver " + env.receiver.name() + " is corrupted");
    session(env.receiver, env.session);
  };

  std::visit(
      [&](const auto& act) {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, action::NewSession>) {
          if (act.party == act.peer) throw ModelError("a session needs two distinct parties");
          if (corrupted(act.party)) throw RuleError("party " + act.party.name() + " is corrupted");
          SessionId id = act.role == Role::Initiator ? SessionId{act.party, act.peer, act.nonce}
                                                     : SessionId{act.peer, act.party, act.nonce};
          if (sessions_.count({act.party, id})) throw ModelError("session already exists");
          ByteWriter extra;
          extra.str(act.party.name()).raw(view(act.nonce));
          proto::SessionContext ctx{act.party, act.peer, act.role,
                                    derive_seed(config_.seed, "session", extra.bytes())};
          auto s = std::make_unique<Session>();
          s->rec.self = act.party;
          s->rec.peer = act.peer;
          s->rec.id = id;
          s->rec.role = act.role;
          s->rec.kind = config_.kind;
          s->m = proto::make_machine(config_.kind, config_.protocol, ctx);
          Session& ref = *s;
          sessions_[{act.party, id}] = std::move(s);
          order_.push_back(&ref);
          log(ref, EventType::Created, 0, {}, std::string(proto::to_string(act.role)));
          try {
            if (auto first = ref.m->start()) send(ref, std::move(*first), out);
          } catch (const Error& e) {
            abort(ref, e.what());
          }
        } else if constexpr (std::is_same_v<T, action::Deliver>) {
          auto it = take_pending(act.envelope);
          check_receiver(*it);
          MessageEnvelope env = *it;
          pending_.erase(it);
          deliver(env, out);
        } else if constexpr (std::is_same_v<T, action::Modify>) {
          if (!um) throw ModelError("Modify is not permitted in the AM");
          auto it = take_pending(act.envelope);
          check_receiver(*it);
          MessageEnvelope env = *it;
          pending_.erase(it);
          env.payload = act.payload;
          deliver(env, out);
        } else if constexpr (std::is_same_v<T, action::Inject>) {
          if (!um) throw ModelError("Inject is not permitted in the AM");
          check_receiver(act.envelope);
          MessageEnvelope env = act.envelope;
          env.id = next_envelope_++;
          deliver(env, out);
        } else if constexpr (std::is_same_v<T, action::Drop>) {
          pending_.erase(take_pending(act.envelope));
        } else if constexpr (std::is_same_v<T, action::Corrupt>) {
          corrupted_.insert(act.party);
          for (auto* s : order_)
            if (s->rec.self == act.party) {
              log(*s, EventType::Corrupted);
              out.corrupted_state.push_back(s->m->state_blob());
            }
        } else if constexpr (std::is_same_v<T, action::RevealKey>) {
          Session& s = session(act.party, act.session);
          if (s.expired) throw RuleError("session expired; its key was deleted");
          if (!s.rec.key) throw RuleError("session holds no key");
          s.revealed = true;
          log(s, EventType::RevealedKey);
          out.key = s.rec.key;
        } else if constexpr (std::is_same_v<T, action::RevealState>) {
          Session& s = session(act.party, act.session);
          if (s.expired) throw RuleError("session expired");
          s.revealed = true;
          log(s, EventType::RevealedState);
          out.state = s.m->state_blob();
        } else if constexpr (std::is_same_v<T, action::Expire>) {
          Session& s = session(act.party, act.session);
          if (s.rec.status != Status::Completed) throw RuleError("only completed sessions expire");
          if (s.expired) throw RuleError("session already expired");
          s.expired = true;
          s.rec.key.reset();
          log(s, EventType::Expired);
        } else if constexpr (std::is_same_v<T, action::Test>) {
          if (tested_) throw RuleError("Test may be asked only once");
          Session& s = session(act.party, act.session);
          if (s.rec.status != Status::Completed || s.expired) throw RuleError("Test needs a completed session");
          if (corrupted(s.rec.self) || corrupted(s.rec.peer)) throw RuleError("Test after Corrupt");
          Session* p = partner(s);
          if (s.revealed || (p && p->revealed)) throw RuleError("Test after a reveal");
          tested_ = true;
          Rng challenge(config_.challenge_seed);
          const bool bit = (challenge() & 1) != 0;
          test_bit_ = bit;
          SharedKey k = *s.rec.key;
          if (bit) challenge.fill(k.bytes);
          log(s, EventType::Tested);
          out.key = k;
        }
      },
      a);
  actions_.push_back(a);
  settle(out);
  return out;
}

void deliver_all(World& w, std::size_t max_steps) {
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto p = w.pending();
    if (p.empty()) return;
    w.apply(action::Deliver{p.front().id});
  }
  throw SequenceError("deliver_all did not drain M");
}

SessionId open_run(World& w, const PartyId& a, const PartyId& b, SessionNonce nonce) {
  // The first sender is activated last so its message is the first in M.
  const bool b_first = proto::info(w.config().kind).first_sender == Role::Responder;
  action::NewSession sa{a, b, Role::Initiator, nonce};
  action::NewSession sb{b, a, Role::Responder, nonce};
  if (b_first) {
    w.apply(sa);
    w.apply(sb);
  } else {
    w.apply(sb);
    w.apply(sa);
  }
  return SessionId{a, b, nonce};
}

}  // namespace umlab::model
