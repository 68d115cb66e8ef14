#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "umlab/model/world.hpp"
#include "umlab/primitives/error.hpp"

using namespace umlab;
using namespace umlab::model;
using proto::ProtocolKind;

namespace {

const PartyId kAlice("alice"), kBob("bob"), kCarol("carol");

WorldConfig config(ProtocolKind k, ExecModel m, unsigned n_e = 16, std::uint64_t seed = 1) {
  WorldConfig c;
  c.kind = k;
  c.model = m;
  c.protocol.n_e = n_e;
  c.seed = seed;
  c.challenge_seed = seed + 1000;
  return c;
}

bool logged(const SessionRecord& r, EventType t) {
  return std::any_of(r.log.begin(), r.log.end(), [&](const Event& e) { return e.type == t; });
}

struct Completed {
  World w;
  SessionId sid;
  explicit Completed(ProtocolKind k = ProtocolKind::Kex3, std::uint64_t seed = 1)
      : w(config(k, ExecModel::AM, 16, seed)), sid(open_run(w, kAlice, kBob, nonce_from_u64(seed))) {
    deliver_all(w);
  }
};

}  // namespace

TEST_SUITE("honest execution") {
  TEST_CASE("AM run completes both sessions and logs the I_f verdict") {
    for (auto k : proto::all_protocols()) {
      CAPTURE(proto::to_string(k));
      Completed c(k);
      const auto& a = c.w.record(kAlice, c.sid);
      const auto& b = c.w.record(kBob, c.sid);
      CHECK(a.status == Status::Completed);
      CHECK(b.status == Status::Completed);
      CHECK(a.key == b.key);
      CHECK(a.entropies == b.entropies);
      CHECK(logged(a, EventType::Verified));
      CHECK(logged(a, EventType::Completed));
      CHECK(c.w.pending().empty());
      for (const auto& v : c.w.verdicts()) {
        CHECK(v.accept);
        CHECK_FALSE(v.override_flag);
      }
    }
  }

  TEST_CASE("session ids order and nonces") {
    CHECK(nonce_from_u64(1) != nonce_from_u64(2));
    const SessionId x{kAlice, kBob, nonce_from_u64(1)};
    const SessionId y{kAlice, kBob, nonce_from_u64(2)};
    CHECK(x < y);
    CHECK(x == x);
  }

  TEST_CASE("one party can run concurrent sessions") {
    World w(config(ProtocolKind::Kem4, ExecModel::AM));
    const auto s1 = open_run(w, kAlice, kBob, nonce_from_u64(1));
    const auto s2 = open_run(w, kAlice, kCarol, nonce_from_u64(2));
    deliver_all(w);
    CHECK(w.record(kAlice, s1).key == w.record(kBob, s1).key);
    CHECK(w.record(kAlice, s2).key == w.record(kCarol, s2).key);
    CHECK_FALSE(w.record(kAlice, s1).key == w.record(kAlice, s2).key);
  }
}

TEST_SUITE("execution model rules") {
  TEST_CASE("Modify and Inject are UM-only") {
    World w(config(ProtocolKind::Kex3, ExecModel::AM));
    open_run(w, kAlice, kBob, nonce_from_u64(1));
    const auto env = w.pending().front();
    CHECK_THROWS_AS(w.apply(action::Modify{env.id, Bytes{1}}), ModelError);
    CHECK_THROWS_AS(w.apply(action::Inject{env}), ModelError);
    CHECK(w.pending().size() == 1);  // failed actions change nothing
  }

  TEST_CASE("unknown envelopes and sessions") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM));
    open_run(w, kAlice, kBob, nonce_from_u64(1));
    CHECK_THROWS_AS(w.apply(action::Deliver{999}), ModelError);
    CHECK_THROWS_AS(w.apply(action::Drop{999}), ModelError);
    CHECK_THROWS_AS(w.apply(action::NewSession{kAlice, kAlice, proto::Role::Initiator, nonce_from_u64(3)}),
                    ModelError);
    CHECK_THROWS_AS(w.apply(action::NewSession{kAlice, kBob, proto::Role::Initiator, nonce_from_u64(1)}),
                    ModelError);
    CHECK_THROWS_AS(w.record(kCarol, SessionId{kAlice, kCarol, nonce_from_u64(1)}), ModelError);
  }

  TEST_CASE("UM modification is caught by I_f at n_e = 32") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM, 32));
    const auto sid = open_run(w, kAlice, kBob, nonce_from_u64(1));
    bool modified = false;
    while (!w.pending().empty()) {
      const auto env = w.pending().front();
      auto msg = proto::Message::decode(env.payload);
      if (!modified && msg.step == 2) {
        // Swap A's public key for a fresh one.
        Rng rng(77);
        msg.fields[0].second = w.config().protocol.group->encode(w.config().protocol.group->random_element(rng));
        w.apply(action::Modify{env.id, msg.encode()});
        modified = true;
      } else {
        w.apply(action::Deliver{env.id});
      }
    }
    REQUIRE(modified);
    CHECK(w.record(kAlice, sid).status == Status::Aborted);
    CHECK(w.record(kBob, sid).status == Status::Aborted);
    REQUIRE(w.verdicts().size() == 1);
    CHECK_FALSE(w.verdicts()[0].accept);
  }

  TEST_CASE("a malformed payload aborts the receiving session") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM));
    const auto sid = open_run(w, kAlice, kBob, nonce_from_u64(1));
    const auto env = w.pending().front();
    w.apply(action::Modify{env.id, Bytes{1, 2, 3}});
    const auto& r = w.record(env.receiver, sid);
    CHECK(r.status == Status::Aborted);
    CHECK(logged(r, EventType::Aborted));
  }

  TEST_CASE("Drop leaves sessions in process") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM));
    const auto sid = open_run(w, kAlice, kBob, nonce_from_u64(1));
    w.apply(action::Drop{w.pending().front().id});
    CHECK(w.pending().empty());
    CHECK(w.record(kAlice, sid).status == Status::InProcess);
  }

  TEST_CASE("deliveries to a finished session are ignored") {
    World um(config(ProtocolKind::Kex3, ExecModel::UM));
    const auto sid = open_run(um, kAlice, kBob, nonce_from_u64(1));
    deliver_all(um);
    const auto r = um.apply(action::Inject{MessageEnvelope{0, kBob, kAlice, sid, 9, Bytes{1}}});
    CHECK(r.ignored);
    CHECK(um.record(kAlice, sid).status == Status::Completed);
  }

  TEST_CASE("a corrupted party receives nothing and opens nothing") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM));
    open_run(w, kAlice, kBob, nonce_from_u64(1));
    const auto env = w.pending().front();
    const auto r = w.apply(action::Corrupt{env.receiver});
    CHECK(r.corrupted_state.size() == 1);
    CHECK(w.corrupted(env.receiver));
    CHECK_THROWS_AS(w.apply(action::Deliver{env.id}), RuleError);
    CHECK_THROWS_AS(w.apply(action::NewSession{env.receiver, kCarol, proto::Role::Initiator, nonce_from_u64(5)}),
                    RuleError);
  }

  TEST_CASE("I_f override accepts for a session whose peer is corrupted") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM));
    const auto sid = open_run(w, kAlice, kBob, nonce_from_u64(1));
    w.apply(action::Deliver{w.pending().front().id});  // c to alice
    w.apply(action::Corrupt{kAlice});
    const auto r = w.apply(action::Deliver{w.pending().front().id});  // pk_a to bob
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0].override_flag);
    CHECK(r.verdicts[0].accept);
    CHECK(w.record(kBob, sid).status == Status::Completed);
    CHECK(w.record(kAlice, sid).status == Status::InProcess);
  }
}

TEST_SUITE("session-key game") {
  TEST_CASE("RevealKey, RevealState, Expire") {
    Completed c;
    const auto r = c.w.apply(action::RevealKey{kAlice, c.sid});
    REQUIRE(r.key);
    CHECK(*r.key == *c.w.record(kAlice, c.sid).key);
    CHECK(c.w.apply(action::RevealState{kBob, c.sid}).state);
    c.w.apply(action::Expire{kAlice, c.sid});
    CHECK_FALSE(c.w.record(kAlice, c.sid).key);
    CHECK_THROWS_AS(c.w.apply(action::RevealKey{kAlice, c.sid}), RuleError);
    CHECK_THROWS_AS(c.w.apply(action::Expire{kAlice, c.sid}), RuleError);
  }

  TEST_CASE("RevealKey and Expire need a completed session") {
    World w(config(ProtocolKind::Kex3, ExecModel::UM));
    const auto sid = open_run(w, kAlice, kBob, nonce_from_u64(1));
    CHECK_THROWS_AS(w.apply(action::RevealKey{kAlice, sid}), RuleError);
    CHECK_THROWS_AS(w.apply(action::Expire{kAlice, sid}), RuleError);
    CHECK_THROWS_AS(w.apply(action::Test{kAlice, sid}), RuleError);
  }

  TEST_CASE("Test may be asked once") {
    Completed c;
    const auto r = c.w.apply(action::Test{kAlice, c.sid});
    REQUIRE(r.key);
    REQUIRE(c.w.test_bit());
    if (*c.w.test_bit())
      CHECK_FALSE(*r.key == *c.w.record(kAlice, c.sid).key);
    else
      CHECK(*r.key == *c.w.record(kAlice, c.sid).key);
    CHECK_THROWS_AS(c.w.apply(action::Test{kBob, c.sid}), RuleError);
  }

  TEST_CASE("Test bit is a function of the challenge seed") {
    int ones = 0;
    for (std::uint64_t s = 1; s <= 40; ++s) {
      Completed a(ProtocolKind::Kex3, s), b(ProtocolKind::Kex3, s);
      a.w.apply(action::Test{kAlice, a.sid});
      b.w.apply(action::Test{kAlice, b.sid});
      CHECK(a.w.test_bit() == b.w.test_bit());
      ones += *a.w.test_bit() ? 1 : 0;
    }
    CHECK(ones > 0);
    CHECK(ones < 40);
  }

  TEST_CASE("Test is refused after a reveal on the session or its partner, or after Corrupt") {
    {
      Completed c;
      c.w.apply(action::RevealKey{kBob, c.sid});
      CHECK_THROWS_AS(c.w.apply(action::Test{kAlice, c.sid}), RuleError);
    }
    {
      Completed c;
      c.w.apply(action::RevealState{kAlice, c.sid});
      CHECK_THROWS_AS(c.w.apply(action::Test{kAlice, c.sid}), RuleError);
    }
    {
      Completed c;
      c.w.apply(action::Corrupt{kBob});
      CHECK_THROWS_AS(c.w.apply(action::Test{kAlice, c.sid}), RuleError);
    }
    {
      Completed c;
      c.w.apply(action::Expire{kAlice, c.sid});
      CHECK_THROWS_AS(c.w.apply(action::Test{kAlice, c.sid}), RuleError);
    }
  }
}

TEST_SUITE("transcripts") {
  TEST_CASE("actions serialize and deserialize") {
    const SessionId sid{kAlice, kBob, nonce_from_u64(4)};
    const MessageEnvelope env{3, kAlice, kBob, sid, 2, Bytes{1, 2}};
    const std::vector<AdversaryAction> all{
        action::NewSession{kAlice, kBob, proto::Role::Responder, nonce_from_u64(4)},
        action::Deliver{5},
        action::Modify{6, Bytes{7}},
        action::Inject{env},
        action::Drop{8},
        action::Corrupt{kCarol},
        action::RevealKey{kAlice, sid},
        action::RevealState{kAlice, sid},
        action::Expire{kBob, sid},
        action::Test{kBob, sid},
    };
    for (const auto& a : all) {
      const Bytes b = serialize_action(a);
      ByteReader r(b);
      const auto back = deserialize_action(r);
      r.expect_done();
      CHECK(back.index() == a.index());
      CHECK(serialize_action(back) == b);
    }
    const Bytes bad{42};
    ByteReader r(bad);
    CHECK_THROWS_AS(deserialize_action(r), DecodeError);
  }

  TEST_CASE("config round trip keeps the shared group") {
    auto c = config(ProtocolKind::Kem6, ExecModel::UM, 12, 99);
    c.protocol.kem_mode = KemMode::Probabilistic;
    c.protocol.policy = proto::EntropyPolicy::StripIdentity;
    const auto back = deserialize_config(serialize_config(c));
    CHECK(back.kind == c.kind);
    CHECK(back.model == c.model);
    CHECK(back.protocol.n_e == 12);
    CHECK(back.protocol.kem_mode == KemMode::Probabilistic);
    CHECK(back.protocol.policy == proto::EntropyPolicy::StripIdentity);
    CHECK(back.protocol.group == GroupParams::toy256());
    CHECK(back.seed == 99);
    CHECK(back.challenge_seed == c.challenge_seed);
  }

  TEST_CASE("export, replay and re-export are identical") {
    for (auto k : proto::all_protocols()) {
      Completed c(k, 3);
      c.w.apply(action::RevealKey{kAlice, c.sid});
      const Bytes t = c.w.export_transcript();
      const World back = replay_transcript(t);
      CHECK(back.export_transcript() == t);
      CHECK(back.records() == c.w.records());
      const auto parsed = parse_transcript(t);
      CHECK(parsed.header.version == kTranscriptVersion);
      CHECK(parsed.actions.size() == c.w.actions().size());
      CHECK(parsed.record_blobs.size() == 2);
    }
  }

  TEST_CASE("a different seed gives different sessions") {
    Completed c(ProtocolKind::Kem4, 3);
    const Bytes t = c.w.export_transcript();
    const World other = replay_transcript(t, 12345);
    CHECK_FALSE(other.records() == c.w.records());
    CHECK(replay_transcript(t, c.w.config().seed).records() == c.w.records());
  }

  TEST_CASE("damaged transcripts are replay errors") {
    Completed c;
    const Bytes t = c.w.export_transcript();
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{10}, t.size() / 2, t.size() - 1})
      CHECK_THROWS_AS(parse_transcript(ByteView(t).first(cut)), ReplayError);
    Bytes magic = t;
    magic[0] = 'X';
    CHECK_THROWS_AS(parse_transcript(magic), ReplayError);
    Bytes version = t;
    version[5] ^= 0x01;
    CHECK_THROWS_AS(parse_transcript(version), ReplayError);
    Bytes suite = t;
    suite[6 + 4 + 2] ^= 0x20;  // first character of the hash name
    CHECK_THROWS_AS(parse_transcript(suite), ReplayError);
    Bytes extra = t;
    extra.push_back(0);
    CHECK_THROWS_AS(parse_transcript(extra), ReplayError);
  }

  TEST_CASE("record serialization reflects state") {
    Completed c;
    const auto a = c.w.record(kAlice, c.sid);
    CHECK(a.serialize() == c.w.record(kAlice, c.sid).serialize());
    CHECK(a.serialize() != c.w.record(kBob, c.sid).serialize());
    CHECK(to_string(Status::Completed) == "completed");
  }
}
