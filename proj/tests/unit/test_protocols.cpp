#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>

#include "umlab/primitives/error.hpp"
#include "umlab/protocols/compile.hpp"
#include "umlab/protocols/protocol.hpp"
#include "umlab/protocols/wire.hpp"

using namespace umlab;
using namespace umlab::proto;

namespace {

// Minimal hand-rolled network: FIFO delivery, I_f modelled as a direct value
// comparison. Independent of the model module on purpose.
struct Pair {
  std::unique_ptr<SessionMachine> a, b;
  std::vector<Message> wire;  // every payload in send order
  std::function<void(Message&)> tamper;  // applied to each message before delivery

  Pair(ProtocolKind kind, ProtocolConfig cfg, std::uint64_t seed, const std::string& responder = "bob") {
    a = make_machine(kind, cfg, SessionContext{PartyId("alice"), PartyId(responder), Role::Initiator, seed});
    b = make_machine(kind, cfg, SessionContext{PartyId(responder), PartyId("alice"), Role::Responder, seed + 1});
  }

  void run() {
    std::deque<std::pair<SessionMachine*, Bytes>> q;
    auto push = [&](SessionMachine* to, const std::optional<Bytes>& p) {
      if (p) q.emplace_back(to, *p);
    };
    const bool a_first = info(a->kind()).first_sender == Role::Initiator;
    SessionMachine* first = a_first ? a.get() : b.get();
    SessionMachine* second = a_first ? b.get() : a.get();
    push(first, second->start());
    push(second, first->start());
    while (true) {
      while (!q.empty()) {
        auto [to, payload] = q.front();
        q.pop_front();
        Message m = Message::decode(payload);
        if (tamper) tamper(m);
        wire.push_back(m);
        SessionMachine* other = to == a.get() ? b.get() : a.get();
        push(other, to->on_message(m.encode()));
      }
      bool progressed = false;
      for (const auto& [gate, names] : info(a->kind()).gates) {
        const Gate* ga = a->gate(gate);
        const Gate* gb = b->gate(gate);
        if (!ga || !gb || ga->verdict || gb->verdict) continue;
        if (ga->value != gb->value) {
          a->on_rejected(gate);
          b->on_rejected(gate);
          continue;
        }
        push(b.get(), a->on_verified(gate));
        push(a.get(), b->on_verified(gate));
        progressed = true;
      }
      if (!progressed && q.empty()) break;
    }
  }
};

ProtocolConfig cfg(unsigned n_e = 16) {
  ProtocolConfig c;
  c.n_e = n_e;
  return c;
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST_SUITE("wire") {
  TEST_CASE("encode and decode round trip") {
    Message m{4, 2, {{"ct", Bytes{1, 2, 3}}, {"N", Bytes(32, 9)}}};
    const Bytes enc = m.encode();
    CHECK(enc[0] == 4);
    CHECK(enc[1] == 2);
    CHECK(enc[2] == 2);
    CHECK(Message::decode(enc) == m);
    CHECK(m.labels() == std::vector<std::string>{"ct", "N"});
    CHECK(m.has("N"));
    CHECK_FALSE(m.has("n"));
    CHECK_THROWS_AS(m.get("pk"), ProtocolError);
  }

  TEST_CASE("decode failures") {
    Message m{1, 1, {{"c", Bytes(32, 1)}}};
    Bytes enc = m.encode();
    CHECK_THROWS_AS(Message::decode(ByteView(enc).first(enc.size() - 1)), DecodeError);
    enc.push_back(0);
    CHECK_THROWS_AS(Message::decode(enc), DecodeError);
    CHECK_THROWS_AS(Message::decode(Bytes{}), DecodeError);
  }

  TEST_CASE("expect_message checks kind, step and labels") {
    const Bytes enc = Message{1, 1, {{"c", Bytes(32, 1)}}}.encode();
    CHECK_NOTHROW(expect_message(enc, 1, 1, {"c"}));
    CHECK_THROWS_AS(expect_message(enc, 2, 1, {"c"}), ProtocolError);
    CHECK_THROWS_AS(expect_message(enc, 1, 2, {"c"}), ProtocolError);
    CHECK_THROWS_AS(expect_message(enc, 1, 1, {"d"}), ProtocolError);
    CHECK_THROWS_AS(expect_message(enc, 1, 1, {"c", "r"}), ProtocolError);
    CHECK_THROWS_AS(expect_message(Bytes{1, 1}, 1, 1, {"c"}), ProtocolError);
  }
}

TEST_SUITE("metadata") {
  TEST_CASE("names round trip and unknown names are config errors") {
    for (auto k : all_protocols()) CHECK(parse_protocol(to_string(k)) == k);
    CHECK(all_protocols().size() == 8);
    CHECK_THROWS_AS(parse_protocol("kex4"), ConfigError);
    CHECK(parse_policy("key-only") == EntropyPolicy::KeyOnly);
    CHECK_THROWS_AS(parse_policy("none"), ConfigError);
  }

  TEST_CASE("config validation") {
    ProtocolConfig c;
    c.policy = EntropyPolicy::KeyOnly;
    CHECK_NOTHROW(c.validate(ProtocolKind::Kem2));
    CHECK_THROWS_AS(c.validate(ProtocolKind::Kex3), ConfigError);
    c.policy = EntropyPolicy::WithIdentity;
    CHECK_THROWS_AS(c.validate(ProtocolKind::Kem4), ConfigError);
    c.policy = EntropyPolicy::StripIdentity;
    CHECK_NOTHROW(c.validate(ProtocolKind::Kem4));
    c.n_e = 2;
    CHECK_THROWS_AS(c.validate(ProtocolKind::Kem4), ConfigError);
    c.n_e = 16;
    c.group = nullptr;
    CHECK_THROWS_AS(c.validate(ProtocolKind::Kem4), ConfigError);
  }

  TEST_CASE("messages and step tables agree") {
    for (auto k : all_protocols()) {
      const auto& i = info(k);
      CAPTURE(i.cli_name);
      CHECK(i.step_fields.size() == i.messages);
      CHECK(i.kind == k);
      CHECK_FALSE(i.gates.empty());
    }
  }

  // Every non-exempt entropy input of a defended protocol is fixed on the wire
  // (sent or committed) strictly before the last message of its flow. The
  // 2-pass protocols break exactly this rule.
  TEST_CASE("entropy input discipline") {
    for (auto k : all_protocols()) {
      const auto& i = info(k);
      CAPTURE(i.cli_name);
      bool all_bound_early = true;
      for (const auto& spec : i.entropies) {
        CHECK(spec.flow_last_step >= 1);
        CHECK(spec.flow_last_step <= i.messages);
        for (const auto& el : spec.elements) {
          if (el.derived) {
            CHECK(el.bound_step == 0);
            continue;
          }
          REQUIRE(el.bound_step >= 1);
          REQUIRE(el.bound_step <= i.messages);
          const auto& fields = i.step_fields[el.bound_step - 1];
          const bool committed =
              std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return f == "c" || f.rfind("c_", 0) == 0; });
          CHECK_MESSAGE((has(fields, el.label) || committed), el.label);
          bool appears = false;
          for (const auto& step : i.step_fields) appears = appears || has(step, el.label);
          CHECK_MESSAGE(appears, el.label);
          if (!spec.exempt && el.bound_step >= spec.flow_last_step) all_bound_early = false;
        }
      }
      CHECK(all_bound_early == i.defended);
    }
  }
}

TEST_SUITE("honest flows") {
  TEST_CASE("every protocol completes with matching keys, entropies and wire labels") {
    for (auto k : all_protocols()) {
      CAPTURE(to_string(k));
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        Pair p(k, cfg(), seed * 10);
        p.run();
        const auto& i = info(k);
        REQUIRE(p.wire.size() == i.messages);
        for (std::size_t s = 0; s < p.wire.size(); ++s) {
          CHECK(p.wire[s].kind == static_cast<std::uint8_t>(k));
          CHECK(p.wire[s].step == s + 1);
          CHECK(p.wire[s].labels() == i.step_fields[s]);
        }
        CHECK(p.a->flow_done());
        CHECK(p.b->flow_done());
        REQUIRE(p.a->key());
        CHECK(p.a->key() == p.b->key());
        CHECK(p.a->entropies() == p.b->entropies());
        CHECK(p.a->gates_accepted());
        CHECK(p.b->gates_accepted());
        for (const auto& spec : i.entropies) CHECK(p.a->entropies().count(spec.name) == 1);
      }
    }
  }

  TEST_CASE("mtauth delivers A's message only after verification") {
    Pair p(ProtocolKind::MtAuth, cfg(), 5);
    p.run();
    REQUIRE(p.b->delivered());
    CHECK(*p.b->delivered() == p.wire[2].get("m"));
  }

  TEST_CASE("kem2 policies change what goes into G") {
    ProtocolConfig c = cfg();
    Pair fig(ProtocolKind::Kem2, c, 7);
    fig.run();
    c.policy = EntropyPolicy::KeyOnly;
    Pair key_only(ProtocolKind::Kem2, c, 7);
    key_only.run();
    CHECK(fig.a->key() == key_only.a->key());
    CHECK_FALSE(fig.a->entropies() == key_only.a->entropies());
  }

  TEST_CASE("receiver identity binds the entropy unless stripped") {
    for (auto policy : {EntropyPolicy::Figure, EntropyPolicy::StripIdentity}) {
      ProtocolConfig c = cfg();
      c.policy = policy;
      Pair to_bob(ProtocolKind::MtAuth, c, 9, "bob");
      Pair to_carol(ProtocolKind::MtAuth, c, 9, "carol");
      to_bob.run();
      to_carol.run();
      const bool same = to_bob.a->entropies() == to_carol.a->entropies();
      CHECK(same == (policy == EntropyPolicy::StripIdentity));
    }
  }
}

TEST_SUITE("violations") {
  TEST_CASE("mtauth opening that does not match the commitment") {
    Pair p(ProtocolKind::MtAuth, cfg(), 11);
    p.tamper = [](Message& m) {
      if (m.step == 3) m.fields[0].second[0] ^= 1;
    };
    CHECK_THROWS_AS(p.run(), ProtocolError);
  }

  TEST_CASE("kem3commit tampered ct aborts on x != x'") {
    Pair p(ProtocolKind::Kem3Commit, cfg(), 12);
    const auto& g = *cfg().group;
    p.tamper = [&](Message& m) {
      if (m.step != 3) return;
      auto ct = decode_encapsulation(g, m.get("ct"));
      ct.c2 = g.mul(ct.c2, g.generator());
      for (auto& [label, value] : m.fields)
        if (label == "ct") value = encode_encapsulation(g, ct);
    };
    try {
      p.run();
      FAIL("no abort");
    } catch (const ProtocolError& e) {
      CHECK(std::string(e.what()).find("x != x'") != std::string::npos);
    }
  }

  TEST_CASE("messages out of order or after completion") {
    Pair p(ProtocolKind::Kex3, cfg(), 13);
    p.run();
    CHECK_THROWS_AS(p.a->on_message(p.wire[0].encode()), ProtocolError);

    Pair q(ProtocolKind::Kex3, cfg(), 14);
    q.b->start();
    q.a->start();
    // Responder expects step 2 next; feeding it a step-1 payload is a violation.
    CHECK_THROWS_AS(q.b->on_message(Message{static_cast<std::uint8_t>(ProtocolKind::Kex3), 1,
                                            {{"c", Bytes(32, 0)}}}.encode()),
                    ProtocolError);
  }

  TEST_CASE("message while blocked on a gate") {
    Pair p(ProtocolKind::MtAuth, cfg(), 15);
    auto m1 = p.a->start();
    p.b->start();
    auto m2 = p.b->on_message(*m1);
    auto m3 = p.a->on_message(*m2);
    CHECK_FALSE(p.b->on_message(*m3));
    REQUIRE(p.b->blocked_on());
    CHECK(*p.b->blocked_on() == "E_A");
    CHECK_THROWS_AS(p.b->on_message(*m3), ProtocolError);
  }

  TEST_CASE("rejected gate leaves the session without a key") {
    Pair p(ProtocolKind::MtAuth, cfg(), 16);
    auto m1 = p.a->start();
    p.b->start();
    auto m2 = p.b->on_message(*m1);
    auto m3 = p.a->on_message(*m2);
    p.b->on_message(*m3);
    p.b->on_rejected("E_A");
    CHECK_FALSE(p.b->key());
    CHECK_FALSE(p.b->gates_accepted());
  }
}

TEST_SUITE("compiler") {
  TEST_CASE("compile_mt over kem2") {
    const auto c = compile_mt(ProtocolKind::Kem2);
    CHECK(c.inner == ProtocolKind::Kem2);
    CHECK(c.outer == ProtocolKind::Kem6);
    CHECK(c.messages == 6);
    CHECK(c.messages == 3 * info(ProtocolKind::Kem2).messages);
    CHECK_THROWS_AS(compile_mt(ProtocolKind::Kex3), ConfigError);
    auto m = c.make(cfg(), SessionContext{PartyId("alice"), PartyId("bob"), Role::Initiator, 1});
    CHECK(m->kind() == ProtocolKind::Kem6);
  }

  TEST_CASE("state blob changes as the flow advances") {
    Pair p(ProtocolKind::Kem6, cfg(), 17);
    const Bytes before = p.a->state_blob();
    p.run();
    CHECK(p.a->state_blob() != before);
  }
}
