#include <array>

#include "umlab/primitives/error.hpp"
#include "umlab/primitives/hash.hpp"
#include "umlab/protocols/protocol.hpp"

namespace umlab::proto {

namespace {

constexpr std::array kAll = {ProtocolKind::MtAuth, ProtocolKind::Kex2,           ProtocolKind::Kex3,
                             ProtocolKind::Kem2,   ProtocolKind::Kem3TwoEntropy, ProtocolKind::Kem3Commit,
                             ProtocolKind::Kem4,   ProtocolKind::Kem6};

using E = EntropyElementSpec;

std::vector<ProtocolInfo> build_table() {
  std::vector<ProtocolInfo> t;
  t.push_back({ProtocolKind::MtAuth, "mtauth", 3, Role::Initiator, true,
               {{"c"}, {"N"}, {"m", "r"}},
               {{"E_A", 'B', {E{"c", 1}, E{"N", 2}, E{"m", 1}}, 3}},
               {{"E_A", {"E_A"}}}});
  t.push_back({ProtocolKind::Kex2, "kex2", 2, Role::Initiator, false,
               {{"pk_a"}, {"pk_b"}},
               {{"E", 'B', {E{"pk_a", 1}, E{"pk_b", 2}, E{"K", 0, true}}, 2}},
               {{"E", {"E"}}}});
  t.push_back({ProtocolKind::Kex3, "kex3", 3, Role::Responder, true,
               {{"c"}, {"pk_a"}, {"pk_b", "r"}},
               {{"E_B", 'A', {E{"pk_a", 2}, E{"pk_b", 1}, E{"c", 1}}, 3}},
               {{"E_B", {"E_B"}}}});
  t.push_back({ProtocolKind::Kem2, "kem2", 2, Role::Initiator, false,
               {{"pk"}, {"ct"}},
               {{"E", 0, {E{"pk", 1}, E{"ct", 2}, E{"K", 0, true}}, 2}},
               {{"E", {"E"}}}});
  t.push_back({ProtocolKind::Kem3TwoEntropy, "kem3two", 3, Role::Responder, true,
               {{"c"}, {"pk"}, {"ct", "N", "r"}},
               {{"E_B1", 'A', {E{"N", 1}, E{"pk", 2}, E{"c", 1}}, 3},
                {"E_B2", 'A', {E{"ct", 3}, E{"K", 0, true}}, 3, true}},
               {{"E_B", {"E_B1", "E_B2"}}}});
  t.push_back({ProtocolKind::Kem3Commit, "kem3commit", 3, Role::Responder, true,
               {{"c"}, {"pk"}, {"ct", "ct_d"}},
               {{"E", 'A', {E{"pk", 2}, E{"c", 1}, E{"K", 0, true}}, 3}},
               {{"E", {"E"}}}});
  t.push_back({ProtocolKind::Kem4, "kem4", 4, Role::Initiator, true,
               {{"pk", "c_m"}, {"c_ct", "N_B"}, {"m", "r_m", "N_A"}, {"ct", "r_ct"}},
               {{"E_A", 'B', {E{"m", 1}, E{"c_m", 1}, E{"N_B", 2}, E{"pk", 1}}, 3},
                {"E_B", 'A', {E{"ct", 2}, E{"c_ct", 2}, E{"N_A", 3}}, 4}},
               {{"E_A", {"E_A"}}, {"E_B", {"E_B"}}}});
  t.push_back({ProtocolKind::Kem6, "kem6", 6, Role::Initiator, true,
               {{"pk", "c_m"}, {"N_B"}, {"m", "r_m"}, {"c_ct"}, {"N_A"}, {"ct", "r_ct"}},
               {{"E_A", 'B', {E{"m", 1}, E{"c_m", 1}, E{"N_B", 2}, E{"pk", 1}}, 3},
                {"E_B", 'A', {E{"ct", 4}, E{"c_ct", 4}, E{"N_A", 5}}, 6}},
               {{"E_A", {"E_A"}}, {"E_B", {"E_B"}}}});
  return t;
}

}  // namespace

std::span<const ProtocolKind> all_protocols() { return kAll; }

const ProtocolInfo& info(ProtocolKind kind) {
  static const std::vector<ProtocolInfo> table = build_table();
  const auto idx = static_cast<std::size_t>(kind) - 1;
  if (idx >= table.size()) throw ConfigError("unknown protocol kind");
  return table[idx];
}

std::string_view to_string(ProtocolKind kind) { return info(kind).cli_name; }

std::string_view to_string(Role role) { return role == Role::Initiator ? "initiator" : "responder"; }

std::string_view to_string(EntropyPolicy policy) {
  switch (policy) {
    case EntropyPolicy::Figure: return "figure";
    case EntropyPolicy::KeyOnly: return "key-only";
    case EntropyPolicy::WithIdentity: return "with-identity";
    case EntropyPolicy::StripIdentity: return "strip-identity";
  }
  return "?";
}

ProtocolKind parse_protocol(std::string_view name) {
  for (auto k : kAll)
    if (info(k).cli_name == name) return k;
  throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

EntropyPolicy parse_policy(std::string_view name) {
  for (auto p : {EntropyPolicy::Figure, EntropyPolicy::KeyOnly, EntropyPolicy::WithIdentity,
                 EntropyPolicy::StripIdentity})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown entropy policy '" + std::string(name) + "'");
}

void ProtocolConfig::validate(ProtocolKind kind) const {
  if (!group) throw ConfigError("no group configured");
  require_entropy_bits(n_e);
  if ((policy == EntropyPolicy::KeyOnly || policy == EntropyPolicy::WithIdentity) && kind != ProtocolKind::Kem2)
    throw ConfigError(std::string("policy ") + std::string(to_string(policy)) + " only applies to kem2");
}

SharedKey key_from_bytes(ByteView data) { return SharedKey{tagged_hash(tags::kKdf, {data})}; }

SessionMachine::SessionMachine(ProtocolKind kind, ProtocolConfig config, SessionContext ctx, std::shared_ptr<Rng> rng)
    : kind_(kind), config_(std::move(config)), ctx_(std::move(ctx)), rng_(std::move(rng)) {
  config_.validate(kind_);
  if (!rng_) rng_ = std::make_shared<Rng>(ctx_.seed);
}

std::optional<Bytes> SessionMachine::on_message(ByteView payload) {
  if (flow_done_) throw ProtocolError("message after the flow finished");
  if (blocked_on_) throw ProtocolError("message while awaiting verification of " + *blocked_on_);
  return handle(payload);
}

std::optional<Bytes> SessionMachine::on_verified(std::string_view name) {
  for (auto& g : gates_) {
    if (g.name != name) continue;
    if (g.verdict) throw SequenceError("gate " + g.name + " already has a verdict");
    g.verdict = true;
    if (blocked_on_ && *blocked_on_ == name) {
      blocked_on_.reset();
      return resume(name);
    }
    return std::nullopt;
  }
  throw SequenceError("gate " + std::string(name) + " is not ready");
}

void SessionMachine::on_rejected(std::string_view name) {
  for (auto& g : gates_)
    if (g.name == name) {
      g.verdict = false;
      return;
    }
  throw SequenceError("gate " + std::string(name) + " is not ready");
}

const Gate* SessionMachine::gate(std::string_view name) const {
  for (const auto& g : gates_)
    if (g.name == name) return &g;
  return nullptr;
}

bool SessionMachine::gates_accepted() const {
  for (const auto& [name, _] : info(kind_).gates) {
    const Gate* g = gate(name);
    if (!g || g->verdict != true) return false;
  }
  return true;
}

Bytes SessionMachine::state_blob() const {
  ByteWriter w;
  w.u8(kind_byte()).u8(flow_done_ ? 1 : 0);
  append_state(w);
  return w.take();
}

void SessionMachine::append_state(ByteWriter& w) const {
  w.u32(static_cast<std::uint32_t>(stored_.size()));
  for (const auto& [label, value] : stored_) w.field(label, value);
}

std::optional<Bytes> SessionMachine::resume(std::string_view) { return std::nullopt; }

PartyId SessionMachine::party(char letter) const {
  const bool self_is_a = ctx_.role == Role::Initiator;
  if (letter == 'A') return self_is_a ? ctx_.self : ctx_.peer;
  return self_is_a ? ctx_.peer : ctx_.self;
}

std::optional<PartyId> SessionMachine::receiver(char letter) const {
  if (config_.policy == EntropyPolicy::StripIdentity || letter == 0) return std::nullopt;
  return party(letter);
}

const EntropyValue& SessionMachine::set_entropy(const std::string& name, std::optional<PartyId> rcv,
                                                std::vector<LabeledElement> elements) {
  auto v = entropy(rcv, elements, config_.n_e);
  return entropies_[name] = v;
}

void SessionMachine::open_gate(const std::string& name, std::vector<std::string> entropy_names) {
  if (gate(name)) throw SequenceError("gate " + name + " opened twice");
  Gate g{name, std::move(entropy_names), {}, std::nullopt};
  for (const auto& e : g.entropy_names) {
    auto it = entropies_.find(e);
    if (it == entropies_.end()) throw SequenceError("gate " + name + " needs entropy " + e);
    Bytes b = it->second.bytes();
    g.value.insert(g.value.end(), b.begin(), b.end());
  }
  gates_.push_back(std::move(g));
}

const Bytes& SessionMachine::stored(const std::string& label) const {
  auto it = stored_.find(label);
  if (it == stored_.end()) throw SequenceError("no stored value '" + label + "'");
  return it->second;
}

Bytes SessionMachine::send(std::uint8_t step, std::vector<std::pair<std::string, Bytes>> fields) const {
  return Message{kind_byte(), step, std::move(fields)}.encode();
}

Message SessionMachine::receive(ByteView payload, std::uint8_t step,
                                std::initializer_list<std::string_view> labels) const {
  return expect_message(payload, kind_byte(), step, labels);
}

}  // namespace umlab::proto
