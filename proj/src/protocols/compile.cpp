#include "umlab/protocols/compile.hpp"

#include "internal.hpp"
#include "umlab/primitives/error.hpp"

namespace umlab::proto {

namespace {

using namespace detail;

constexpr std::size_t kNonceBytes = 32;

char other(char letter) { return letter == 'A' ? 'B' : 'A'; }

class CompiledMachine : public SessionMachine {
 public:
  CompiledMachine(ProtocolKind outer, ProtocolKind inner, const ProtocolConfig& config, SessionContext ctx)
      : SessionMachine(outer, config, ctx), inner_kind_(inner) {
    ProtocolConfig ic = config;
    ic.policy = EntropyPolicy::Figure;
    inner_ = make_basic(inner, ic, std::move(ctx), shared_rng());
    self_ = context().role == Role::Initiator ? 'A' : 'B';
  }

  std::optional<Bytes> start() override {
    auto out = inner_->start();
    if (!out) return std::nullopt;
    return begin_instance(0, *out);
  }

 protected:
  std::optional<Bytes> handle(ByteView payload) override {
    const std::size_t i = instance_;
    const std::uint8_t step = static_cast<std::uint8_t>(3 * i + 1 + phase_);
    if (sender(i) == self_) {
      if (phase_ != 1) throw ProtocolError("unexpected message for a sending instance");
      auto msg = receive(payload, step, {nonce_label(i)});
      if (msg.get(nonce_label(i)).size() != kNonceBytes) throw ProtocolError("nonce has wrong length");
      store(nonce_label(i), msg.get(nonce_label(i)));
      compute_entropy(i);
      phase_ = 2;
      Bytes out = send(step + 1, {{value_label(i), stored(value_label(i))}, {blinder_label(i), stored(blinder_label(i))}});
      next_instance();
      if (instance_ >= inner_messages() && inner_->flow_done()) {
        set_key(*inner_->key());
        finish_flow();
      }
      return out;
    }
    if (phase_ == 0) {
      std::vector<std::string> labels = extra_labels(i);
      labels.push_back(commit_label(i));
      Message msg = expect_message(payload, kind_byte(), step, labels);
      for (const auto& [label, value] : msg.fields) store(label, value);
      commitment_from_wire(stored(commit_label(i)));
      store(nonce_label(i), rng().bytes(kNonceBytes));
      phase_ = 2;
      return send(step + 1, {{nonce_label(i), stored(nonce_label(i))}});
    }
    if (phase_ != 2) throw ProtocolError("unexpected message for a receiving instance");
    auto msg = receive(payload, step, {value_label(i), blinder_label(i)});
    store(value_label(i), open_or_abort(stored(commit_label(i)), msg.get(value_label(i)),
                                        msg.get(blinder_label(i)), "instance commitment does not open"));
    compute_entropy(i);
    block_on(gate_name(i));
    return std::nullopt;
  }

  std::optional<Bytes> resume(std::string_view) override {
    const std::size_t i = instance_;
    Message inner_msg{static_cast<std::uint8_t>(inner_kind_), static_cast<std::uint8_t>(i + 1), {}};
    if (i == 0) {
      for (const auto& l : extra_labels(0)) inner_msg.fields.emplace_back(l, stored(l));
    } else {
      inner_msg.fields.emplace_back(inner_label(i), stored(value_label(i)));
    }
    next_instance();
    auto out = inner_->on_message(inner_msg.encode());
    if (out) return begin_instance(instance_, *out);
    if (inner_->flow_done()) {
      set_key(*inner_->key());
      finish_flow();
    }
    return std::nullopt;
  }

  void append_state(ByteWriter& w) const override {
    SessionMachine::append_state(w);
    w.blob(inner_->state_blob());
  }

 private:
  unsigned inner_messages() const { return info(inner_kind_).messages; }

  char sender(std::size_t i) const {
    const char first = info(inner_kind_).first_sender == Role::Initiator ? 'A' : 'B';
    return i % 2 == 0 ? first : other(first);
  }

  const std::string& inner_label(std::size_t i) const { return info(inner_kind_).step_fields.at(i).at(0); }
  std::vector<std::string> extra_labels(std::size_t i) const {
    return i == 0 ? info(inner_kind_).step_fields.at(0) : std::vector<std::string>{};
  }
  std::string value_label(std::size_t i) const { return i == 0 ? "m" : inner_label(i); }
  std::string commit_label(std::size_t i) const { return "c_" + value_label(i); }
  std::string blinder_label(std::size_t i) const { return "r_" + value_label(i); }
  std::string nonce_label(std::size_t i) const { return std::string("N_") + other(sender(i)); }
  std::string gate_name(std::size_t i) const { return std::string("E_") + sender(i); }

  void next_instance() {
    ++instance_;
    phase_ = 0;
  }

  Bytes begin_instance(std::size_t i, const Bytes& inner_payload) {
    if (i >= inner_messages()) throw ProtocolError("inner protocol sent too many messages");
    Message im = Message::decode(inner_payload);
    std::vector<std::pair<std::string, Bytes>> fields;
    if (i == 0) {
      for (const auto& [label, value] : im.fields) store(label, value);
      fields = im.fields;
      store("m", rng().bytes(kNonceBytes));
    } else {
      if (im.fields.size() != 1) throw ConfigError("compiled inner messages must carry one field");
      store(value_label(i), im.fields[0].second);
    }
    auto com = commit(stored(value_label(i)), rng());
    store(commit_label(i), digest_bytes(com.commitment.digest));
    store(blinder_label(i), blinder_bytes(com.opening.blinder));
    fields.emplace_back(commit_label(i), stored(commit_label(i)));
    phase_ = 1;
    return send(static_cast<std::uint8_t>(3 * i + 1), std::move(fields));
  }

  void compute_entropy(std::size_t i) {
    std::vector<LabeledElement> els{{value_label(i), stored(value_label(i))},
                                    {commit_label(i), stored(commit_label(i))},
                                    {nonce_label(i), stored(nonce_label(i))}};
    for (const auto& l : extra_labels(i)) els.push_back({l, stored(l)});
    set_entropy(gate_name(i), receiver(other(sender(i))), std::move(els));
    open_gate(gate_name(i), {gate_name(i)});
  }

  ProtocolKind inner_kind_;
  std::unique_ptr<SessionMachine> inner_;
  char self_;
  std::size_t instance_ = 0;
  int phase_ = 0;
};

}  // namespace

std::unique_ptr<SessionMachine> CompiledProtocol::make(const ProtocolConfig& config, SessionContext ctx) const {
  return std::make_unique<CompiledMachine>(outer, inner, config, std::move(ctx));
}

CompiledProtocol compile_mt(ProtocolKind inner) {
  if (inner != ProtocolKind::Kem2)
    throw ConfigError("compile_mt supports kem2 only, got " + std::string(to_string(inner)));
  return CompiledProtocol{inner, ProtocolKind::Kem6, 3 * info(inner).messages};
}

namespace detail {

std::unique_ptr<SessionMachine> make_compiled_kem6(const ProtocolConfig& config, SessionContext ctx) {
  return compile_mt(ProtocolKind::Kem2).make(config, std::move(ctx));
}

}  // namespace detail

}  // namespace umlab::proto
