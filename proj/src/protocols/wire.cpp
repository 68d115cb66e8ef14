#include "umlab/protocols/wire.hpp"

#include "umlab/primitives/error.hpp"

namespace umlab::proto {

Bytes Message::encode() const {
  if (fields.size() > 255) throw ConfigError("too many fields in one message");
  ByteWriter w;
  w.u8(kind).u8(step).u8(static_cast<std::uint8_t>(fields.size()));
  for (const auto& [label, value] : fields) w.field(label, value);
  return w.take();
}

Message Message::decode(ByteView payload) {
  ByteReader r(payload);
  Message m;
  m.kind = r.u8();
  m.step = r.u8();
  const unsigned n = r.u8();
  for (unsigned i = 0; i < n; ++i) m.fields.push_back(r.field());
  r.expect_done();
  return m;
}

const Bytes& Message::get(std::string_view label) const {
  for (const auto& f : fields)
    if (f.first == label) return f.second;
  throw ProtocolError("missing field '" + std::string(label) + "'");
}

bool Message::has(std::string_view label) const {
  for (const auto& f : fields)
    if (f.first == label) return true;
  return false;
}

std::vector<std::string> Message::labels() const {
  std::vector<std::string> out;
  for (const auto& f : fields) out.push_back(f.first);
  return out;
}

namespace {

template <typename Labels>
Message expect_impl(ByteView payload, std::uint8_t kind, std::uint8_t step, const Labels& labels) {
  Message m;
  try {
    m = Message::decode(payload);
  } catch (const DecodeError& e) {
    throw ProtocolError(std::string("undecodable payload: ") + e.what());
  }
  if (m.kind != kind) throw ProtocolError("payload belongs to another protocol");
  if (m.step != step)
    throw ProtocolError("expected step " + std::to_string(step) + ", got " + std::to_string(m.step));
  if (m.fields.size() != labels.size()) throw ProtocolError("wrong field count for step " + std::to_string(step));
  std::size_t i = 0;
  for (const auto& label : labels) {
    if (m.fields[i].first != label)
      throw ProtocolError("expected field '" + std::string(label) + "', got '" + m.fields[i].first + "'");
    ++i;
  }
  return m;
}

}  // namespace

Message expect_message(ByteView payload, std::uint8_t kind, std::uint8_t step,
                       std::initializer_list<std::string_view> labels) {
  return expect_impl(payload, kind, step, labels);
}

Message expect_message(ByteView payload, std::uint8_t kind, std::uint8_t step,
                       const std::vector<std::string>& labels) {
  return expect_impl(payload, kind, step, labels);
}

}  // namespace umlab::proto
