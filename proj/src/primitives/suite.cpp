#include "umlab/primitives/suite.hpp"

#include "umlab/primitives/hash.hpp"

namespace umlab {

SuiteHeader current_suite() {
  return SuiteHeader{std::string(kHashName),
                     {std::string(tags::kCommitment), std::string(tags::kKdf), std::string(tags::kDerandomize),
                      std::string(tags::kEntropy), std::string(tags::kPkeStream), std::string(tags::kSeed),
                      std::string(tags::kExponent)}};
}

Bytes SuiteHeader::serialize() const {
  ByteWriter w;
  w.str(hash).u8(static_cast<std::uint8_t>(tags.size()));
  for (const auto& t : tags) w.str(t);
  return w.take();
}

SuiteHeader SuiteHeader::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  SuiteHeader s;
  s.hash = r.str();
  const unsigned n = r.u8();
  for (unsigned i = 0; i < n; ++i) s.tags.push_back(r.str());
  r.expect_done();
  return s;
}

}  // namespace umlab
