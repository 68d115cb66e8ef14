#include "umlab/primitives/hash.hpp"

#include <openssl/evp.h>

#include "umlab/primitives/error.hpp"

namespace umlab {

struct TaggedHash::Impl {
  EVP_MD_CTX* ctx = nullptr;
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

TaggedHash::TaggedHash(std::string_view tag) : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  if (tag.size() > 255) throw SizeError("hash tag too long");
  const std::uint8_t len = static_cast<std::uint8_t>(tag.size());
  EVP_DigestUpdate(impl_->ctx, &len, 1);
  EVP_DigestUpdate(impl_->ctx, tag.data(), tag.size());
}

TaggedHash::~TaggedHash() = default;
TaggedHash::TaggedHash(TaggedHash&&) noexcept = default;
TaggedHash& TaggedHash::operator=(TaggedHash&&) noexcept = default;

TaggedHash& TaggedHash::update(ByteView data) {
  if (!data.empty()) EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
  return *this;
}

TaggedHash& TaggedHash::update_u32(std::uint32_t v) {
  const std::uint8_t be[4] = {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                              static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  return update(be);
}

TaggedHash& TaggedHash::update_u64(std::uint64_t v) {
  std::uint8_t be[8];
  for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
  return update(be);
}

Digest TaggedHash::finish() {
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx, out.data(), &len) != 1 || len != out.size()) {
    throw Error("SHA-256 finalisation failed");
  }
  return out;
}

Digest tagged_hash(std::string_view tag, std::initializer_list<ByteView> parts) {
  TaggedHash h(tag);
  for (auto p : parts) h.update(p);
  return h.finish();
}

}  // namespace umlab
