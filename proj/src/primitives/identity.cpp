#include "umlab/primitives/identity.hpp"

#include "umlab/primitives/error.hpp"

namespace umlab {

PartyId::PartyId(std::string name) : name_(std::move(name)) {
  if (name_.empty() || name_.size() > 64) throw ConfigError("party name must be 1..64 bytes");
}

}  // namespace umlab
