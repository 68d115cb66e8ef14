#pragma once

#include "umlab/protocols/protocol.hpp"

namespace umlab::proto {

/// C_lambda: every message of an AM protocol travels inside its own
/// commitment MT-authenticator run (commit, challenge nonce, opening), and
/// the receiver consumes it only after I_f accepts that run's entropy.
///
/// The first inner message is handled as in the 6-pass figure: its fields go
/// in clear next to a commitment to a fresh random m, and both feed the
/// entropy.
struct CompiledProtocol {
  ProtocolKind inner;
  ProtocolKind outer;
  unsigned messages;

  std::unique_ptr<SessionMachine> make(const ProtocolConfig& config, SessionContext ctx) const;
};

/// Only Kem2 is supported; it compiles to the Kem6 flow. Anything else is a
/// ConfigError.
CompiledProtocol compile_mt(ProtocolKind inner);

}  // namespace umlab::proto
