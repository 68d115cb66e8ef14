#pragma once

#include "umlab/primitives/commitment.hpp"
#include "umlab/protocols/protocol.hpp"

namespace umlab::proto::detail {

std::unique_ptr<SessionMachine> make_basic(ProtocolKind kind, const ProtocolConfig& config, SessionContext ctx,
                                           std::shared_ptr<Rng> rng);

std::unique_ptr<SessionMachine> make_compiled_kem6(const ProtocolConfig& config, SessionContext ctx);

inline Bytes digest_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }

Commitment commitment_from_wire(const Bytes& b);
Blinder blinder_from_wire(const Bytes& b);
Bytes blinder_bytes(const Blinder& b);

/// open() or abort with the given reason.
Bytes open_or_abort(const Bytes& commitment, const Bytes& message, const Bytes& blinder, const char* what);

}  // namespace umlab::proto::detail
