#pragma once

#include <stdexcept>
#include <string>

namespace umlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input exceeds a size limit (messages, plaintexts).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A group element or encapsulation is outside the valid range.
class MalformedError : public Error {
 public:
  using Error::Error;
};

/// Truncated or structurally invalid byte input.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or an invalid combination of options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An adversary action that the active execution model forbids.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// An operation invoked before its inputs exist.
class SequenceError : public Error {
 public:
  using Error::Error;
};

/// A query that breaks the session-key game rules (second Test, Test after
/// a reveal, reveal of an expired key).
class RuleError : public Error {
 public:
  using Error::Error;
};

/// Transcript version or suite mismatch.
class ReplayError : public Error {
 public:
  using Error::Error;
};

/// A session received a payload that violates its protocol: wrong step or
/// schema, a rejected opening, or an inconsistent decapsulation. The model
/// turns it into an Aborted session.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace umlab
