#pragma once

#include <stdexcept>
#include <string>

namespace epiveri {

// Source position inside a script, 1-based.
struct SourcePos {
  int line = 0;
  int col = 0;
};

enum class ErrorKind {
  SyntaxError,
  UnboundVariable,
  ArityMismatch,
  LocalInInit,
  DuplicateName,
  UnsatisfiableInit,
  ExplosionGuard,
  BadOrder,
  FrameMismatch,
  NonDisjointSets,
  PreconditionViolated,
  OrderConflict,
  UnknownWorld,
  UnknownAtom,
  UnknownVariable,
  ManagerMismatch,
  SupportExceedsScope,
  BadParams,
  Internal,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::LocalInInit: return "LocalInInit";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::UnsatisfiableInit: return "UnsatisfiableInit";
    case ErrorKind::ExplosionGuard: return "ExplosionGuard";
    case ErrorKind::BadOrder: return "BadOrder";
    case ErrorKind::FrameMismatch: return "FrameMismatch";
    case ErrorKind::NonDisjointSets: return "NonDisjointSets";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::OrderConflict: return "OrderConflict";
    case ErrorKind::UnknownWorld: return "UnknownWorld";
    case ErrorKind::UnknownAtom: return "UnknownAtom";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::ManagerMismatch: return "ManagerMismatch";
    case ErrorKind::SupportExceedsScope: return "SupportExceedsScope";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::Internal: return "Internal";
  }
  return "Error";
}

// All library errors derive from this; the what() string for script errors
// follows the "file:line:col: message" convention so editors can jump to it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ScriptError : public Error {
 public:
  ScriptError(ErrorKind kind, const std::string& file, SourcePos pos,
              const std::string& message)
      : Error(kind, file + ":" + std::to_string(pos.line) + ":" +
                        std::to_string(pos.col) + ": " + message),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

}  // namespace epiveri
