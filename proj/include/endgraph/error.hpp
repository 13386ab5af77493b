#pragma once

#include <stdexcept>
#include <string>

namespace endgraph {

enum class ErrorKind {
  Syntax,
  DuplicateId,
  IndexOutOfRange,
  UnknownEndpoint,
  BoundTooLarge,
  PreconditionViolated,
  InvalidRef,
  NestingTooDeep,
  RankTooHigh,
  MissingSuccessor,
  EmptyGraph,
  IllegalMove,
  LimitNotComputable,
  ContextUndecidable,
  BoundExceeded,
  AnchorNotInTree,
  Invalid,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax: return "syntax-error";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::IndexOutOfRange: return "index-out-of-range";
    case ErrorKind::UnknownEndpoint: return "unknown-endpoint";
    case ErrorKind::BoundTooLarge: return "bound-too-large";
    case ErrorKind::PreconditionViolated: return "precondition-violated";
    case ErrorKind::InvalidRef: return "invalid-ref";
    case ErrorKind::NestingTooDeep: return "nesting-too-deep";
    case ErrorKind::RankTooHigh: return "rank-too-high";
    case ErrorKind::MissingSuccessor: return "missing-successor";
    case ErrorKind::EmptyGraph: return "empty-graph";
    case ErrorKind::IllegalMove: return "illegal-move";
    case ErrorKind::LimitNotComputable: return "limit-not-computable";
    case ErrorKind::ContextUndecidable: return "context-undecidable";
    case ErrorKind::BoundExceeded: return "bound-exceeded";
    case ErrorKind::AnchorNotInTree: return "anchor-not-in-tree";
    case ErrorKind::Invalid: return "invalid";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace endgraph
