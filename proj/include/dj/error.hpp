#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dj {

enum class ErrorCode {
  LexError,
  ParseError,
  // catalog
  UnknownReference,
  CycleWouldForm,
  DuplicateEntityName,
  DuplicateAttribute,
  NullablePrimaryDependency,
  NestedMasterPart,
  PartWithoutMasterDep,
  InvalidDeclaration,
  // algebra
  NotJoinable,
  UnionIncompatible,
  AmbiguousAttribute,
  UnknownAttribute,
  AggrFnOutsideAggregate,
  PrimaryRenameCollision,
  DuplicateOutputName,
  TypeMismatch,
  InvalidUniversalUse,
  UniversalNotMaterializable,
  UnionOverlap,
  // store
  DomainViolation,
  DuplicateKey,
  ReferentialViolation,
  UniqueDependencyViolation,
  PartDirectInsert,
  PartDirectDelete,
  MissingAttribute,
  PrimaryKeyUpdate,
  ForeignKeyUpdate,
  UnknownPart,
  // compute
  NoMakeRegistered,
  MakeContractViolation,
  // session / persistence
  UnknownVariable,
  PersistenceError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for everything the engine reports. The code identifies the
/// failure class; the message carries the specifics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

struct SourcePos {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

class LexError : public Error {
 public:
  LexError(SourcePos pos, const std::string& message)
      : Error(ErrorCode::LexError, format(pos, message)), pos_(pos), detail_(message) {}
  SourcePos pos() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(SourcePos pos, const std::string& message) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
  }
  SourcePos pos_;
  std::string detail_;
};

struct ParseDiagnostic {
  SourcePos pos;
  std::string expected;
  std::string found;
};

/// Thrown by the script parser. Holds every diagnostic collected during error
/// recovery; what() describes the first one.
class ParseError : public Error {
 public:
  explicit ParseError(std::vector<ParseDiagnostic> diagnostics)
      : Error(ErrorCode::ParseError, describe(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<ParseDiagnostic>& diagnostics() const noexcept { return diagnostics_; }
  SourcePos pos() const { return diagnostics_.front().pos; }

 private:
  static std::string describe(const std::vector<ParseDiagnostic>& diags) {
    if (diags.empty()) return "parse failed";
    const auto& d = diags.front();
    std::string msg = std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) +
                      ": expected " + d.expected + ", found " + d.found;
    if (diags.size() > 1) msg += " (+" + std::to_string(diags.size() - 1) + " more)";
    return msg;
  }
  std::vector<ParseDiagnostic> diagnostics_;
};

}  // namespace dj
