#include "dj/error.hpp"

namespace dj {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::CycleWouldForm: return "CycleWouldForm";
    case ErrorCode::DuplicateEntityName: return "DuplicateEntityName";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::NullablePrimaryDependency: return "NullablePrimaryDependency";
    case ErrorCode::NestedMasterPart: return "NestedMasterPart";
    case ErrorCode::PartWithoutMasterDep: return "PartWithoutMasterDep";
    case ErrorCode::InvalidDeclaration: return "InvalidDeclaration";
    case ErrorCode::NotJoinable: return "NotJoinable";
    case ErrorCode::UnionIncompatible: return "UnionIncompatible";
    case ErrorCode::AmbiguousAttribute: return "AmbiguousAttribute";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::AggrFnOutsideAggregate: return "AggrFnOutsideAggregate";
    case ErrorCode::PrimaryRenameCollision: return "PrimaryRenameCollision";
    case ErrorCode::DuplicateOutputName: return "DuplicateOutputName";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidUniversalUse: return "InvalidUniversalUse";
    case ErrorCode::UniversalNotMaterializable: return "UniversalNotMaterializable";
    case ErrorCode::UnionOverlap: return "UnionOverlap";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::ReferentialViolation: return "ReferentialViolation";
    case ErrorCode::UniqueDependencyViolation: return "UniqueDependencyViolation";
    case ErrorCode::PartDirectInsert: return "PartDirectInsert";
    case ErrorCode::PartDirectDelete: return "PartDirectDelete";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::PrimaryKeyUpdate: return "PrimaryKeyUpdate";
    case ErrorCode::ForeignKeyUpdate: return "ForeignKeyUpdate";
    case ErrorCode::UnknownPart: return "UnknownPart";
    case ErrorCode::NoMakeRegistered: return "NoMakeRegistered";
    case ErrorCode::MakeContractViolation: return "MakeContractViolation";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::PersistenceError: return "PersistenceError";
  }
  return "Error";
}

}  // namespace dj
