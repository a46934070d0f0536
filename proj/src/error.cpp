#include "ogo/error.hpp"

namespace ogo {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidLabel: return "invalid-label";
    case ErrorCode::ReservedLabel: return "reserved-label";
    case ErrorCode::EndpointNotFound: return "endpoint-not-found";
    case ErrorCode::UnknownNode: return "unknown-node";
    case ErrorCode::SizeLimitExceeded: return "size-limit-exceeded";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::UnknownType: return "unknown-type";
    case ErrorCode::UnknownClass: return "unknown-class";
    case ErrorCode::NoSuchMethod: return "no-such-method";
    case ErrorCode::ArityMismatch: return "arity-mismatch";
    case ErrorCode::UnboundVariable: return "unbound-variable";
    case ErrorCode::Schema: return "schema-violation";
    case ErrorCode::DanglingReference: return "dangling-reference";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::UnknownRoot: return "unknown-root";
    case ErrorCode::ConfigConflict: return "config-conflict";
    case ErrorCode::NotSnapshotShaped: return "not-snapshot-shaped";
    case ErrorCode::MalformedCsv: return "malformed-csv";
    case ErrorCode::Io: return "io-error";
    case ErrorCode::PositionalIndex: return "positional-index";
    case ErrorCode::PositionalKind: return "positional-kind";
    case ErrorCode::UnsupportedFeature: return "unsupported-feature";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::TypeMismatch: return "type-mismatch";
    case ErrorCode::CastError: return "cast-error";
    case ErrorCode::ShapeError: return "shape-error";
    case ErrorCode::CursorPosition: return "cursor-position";
    case ErrorCode::UnknownColumn: return "unknown-column";
    }
    return "unknown";
}

std::string_view to_string(Stage stage) {
    switch (stage) {
    case Stage::None: return "none";
    case Stage::Expand: return "expand";
    case Stage::Extract: return "extract";
    case Stage::Export: return "export";
    case Stage::Import: return "import";
    case Stage::Parse: return "parse";
    case Stage::Validate: return "validate";
    case Stage::Execute: return "execute";
    case Stage::Result: return "result";
    }
    return "unknown";
}

}  // namespace ogo
