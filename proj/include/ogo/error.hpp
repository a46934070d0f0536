#pragma once
// Error type shared by every layer of the engine.
//
// Each failure carries a machine-readable code and, once it has passed
// through the query facade, the pipeline stage that produced it.

#include <stdexcept>
#include <string>
#include <string_view>

namespace ogo {

enum class ErrorCode {
    InvalidArgument,
    InvalidLabel,
    ReservedLabel,
    EndpointNotFound,
    UnknownNode,
    SizeLimitExceeded,
    // heap_model
    SyntaxError,
    UnknownType,
    UnknownClass,
    NoSuchMethod,
    ArityMismatch,
    UnboundVariable,
    // snapshot / extraction
    Schema,
    DanglingReference,
    DuplicateId,
    UnknownRoot,
    ConfigConflict,
    NotSnapshotShaped,
    MalformedCsv,
    Io,
    // query pipeline
    PositionalIndex,
    PositionalKind,
    UnsupportedFeature,
    Validation,
    TypeMismatch,
    // result surface
    CastError,
    ShapeError,
    CursorPosition,
    UnknownColumn,
};

enum class Stage {
    None,
    Expand,
    Extract,
    Export,
    Import,
    Parse,
    Validate,
    Execute,
    Result,
};

std::string_view to_string(ErrorCode code);
std::string_view to_string(Stage stage);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, Stage stage = Stage::None)
        : std::runtime_error(message), code_(code), stage_(stage) {}

    ErrorCode code() const noexcept { return code_; }
    Stage stage() const noexcept { return stage_; }

    // Copy of this error attributed to `stage`; an already-tagged error keeps
    // its original stage.
    Error with_stage(Stage stage) const {
        return Error(code_, what(), stage_ == Stage::None ? stage : stage_);
    }

private:
    ErrorCode code_;
    Stage stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace ogo
