#pragma once

#include <stdexcept>
#include <string>

namespace emem {

enum class ErrorCode {
    // input validation
    EmptySession,
    DuplicateSessionId,
    UnparsableTimestamp,
    // providers
    TransportError,
    ProviderRefusal,
    ScriptMiss,
    DimensionMismatch,
    // vector index
    ZeroVector,
    EmptyNamespace,
    // graph
    EmptySeed,
    // extraction
    ExtractionParseError,
    // retrieval
    MissingEdu,
    EmptyIndex,
    // eval / datasets
    FormatError,
    MissingIndex,
    // persistence
    IoError,
    DigestMismatch,
    VersionMismatch,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptySession: return "EmptySession";
        case ErrorCode::DuplicateSessionId: return "DuplicateSessionId";
        case ErrorCode::UnparsableTimestamp: return "UnparsableTimestamp";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::ProviderRefusal: return "ProviderRefusal";
        case ErrorCode::ScriptMiss: return "ScriptMiss";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::EmptyNamespace: return "EmptyNamespace";
        case ErrorCode::EmptySeed: return "EmptySeed";
        case ErrorCode::ExtractionParseError: return "ExtractionParseError";
        case ErrorCode::MissingEdu: return "MissingEdu";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::MissingIndex: return "MissingIndex";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::DigestMismatch: return "DigestMismatch";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace emem
