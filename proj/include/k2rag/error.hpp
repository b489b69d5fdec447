#pragma once

#include <stdexcept>
#include <string>

namespace k2rag {

enum class ErrorCategory {
    config,
    ingest,
    provider,
    index,
    query,
    eval,
    io,
    internal,
};

inline const char* to_string(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::ingest: return "ingest";
    case ErrorCategory::provider: return "provider";
    case ErrorCategory::index: return "index";
    case ErrorCategory::query: return "query";
    case ErrorCategory::eval: return "eval";
    case ErrorCategory::io: return "io";
    case ErrorCategory::internal: return "internal";
    }
    return "internal";
}

/// Engine-wide error type. The category maps onto CLI exit codes and the
/// machine-parseable error line.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

} // namespace k2rag
