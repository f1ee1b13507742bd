#pragma once

#include <stdexcept>
#include <string>

namespace qsv {

// Each category maps to a distinct CLI exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the tokenizer for queries with no usable terms. Callers in the
/// pipeline record the affected measurements as missing.
class EmptyQueryError : public DataError {
public:
    EmptyQueryError() : DataError("empty query") {}
};

}  // namespace qsv
