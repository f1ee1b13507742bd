#pragma once

#include <chrono>
#include <string>

#include "qsv/errors.hpp"

namespace qsv::http {

struct RetryPolicy {
    int max_attempts = 3;
    /// Doubled after each failed attempt.
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::milliseconds timeout{30000};
};

class TransportError : public DataError {
public:
    using DataError::DataError;
};

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;    // always starts with '/'
};

/// Splits an absolute http(s) URL; throws ConfigError otherwise.
Url parse_url(const std::string& url);

/// POSTs a JSON body and returns the response body. Transport failures and
/// non-2xx statuses are retried per `policy`; the last failure is thrown as
/// TransportError.
std::string post_json(const std::string& url, const std::string& body, const RetryPolicy& policy);

}  // namespace qsv::http
