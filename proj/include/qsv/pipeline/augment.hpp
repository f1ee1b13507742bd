#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "qsv/http.hpp"
#include "qsv/session.hpp"

namespace qsv::pipeline {

struct AugmentOptions {
    std::string endpoint;
    std::size_t k = 10;
    std::size_t concurrency = 4;
    http::RetryPolicy retry;
};

struct AugmentResult {
    std::vector<Session> sessions;
    std::size_t requests = 0;
};

/// Fills every empty-SERP interaction with the top-k doc ids returned by
/// POST {"query", "k"} -> {"doc_ids"} and marks it augmented. Interactions
/// that already have a SERP are untouched.
AugmentResult augment_serps(std::vector<Session> sessions, const AugmentOptions& options);

/// Reads a session file, augments it and writes the result atomically. No
/// output file is left behind on failure.
AugmentResult augment_file(const std::filesystem::path& input, SessionKind kind, const std::filesystem::path& output,
                           const AugmentOptions& options);

}  // namespace qsv::pipeline
