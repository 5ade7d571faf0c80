// runner.hpp — executes a RunConfig: dispatches to the library, writes CSV
// files and a manifest with SHA-256 checksums.
//
// Every CSV starts with one header row whose cells read "name [unit]", and
// every number is printed in scientific notation with 17 significant digits,
// so single-threaded reruns are byte-identical.

#pragma once

#include "config.hpp"

#include <string>
#include <vector>

namespace tavis::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct WrittenFile {
    std::string name;    // relative to the output directory
    std::string sha256;  // lowercase hex
    std::size_t bytes = 0;
};

struct RunResult {
    std::string directory;
    std::vector<WrittenFile> files;  // manifest.json excluded
};

struct RunOptions {
    int threads = 1;
};

// Creates config.output if needed. Library exceptions propagate unchanged.
RunResult run(const RunConfig& config, const RunOptions& options = {});

std::string sha256_hex(const std::string& data);

// 0 success, 2 configuration error, 3 numerical error, 4 regime violation.
int exit_code_for(const Error& e);

}  // namespace tavis::cli
