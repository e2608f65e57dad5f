#pragma once

#include <string>
#include <vector>

namespace mvfcm::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kInvalidInput = 2;

inline constexpr const char* kVersion = "1.0.0";

/// Entry point for the `mvfcm` tool: fit, baseline, sweep, synth, eval.
int run(int argc, char** argv);

/// Same as run(argc, argv) with args[0] as the program name.
int run(std::vector<std::string> args);

struct GridRange {
    double start;
    double stop;
    double step;

    /// Grid values start, start + step, ... up to stop (inclusive, with a
    /// 1e-9 relative allowance), each rounded to 12 decimal places.
    std::vector<double> values() const;
};

/// Parses START:STOP:STEP. Throws InvalidInput on malformed, empty or inverted ranges.
GridRange parse_range(const std::string& text);

}  // namespace mvfcm::cli
