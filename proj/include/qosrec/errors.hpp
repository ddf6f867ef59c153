#pragma once

#include <stdexcept>
#include <string>

namespace qosrec {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

struct EmptyDataError : std::runtime_error {
    explicit EmptyDataError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSplitError : std::runtime_error {
    explicit DegenerateSplitError(const std::string& what) : std::runtime_error(what) {}
};

struct TrainingDivergedError : std::runtime_error {
    TrainingDivergedError(const std::string& what, int epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch(epoch) {}
    int epoch;
};

}  // namespace qosrec
