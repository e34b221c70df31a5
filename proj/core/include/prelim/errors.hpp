#pragma once

#include <stdexcept>
#include <string>

namespace prelim {

// Contract-violation and data errors raised across the library. Each maps to
// one named error in the module interfaces; all derive from std::runtime_error
// so callers can catch broadly.

struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidCounts : std::runtime_error {
    explicit InvalidCounts(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyAfterFiltering : std::runtime_error {
    explicit EmptyAfterFiltering(const std::string& what) : std::runtime_error(what) {}
};

struct TooSmall : std::runtime_error {
    explicit TooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidHyperparameter : std::runtime_error {
    explicit InvalidHyperparameter(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidAlpha : std::runtime_error {
    explicit InvalidAlpha(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidBudget : std::runtime_error {
    explicit InvalidBudget(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateTraining : std::runtime_error {
    explicit DegenerateTraining(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewPoints : std::runtime_error {
    explicit TooFewPoints(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownSpec : std::runtime_error {
    explicit UnknownSpec(const std::string& what) : std::runtime_error(what) {}
};

struct BadFormat : std::runtime_error {
    explicit BadFormat(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace prelim
