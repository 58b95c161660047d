#ifndef WCH_ERRORS_HPP
#define WCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wch {

// Quadrature / root-finding / eigensolve did not reach its tolerance.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Grid does not cover the region an operation needs.
struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// A projection denominator fell below its safe threshold (|t| not large enough).
struct ThresholdError : std::runtime_error {
    explicit ThresholdError(const std::string& what) : std::runtime_error(what) {}
};

// Time stepping produced values outside the admissible range.
struct InstabilityError : std::runtime_error {
    explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Radius crossed the extinction floor during Willmore integration.
struct ExtinctionError : std::runtime_error {
    explicit ExtinctionError(const std::string& what) : std::runtime_error(what) {}
};

// Interface count is not exactly one where a single transition layer is required.
struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

// Picard iterates grew instead of contracting.
struct LipschitzError : std::runtime_error {
    explicit LipschitzError(const std::string& what) : std::runtime_error(what) {}
};

// A potential violates the double-well assumptions.
struct InvalidPotentialError : std::runtime_error {
    explicit InvalidPotentialError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wch

#endif
