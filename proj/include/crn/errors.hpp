#pragma once

#include <stdexcept>
#include <string>

namespace crn {

/// Invalid network structure: bad species names, nonpositive rates,
/// conflicting initial concentrations, unknown species lookups.
class NetworkError : public std::runtime_error {
public:
    explicit NetworkError(const std::string& msg) : std::runtime_error(msg) {}
};

/// DSL syntax or contract violation, with 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}

    int line;
    int column;
};

/// Numerical integration failure: step-size underflow, non-finite state,
/// step budget exhausted, or invalid integration settings.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Frequency-response measurement failure (e.g. the steady state is not a
/// sinusoid at the probe frequency).
class MeasurementError : public std::runtime_error {
public:
    explicit MeasurementError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crn
