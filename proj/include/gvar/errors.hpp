#pragma once

#include <stdexcept>
#include <string>

namespace gvar {

// Input data is unusable (unreadable file, empty series, flat window, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No candidate window satisfies the calibration acceptance band.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad grid, CFL violation, inconsistent windows).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gvar
