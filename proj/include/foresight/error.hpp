#pragma once

#include <stdexcept>
#include <string>

namespace foresight {

// Invalid numeric parameter (gamma outside (0,1), non-positive scale, ...).
// `field` names the offending configuration key when known.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what, std::string field = {})
        : std::invalid_argument(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Inputs that do not fit together: mismatched grids, off-grid jump times,
// inconsistent sequence lengths.
class structural_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A generated path left the positive half-line.
class path_validity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition (e.g. negative holdings).
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace foresight
