#pragma once

#include <stdexcept>
#include <string>

namespace soris {

// Index outside the metasurface grid.
class BoundsError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

// Invalid parameters, mismatched dimensions, unknown presets.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Caller violated a documented precondition (length mismatch etc.).
class ContractError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Pilot sequence with zero total energy.
class DegeneratePilotError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class SelectionInfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class TrainingDivergedError : public std::runtime_error {
public:
  TrainingDivergedError(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

private:
  int epoch_;
};

}  // namespace soris
