#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mchain {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or arguments violate a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input files (truth, history, config) could not be read or validated.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Failure while running a measurement chain, tagged with where it arose.
class SimulationError : public Error {
 public:
  SimulationError(std::string stage, std::optional<std::size_t> sample,
                  const std::string& what)
      : Error(format(stage, sample, what)),
        stage_(std::move(stage)),
        sample_(sample) {}

  const std::string& stage() const noexcept { return stage_; }
  std::optional<std::size_t> sample() const noexcept { return sample_; }

 private:
  static std::string format(const std::string& stage,
                            std::optional<std::size_t> sample,
                            const std::string& what) {
    std::string msg = "stage '" + stage + "'";
    if (sample) msg += " sample " + std::to_string(*sample);
    return msg + ": " + what;
  }

  std::string stage_;
  std::optional<std::size_t> sample_;
};

}  // namespace mchain
