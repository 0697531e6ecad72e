#pragma once

#include "bgklr/config.hpp"
#include "bgklr/integrators.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace bgklr {

/// A step of the time loop failed; carries the step index.
class StepError : public NumericalError {
 public:
  StepError(Index step, const std::string& cause)
      : NumericalError("step " + std::to_string(step) + ": " + cause), step_(step) {}
  Index step() const noexcept { return step_; }

 private:
  Index step_;
};

struct RunOptions {
  std::optional<std::filesystem::path> resume;
  std::function<void(const StepReport&)> on_step;
};

struct RunResult {
  std::vector<StepReport> reports;  // initial state first
  State final_state;
  std::filesystem::path csv;
};

/// Number of steps of size dt that reach t.
Index step_count(double t, double dt);

/// Runs the configured experiment. Writes to config.output:
///   config.cfg, diagnostics.csv, indices.csv (interpolatory integrators),
///   snapshots/<field>_<step>.dlrk, checkpoints/step_<step>.dlrk.
RunResult run(const RunConfig& config, const RunOptions& options = {});

}  // namespace bgklr
