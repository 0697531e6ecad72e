#pragma once

#include "bgklr/bgk.hpp"
#include "bgklr/integrators.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bgklr {

enum class Experiment { toy1d1v, shear2d2v, shear3d3v, explosion2d2v, explosion3d3v, custom };
enum class Integrator { ips, buc, ops, bug, dense };

struct AxisSpec {
  double lower = 0.0;
  double upper = 1.0;
  Index n = 2;
  bool operator==(const AxisSpec&) const = default;
};

struct RunConfig {
  Experiment experiment = Experiment::toy1d1v;
  Integrator integrator = Integrator::buc;
  std::vector<AxisSpec> x_axes;
  std::vector<AxisSpec> v_axes;
  std::optional<double> epsilon = 1.0;  // nullopt: collisionless

  Index rank = 10;  // fixed rank (ips, ops) or initial rank (buc, bug)
  double theta = 1e-6;
  Index rank_min = 1;
  Index rank_max = 16;
  TruncationRule truncation = TruncationRule::frobenius;

  double dt = 1e-3;
  double t_final = 10.0;
  SubstepMethod scheme = SubstepMethod::rk4;
  double snapshot_every = 0.1;  // 0 disables
  double checkpoint_every = 1.0;
  std::string output = "out";
  std::uint64_t seed = 1;
  PositivityPolicy positivity = PositivityPolicy::error;
  bool wall_time = false;  // record measured step times in the diagnostics CSV

  // initial-condition parameters
  double toy_x0 = 0.0;
  double toy_variance = 1.0;
  double shear_v0 = 0.1;
  double shear_width = 1.0 / 30.0;
  double shear_perturbation = 5e-3;
  double explosion_alpha = 0.25;
  double explosion_sigma = 0.25;
  double cross_tol = 1e-10;
  double custom_rho = 1.0;
  double custom_T = 1.0;
  std::vector<double> custom_u;

  bool operator==(const RunConfig&) const = default;
};

std::string to_string(Experiment e);
std::string to_string(Integrator i);
Experiment parse_experiment(std::string_view name);
Integrator parse_integrator(std::string_view name);

/// Preset for an experiment; some defaults depend on the integrator.
RunConfig default_config(Experiment experiment, Integrator integrator = Integrator::buc);

/// Parses line-oriented `key = value` text. `overrides` are applied on top of
/// the text with the same key names. Throws ConfigError listing every problem.
RunConfig parse_config(std::string_view text,
                       const std::map<std::string, std::string>& overrides = {});

/// Full, explicit `key = value` text that parses back to an equal config.
std::string serialize_config(const RunConfig& config);

/// Throws ConfigError listing every violated invariant.
void validate(const RunConfig& config);

ProductGrid make_grid(const std::vector<AxisSpec>& axes);
BgkParams make_params(const RunConfig& config);

}  // namespace bgklr
