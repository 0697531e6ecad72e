#include "bgklr/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace bgklr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_real(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(key + ": expected a real number, got '" + text + "'");
  return x;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return value;
}

bool to_switch(const std::string& key, const std::string& text) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError(key + ": expected on|off, got '" + text + "'");
}

std::vector<AxisSpec> cube(Index dims, double lower, double upper, Index n) {
  return std::vector<AxisSpec>(static_cast<std::size_t>(dims), AxisSpec{lower, upper, n});
}

// Parses "x.<i>.<field>" or "custom.u.<i>"; returns the axis index.
std::optional<std::size_t> dotted_index(std::string_view key, std::string_view prefix,
                                        std::string_view& field) {
  if (key.substr(0, prefix.size()) != prefix) return std::nullopt;
  auto rest = key.substr(prefix.size());
  const auto dot = rest.find('.');
  const auto digits = rest.substr(0, dot);
  std::size_t i = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  field = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  return i;
}

void resize_axes(std::vector<AxisSpec>& axes, Index dims) {
  if (dims < 1) throw ConfigError("dims must be at least 1");
  const AxisSpec fill = axes.empty() ? AxisSpec{} : axes.back();
  axes.resize(static_cast<std::size_t>(dims), fill);
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  std::string_view field;
  if (key == "experiment" || key == "integrator") return;  // handled before defaults
  if (key == "epsilon") {
    if (value == "none" || value == "collisionless")
      c.epsilon.reset();
    else
      c.epsilon = to_real(key, value);
  } else if (key == "dt") {
    c.dt = to_real(key, value);
  } else if (key == "t_final") {
    c.t_final = to_real(key, value);
  } else if (key == "scheme") {
    if (value == "rk4")
      c.scheme = SubstepMethod::rk4;
    else if (value == "euler")
      c.scheme = SubstepMethod::euler;
    else
      throw ConfigError("scheme: expected rk4|euler, got '" + value + "'");
  } else if (key == "rank") {
    c.rank = to_integer<Index>(key, value);
  } else if (key == "rank_min") {
    c.rank_min = to_integer<Index>(key, value);
  } else if (key == "rank_max") {
    c.rank_max = to_integer<Index>(key, value);
  } else if (key == "theta") {
    c.theta = to_real(key, value);
  } else if (key == "seed") {
    c.seed = to_integer<std::uint64_t>(key, value);
  } else if (key == "output") {
    if (value.empty()) throw ConfigError("output: must not be empty");
    c.output = value;
  } else if (key == "snapshot_every") {
    c.snapshot_every = to_real(key, value);
  } else if (key == "checkpoint_every") {
    c.checkpoint_every = to_real(key, value);
  } else if (key == "positivity") {
    if (value == "error")
      c.positivity = PositivityPolicy::error;
    else if (value == "clamp")
      c.positivity = PositivityPolicy::clamp;
    else
      throw ConfigError("positivity: expected error|clamp, got '" + value + "'");
  } else if (key == "truncation") {
    if (value == "frobenius") {
      c.truncation = TruncationRule::frobenius;
    } else if (value == "largest") {
      c.truncation = TruncationRule::largest;
    } else {
      throw ConfigError("truncation: expected frobenius|largest, got '" + value + "'");
    }
  } else if (key == "wall_time") {
    c.wall_time = to_switch(key, value);
  } else if (key == "x.dims") {
    resize_axes(c.x_axes, to_integer<Index>(key, value));
  } else if (key == "v.dims") {
    resize_axes(c.v_axes, to_integer<Index>(key, value));
    c.custom_u.resize(c.v_axes.size(), 0.0);
  } else if (auto i = dotted_index(key, "x.", field); i || (i = dotted_index(key, "v.", field))) {
    auto& axes = key[0] == 'x' ? c.x_axes : c.v_axes;
    if (*i >= axes.size())
      throw ConfigError(key + ": axis " + std::to_string(*i) + " out of range (dims = " +
                        std::to_string(axes.size()) + ")");
    if (field == "lower")
      axes[*i].lower = to_real(key, value);
    else if (field == "upper")
      axes[*i].upper = to_real(key, value);
    else if (field == "n")
      axes[*i].n = to_integer<Index>(key, value);
    else
      throw ConfigError("unknown key '" + key + "'");
  } else if (key == "toy.x0") {
    c.toy_x0 = to_real(key, value);
  } else if (key == "toy.variance") {
    c.toy_variance = to_real(key, value);
  } else if (key == "shear.v0") {
    c.shear_v0 = to_real(key, value);
  } else if (key == "shear.width") {
    c.shear_width = to_real(key, value);
  } else if (key == "shear.perturbation") {
    c.shear_perturbation = to_real(key, value);
  } else if (key == "explosion.alpha") {
    c.explosion_alpha = to_real(key, value);
  } else if (key == "explosion.sigma") {
    c.explosion_sigma = to_real(key, value);
  } else if (key == "cross.tol") {
    c.cross_tol = to_real(key, value);
  } else if (key == "custom.rho") {
    c.custom_rho = to_real(key, value);
  } else if (key == "custom.T") {
    c.custom_T = to_real(key, value);
  } else if (auto j = dotted_index(key, "custom.u.", field); j && field.empty()) {
    if (*j >= c.custom_u.size()) c.custom_u.resize(*j + 1, 0.0);
    c.custom_u[*j] = to_real(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

// Keys whose value changes the shape of other keys are applied first.
int key_priority(const std::string& key) {
  return (key == "x.dims" || key == "v.dims") ? 0 : 1;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::toy1d1v: return "toy1d1v";
    case Experiment::shear2d2v: return "shear2d2v";
    case Experiment::shear3d3v: return "shear3d3v";
    case Experiment::explosion2d2v: return "explosion2d2v";
    case Experiment::explosion3d3v: return "explosion3d3v";
    case Experiment::custom: return "custom";
  }
  return "?";
}

std::string to_string(Integrator i) {
  switch (i) {
    case Integrator::ips: return "ips";
    case Integrator::buc: return "buc";
    case Integrator::ops: return "ops";
    case Integrator::bug: return "bug";
    case Integrator::dense: return "dense";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::toy1d1v, Experiment::shear2d2v, Experiment::shear3d3v,
                 Experiment::explosion2d2v, Experiment::explosion3d3v, Experiment::custom})
    if (to_string(e) == name) return e;
  throw ConfigError("experiment: unknown experiment '" + std::string(name) + "'");
}

Integrator parse_integrator(std::string_view name) {
  for (auto i : {Integrator::ips, Integrator::buc, Integrator::ops, Integrator::bug,
                 Integrator::dense})
    if (to_string(i) == name) return i;
  throw ConfigError("integrator: expected ips|buc|ops|bug|dense, got '" + std::string(name) + "'");
}

RunConfig default_config(Experiment experiment, Integrator integrator) {
  RunConfig c;
  c.experiment = experiment;
  c.integrator = integrator;
  const bool fixed_rank = integrator == Integrator::ips || integrator == Integrator::ops;
  switch (experiment) {
    case Experiment::toy1d1v:
    case Experiment::custom:
      c.x_axes = cube(1, -6.0, 6.0, 128);
      c.v_axes = cube(1, -6.0, 6.0, 128);
      c.epsilon = 1.0;
      c.dt = 1e-3;
      c.t_final = 10.0;
      c.rank = 10;
      c.rank_max = 16;
      c.theta = 1e-6;
      break;
    case Experiment::shear2d2v:
      c.x_axes = cube(2, 0.0, 1.0, 128);
      c.v_axes = cube(2, -6.0, 6.0, 16);
      c.epsilon = 1e-4;
      c.dt = 1e-4;
      c.t_final = 12.0;
      c.rank = fixed_rank ? 32 : 12;
      c.rank_max = 64;
      c.theta = 1e-6;
      c.shear_perturbation = 5e-3;
      break;
    case Experiment::shear3d3v:
      c.x_axes = {AxisSpec{0.0, 1.0, 100}, AxisSpec{-1.0, 1.0, 100}, AxisSpec{-1.0, 1.0, 100}};
      c.v_axes = cube(3, -6.0, 6.0, 16);
      c.epsilon = 5e-4;
      c.dt = 1e-3;
      c.t_final = 15.0;
      c.rank = 16;
      c.rank_max = 64;
      c.theta = 1e-5;
      c.shear_perturbation = 1e-3;
      break;
    case Experiment::explosion2d2v:
      c.x_axes = cube(2, -3.0, 3.0, 128);
      c.v_axes = cube(2, -6.0, 6.0, 32);
      c.epsilon = 10.0;
      c.dt = 1e-3;
      c.t_final = 0.75;
      c.rank = 10;
      c.rank_max = 128;
      c.theta = 1e-6;
      break;
    case Experiment::explosion3d3v:
      c.x_axes = cube(3, -3.0, 3.0, 256);
      c.v_axes = cube(3, -6.0, 6.0, 32);
      c.epsilon = 1e-3;
      c.dt = 1e-3;
      c.t_final = 0.75;
      c.rank = 10;
      c.rank_max = 128;
      c.theta = 1e-4;
      break;
  }
  c.custom_u.assign(c.v_axes.size(), 0.0);
  return c;
}

void validate(const RunConfig& c) {
  std::vector<std::string> problems;
  auto require = [&](bool ok, std::string message) {
    if (!ok) problems.push_back(std::move(message));
  };
  require(c.dt > 0.0, "dt: must be > 0");
  require(c.t_final >= 0.0, "t_final: must be >= 0");
  require(c.theta >= 0.0, "theta: must be >= 0");
  require(!c.epsilon || *c.epsilon > 0.0, "epsilon: must be > 0");
  require(c.rank >= 1, "rank: must be >= 1");
  require(c.rank_min >= 1, "rank_min: must be >= 1");
  require(c.rank_max >= c.rank_min, "rank_max: must be >= rank_min");
  require(c.snapshot_every >= 0.0, "snapshot_every: must be >= 0");
  require(c.checkpoint_every >= 0.0, "checkpoint_every: must be >= 0");
  require(c.cross_tol > 0.0, "cross.tol: must be > 0");
  require(c.toy_variance > 0.0, "toy.variance: must be > 0");
  require(c.shear_width > 0.0, "shear.width: must be > 0");
  require(c.explosion_sigma > 0.0, "explosion.sigma: must be > 0");
  require(c.custom_rho > 0.0, "custom.rho: must be > 0");
  require(c.custom_T > 0.0, "custom.T: must be > 0");
  require(c.custom_u.size() <= c.v_axes.size(), "custom.u: more components than v.dims");

  auto check_axes = [&](const std::vector<AxisSpec>& axes, const char* side) {
    require(!axes.empty(), std::string(side) + ".dims: must be >= 1");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const std::string key = std::string(side) + "." + std::to_string(i);
      require(axes[i].n >= 2 && axes[i].n % 2 == 0, key + ".n: must be even and >= 2");
      require(axes[i].upper > axes[i].lower, key + ".upper: must exceed lower");
    }
  };
  check_axes(c.x_axes, "x");
  check_axes(c.v_axes, "v");
  require(c.x_axes.size() <= c.v_axes.size(), "x.dims: must not exceed v.dims");

  Index want = 0;
  switch (c.experiment) {
    case Experiment::toy1d1v: want = 1; break;
    case Experiment::shear2d2v:
    case Experiment::explosion2d2v: want = 2; break;
    case Experiment::shear3d3v:
    case Experiment::explosion3d3v: want = 3; break;
    case Experiment::custom: break;
  }
  if (want != 0) {
    require(Index(c.x_axes.size()) == want, "x.dims: experiment " + to_string(c.experiment) +
                                                " needs " + std::to_string(want));
    require(Index(c.v_axes.size()) == want, "v.dims: experiment " + to_string(c.experiment) +
                                                " needs " + std::to_string(want));
  }

  Index nx = 1, nv = 1;
  for (const auto& a : c.x_axes) nx *= std::max<Index>(a.n, 1);
  for (const auto& a : c.v_axes) nv *= std::max<Index>(a.n, 1);
  require(c.integrator == Integrator::dense || c.rank <= std::min(nx, nv),
          "rank: exceeds min(N_x, N_v)");

  if (!problems.empty()) {
    std::string message;
    for (const auto& p : problems) message += (message.empty() ? "" : "\n") + p;
    throw ConfigError(message);
  }
}

RunConfig parse_config(std::string_view text, const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> entries;
  std::map<std::string, int> lines;
  std::vector<std::string> problems;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      problems.push_back("line " + std::to_string(line_no) + ": missing key");
      continue;
    }
    if (!entries.emplace(key, value).second) {
      problems.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      continue;
    }
    lines[key] = line_no;
  }
  for (const auto& [key, value] : overrides) entries[key] = value;

  auto where = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? std::string() : "line " + std::to_string(it->second) + ": ";
  };

  RunConfig c;
  const auto exp_it = entries.find("experiment");
  if (exp_it == entries.end() || exp_it->second.empty()) {
    problems.insert(problems.begin(), "experiment: required");
  } else {
    Integrator integrator = Integrator::buc;
    if (const auto it = entries.find("integrator"); it != entries.end()) {
      try {
        integrator = parse_integrator(it->second);
      } catch (const ConfigError& e) {
        problems.push_back(where("integrator") + e.what());
      }
    }
    try {
      c = default_config(parse_experiment(exp_it->second), integrator);
    } catch (const ConfigError& e) {
      problems.push_back(where("experiment") + e.what());
    }

    std::vector<std::pair<std::string, std::string>> ordered(entries.begin(), entries.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      return key_priority(a.first) < key_priority(b.first);
    });
    for (const auto& [key, value] : ordered) {
      try {
        apply(c, key, value);
      } catch (const ConfigError& e) {
        problems.push_back(where(key) + e.what());
      }
    }
    if (c.custom_u.size() < c.v_axes.size()) c.custom_u.resize(c.v_axes.size(), 0.0);
  }

  if (problems.empty()) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string message;
    for (const auto& p : problems) message += (message.empty() ? "" : "\n") + p;
    throw ConfigError(message);
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  auto line = [&](const std::string& key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  line("experiment", to_string(c.experiment));
  line("integrator", to_string(c.integrator));
  line("epsilon", c.epsilon ? format_real(*c.epsilon) : "none");
  line("dt", format_real(c.dt));
  line("t_final", format_real(c.t_final));
  line("scheme", c.scheme == SubstepMethod::rk4 ? "rk4" : "euler");
  line("rank", std::to_string(c.rank));
  line("rank_min", std::to_string(c.rank_min));
  line("rank_max", std::to_string(c.rank_max));
  line("theta", format_real(c.theta));
  line("truncation", c.truncation == TruncationRule::frobenius ? "frobenius" : "largest");
  line("seed", std::to_string(c.seed));
  line("output", c.output);
  line("snapshot_every", format_real(c.snapshot_every));
  line("checkpoint_every", format_real(c.checkpoint_every));
  line("positivity", c.positivity == PositivityPolicy::error ? "error" : "clamp");
  line("wall_time", c.wall_time ? "on" : "off");
  auto axes = [&](const std::vector<AxisSpec>& list, const std::string& side) {
    line(side + ".dims", std::to_string(list.size()));
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = side + "." + std::to_string(i) + ".";
      line(p + "lower", format_real(list[i].lower));
      line(p + "upper", format_real(list[i].upper));
      line(p + "n", std::to_string(list[i].n));
    }
  };
  axes(c.x_axes, "x");
  axes(c.v_axes, "v");
  line("toy.x0", format_real(c.toy_x0));
  line("toy.variance", format_real(c.toy_variance));
  line("shear.v0", format_real(c.shear_v0));
  line("shear.width", format_real(c.shear_width));
  line("shear.perturbation", format_real(c.shear_perturbation));
  line("explosion.alpha", format_real(c.explosion_alpha));
  line("explosion.sigma", format_real(c.explosion_sigma));
  line("cross.tol", format_real(c.cross_tol));
  line("custom.rho", format_real(c.custom_rho));
  line("custom.T", format_real(c.custom_T));
  for (std::size_t i = 0; i < c.custom_u.size(); ++i)
    line("custom.u." + std::to_string(i), format_real(c.custom_u[i]));
  return out.str();
}

ProductGrid make_grid(const std::vector<AxisSpec>& axes) {
  std::vector<Axis> list;
  list.reserve(axes.size());
  for (const auto& a : axes) list.push_back(make_axis(a.lower, a.upper, a.n));
  return ProductGrid(std::move(list));
}

BgkParams make_params(const RunConfig& c) {
  BgkParams p{make_grid(c.x_axes), make_grid(c.v_axes), c.epsilon, c.positivity};
  return p;
}

}  // namespace bgklr
