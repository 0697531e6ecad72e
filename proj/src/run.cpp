#include "bgklr/run.hpp"

#include "bgklr/diagnostics.hpp"
#include "bgklr/io.hpp"
#include "bgklr/presets.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace bgklr {

namespace {

namespace fs = std::filesystem;

std::string step_tag(Index step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%07lld", static_cast<long long>(step));
  return buf;
}

Index stride_of(double every, double dt) {
  if (every <= 0.0) return 0;
  return std::max<Index>(1, static_cast<Index>(std::llround(every / dt)));
}

void write_indices(std::ofstream& out, const StepReport& r) {
  auto line = [&](const char* name, const IndexSet& set) {
    if (set.empty()) return;
    out << r.step << ',' << name << ',';
    for (std::size_t k = 0; k < set.indices.size(); ++k) out << (k ? " " : "") << set.indices[k];
    out << '\n';
  };
  line("rows", r.rows);
  line("cols", r.cols);
  line("aug_rows", r.aug_rows);
  line("aug_cols", r.aug_cols);
  out.flush();
}

State dense_as_state(const Matrix& f, double time) {
  State s;
  s.X = f;
  s.S = Matrix::Identity(f.cols(), f.cols());
  s.V = Matrix::Identity(f.cols(), f.cols());
  s.v_orthonormal = true;
  s.time = time;
  return s;
}

}  // namespace

Index step_count(double t, double dt) {
  const double q = t / dt;
  const double n = std::round(q);
  if (std::abs(q - n) <= 1e-9 * std::max(1.0, q)) return static_cast<Index>(n);
  return static_cast<Index>(std::ceil(q));
}

RunResult run(const RunConfig& c, const RunOptions& options) {
  validate(c);
  const BgkModel model(make_params(c));
  const bool dense = c.integrator == Integrator::dense;
  const SubstepScheme scheme{c.scheme, c.dt};
  const RankPolicy policy{c.theta, c.rank_min, c.rank_max, c.truncation};

  State state;
  Index start = 0;
  if (options.resume) {
    Checkpoint ck = read_checkpoint(*options.resume);
    if (ck.x_axes != c.x_axes || ck.v_axes != c.v_axes)
      throw ConfigError("resume: checkpoint grid does not match the configuration");
    state = std::move(ck.state);
    start = step_count(state.time, c.dt);
  } else {
    state = initial_condition(c);
  }
  Matrix f;
  if (dense) {
    if (model.nx() * model.nv() > kDenseEntryLimit)
      throw ConfigError("dense integrator: grid exceeds the dense size limit");
    f = evaluate(state);
  }

  const fs::path out_dir(c.output);
  fs::create_directories(out_dir);
  {
    std::ofstream cfg(out_dir / "config.cfg", std::ios::trunc);
    cfg << serialize_config(c);
  }
  RunResult result;
  result.csv = out_dir / "diagnostics.csv";
  DiagnosticsCsv csv(result.csv, model.dv());
  std::ofstream indices;
  if (c.integrator == Integrator::ips || c.integrator == Integrator::buc) {
    indices.open(out_dir / "indices.csv", std::ios::trunc);
    indices << "step,set,indices\n";
  }

  const Index snap_stride = stride_of(c.snapshot_every, c.dt);
  const Index ckpt_stride = stride_of(c.checkpoint_every, c.dt);
  const Index total = step_count(c.t_final, c.dt);

  auto record = [&](StepReport report) {
    MomentumEnergy me;
    if (dense) {
      report.mass = dense_mass(model, f);
      report.rank = std::min(model.nx(), model.nv());
      me = dense_momentum_energy(model, f);
    } else {
      report.mass = mass(model, state);
      report.rank = state.rank();
      me = momentum_energy(model, state);
    }
    csv.write(report, me, c.wall_time);
    if (indices.is_open()) write_indices(indices, report);
    if (options.on_step) options.on_step(report);
    result.reports.push_back(std::move(report));
  };

  auto outputs = [&](Index step, bool last) {
    const double time = state.time;
    if (snap_stride > 0 && step % snap_stride == 0) {
      const Moments m = dense ? dense_moments(model, f) : compute_moments(model, state);
      auto fields = moment_fields(m, model.x_grid(), time);
      if (model.dx() >= 2) {
        auto w = vorticity(m, model.x_grid(), time);
        fields.insert(fields.end(), w.begin(), w.end());
      }
      for (const auto& field : fields)
        write_field(out_dir / "snapshots" / (field.name + "_" + step_tag(step) + ".dlrk"), field);
    }
    if ((ckpt_stride > 0 && step % ckpt_stride == 0) || last) {
      const State saved = dense ? dense_as_state(f, time) : state;
      write_checkpoint(out_dir / "checkpoints" / ("step_" + step_tag(step) + ".dlrk"), saved,
                       model.x_grid(), model.v_grid());
    }
  };

  {
    StepReport initial;
    initial.step = start;
    initial.time = state.time;
    record(initial);
    outputs(start, start >= total);
  }

  for (Index k = start + 1; k <= total; ++k) {
    StepReport report;
    try {
      if (dense) {
        const auto t0 = std::chrono::steady_clock::now();
        f = dense_step(model, f, scheme);
        report.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      } else {
        std::pair<State, StepReport> next;
        switch (c.integrator) {
          case Integrator::ips: next = ips_step(model, state, scheme); break;
          case Integrator::buc: next = buc_step(model, state, scheme, policy); break;
          case Integrator::ops: next = ops_step(model, state, scheme); break;
          case Integrator::bug: next = bug_step(model, state, scheme, policy); break;
          case Integrator::dense: break;
        }
        state = std::move(next.first);
        report = std::move(next.second);
      }
      state.time = double(k) * c.dt;
      report.step = k;
      report.time = state.time;
      record(std::move(report));
      outputs(k, k == total);
    } catch (const StepError&) {
      throw;
    } catch (const NumericalError& e) {
      throw StepError(k, e.what());
    }
  }

  result.final_state = dense ? dense_as_state(f, state.time) : state;
  return result;
}

}  // namespace bgklr
