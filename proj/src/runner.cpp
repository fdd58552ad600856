#include "vicsek/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "vicsek/coupling.hpp"
#include "vicsek/observables.hpp"
#include "vicsek/records.hpp"
#include "vicsek/spectral.hpp"

namespace vicsek {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path ensure_dir(const std::string& out_dir) {
  fs::path p(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  return p;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish_csv(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

template <int D>
void simulate_impl(const RunConfig& cfg, const fs::path& out, int workers) {
  ParticleState<D> state = make_initial_state<D>(cfg.n, cfg.position, cfg.orientation, cfg.seed,
                                                 rng::Lane::init_pair);
  RecordHeader header;
  header.d = static_cast<std::uint32_t>(D);
  header.n = cfg.n;
  header.config_hash = cfg.config_hash();
  header.system_tag = static_cast<std::uint32_t>(SystemTag::interacting);
  RecordWriter traj((out / "trajectory.bin").string(), header);

  const fs::path summary_path = out / "summary.csv";
  std::ofstream summary = open_csv(summary_path);
  summary << "step,time,jx,jy" << (D == 3 ? ",jz" : "") << ",j_norm,max_norm_dev\n";

  AdvanceOpts opts;
  opts.workers = workers;
  const Kernel kern = cfg.kernel();
  const StepParams sp = cfg.step_params();
  run_simulation<D>(state, kern, sp, cfg.horizon, cfg.seed, rng::Lane::interacting, opts,
                    cfg.record_every, [&](const ParticleState<D>& s) {
                      traj.append_state(s);
                      const Vec<D> j = polar_order_particles(s);
                      summary << s.step << ',' << g17(s.time);
                      for (int k = 0; k < D; ++k) summary << ',' << g17(j[k]);
                      summary << ',' << g17(norm(j)) << ',' << g17(max_norm_deviation(s)) << '\n';
                    });
  traj.close();
  finish_csv(summary, summary_path);
  std::printf("simulate: d=%d n=%zu t=%s dt=%s -> %s\n", D, cfg.n, g17(cfg.horizon).c_str(),
              g17(cfg.dt).c_str(), out.string().c_str());
}

template <int D>
void couple_impl(const RunConfig& cfg, const fs::path& out, int workers) {
  CouplingSettings s;
  s.n_values = cfg.n_grid;
  s.horizon = cfg.horizon;
  s.replicas = cfg.replicas;
  s.m_multiplier = cfg.m_multiplier;
  s.kernel = cfg.kernel();
  s.step = cfg.step_params();
  s.positions = cfg.position;
  s.orientations = cfg.orientation;
  s.seed = cfg.seed;
  s.workers = workers > 0 ? static_cast<std::size_t>(workers) : 1;

  CouplingResult res = run_coupling_experiment<D>(s);
  res.config_hash = cfg.config_hash();

  const fs::path cpath = out / "coupling.csv";
  std::ofstream csv = open_csv(cpath);
  csv << "n,error,stderr,t,replicas,config_hash\n";
  for (std::size_t i = 0; i < res.n_values.size(); ++i)
    csv << res.n_values[i] << ',' << g17(res.errors[i]) << ',' << g17(res.stderrs[i]) << ','
        << g17(res.horizon) << ',' << res.replicas << ',' << res.config_hash << '\n';
  finish_csv(csv, cpath);

  try {
    const RateFit fit = fit_convergence_rate(res);
    const fs::path rpath = out / "rate.csv";
    std::ofstream rcsv = open_csv(rpath);
    rcsv << "slope,intercept,r_squared\n";
    rcsv << g17(fit.slope) << ',' << g17(fit.intercept) << ',' << g17(fit.r_squared) << '\n';
    finish_csv(rcsv, rpath);
    std::printf("couple: slope=%.3f r2=%.3f over %zu grid points -> %s\n", fit.slope,
                fit.r_squared, res.n_values.size(), out.string().c_str());
  } catch (const std::invalid_argument& e) {
    std::printf("couple: rate fit skipped (%s) -> %s\n", e.what(), out.string().c_str());
  }
}

void homogeneous_impl(const RunConfig& cfg, const fs::path& out) {
  SpectralSolver solver(perturbed_uniform(cfg.k_max, cfg.j0), cfg.kappa, cfg.dt);
  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));

  const fs::path ppath = out / "polar.csv";
  std::ofstream polar = open_csv(ppath);
  polar << "step,time,jx,jy,j_norm\n";
  const auto emit = [&](std::size_t k) {
    const OrderParameter j = polar_order_spectral(solver.density());
    polar << k << ',' << g17(solver.density().time) << ',' << g17(j.jx) << ',' << g17(j.jy)
          << ',' << g17(j.norm()) << '\n';
  };
  for (std::size_t k = 0;; ++k) {
    if (k % cfg.record_every == 0) emit(k);
    if (k == steps) {
      if (steps % cfg.record_every != 0) emit(steps);
      break;
    }
    solver.step();
  }
  finish_csv(polar, ppath);

  const fs::path mpath = out / "modes.csv";
  std::ofstream modes = open_csv(mpath);
  modes << "k,re,im\n";
  const FourierDensity& f = solver.density();
  for (int k = -f.k_max; k <= f.k_max; ++k)
    modes << k << ',' << g17(f.at(k).real()) << ',' << g17(f.at(k).imag()) << '\n';
  finish_csv(modes, mpath);

  const double jn = polar_order_spectral(f).norm();
  std::printf("homogeneous: kappa=%s T=%s |J|=%.6f (consistency root %.6f) -> %s\n",
              g17(cfg.kappa).c_str(), g17(cfg.horizon).c_str(), jn, consistency_root(cfg.kappa),
              out.string().c_str());
}

template <int D>
void analyze_impl(const RunConfig& cfg, const RecordFile& file, const fs::path& out, int workers) {
  std::vector<ParticleState<D>> snaps;
  snaps.reserve(file.snapshots.size());
  for (const auto& s : file.snapshots) snaps.push_back(to_state<D>(file.header, s));

  const fs::path opath = out / "observables.csv";
  std::ofstream obs = open_csv(opath);
  obs << "step,time,jx,jy" << (D == 3 ? ",jz" : "") << ",j_norm,max_norm_dev\n";
  for (const auto& s : snaps) {
    const Vec<D> j = polar_order_particles(s);
    obs << s.step << ',' << g17(s.time);
    for (int k = 0; k < D; ++k) obs << ',' << g17(j[k]);
    obs << ',' << g17(norm(j)) << ',' << g17(max_norm_deviation(s)) << '\n';
  }
  finish_csv(obs, opath);

  // Weak-form residuals of the kinetic equation against the recorded
  // trajectory (single replica: the band is the discretization term alone).
  if (snaps.size() >= 3) {
    std::vector<double> times;
    times.reserve(snaps.size());
    for (const auto& s : snaps) times.push_back(s.time);
    const std::vector<std::vector<ParticleState<D>>> replicas{snaps};
    WeakFormOpts wfo;
    wfo.dt = cfg.dt;
    wfo.workers = workers;
    const Kernel kern = cfg.kernel();
    const fs::path wpath = out / "weakform.csv";
    std::ofstream wf = open_csv(wpath);
    wf << "phi,time,lhs,rhs,residual,band\n";
    for (const TestFunction& phi :
         {TestFunction::one(), TestFunction::coord_x(0), TestFunction::coord_v(0)}) {
      const WeakFormReport rep = weak_form_residual<D>(replicas, times, phi, kern, wfo);
      for (std::size_t j = 0; j < rep.times.size(); ++j)
        wf << phi.name() << ',' << g17(rep.times[j]) << ',' << g17(rep.lhs[j]) << ','
           << g17(rep.rhs[j]) << ',' << g17(rep.residual[j]) << ',' << g17(rep.band[j]) << '\n';
    }
    finish_csv(wf, wpath);
  }
  std::printf("analyze: %zu snapshots (n=%llu, d=%u) -> %s\n", snaps.size(),
              static_cast<unsigned long long>(file.header.n), file.header.d,
              out.string().c_str());
}

}  // namespace

void run_simulate(const RunConfig& cfg, const std::string& out_dir, int workers) {
  const fs::path out = ensure_dir(out_dir);
  if (cfg.d == 2) simulate_impl<2>(cfg, out, workers);
  else simulate_impl<3>(cfg, out, workers);
}

void run_couple(const RunConfig& cfg, const std::string& out_dir, int workers) {
  const fs::path out = ensure_dir(out_dir);
  if (cfg.d == 2) couple_impl<2>(cfg, out, workers);
  else couple_impl<3>(cfg, out, workers);
}

void run_homogeneous(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = ensure_dir(out_dir);
  homogeneous_impl(cfg, out);
}

void run_analyze(const RunConfig& cfg, const std::string& out_dir, int workers) {
  const fs::path out = ensure_dir(out_dir);
  const RecordFile file = read_records(cfg.input);
  if (file.header.config_hash != cfg.config_hash())
    throw ConfigError("analyze: records in " + cfg.input + " carry config hash " +
                      std::to_string(file.header.config_hash) +
                      " but this configuration hashes to " + std::to_string(cfg.config_hash()) +
                      "; refusing to mix");
  if (file.snapshots.empty()) throw ConfigError("analyze: no snapshots in " + cfg.input);
  if (file.header.d == 2) analyze_impl<2>(cfg, file, out, workers);
  else analyze_impl<3>(cfg, file, out, workers);
}

void run_sweep(const RunConfig& cfg, const std::string& out_dir, int workers) {
  const fs::path out = ensure_dir(out_dir);
  for (double value : cfg.sweep_values) {
    RunConfig point = cfg;
    point.experiment = cfg.sweep_experiment;
    char tag[64];
    if (cfg.sweep_parameter == "kappa") {
      point.kappa = value;
      std::snprintf(tag, sizeof tag, "kappa_%g", value);
    } else if (cfg.sweep_parameter == "n") {
      point.n = static_cast<std::size_t>(value);
      std::snprintf(tag, sizeof tag, "n_%zu", point.n);
    } else {
      point.seed = static_cast<std::uint64_t>(value);
      std::snprintf(tag, sizeof tag, "seed_%llu", static_cast<unsigned long long>(point.seed));
    }
    point.validate();
    run_experiment(point, (out / tag).string(), workers);
  }
  std::printf("sweep: %zu %s values -> %s\n", cfg.sweep_values.size(),
              cfg.sweep_parameter.c_str(), out.string().c_str());
}

void run_experiment(const RunConfig& cfg, const std::string& out_dir, int workers) {
  if (workers < 1) throw ConfigError("workers must be at least 1");
  switch (cfg.experiment) {
    case Experiment::simulate: run_simulate(cfg, out_dir, workers); return;
    case Experiment::couple: run_couple(cfg, out_dir, workers); return;
    case Experiment::homogeneous: run_homogeneous(cfg, out_dir); return;
    case Experiment::analyze: run_analyze(cfg, out_dir, workers); return;
    case Experiment::sweep: run_sweep(cfg, out_dir, workers); return;
  }
  throw ConfigError("unknown experiment");
}

}  // namespace vicsek
