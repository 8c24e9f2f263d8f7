// tvdeblur: benchmark generation, single restorations, sweeps and
// spectral dumps. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "tvdeblur/errors.hpp"
#include "tvdeblur/harness.hpp"
#include "tvdeblur/io.hpp"
#include "tvdeblur/log.hpp"

namespace fs = std::filesystem;
using namespace tvdeblur;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct ProblemOptions {
  int dim = 1;
  std::size_t n = 203;
  std::optional<std::size_t> m;
  std::optional<double> sigma;
  double nsr = 0.01;
  std::uint64_t seed = 1;
};

void add_problem_options(CLI::App* app, ProblemOptions& p) {
  app->add_option("--dim", p.dim, "1 for signals, 2 for images")->check(CLI::IsMember({1, 2}));
  app->add_option("--n", p.n, "Field-of-view size (n, or n-by-n)");
  app->add_option("--m", p.m, "PSF half-width (default ceil(n/20) in 1D, ceil(n/16) in 2D)");
  app->add_option("--sigma", p.sigma, "Gaussian width in 2D (default m/2)");
  app->add_option("--nsr", p.nsr, "Noise-to-signal ratio ||eta||/||Hu||");
  app->add_option("--seed", p.seed, "Noise seed");
}

struct Generated {
  SymmetricPsf psf;
  Observation obs;
  std::vector<double> positions;  // 1D only
};

Generated generate(const ProblemOptions& p) {
  if (p.dim == 1) {
    const std::size_t m = p.m.value_or(default_half_width_1d(p.n));
    const Benchmark1D bench = gen_signal_1d(p.n, m);
    SymmetricPsf psf = out_of_focus_psf(m);
    Observation obs = blur_and_observe(bench.extended, psf, p.n, p.nsr, p.seed);
    return {std::move(psf), std::move(obs), bench.field_positions()};
  }
  const std::size_t m = p.m.value_or(default_half_width_2d(p.n));
  const Benchmark2D bench = gen_image_2d(p.n, m);
  SymmetricPsf psf = gaussian_psf(m, p.sigma.value_or(static_cast<double>(m) / 2.0));
  Observation obs = blur_and_observe(bench.extended, psf, p.n, p.nsr, p.seed);
  return {std::move(psf), std::move(obs), {}};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigurationError("cannot write " + path.string());
  }
  return out;
}

// 1D: x,u CSV. 2D: 8-bit PGM scaled from the truth range, plus a lossless
// values CSV.
void write_field(const fs::path& dir, const std::string& stem, const Generated& g, int dim,
                 std::span<const double> values) {
  if (dim == 1) {
    auto out = open_out(dir / (stem + ".csv"));
    write_signal_csv(out, g.positions, values);
    return;
  }
  const std::size_t n = g.obs.truth.size();
  const std::size_t side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  const auto [lo, hi] = std::minmax_element(g.obs.truth.begin(), g.obs.truth.end());
  write_pgm_file(dir / (stem + ".pgm"), to_pgm(values, side, *lo, *hi));
  auto out = open_out(dir / (stem + "_values.csv"));
  write_values_csv(out, values, side);
}

int run_gen(const ProblemOptions& p, const fs::path& out_dir) {
  const Generated g = generate(p);
  fs::create_directories(out_dir);
  write_field(out_dir, "truth", g, p.dim, g.obs.truth);
  write_field(out_dir, "observed", g, p.dim, g.obs.observed);
  auto psf_out = open_out(out_dir / "psf.txt");
  write_psf(psf_out, g.psf);
  std::printf("wrote benchmark (dim %d, n %zu, m %zu, nsr %g, seed %llu) to %s\n", p.dim, p.n,
              g.psf.half_width(), p.nsr, static_cast<unsigned long long>(p.seed),
              out_dir.string().c_str());
  return 0;
}

struct RestoreOptions {
  std::string bc = "reflective";
  std::string l_bc = "zn";
  std::string formulation = "normal";
  std::string precond = "X_D";
  double alpha = 1e-3;
  std::optional<double> beta;
  std::optional<double> fp_tol;
  std::optional<int> fp_max;
  std::optional<double> inner_tol;
  std::optional<int> inner_max;
};

int run_restore(const ProblemOptions& p, const RestoreOptions& r, const fs::path& out_dir) {
  RestorationConfig config = RestorationConfig::defaults(p.dim);
  config.bc_h = parse_boundary(r.bc);
  config.bc_l = parse_diffusion_boundary(r.l_bc);
  config.formulation = parse_formulation(r.formulation);
  config.preconditioner = parse_preconditioner_choice(r.precond);
  config.alpha = r.alpha;
  config.beta = r.beta.value_or(p.dim == 1 ? 0.1 : 0.01);
  config.fp_tol = r.fp_tol.value_or(config.fp_tol);
  config.fp_max = r.fp_max.value_or(config.fp_max);
  config.inner.tol = r.inner_tol.value_or(config.inner.tol);
  config.inner.max_iterations = r.inner_max.value_or(config.inner.max_iterations);
  validate(config);

  const Generated g = generate(p);
  const RestorationReport report = restore(g.obs.observed, g.psf, config, g.obs.truth);

  fs::create_directories(out_dir);
  write_field(out_dir, "restored", g, p.dim, report.restored);
  {
    auto out = open_out(out_dir / "report.csv");
    out << "fp_step,inner_iterations,inner_converged,relative_change,residual_norm\n";
    for (std::size_t k = 0; k < report.inner_iterations.size(); ++k) {
      out << k + 1 << ',' << report.inner_iterations[k] << ','
          << (report.inner_converged[k] ? 1 : 0) << ','
          << format_double(report.relative_change[k]) << ','
          << format_double(report.residual_norms[k]) << '\n';
    }
  }
  std::printf("solver %s, preconditioner %s\n", report.solver.c_str(),
              report.preconditioner.c_str());
  std::printf("fp_steps %d (%s), avg_inner %.2f, rre %.6f, final ||g|| %.3e, %.2f s\n",
              report.fp_steps, report.fp_converged ? "converged" : "not converged",
              report.average_inner, report.rre.value_or(std::nan("")), report.final_residual,
              report.wall_seconds);
  if (report.aborted) {
    std::fprintf(stderr, "numerical failure: %s\n", report.failure.c_str());
    return exit_numerical;
  }
  if (!report.all_inner_converged()) {
    std::fprintf(stderr, "numerical failure: some inner solves hit the iteration cap\n");
    return exit_numerical;
  }
  return 0;
}

int run_sweep_cmd(const fs::path& spec_path, const fs::path& out_dir, bool quiet) {
  std::ifstream in(spec_path);
  if (!in) {
    throw ConfigurationError("cannot read sweep spec " + spec_path.string());
  }
  const SweepSpec spec = parse_sweep_spec(in);
  fs::create_directories(out_dir);
  const SweepResult result = run_sweep(spec, out_dir, [quiet](const SweepCell& c) {
    if (!quiet) {
      std::printf("%-14s %-4s n=%zu alpha=%g beta=%g N=%d avg=%s\n", c.config.c_str(),
                  c.preconditioner.c_str(), c.n, c.alpha, c.beta, c.fp_steps,
                  c.ok ? format_double(c.average_inner).c_str() : "*");
      std::fflush(stdout);
    }
  });
  const auto failed = std::count_if(result.cells.begin(), result.cells.end(),
                                    [](const SweepCell& c) { return !c.ok; });
  std::printf("%zu cells (%td marked *), tables in %s\n", result.cells.size(), failed,
              out_dir.string().c_str());
  return 0;
}

int run_spectra(std::size_t n, const std::string& config, const std::string& precond,
                double alpha, double beta, double nsr, std::uint64_t seed, int bins,
                const std::optional<fs::path>& out_path) {
  const SpectrumReport report =
      spectral_diagnostic(parse_bc_configuration(config), parse_preconditioner_choice(precond), n,
                          alpha, beta, nsr, seed, bins);
  if (out_path) {
    auto out = open_out(*out_path);
    write_spectrum(out, report);
  } else {
    write_spectrum(std::cout, report);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Total-variation deblurring with transform-based preconditioners"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Show library warnings");

  ProblemOptions gen_problem;
  fs::path gen_dir = "out";
  auto* gen = app.add_subcommand("gen", "Write the benchmark truth, observation and PSF");
  add_problem_options(gen, gen_problem);
  gen->add_option("--out-dir", gen_dir, "Output directory");

  ProblemOptions restore_problem;
  RestoreOptions restore_opts;
  fs::path restore_dir = "out";
  auto* rest = app.add_subcommand("restore", "Restore the benchmark observation once");
  add_problem_options(rest, restore_problem);
  rest->add_option("--bc", restore_opts.bc, "Blur BC: zero, periodic, reflective, antireflective");
  rest->add_option("--l-bc", restore_opts.l_bc, "Diffusion BC: zn, ar");
  rest->add_option("--formulation", restore_opts.formulation, "normal or reblur");
  rest->add_option("--precond", restore_opts.precond, "I, D, X, D_X, X_D or a concrete name");
  rest->add_option("--alpha", restore_opts.alpha, "Regularization parameter");
  rest->add_option("--beta", restore_opts.beta, "TV smoothing (default 0.1 in 1D, 0.01 in 2D)");
  rest->add_option("--fp-tol", restore_opts.fp_tol, "Fixed-point stopping tolerance");
  rest->add_option("--fp-max", restore_opts.fp_max, "Fixed-point step cap");
  rest->add_option("--inner-tol", restore_opts.inner_tol, "Krylov relative residual tolerance");
  rest->add_option("--inner-max", restore_opts.inner_max, "Krylov iteration cap");
  rest->add_option("--out-dir", restore_dir, "Output directory");

  fs::path sweep_spec;
  fs::path sweep_dir = "out";
  bool sweep_quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV tables");
  sweep->add_option("spec", sweep_spec, "Sweep spec file (key = value lines)")->required();
  sweep->add_option("--out-dir", sweep_dir, "Output directory");
  sweep->add_flag("-q,--quiet", sweep_quiet, "Do not print one line per cell");

  std::size_t spec_n = 64;
  std::string spec_config = "R";
  std::string spec_precond = "X_D";
  double spec_alpha = 1e-3;
  double spec_beta = 0.1;
  double spec_nsr = 0.01;
  std::uint64_t spec_seed = 1;
  int spec_bins = 20;
  std::optional<fs::path> spec_out;
  auto* spectra = app.add_subcommand("spectra", "Eigenvalues of the preconditioned 1D system");
  spectra->add_option("--n", spec_n, "Signal size (at most 512)");
  spectra->add_option("--config", spec_config, "R, AR+Sine+ZN, AR+Reblur+ZN, ...");
  spectra->add_option("--precond", spec_precond, "I, D, X, D_X or X_D");
  spectra->add_option("--alpha", spec_alpha, "Regularization parameter");
  spectra->add_option("--beta", spec_beta, "TV smoothing");
  spectra->add_option("--nsr", spec_nsr, "Noise-to-signal ratio");
  spectra->add_option("--seed", spec_seed, "Noise seed");
  spectra->add_option("--bins", spec_bins, "Histogram bins");
  spectra->add_option("--out", spec_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  if (!verbose) {
    set_log_sink({});
  }

  try {
    if (*gen) {
      return run_gen(gen_problem, gen_dir);
    }
    if (*rest) {
      return run_restore(restore_problem, restore_opts, restore_dir);
    }
    if (*sweep) {
      return run_sweep_cmd(sweep_spec, sweep_dir, sweep_quiet);
    }
    return run_spectra(spec_n, spec_config, spec_precond, spec_alpha, spec_beta, spec_nsr,
                       spec_seed, spec_bins, spec_out);
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  }
}
