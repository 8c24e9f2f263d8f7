#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvdeblur/pipeline.hpp"
#include "tvdeblur/psf.hpp"

namespace tvdeblur {

/// Standard normal samples from std::mt19937_64 (fully specified by the
/// standard) through the Box-Muller transform, so seeds reproduce across
/// platforms and standard libraries.
class NormalGenerator {
public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}
  double operator()();

private:
  double uniform();  // (0, 1]
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Out-of-focus half-width ceil(n / 20) used by the 1D benchmark.
std::size_t default_half_width_1d(std::size_t n);
/// Gaussian half-width ceil(n / 16) for the 2D benchmark; sigma = m / 2.
std::size_t default_half_width_2d(std::size_t n);

/// Piecewise test signal on [0, 1]: a rising slope, a box, a plateau, a
/// ramp, two drops and a falling slope. Nonzero and sloped at both ends.
double canonical_signal(double x);

/// Extended ground truth of length n + 2m sampled at (i + 1/2) / (n + 2m);
/// the field of view is the central n samples.
struct Benchmark1D {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> extended;
  std::vector<double> positions;

  std::vector<double> field_of_view() const;
  std::vector<double> field_positions() const;
};

Benchmark1D gen_signal_1d(std::size_t n, std::size_t m);

/// Synthetic image on [0, 1]^2 (disk, rectangle, linear background),
/// nonzero on every border; (n + 2m)^2 row-major samples.
struct Benchmark2D {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> extended;

  std::vector<double> field_of_view() const;
};

Benchmark2D gen_image_2d(std::size_t n, std::size_t m);

/// h_i = c for |i| < m, zero at |i| = m, normalized.
SymmetricPsf out_of_focus_psf(std::size_t m);
/// h_ij ∝ exp(-(i^2 + j^2) / (2 sigma^2)) on [-m, m]^2, normalized.
SymmetricPsf gaussian_psf(std::size_t m, double sigma);

struct Observation {
  std::vector<double> truth;     // field of view of the extended truth
  std::vector<double> blurred;   // exact blur, no BC assumption
  std::vector<double> observed;  // blurred + noise
  double noise_norm = 0.0;
};

/// Convolves the extended truth (length n + 2p or (n + 2p)^2 with p >= m)
/// with the PSF, crops to the field of view and adds
/// eta = nsr ||Hu|| g / ||g||, g standard normal from `seed`.
Observation blur_and_observe(std::span<const double> extended, const SymmetricPsf& psf,
                             std::size_t n, double nsr, std::uint64_t seed);

/// ||u - u_true|| / ||u_true||.
double rre(std::span<const double> restored, std::span<const double> truth);

/// Blur BC, diffusion BC and formulation of one benchmark column, named
/// like "R", "AR+Sine+ZN", "AR+Reblur+ZN", "AR+Reblur+AR".
struct BcConfiguration {
  std::string name;
  BoundaryCondition bc_h = BoundaryCondition::Reflective;
  DiffusionBoundary bc_l = DiffusionBoundary::ZeroNeumann;
  Formulation formulation = Formulation::Normal;
};

/// Also accepts "Zero" and "Periodic" (normal equations, zero-Neumann L).
BcConfiguration parse_bc_configuration(std::string_view name);
RestorationConfig make_config(const BcConfiguration& bc, PreconditionerChoice choice, double alpha,
                              double beta, int dim);

struct SweepSpec {
  int dim = 1;
  std::vector<std::size_t> n{203};
  std::vector<double> alpha{1e-3};
  std::vector<double> beta{0.1};
  std::vector<std::string> configs{"R"};
  std::vector<PreconditionerChoice> preconditioners{PreconditionerChoice::ScaledSystem};
  double nsr = 0.01;
  std::uint64_t seed = 1;
  std::optional<std::size_t> psf_half_width;
  std::optional<double> sigma;
  std::optional<double> fp_tol;
  std::optional<int> fp_max;
  std::optional<double> inner_tol;
  std::optional<int> inner_max;
  bool write_outputs = false;
};

/// Text format: one `key = value` per line, lists comma separated, '#'
/// comments. Keys: dim, n, alpha, beta, configs, preconditioners, nsr,
/// seed, psf_m, sigma, fp_tol, fp_max, inner_tol, inner_max, outputs.
/// Throws ConfigurationError on unknown keys or malformed values.
SweepSpec parse_sweep_spec(std::istream& in);

struct SweepCell {
  std::string config;
  std::string preconditioner;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
  int fp_steps = 0;
  double average_inner = 0.0;
  double rre = 0.0;
  bool ok = true;  // false: aborted or some inner solve did not converge
  std::string failure;
  RestorationReport report;
};

struct RreOptimum {
  std::string config;
  std::string preconditioner;
  double beta = 0.0;
  std::size_t n = 0;
  double alpha_opt = 0.0;
  double min_rre = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<RreOptimum> optima;
};

using SweepProgress = std::function<void(const SweepCell&)>;

/// Runs every (n, config, beta, alpha, preconditioner) cell in that nesting
/// order. Cell failures are recorded, never propagated. Writes table.csv,
/// rre.csv and optimum.csv (plus restored outputs if requested) when
/// `out_dir` is given.
SweepResult run_sweep(const SweepSpec& spec,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                      const SweepProgress& progress = {});

/// Header config,alpha,beta,n,fp_steps,avg_inner,rre; avg_inner is "*" for
/// failed cells.
void write_table_csv(std::ostream& out, const SweepResult& result);
void write_rre_csv(std::ostream& out, const SweepResult& result);
void write_optimum_csv(std::ostream& out, const SweepResult& result);

/// Eigenvalues of X^{-1} A for the 1D benchmark system at a small n.
struct SpectrumReport {
  std::string preconditioner;
  std::vector<double> real_parts;  // ascending
  double max_imag = 0.0;
  std::vector<double> bin_edges;
  std::vector<int> bin_counts;
  double fraction_near_one = 0.0;  // within 0.1 of 1
};

SpectrumReport spectral_diagnostic(const BcConfiguration& bc, PreconditionerChoice choice,
                                   std::size_t n, double alpha, double beta, double nsr,
                                   std::uint64_t seed, int bins = 20);
void write_spectrum(std::ostream& out, const SpectrumReport& report);

} // namespace tvdeblur
