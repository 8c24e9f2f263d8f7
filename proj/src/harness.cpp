#include "tvdeblur/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "tvdeblur/io.hpp"

namespace tvdeblur {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) {
      out.push_back(piece);
    }
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ConfigurationError("sweep spec: bad number '" + s + "' for key '" + key + "'");
  }
  return value;
}

long long to_integer(const std::string& s, const std::string& key) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigurationError("sweep spec: bad integer '" + s + "' for key '" + key + "'");
  }
  return value;
}

std::string file_token(std::string_view s) {
  std::string out;
  for (char c : s) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
  }
  return out;
}

std::string number_token(double x) {
  std::ostringstream s;
  s << x;
  return file_token(s.str());
}

double norm2(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

std::vector<double> crop_2d(std::span<const double> ext, std::size_t full, std::size_t pad,
                            std::size_t n) {
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = ext[(i + pad) * full + (j + pad)];
    }
  }
  return out;
}

} // namespace

double NormalGenerator::uniform() {
  // 53 random bits mapped to (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalGenerator::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t default_half_width_1d(std::size_t n) { return (n + 19) / 20; }
std::size_t default_half_width_2d(std::size_t n) { return (n + 15) / 16; }

double canonical_signal(double x) {
  if (x < 0.2) {
    return 0.3 + 2.0 * x;
  }
  if (x < 0.35) {
    return 1.5;
  }
  if (x < 0.45) {
    return 0.3;
  }
  if (x < 0.7) {
    return 0.3 + 0.9 * (x - 0.45) / 0.25;
  }
  if (x < 0.8) {
    return 0.6 + (x - 0.7);
  }
  return 0.9 - 2.0 * (x - 0.8);
}

std::vector<double> Benchmark1D::field_of_view() const {
  return {extended.begin() + static_cast<long>(m), extended.begin() + static_cast<long>(m + n)};
}

std::vector<double> Benchmark1D::field_positions() const {
  return {positions.begin() + static_cast<long>(m), positions.begin() + static_cast<long>(m + n)};
}

Benchmark1D gen_signal_1d(std::size_t n, std::size_t m) {
  if (n < 32) {
    throw InvalidArgument("gen_signal_1d: need n >= 32");
  }
  if (4 * m >= n) {
    throw InvalidArgument("gen_signal_1d: need m < n / 4");
  }
  Benchmark1D b;
  b.n = n;
  b.m = m;
  const std::size_t total = n + 2 * m;
  b.extended.resize(total);
  b.positions.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    b.positions[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(total);
    b.extended[i] = canonical_signal(b.positions[i]);
  }
  return b;
}

std::vector<double> Benchmark2D::field_of_view() const { return crop_2d(extended, n + 2 * m, m, n); }

Benchmark2D gen_image_2d(std::size_t n, std::size_t m) {
  if (n < 16) {
    throw InvalidArgument("gen_image_2d: need n >= 16");
  }
  if (4 * m >= n) {
    throw InvalidArgument("gen_image_2d: need m < n / 4");
  }
  Benchmark2D b;
  b.n = n;
  b.m = m;
  const std::size_t total = n + 2 * m;
  b.extended.resize(total * total);
  for (std::size_t i = 0; i < total; ++i) {
    const double y = (static_cast<double>(i) + 0.5) / static_cast<double>(total);
    for (std::size_t j = 0; j < total; ++j) {
      const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(total);
      double value = 0.25 + 0.35 * x + 0.2 * y;
      const double dx = x - 0.38;
      const double dy = y - 0.42;
      if (dx * dx + dy * dy < 0.2 * 0.2) {
        value += 0.6;
      }
      if (x > 0.62 && x < 0.88 && y > 0.15 && y < 0.55) {
        value -= 0.3;
      }
      b.extended[i * total + j] = value;
    }
  }
  return b;
}

SymmetricPsf out_of_focus_psf(std::size_t m) {
  if (m < 1) {
    throw InvalidArgument("out_of_focus_psf: need m >= 1");
  }
  std::vector<double> h(2 * m + 1, 0.0);
  const double c = 1.0 / static_cast<double>(2 * m - 1);
  for (std::size_t k = 1; k + 1 < h.size(); ++k) {
    h[k] = c;
  }
  return SymmetricPsf::make_1d(std::move(h));
}

SymmetricPsf gaussian_psf(std::size_t m, double sigma) {
  if (m < 1 || !(sigma > 0.0)) {
    throw InvalidArgument("gaussian_psf: need m >= 1 and sigma > 0");
  }
  const long mm = static_cast<long>(m);
  const std::size_t w = 2 * m + 1;
  std::vector<double> h(w * w);
  double sum = 0.0;
  for (long i = -mm; i <= mm; ++i) {
    for (long j = -mm; j <= mm; ++j) {
      const double v = std::exp(-static_cast<double>(i * i + j * j) / (2.0 * sigma * sigma));
      h[(i + mm) * w + (j + mm)] = v;
      sum += v;
    }
  }
  for (double& v : h) {
    v /= sum;
  }
  return SymmetricPsf::make_2d(m, std::move(h));
}

Observation blur_and_observe(std::span<const double> extended, const SymmetricPsf& psf,
                             std::size_t n, double nsr, std::uint64_t seed) {
  if (!(nsr >= 0.0)) {
    throw InvalidArgument("blur_and_observe: nsr must be nonnegative");
  }
  const long m = static_cast<long>(psf.half_width());
  Observation obs;
  if (psf.dim() == 1) {
    if (extended.size() < n || (extended.size() - n) % 2 != 0) {
      throw InvalidArgument("blur_and_observe: extended length must be n + 2p");
    }
    const long pad = static_cast<long>((extended.size() - n) / 2);
    if (pad < m) {
      throw InvalidArgument("blur_and_observe: padding narrower than the PSF");
    }
    obs.truth.assign(extended.begin() + pad, extended.begin() + pad + static_cast<long>(n));
    obs.blurred.assign(n, 0.0);
    for (long i = 0; i < static_cast<long>(n); ++i) {
      double s = 0.0;
      for (long j = -m; j <= m; ++j) {
        s += psf.at(j) * extended[pad + i - j];
      }
      obs.blurred[i] = s;
    }
  } else {
    const auto full = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(extended.size()))));
    if (full * full != extended.size() || full < n || (full - n) % 2 != 0) {
      throw InvalidArgument("blur_and_observe: extended image must be (n + 2p)^2");
    }
    const long pad = static_cast<long>((full - n) / 2);
    if (pad < m) {
      throw InvalidArgument("blur_and_observe: padding narrower than the PSF");
    }
    const long f = static_cast<long>(full);
    obs.truth = crop_2d(extended, full, static_cast<std::size_t>(pad), n);
    obs.blurred.assign(n * n, 0.0);
    for (long i = 0; i < static_cast<long>(n); ++i) {
      for (long j = 0; j < static_cast<long>(n); ++j) {
        double s = 0.0;
        for (long a = -m; a <= m; ++a) {
          for (long b = -m; b <= m; ++b) {
            s += psf.at(a, b) * extended[(pad + i - a) * f + (pad + j - b)];
          }
        }
        obs.blurred[i * static_cast<long>(n) + j] = s;
      }
    }
  }
  obs.observed = obs.blurred;
  if (nsr > 0.0) {
    NormalGenerator gen(seed);
    std::vector<double> g(obs.blurred.size());
    for (double& x : g) {
      x = gen();
    }
    const double scale = nsr * norm2(obs.blurred) / norm2(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      obs.observed[k] += scale * g[k];
    }
    obs.noise_norm = scale * norm2(g);
  }
  return obs;
}

double rre(std::span<const double> restored, std::span<const double> truth) {
  require_size(restored, truth.size(), "rre");
  const double t = norm2(truth);
  if (t == 0.0) {
    throw InvalidArgument("rre: ground truth has zero norm");
  }
  double e = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    e += (restored[k] - truth[k]) * (restored[k] - truth[k]);
  }
  return std::sqrt(e) / t;
}

BcConfiguration parse_bc_configuration(std::string_view name) {
  using BC = BoundaryCondition;
  using DB = DiffusionBoundary;
  const std::string key(name);
  if (key == "R" || key == "Reflective") {
    return {"R", BC::Reflective, DB::ZeroNeumann, Formulation::Normal};
  }
  if (key == "AR+Sine+ZN") {
    return {key, BC::AntiReflective, DB::ZeroNeumann, Formulation::Normal};
  }
  if (key == "AR+Sine+AR") {
    return {key, BC::AntiReflective, DB::AntiReflective, Formulation::Normal};
  }
  if (key == "AR+Reblur+ZN") {
    return {key, BC::AntiReflective, DB::ZeroNeumann, Formulation::Reblur};
  }
  if (key == "AR+Reblur+AR") {
    return {key, BC::AntiReflective, DB::AntiReflective, Formulation::Reblur};
  }
  if (key == "Zero") {
    return {key, BC::ZeroDirichlet, DB::ZeroNeumann, Formulation::Normal};
  }
  if (key == "Periodic") {
    return {key, BC::Periodic, DB::ZeroNeumann, Formulation::Normal};
  }
  throw ConfigurationError("unknown BC configuration '" + key +
                           "' (expected R, AR+Sine+ZN, AR+Sine+AR, AR+Reblur+ZN, AR+Reblur+AR, "
                           "Zero or Periodic)");
}

RestorationConfig make_config(const BcConfiguration& bc, PreconditionerChoice choice, double alpha,
                              double beta, int dim) {
  RestorationConfig c = RestorationConfig::defaults(dim);
  c.bc_h = bc.bc_h;
  c.bc_l = bc.bc_l;
  c.formulation = bc.formulation;
  c.preconditioner = choice;
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

SweepSpec parse_sweep_spec(std::istream& in) {
  SweepSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("sweep spec line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto items = split_list(value);
    if (items.empty()) {
      throw ConfigurationError("sweep spec: empty value for '" + key + "'");
    }
    auto single = [&]() -> const std::string& {
      if (items.size() != 1) {
        throw ConfigurationError("sweep spec: '" + key + "' takes a single value");
      }
      return items.front();
    };
    if (key == "dim") {
      const auto d = to_integer(single(), key);
      if (d != 1 && d != 2) {
        throw ConfigurationError("sweep spec: dim must be 1 or 2");
      }
      spec.dim = static_cast<int>(d);
    } else if (key == "n") {
      spec.n.clear();
      for (const auto& s : items) {
        const auto v = to_integer(s, key);
        if (v <= 0) {
          throw ConfigurationError("sweep spec: n must be positive");
        }
        spec.n.push_back(static_cast<std::size_t>(v));
      }
    } else if (key == "alpha" || key == "beta") {
      auto& list = key == "alpha" ? spec.alpha : spec.beta;
      list.clear();
      for (const auto& s : items) {
        const double v = to_double(s, key);
        if (!(v > 0.0)) {
          throw ConfigurationError("sweep spec: " + key + " values must be positive");
        }
        list.push_back(v);
      }
    } else if (key == "configs") {
      spec.configs.clear();
      for (const auto& s : items) {
        spec.configs.push_back(parse_bc_configuration(s).name);
      }
    } else if (key == "preconditioners") {
      spec.preconditioners.clear();
      for (const auto& s : items) {
        try {
          spec.preconditioners.push_back(parse_preconditioner_choice(s));
        } catch (const InvalidArgument& e) {
          throw ConfigurationError(std::string("sweep spec: ") + e.what());
        }
      }
    } else if (key == "nsr") {
      spec.nsr = to_double(single(), key);
      if (spec.nsr < 0.0) {
        throw ConfigurationError("sweep spec: nsr must be nonnegative");
      }
    } else if (key == "seed") {
      const auto s = to_integer(single(), key);
      if (s < 0) {
        throw ConfigurationError("sweep spec: seed must be nonnegative");
      }
      spec.seed = static_cast<std::uint64_t>(s);
    } else if (key == "psf_m") {
      const auto m = to_integer(single(), key);
      if (m < 1) {
        throw ConfigurationError("sweep spec: psf_m must be >= 1");
      }
      spec.psf_half_width = static_cast<std::size_t>(m);
    } else if (key == "sigma") {
      spec.sigma = to_double(single(), key);
    } else if (key == "fp_tol") {
      spec.fp_tol = to_double(single(), key);
    } else if (key == "fp_max") {
      spec.fp_max = static_cast<int>(to_integer(single(), key));
    } else if (key == "inner_tol") {
      spec.inner_tol = to_double(single(), key);
    } else if (key == "inner_max") {
      spec.inner_max = static_cast<int>(to_integer(single(), key));
    } else if (key == "outputs") {
      const auto& v = single();
      if (v == "true" || v == "1" || v == "yes") {
        spec.write_outputs = true;
      } else if (v == "false" || v == "0" || v == "no") {
        spec.write_outputs = false;
      } else {
        throw ConfigurationError("sweep spec: outputs must be true or false");
      }
    } else {
      throw ConfigurationError("sweep spec: unknown key '" + key + "'");
    }
  }
  return spec;
}

namespace {

struct Problem {
  SymmetricPsf psf;
  Observation obs;
  std::vector<double> positions;  // 1D only
};

Problem make_problem(const SweepSpec& spec, std::size_t n) {
  if (spec.dim == 1) {
    const std::size_t m = spec.psf_half_width.value_or(default_half_width_1d(n));
    const Benchmark1D bench = gen_signal_1d(n, m);
    SymmetricPsf psf = out_of_focus_psf(m);
    Observation obs = blur_and_observe(bench.extended, psf, n, spec.nsr, spec.seed);
    return {std::move(psf), std::move(obs), bench.field_positions()};
  }
  const std::size_t m = spec.psf_half_width.value_or(default_half_width_2d(n));
  const Benchmark2D bench = gen_image_2d(n, m);
  SymmetricPsf psf = gaussian_psf(m, spec.sigma.value_or(static_cast<double>(m) / 2.0));
  Observation obs = blur_and_observe(bench.extended, psf, n, spec.nsr, spec.seed);
  return {std::move(psf), std::move(obs), {}};
}

void write_restored(const std::filesystem::path& dir, const SweepCell& cell, const Problem& p,
                    int dim) {
  const std::string stem = "restored_" + file_token(cell.config) + "_" +
                           file_token(cell.preconditioner) + "_n" + std::to_string(cell.n) + "_b" +
                           number_token(cell.beta) + "_a" + number_token(cell.alpha);
  if (dim == 1) {
    std::ofstream out(dir / (stem + ".csv"));
    write_signal_csv(out, p.positions, cell.report.restored);
    return;
  }
  const auto [lo, hi] = std::minmax_element(p.obs.truth.begin(), p.obs.truth.end());
  write_pgm_file(dir / (stem + ".pgm"), to_pgm(cell.report.restored, cell.n, *lo, *hi));
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, const std::optional<std::filesystem::path>& out_dir,
                      const SweepProgress& progress) {
  if (spec.n.empty() || spec.alpha.empty() || spec.beta.empty() || spec.configs.empty() ||
      spec.preconditioners.empty()) {
    throw ConfigurationError("sweep spec: every sweep list needs at least one entry");
  }
  // Reject inconsistent cells before any compute.
  for (const auto& name : spec.configs) {
    const BcConfiguration bc = parse_bc_configuration(name);
    for (auto choice : spec.preconditioners) {
      validate(make_config(bc, choice, spec.alpha.front(), spec.beta.front(), spec.dim));
    }
  }
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
  }

  SweepResult result;
  for (std::size_t n : spec.n) {
    const Problem problem = make_problem(spec, n);
    for (const auto& name : spec.configs) {
      const BcConfiguration bc = parse_bc_configuration(name);
      for (double beta : spec.beta) {
        for (double alpha : spec.alpha) {
          for (auto choice : spec.preconditioners) {
            RestorationConfig config = make_config(bc, choice, alpha, beta, spec.dim);
            if (spec.fp_tol) {
              config.fp_tol = *spec.fp_tol;
            }
            if (spec.fp_max) {
              config.fp_max = *spec.fp_max;
            }
            if (spec.inner_tol) {
              config.inner.tol = *spec.inner_tol;
            }
            if (spec.inner_max) {
              config.inner.max_iterations = *spec.inner_max;
            }
            SweepCell cell;
            cell.config = bc.name;
            cell.alpha = alpha;
            cell.beta = beta;
            cell.n = n;
            try {
              cell.preconditioner = preconditioner_label(config);
              cell.report = restore(problem.obs.observed, problem.psf, config, problem.obs.truth);
              cell.fp_steps = cell.report.fp_steps;
              cell.average_inner = cell.report.average_inner;
              cell.rre = cell.report.rre.value_or(std::nan(""));
              cell.ok = !cell.report.aborted && cell.report.all_inner_converged();
              if (cell.report.aborted) {
                cell.failure = cell.report.failure;
              } else if (!cell.ok) {
                cell.failure = "inner solver did not converge";
              }
            } catch (const std::exception& e) {
              cell.ok = false;
              cell.failure = e.what();
              cell.rre = std::nan("");
            }
            if (out_dir && spec.write_outputs && !cell.report.restored.empty()) {
              write_restored(*out_dir, cell, problem, spec.dim);
            }
            if (progress) {
              progress(cell);
            }
            result.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }

  // α_opt per (config, preconditioner, beta, n), in first-seen order.
  std::vector<std::tuple<std::string, std::string, double, std::size_t>> keys;
  for (const auto& c : result.cells) {
    const auto key = std::make_tuple(c.config, c.preconditioner, c.beta, c.n);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }
  for (const auto& key : keys) {
    RreOptimum best{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                    std::nan(""), std::nan("")};
    for (const auto& c : result.cells) {
      if (std::make_tuple(c.config, c.preconditioner, c.beta, c.n) != key || !std::isfinite(c.rre)) {
        continue;
      }
      if (!std::isfinite(best.min_rre) || c.rre < best.min_rre) {
        best.min_rre = c.rre;
        best.alpha_opt = c.alpha;
      }
    }
    result.optima.push_back(best);
  }

  if (out_dir) {
    std::ofstream table(*out_dir / "table.csv");
    write_table_csv(table, result);
    std::ofstream curve(*out_dir / "rre.csv");
    write_rre_csv(curve, result);
    std::ofstream optimum(*out_dir / "optimum.csv");
    write_optimum_csv(optimum, result);
  }
  return result;
}

void write_table_csv(std::ostream& out, const SweepResult& result) {
  out << "config,alpha,beta,n,fp_steps,avg_inner,rre\n";
  for (const auto& c : result.cells) {
    out << csv_field(c.config + "/" + c.preconditioner) << ',' << format_double(c.alpha) << ','
        << format_double(c.beta) << ',' << c.n << ',' << c.fp_steps << ','
        << (c.ok ? format_double(c.average_inner) : std::string("*")) << ','
        << (std::isfinite(c.rre) ? format_double(c.rre) : std::string("*")) << '\n';
  }
}

void write_rre_csv(std::ostream& out, const SweepResult& result) {
  out << "config,preconditioner,beta,n,alpha,rre\n";
  for (const auto& c : result.cells) {
    out << csv_field(c.config) << ',' << csv_field(c.preconditioner) << ','
        << format_double(c.beta) << ',' << c.n << ',' << format_double(c.alpha) << ','
        << (std::isfinite(c.rre) ? format_double(c.rre) : std::string("*")) << '\n';
  }
}

void write_optimum_csv(std::ostream& out, const SweepResult& result) {
  out << "config,preconditioner,beta,n,alpha_opt,min_rre\n";
  for (const auto& o : result.optima) {
    const bool ok = std::isfinite(o.min_rre);
    out << csv_field(o.config) << ',' << csv_field(o.preconditioner) << ','
        << format_double(o.beta) << ',' << o.n << ','
        << (ok ? format_double(o.alpha_opt) : std::string("*")) << ','
        << (ok ? format_double(o.min_rre) : std::string("*")) << '\n';
  }
}

SpectrumReport spectral_diagnostic(const BcConfiguration& bc, PreconditionerChoice choice,
                                   std::size_t n, double alpha, double beta, double nsr,
                                   std::uint64_t seed, int bins) {
  if (n > 512) {
    throw InvalidArgument("spectral_diagnostic: dense eigen-analysis limited to n <= 512");
  }
  if (bins < 1) {
    throw InvalidArgument("spectral_diagnostic: need at least one bin");
  }
  RestorationConfig config = make_config(bc, choice, alpha, beta, 1);
  validate(config);
  const std::size_t m = default_half_width_1d(n);
  const Benchmark1D bench = gen_signal_1d(n, m);
  const SymmetricPsf psf = out_of_focus_psf(m);
  const Observation obs = blur_and_observe(bench.extended, psf, n, nsr, seed);
  const BlurOperator blur(psf, config.bc_h, n);
  const Shape shape{1, n};
  const SparseMatrix l = DiffusionOperator(obs.observed, shape, beta, config.bc_l).assemble();

  Eigen::MatrixXd a;
  Eigen::MatrixXd minv;
  if (choice == PreconditionerChoice::ScaledSystem) {
    const ScaledSystem scaled(blur, l, alpha, config.formulation);
    a = dense_from_action(n, [&](auto in, auto out) { scaled.apply(in, out); });
  } else {
    const SystemOperator system(blur, l, alpha, config.formulation);
    a = dense_from_action(n, [&](auto in, auto out) { system.apply(in, out); });
  }
  switch (choice) {
  case PreconditionerChoice::None:
    minv = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    break;
  case PreconditionerChoice::DiagOnly: {
    const auto d = scaling_diagonal(l, alpha);
    minv = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      minv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0 / d[k];
    }
    break;
  }
  default: {
    const ScalingVariant variant = choice == PreconditionerChoice::Plain ? ScalingVariant::Plain
                                   : choice == PreconditionerChoice::ScaledOutside
                                       ? ScalingVariant::ScaledOutside
                                       : ScalingVariant::ScaledSystem;
    const FactoredPreconditioner x =
        assemble_preconditioner(PreconditionerKind{implied_family(config), variant}, blur, l, alpha);
    minv = dense_from_action(n, [&](auto in, auto out) { x.apply_inverse(in, out); });
  }
  }

  const Eigen::EigenSolver<Eigen::MatrixXd> solver(minv * a, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_diagnostic: eigenvalue computation failed");
  }
  SpectrumReport report;
  report.preconditioner = preconditioner_label(config);
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    report.real_parts.push_back(ev[k].real());
    report.max_imag = std::max(report.max_imag, std::abs(ev[k].imag()));
  }
  std::sort(report.real_parts.begin(), report.real_parts.end());
  const double lo = report.real_parts.front();
  const double hi = report.real_parts.back();
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  report.bin_counts.assign(static_cast<std::size_t>(bins), 0);
  for (int b = 0; b <= bins; ++b) {
    report.bin_edges.push_back(lo + width * b);
  }
  int near = 0;
  for (double x : report.real_parts) {
    const int b = std::min(bins - 1, static_cast<int>((x - lo) / width));
    ++report.bin_counts[static_cast<std::size_t>(b)];
    if (std::abs(x - 1.0) < 0.1) {
      ++near;
    }
  }
  report.fraction_near_one = static_cast<double>(near) / static_cast<double>(n);
  return report;
}

void write_spectrum(std::ostream& out, const SpectrumReport& report) {
  out << "# preconditioner " << report.preconditioner << '\n';
  out << "# max |imag| " << format_double(report.max_imag) << '\n';
  out << "# fraction within 0.1 of 1: " << format_double(report.fraction_near_one) << '\n';
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < report.bin_counts.size(); ++b) {
    out << format_double(report.bin_edges[b]) << ',' << format_double(report.bin_edges[b + 1])
        << ',' << report.bin_counts[b] << '\n';
  }
}

} // namespace tvdeblur
