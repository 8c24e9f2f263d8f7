#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "tvdeblur/harness.hpp"
#include "tvdeblur/io.hpp"

using namespace tvdeblur;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    out.push_back(line);
  }
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tvdeblur_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("benchmark signal") {
  SUBCASE("shape and field of view") {
    const auto b = gen_signal_1d(203, default_half_width_1d(203));
    CHECK(b.m == 11);
    CHECK(b.extended.size() == 225);
    CHECK(b.field_of_view().size() == 203);
    CHECK(b.field_positions().size() == 203);
    CHECK(b.field_of_view().front() != 0.0);
    CHECK(b.field_of_view().back() != 0.0);
  }
  SUBCASE("deterministic") {
    CHECK(gen_signal_1d(100, 5).extended == gen_signal_1d(100, 5).extended);
  }
  SUBCASE("sloped at both ends") {
    CHECK(canonical_signal(0.0) != canonical_signal(0.05));
    CHECK(canonical_signal(1.0) != canonical_signal(0.95));
  }
  SUBCASE("limits") {
    CHECK_THROWS_AS(gen_signal_1d(16, 1), InvalidArgument);
    CHECK_THROWS_AS(gen_signal_1d(64, 16), InvalidArgument);
  }
  SUBCASE("2D image") {
    const auto img = gen_image_2d(32, 2);
    CHECK(img.extended.size() == 36 * 36);
    const auto fov = img.field_of_view();
    CHECK(fov.size() == 32 * 32);
    for (std::size_t k = 0; k < 32; ++k) {
      CHECK(fov[k] != 0.0);
      CHECK(fov[31 * 32 + k] != 0.0);
    }
  }
}

TEST_CASE("benchmark PSFs") {
  SUBCASE("out of focus") {
    const auto h = out_of_focus_psf(2);
    CHECK(h.half_width() == 2);
    CHECK(h.at(2) == 0.0);
    CHECK(h.at(-2) == 0.0);
    for (long i = -1; i <= 1; ++i) {
      CHECK(h.at(i) == doctest::Approx(1.0 / 3.0));
    }
    CHECK(default_half_width_1d(203) == 11);
    CHECK(default_half_width_2d(64) == 4);
  }
  SUBCASE("Gaussian") {
    const auto h = gaussian_psf(2, 1.0);
    double sum = 0.0;
    for (long i = -2; i <= 2; ++i) {
      for (long j = -2; j <= 2; ++j) {
        sum += std::exp(-(i * i + j * j) / 2.0);
      }
    }
    CHECK(h.at(1, -2) == doctest::Approx(std::exp(-2.5) / sum).epsilon(1e-14));
    CHECK(h.at(0, 0) == doctest::Approx(1.0 / sum).epsilon(1e-14));
    const auto narrow = gaussian_psf(2, 1e-3);
    CHECK(narrow.at(0, 0) == doctest::Approx(1.0));
  }
}

TEST_CASE("observation model") {
  const std::size_t n = 64;
  const auto b = gen_signal_1d(n, 4);
  const auto psf = out_of_focus_psf(4);
  SUBCASE("no noise") {
    const auto obs = blur_and_observe(b.extended, psf, n, 0.0, 1);
    CHECK(obs.observed == obs.blurred);
    CHECK(obs.noise_norm == 0.0);
    // The exact blur sees the true data beyond the field of view.
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (long j = -4; j <= 4; ++j) {
        s += psf.at(j) * b.extended[4 + i - j];
      }
      CHECK(obs.blurred[i] == doctest::Approx(s).epsilon(1e-15));
    }
  }
  SUBCASE("noise level and determinism") {
    const auto a = blur_and_observe(b.extended, psf, n, 0.01, 7);
    const auto c = blur_and_observe(b.extended, psf, n, 0.01, 7);
    const auto d = blur_and_observe(b.extended, psf, n, 0.01, 8);
    CHECK(a.observed == c.observed);
    CHECK(a.observed != d.observed);
    double eta = 0.0;
    double hu = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      eta += std::pow(a.observed[k] - a.blurred[k], 2);
      hu += a.blurred[k] * a.blurred[k];
    }
    CHECK(std::sqrt(eta / hu) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(a.noise_norm == doctest::Approx(std::sqrt(eta)).epsilon(1e-12));
  }
  SUBCASE("normal generator") {
    NormalGenerator g(42);
    double mean = 0.0;
    double var = 0.0;
    const int count = 20000;
    for (int k = 0; k < count; ++k) {
      const double x = g();
      mean += x;
      var += x * x;
    }
    mean /= count;
    var = var / count - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));
  }
  SUBCASE("padding too narrow") {
    CHECK_THROWS_AS(blur_and_observe(b.field_of_view(), psf, n - 2, 0.0, 1), InvalidArgument);
  }
}

TEST_CASE("relative restoration error") {
  const std::vector<double> u{3.0, 4.0};
  CHECK(rre(u, u) == 0.0);
  CHECK(rre(std::vector<double>{0.0, 0.0}, u) == 1.0);
  CHECK(rre(std::vector<double>{3.5, 4.0}, u) == doctest::Approx(0.1));
  CHECK_THROWS_AS(rre(u, std::vector<double>{0.0, 0.0}), InvalidArgument);
}

TEST_CASE("BC configurations") {
  const auto r = parse_bc_configuration("R");
  CHECK(r.bc_h == BoundaryCondition::Reflective);
  const auto p = parse_bc_configuration("AR+Reblur+AR");
  CHECK(p.bc_h == BoundaryCondition::AntiReflective);
  CHECK(p.bc_l == DiffusionBoundary::AntiReflective);
  CHECK(p.formulation == Formulation::Reblur);
  const auto m = parse_bc_configuration("AR+Sine+ZN");
  CHECK(m.formulation == Formulation::Normal);
  CHECK(m.bc_l == DiffusionBoundary::ZeroNeumann);
  CHECK_THROWS_AS(parse_bc_configuration("AR+Cosine"), ConfigurationError);
}

TEST_CASE("sweep spec parsing") {
  std::istringstream in(R"(# a comment
dim = 1
n = 64, 128
alpha = 1e-2, 1e-4   # trailing comment
configs = R, AR+Reblur+ZN
preconditioners = I, X_D
nsr = 0.02
seed = 5
inner_max = 50
outputs = true
)");
  const auto spec = parse_sweep_spec(in);
  CHECK(spec.n == std::vector<std::size_t>{64, 128});
  CHECK(spec.alpha == std::vector<double>{1e-2, 1e-4});
  CHECK(spec.configs == std::vector<std::string>{"R", "AR+Reblur+ZN"});
  CHECK(spec.preconditioners ==
        std::vector<PreconditionerChoice>{PreconditionerChoice::None,
                                          PreconditionerChoice::ScaledSystem});
  CHECK(spec.nsr == 0.02);
  CHECK(spec.seed == 5);
  CHECK(spec.inner_max == 50);
  CHECK(spec.write_outputs);

  for (const char* bad : {"speed = 3\n", "n = -4\n", "alpha = abc\n", "dim = 3\n", "n\n",
                          "nsr = 0.1, 0.2\n"}) {
    CAPTURE(bad);
    std::istringstream b(bad);
    CHECK_THROWS_AS(parse_sweep_spec(b), ConfigurationError);
  }
}

TEST_CASE("sweep") {
  SUBCASE("single cell") {
    SweepSpec spec;
    spec.n = {64};
    spec.alpha = {1e-3};
    spec.configs = {"AR+Reblur+ZN"};
    const auto dir = scratch_dir("single");
    spec.write_outputs = true;
    const auto result = run_sweep(spec, dir);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.cells[0].ok);
    std::ifstream table(dir / "table.csv");
    std::stringstream text;
    text << table.rdbuf();
    const auto rows = lines_of(text.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "config,alpha,beta,n,fp_steps,avg_inner,rre");
    CHECK(rows[1].rfind("AR+Reblur+ZN/P_D,0.001,0.1,64,", 0) == 0);
    CHECK(std::filesystem::exists(dir / "rre.csv"));
    CHECK(std::filesystem::exists(dir / "optimum.csv"));
    bool found = false;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      found = found || entry.path().filename().string().rfind("restored_", 0) == 0;
    }
    CHECK(found);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("non-convergent cells are starred") {
    SweepSpec spec;
    spec.n = {64};
    spec.alpha = {1e-4};
    spec.preconditioners = {PreconditionerChoice::None};
    spec.inner_max = 3;
    spec.fp_max = 2;
    const auto result = run_sweep(spec);
    REQUIRE(result.cells.size() == 1);
    CHECK_FALSE(result.cells[0].ok);
    std::ostringstream out;
    write_table_csv(out, result);
    const auto rows = lines_of(out.str());
    CHECK(rows[1].find(",*,") != std::string::npos);
  }
  SUBCASE("alpha optimum") {
    SweepSpec spec;
    spec.n = {64};
    spec.alpha = {1e-1, 1e-3, 1e-7};
    const auto result = run_sweep(spec);
    REQUIRE(result.optima.size() == 1);
    double best = 1e300;
    for (const auto& c : result.cells) {
      best = std::min(best, c.rre);
    }
    CHECK(result.optima[0].min_rre == best);
    std::ostringstream out;
    write_optimum_csv(out, result);
    CHECK(lines_of(out.str()).size() == 2);
  }
  SUBCASE("invalid combinations are rejected before compute") {
    SweepSpec spec;
    spec.configs = {"Periodic"};
    spec.preconditioners = {PreconditionerChoice::Plain};
    CHECK_THROWS_AS(run_sweep(spec), ConfigurationError);
  }
}

TEST_CASE("spectral diagnostic") {
  const auto report = spectral_diagnostic(parse_bc_configuration("R"),
                                          PreconditionerChoice::ScaledOutside, 64, 1e-3, 0.1,
                                          0.01, 1, 10);
  CHECK(report.preconditioner == "D_R");
  CHECK(report.real_parts.size() == 64);
  CHECK(report.bin_counts.size() == 10);
  int total = 0;
  for (int c : report.bin_counts) {
    total += c;
  }
  CHECK(total == 64);
  std::ostringstream out;
  write_spectrum(out, report);
  CHECK_FALSE(out.str().empty());
}

TEST_CASE("PGM") {
  PgmImage img;
  img.width = 3;
  img.height = 2;
  img.pixels = {0, 10, 255, 128, 7, 1};
  SUBCASE("round trip") {
    std::stringstream io;
    write_pgm(io, img);
    CHECK(read_pgm(io) == img);
  }
  SUBCASE("header comments") {
    std::string data = "P5\n# made by hand\n3 2\n# depth\n255\n";
    data.append(img.pixels.begin(), img.pixels.end());
    std::istringstream in(data);
    CHECK(read_pgm(in) == img);
  }
  SUBCASE("bad files") {
    std::istringstream ascii("P2\n3 2\n255\n0 0 0 0 0 0\n");
    CHECK_THROWS_AS(read_pgm(ascii), InvalidArgument);
    std::istringstream truncated("P5\n3 2\n255\nabc");
    CHECK_THROWS_AS(read_pgm(truncated), InvalidArgument);
    std::istringstream deep("P5\n3 2\n65535\n");
    CHECK_THROWS_AS(read_pgm(deep), InvalidArgument);
  }
  SUBCASE("intensity mapping") {
    const std::vector<double> v{-1.0, 0.0, 0.5, 1.0, 2.0, std::nan("")};
    CHECK_THROWS_AS(to_pgm(v, 2, 0.0, 1.0), InvalidArgument);
    const auto p = to_pgm(std::vector<double>{-1.0, 0.0, 0.5, 2.0}, 2, 0.0, 1.0);
    CHECK(p.pixels == std::vector<std::uint8_t>{0, 0, 128, 255});
    const auto back = from_pgm(p, 0.0, 1.0);
    CHECK(back[3] == 1.0);
  }
  SUBCASE("file helpers") {
    const auto dir = scratch_dir("pgm");
    std::filesystem::create_directories(dir);
    write_pgm_file(dir / "a.pgm", img);
    CHECK(read_pgm_file(dir / "a.pgm") == img);
    std::filesystem::remove_all(dir);
    CHECK_THROWS(read_pgm_file(dir / "missing.pgm"));
  }
}

TEST_CASE("CSV") {
  SUBCASE("signal round trip is exact") {
    const std::vector<double> x{0.1, 0.2, 1.0 / 3.0};
    const std::vector<double> u{1e-300, -2.5, 0.1 + 0.2};
    std::stringstream io;
    write_signal_csv(io, x, u);
    std::vector<double> x2;
    std::vector<double> u2;
    read_signal_csv(io, x2, u2);
    CHECK(x2 == x);
    CHECK(u2 == u);
  }
  SUBCASE("values") {
    const std::vector<double> v{1, 2, 3, 4, 5, 6};
    std::stringstream io;
    write_values_csv(io, v, 3);
    CHECK(lines_of(io.str()).size() == 2);
    CHECK(read_values_csv(io) == v);
    CHECK_THROWS_AS(write_values_csv(io, v, 4), InvalidArgument);
  }
  SUBCASE("quoting") {
    CHECK(csv_field("R") == "R");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  }
  SUBCASE("malformed") {
    std::istringstream in("x,u\n1,2,3\n");
    std::vector<double> x;
    std::vector<double> u;
    CHECK_THROWS_AS(read_signal_csv(in, x, u), InvalidArgument);
    std::istringstream bad("1,oops\n");
    CHECK_THROWS_AS(read_values_csv(bad), InvalidArgument);
  }
}
