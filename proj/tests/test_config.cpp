#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmnls/config.hpp"

using namespace dmnls;

TEST_CASE("minimal config fills documented defaults") {
  const StudyConfig cfg = parse_config_text("physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\n");
  CHECK(cfg.alpha == 2.0);
  CHECK(cfg.d_av == 1.0);
  CHECK(cfg.horizon == 1.0);
  CHECK(cfg.half_width == 50.0);
  CHECK(cfg.num_points == 1024);
  CHECK(cfg.n_sub == 16);
  CHECK(cfg.n_r == 24);
  CHECK(cfg.quad_kind == QuadratureKind::gauss_legendre);
  REQUIRE(cfg.epsilons.size() == 4);
  CHECK(cfg.epsilons[0] == 0.2);
  CHECK(cfg.epsilons[3] == 0.025);
  CHECK(std::holds_alternative<GaussianSpec>(cfg.initial));
}

TEST_CASE("section headers and dotted keys are equivalent") {
  const std::string dotted = "physics.alpha = 2\nphysics.d_av = -1\nstudy.M = 0.5\ngrid.N = 256\n";
  const std::string sectioned =
      "[physics]\nalpha = 2\nd_av = -1\n\n[study]\nM = 0.5  # horizon\n\n[grid]\nN = 256\n";
  const StudyConfig a = parse_config_text(dotted);
  const StudyConfig b = parse_config_text(sectioned);
  CHECK(canonical_config_text(a) == canonical_config_text(b));
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("validation errors carry the key path") {
  const auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config_text(text);
      FAIL_CHECK("expected ConfigError for: " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("physics.alpha = -1\nphysics.d_av = 1\nstudy.M = 1\n", "physics.alpha");
  expect_error("physics.alpha = 2\nphysics.d_av = 1\n", "study.M");
  expect_error("physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\nstudy.bogus = 3\n", "study.bogus");
  expect_error("physics.alpha = two\nphysics.d_av = 1\nstudy.M = 1\n", "physics.alpha");
  expect_error("physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\ngrid.N = 255\n", "even");
  expect_error("physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\nstudy.epsilons = 0.1,0.2\n", "descending");
  expect_error("physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\nquadrature.kind = lobatto\n", "quadrature.kind");
  expect_error("physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\nstepper.dealias = maybe\n", "stepper.dealias");
  expect_error("alpha = 2\n", "outside any section");
}

TEST_CASE("overrides replace file values") {
  const std::string text = "physics.alpha = 2\nphysics.d_av = 1\nstudy.M = 1\n";
  const StudyConfig cfg = parse_config_text(text, {"physics.alpha=3", "study.epsilons=0.1,0.05"});
  CHECK(cfg.alpha == 3.0);
  REQUIRE(cfg.epsilons.size() == 2);
  CHECK(cfg.epsilons[0] == 0.1);
  CHECK_THROWS_AS(parse_config_text(text, {"notakey"}), ConfigError);
  CHECK_THROWS_AS(parse_config_text(text, {"plain=1"}), ConfigError);
}

TEST_CASE("initial datum specs parse and re-render") {
  CHECK(std::holds_alternative<SechSpec>(parse_initial("sech(2, 1.5)")));
  CHECK(std::holds_alternative<GaussianSpec>(parse_initial("gaussian")));
  const auto sm = std::get<SingleModeSpec>(parse_initial("single_mode(1, 0.25)"));
  CHECK(sm.wavenumber == 0.25);
  CHECK_THROWS_AS(parse_initial("vortex(1)"), ConfigError);
  CHECK_THROWS_AS(parse_initial("gaussian(1,2,3,4,5,6)"), ConfigError);
  CHECK_THROWS_AS(parse_initial("gaussian(1,x)"), ConfigError);

  const auto g = std::get<GaussianSpec>(parse_initial("gaussian(2, 1.5, 0.25, -1, 4)"));
  CHECK(g.amplitude == 2.0);
  CHECK(g.width == 1.5);
  CHECK(g.chirp == 0.25);
  CHECK(g.center == -1.0);
  CHECK(g.carrier == 4.0);
  CHECK(format_initial(g) == "gaussian(2,1.5,0.25,-1,4)");
  // 17-digit rendering is faithful even for non-representable decimals
  const auto h = std::get<GaussianSpec>(parse_initial(format_initial(GaussianSpec{1, 1, 0.3, 0, 0})));
  CHECK(h.chirp == 0.3);
}

TEST_CASE("canonical text round-trips losslessly") {
  StudyConfig cfg = parse_config_text(
      "physics.alpha = 2.5\nphysics.d_av = -0.75\nstudy.M = 1.25\n"
      "grid.L = 42.5\ngrid.N = 512\nstepper.n_sub = 32\nstepper.avg_dt = 0.0005\n"
      "quadrature.kind = composite_simpson\nquadrature.N_r = 25\n"
      "study.epsilons = 0.3,0.17,0.02\nstudy.initial = sech(1.25,0.5)\n"
      "study.n_out = 40\nstudy.seed = 91\nstudy.trials = 150\nstepper.dealias = true\n"
      "stepper.h1_cap_factor = 500\n");
  const StudyConfig back = parse_config_text(canonical_config_text(cfg));
  CHECK(canonical_config_text(back) == canonical_config_text(cfg));
  CHECK(config_hash(back) == config_hash(cfg));

  StudyConfig tweaked = cfg;
  tweaked.seed = 92;
  CHECK(config_hash(tweaked) != config_hash(cfg));
}

TEST_CASE("missing file is a config error") { CHECK_THROWS_AS(parse_config("/nonexistent/x.cfg"), ConfigError); }
