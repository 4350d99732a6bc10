#include <string>

#include "doctest.h"
#include "lusw/config.hpp"
#include "lusw/error.hpp"

using namespace lusw;

namespace {

const char* kWeak = R"(# weak regime desk case
grid.J = 4
model.regime = untruncated-weak
model.alpha = -0.5
model.beta = -0.5
model.k = 0
model.nu = 0.05
model.eta = 0.05
time.T = 1
time.dt = 0.01
noise.wavenumbers = 1,0; 0,1
)";

std::string rejected_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

std::string with(const std::string& extra) { return std::string(kWeak) + extra + "\n"; }

}  // namespace

TEST_CASE("parse_config: minimal weak-regime document") {
  const auto c = parse_config(kWeak);
  CHECK(c.grid.level == 4);
  CHECK(c.grid.points == 64);
  CHECK(c.model.regime == Regime::untruncated_weak);
  CHECK(c.model.alpha == -0.5);
  CHECK(c.model.k == 0);
  CHECK(c.time.dt == 0.01);
  REQUIRE(c.noise.wavenumbers.size() == 2);
  CHECK(c.noise.wavenumbers[1] == std::array<int, 2>{0, 1});
  CHECK_NOTHROW(parse_config(""));
}

TEST_CASE("parse_config: rule violations name the key and rule") {
  try {
    parse_config("model.regime = untruncated-weak\nmodel.alpha = 0\nmodel.beta = -0.5\nmodel.k = 0\n");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "model.alpha");
    CHECK(std::string(e.what()) == "weak regime requires alpha=beta=-0.5");
  }
  CHECK(rejected_key("time.dt = 0") == "time.dt");
  CHECK(rejected_key("time.dt = -1") == "time.dt");
  CHECK(rejected_key("time.T = 0.55\ntime.dt = 0.1") == "time.T");
  CHECK(rejected_key(with("model.beta = 0")) == "model.beta");
  CHECK(rejected_key("model.regime = untruncated-weak\nmodel.alpha = -0.5\nmodel.beta = -0.5\n") == "model.k");
  CHECK(rejected_key("model.k = 0") == "model.k");
  CHECK(rejected_key("model.nu = -0.1") == "model.nu");
  CHECK(rejected_key("model.eta = -0.1") == "model.eta");
  CHECK(rejected_key("model.g = 0") == "model.g");
  CHECK(rejected_key("model.rho = 0") == "model.rho");
  CHECK(rejected_key("model.R = 0") == "model.R");
  CHECK(rejected_key("model.regime = strong") == "model.regime");
  CHECK(rejected_key("grid.J = 0") == "grid.J");
  CHECK(rejected_key("grid.J = 3\ngrid.M = 24") == "grid.M");
  CHECK(rejected_key("noise.decay = 1") == "noise.decay");
  CHECK(rejected_key("noise.scale = -1") == "noise.scale");
  CHECK(rejected_key("noise.wavenumbers = 0,0") == "noise.wavenumbers");
  CHECK(rejected_key("noise.wavenumbers = 1,0;-1,0") == "noise.wavenumbers");
  CHECK(rejected_key("grid.J = 2\nnoise.wavenumbers = 5,0") == "noise.wavenumbers");
  CHECK(rejected_key("study.levels = 4,3") == "study.levels");
  CHECK(rejected_key("rng.realizations = 0") == "rng.realizations");
  CHECK(rejected_key("stopping.factor = 1") == "stopping.factor");
  CHECK(rejected_key("init.kind = spiral") == "init.kind");
}

TEST_CASE("parse_config: syntax errors") {
  CHECK(rejected_key("model.gamma = 1") == "model.gamma");
  CHECK(rejected_key("model.nu = fast") == "model.nu");
  CHECK(rejected_key("model.k = 1.5") == "model.k");
  CHECK(rejected_key("model.nu = 1\nmodel.nu = 2") == "model.nu");
  CHECK(rejected_key("noise.vector = 1") == "noise.vector");
  CHECK(rejected_key("output.flux = maybe") == "output.flux");
  CHECK_THROWS_AS(parse_config("just words"), ConfigError);
}

TEST_CASE("parse_config: comments, whitespace and canonical text") {
  const auto c = parse_config("  model.nu=0.25   # comment\n\n# only comment\nrng.seed = 18446744073709551615\n");
  CHECK(c.model.nu == 0.25);
  CHECK(c.seed == 18446744073709551615ull);
  const auto w = parse_config(kWeak);
  const auto again = parse_config(to_text(w));
  CHECK(to_text(again) == to_text(w));
  CHECK(params_digest(again) == params_digest(w));
}

TEST_CASE("params_digest tracks physics only") {
  const auto a = parse_config(kWeak);
  CHECK(params_digest(parse_config(with("rng.seed = 9"))) == params_digest(a));
  CHECK(params_digest(parse_config(with("output.dir = elsewhere"))) == params_digest(a));
  CHECK(params_digest(parse_config(with("model.f = 0.5"))) != params_digest(a));
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("initial_state and stop_threshold") {
  InitConfig z;
  z.kind = "zero";
  z.mean_depth = 2.0;
  const auto x = initial_state(z, 4);
  CHECK(x.h(0, 0) == Complex(2.0, 0.0));
  CHECK(l2_norm(x.u) == 0.0);
  const auto c = parse_config(kWeak);
  const auto r = initial_state(c.init, 16);
  CHECK(l2_norm(r.u) == doctest::Approx(kTwoPi * c.init.velocity_rms));
  CHECK(stop_threshold(c, r) == doctest::Approx(1e3 * composite_norm(r, 0)));
  const auto t = parse_config(with("stopping.threshold = 77"));
  CHECK(stop_threshold(t, r) == 77.0);
}

TEST_CASE("load_config reports a missing file") { CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), IoError); }
