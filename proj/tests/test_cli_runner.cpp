#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "maflow/config.hpp"
#include "maflow/errors.hpp"
#include "maflow/io.hpp"
#include "maflow/runner.hpp"
#include "support.hpp"

using namespace maflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "maflow_unit_tests";
  fs::create_directories(d);
  return d;
}

const char* kZeroSource = R"(
# stationary run
[grid]
n = 1
N = 16
[metric]
preset = kahler_bump
[source]
kind = zero
[flow]
horizon = 3
[step]
scheme = implicit_euler
)";

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("key-value parsing") {
  const KeyValues kv = KeyValues::parse("a = 1  # trailing\n[s]\nb=two words\n\n# c = 3\nb = 4\n");
  CHECK(kv.entries().size() == 2);
  CHECK(kv.entries().at("a") == "1");
  CHECK(kv.entries().at("s.b") == "4");
  CHECK_THROWS_AS(KeyValues::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(KeyValues::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("run configuration defaults and seeds") {
  const RunConfig cfg = load_run_config(KeyValues::parse("run.seed = 17\ngrid.n = 2\ngrid.N = 8\n"));
  CHECK(cfg.n == 2);
  CHECK(cfg.N == 8);
  CHECK(cfg.seed == 17);
  CHECK(cfg.source.seed == 17);
  CHECK(cfg.monitor.holder.rng_seed == 17);
  CHECK(cfg.period == doctest::Approx(test::kTwoPi));

  const RunConfig over = load_run_config(KeyValues::parse("run.seed = 17\nsource.seed = 3\n"), 5);
  CHECK(over.seed == 5);
  CHECK(over.source.seed == 3);
  CHECK(over.monitor.holder.rng_seed == 5);

  const RunConfig herm = load_run_config(KeyValues::parse("metric.preset = hermitian_nonkahler\n"));
  CHECK(herm.metric.param == doctest::Approx(0.3));
}

TEST_CASE("configuration errors") {
  auto bad = [](const char* text) { return load_run_config(KeyValues::parse(text)); };
  CHECK_THROWS_AS(bad("grid.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(bad("grid.N = eight\n"), ConfigError);
  CHECK_THROWS_AS(bad("step.scheme = leapfrog\n"), ConfigError);
  CHECK_THROWS_AS(bad("verify.criteria = 1,12\n"), ConfigError);
  try {
    bad("metric.preset = nope\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
}

TEST_CASE("effective configuration round-trips through text") {
  const RunConfig a = load_run_config(KeyValues::parse(kZeroSource));
  const RunConfig b = load_run_config(KeyValues::parse(a.to_text()));
  CHECK(a.to_text() == b.to_text());
  CHECK(a.to_text().find("metric.preset = kahler_bump") != std::string::npos);
}

TEST_CASE("manufactured source") {
  RunConfig cfg = load_run_config(KeyValues::parse(
      "grid.n = 1\ngrid.N = 16\nmetric.preset = hermitian_nonkahler\nsource.kind = manufactured\n"
      "source.terms = 0.004 1 0 0; 0.002 0 1 0.5\nsource.b = 0.25\n"));
  const MetricField g = make_metric(cfg);
  const SourceField src = make_source(cfg, g);
  REQUIRE(src.psi_tilde);
  REQUIRE(src.b_exact);
  CHECK(*src.b_exact == 0.25);
  CHECK(std::abs(integrate(*src.psi_tilde, volume_weights(g))) <= 1e-15);
  // log det(g + ∂∂̄ψ̃)/det g - F = b
  const ScalarField r = flow_rhs(*src.psi_tilde, g, src.F).first;
  for (double v : r.values) REQUIRE(v == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("field dumps round-trip") {
  const TorusGrid grid(2, 8);
  const MetricField g = build_metric(grid, MetricPreset::hermitian_nonkahler(0.3));
  const fs::path dir = scratch_dir();

  const ScalarField f = TrigPoly::random(4, 4, test::kTwoPi, 3, 1, 1.0).sample(grid);
  write_field_dump((dir / "f.f64").string(), f);
  const FieldDump df = read_field_dump((dir / "f.f64").string());
  CHECK(df.shape == std::vector<std::size_t>{8, 8, 8, 8});
  CHECK(df.data == f.values);
  const auto header = nlohmann::json::parse(df.header);
  CHECK(header["dtype"] == "f64");
  CHECK(header["byte_order"] == "little");
  CHECK(header["grid"]["N"] == 8);

  write_field_dump((dir / "g.f64").string(), g.samples());
  const FieldDump dg = read_field_dump((dir / "g.f64").string());
  CHECK(dg.shape == std::vector<std::size_t>{8, 8, 8, 8, 2, 2, 2});
  const std::size_t p = 777;
  const HermMat m = g.at(p);
  const double* e = dg.data.data() + p * 8;
  CHECK(e[0] == m(0, 0).real());
  CHECK(e[2] == m(0, 1).real());
  CHECK(e[3] == m(0, 1).imag());
  CHECK(e[4] == m(1, 0).real());
  CHECK(e[5] == m(1, 0).imag());
  CHECK(e[6] == m(1, 1).real());

  std::ofstream(dir / "broken.f64") << "{\"shape\": [4], \"dtype\": \"f64\"}\n1234";
  CHECK_THROWS_AS(read_field_dump((dir / "broken.f64").string()), Error);
}

TEST_CASE("format_check") {
  CHECK(format_check({"x", true, 0.5, 1.0, false}) == "PASS x: 0.5 <= 1");
  CHECK(format_check({"y", false, 0.5, 1.0, true}) == "FAIL y: 0.5 >= 1");
}

TEST_CASE("stationary flow run") {
  const RunConfig cfg = load_run_config(KeyValues::parse(kZeroSource));
  const FlowRun run = run_flow(cfg);
  for (const Check& c : run.invariants) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  const auto j = nlohmann::json::parse(run.summary_json);
  CHECK(j["decay_fit"]["degenerate"] == true);
  CHECK(j["delta"] == 0.0);
  CHECK(j["b_flow"] == 0.0);
  CHECK(j["config"]["metric.preset"] == "kahler_bump");
  CHECK(run.report.series.records.size() == 31);

  const FlowRun again = run_flow(cfg);
  CHECK(again.csv == run.csv);
  CHECK(again.summary_json == run.summary_json);
}

TEST_CASE("flow run with the Newton oracle") {
  RunConfig cfg = load_run_config(KeyValues::parse(
      "grid.n = 1\ngrid.N = 16\nmetric.preset = hermitian_nonkahler\nsource.kind = random\n"
      "source.seed = 3\nflow.horizon = 6\nstep.scheme = implicit_euler\nelliptic.oracle = true\n"));
  const FlowRun run = run_flow(cfg);
  REQUIRE(run.oracle);
  for (const Check& c : run.invariants) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  CHECK(std::abs(run.b_flow - run.oracle->b) <= 1e-8);
  CHECK(sup_difference(run.final_state.phi_tilde, run.oracle->phi_tilde_inf) <= 1e-7);
  const auto j = nlohmann::json::parse(run.summary_json);
  CHECK(j.contains("elliptic_oracle"));
  CHECK(j["b"] == run.oracle->b);
}

}  // TEST_SUITE
