#include "doctest.h"
#include "oracles.hpp"
#include "selforg/errors.hpp"
#include "selforg/io.hpp"
#include "selforg/phase_diagram.hpp"

using namespace selforg;

TEST_CASE("3x3 grid over [0, 0.9]^2 agrees with the grid-scan oracle") {
  GridSpec g;
  g.alpha_1_range = {0.0, 0.9};
  g.alpha_2_range = {0.0, 0.9};
  g.n_1 = g.n_2 = 3;
  const PhaseDiagram d = sweep_grid(g);
  REQUIRE(d.grid.size() == 9);
  for (const auto& p : d.grid) {
    const auto scan = oracle::grid_scan_min(p.alpha_1, p.alpha_2, 101, 1000);
    // Flat or nearly flat g (alpha = 0) leaves the origin as the minimum.
    const bool origin_wins = scan.g >= oracle::g_simpson(0.0, 0.0, p.alpha_1, p.alpha_2, 1000) - 1e-10;
    const Phase expected = origin_wins                ? Phase::paramagnetic
                           : std::abs(scan.y1) > 0.05 ? Phase::ferromagnetic
                           : std::abs(scan.y2) > 0.05 ? Phase::nematic
                                                      : Phase::paramagnetic;
    CHECK(p.phase == expected);
  }
  // alpha_n < 1 everywhere, yet the corner (0.9, 0.9) has a lower ferromagnetic minimum.
  CHECK(d.at(2, 2).phase == Phase::ferromagnetic);
  CHECK(d.at(1, 1).phase == Phase::paramagnetic);
}

TEST_CASE("grid inside [0, 0.8]^2 is paramagnetic") {
  GridSpec g;
  g.alpha_1_range = {0.0, 0.8};
  g.alpha_2_range = {0.0, 0.8};
  g.n_1 = g.n_2 = 5;
  const PhaseDiagram d = sweep_grid(g);
  for (const auto& p : d.grid) CHECK(p.phase == Phase::paramagnetic);
  CHECK(d.transitions.empty());
  CHECK(d.boundaries.empty());
}

TEST_CASE("column alpha_1 = 0.2 crosses into the nematic phase") {
  GridSpec g;
  g.alpha_1_range = {0.2, 0.4};
  g.alpha_2_range = {0.5, 1.5};
  g.n_1 = 2;
  g.n_2 = 2;
  const PhaseDiagram d = sweep_grid(g);
  CHECK(d.at(0, 0).phase == Phase::paramagnetic);
  CHECK(d.at(0, 1).phase == Phase::nematic);
}

TEST_CASE("Theta_2 is continuous through alpha_2 = 1 at alpha_1 = 0.2") {
  GridSpec g;
  g.alpha_1_range = {0.2, 0.3};
  g.alpha_2_range = {0.8, 1.4};
  g.n_1 = 2;
  g.n_2 = 25;
  const PhaseDiagram d = sweep_grid(g);
  for (int j = 0; j < g.n_2; ++j) {
    const double a2 = g.alpha_2(j);
    // At the bifurcation itself the residual is cubic in y_2, so the solver
    // stops within the classification tolerance rather than at 1e-7.
    const double tol = std::abs(a2 - 1.0) < 1e-12 ? kClassificationTolerance : 1e-7;
    CHECK(std::abs(d.at(0, j).global_min.y_2 - oracle::nematic_root(a2)) <= tol);
  }
  bool saw_second = false;
  for (const auto& t : d.transitions)
    if (t.direction == Axis::alpha_2 && t.line == 0) {
      CHECK(t.order == TransitionOrder::second);
      CHECK(t.alpha_2 == doctest::Approx(1.0).epsilon(0.03));
      saw_second = true;
    }
  CHECK(saw_second);
}

TEST_CASE("paramagnetic labels imply the origin condition") {
  GridSpec g;
  g.n_1 = g.n_2 = 26;
  const PhaseDiagram d = sweep_grid(g, 2, {.annotate = false});
  for (const auto& p : d.grid)
    if (p.phase == Phase::paramagnetic) {
      CHECK(p.alpha_1 < 1.0 + 1e-12);
      CHECK(p.alpha_2 < 1.0 + 1e-12);
    }
}

TEST_CASE("labels are stable under refinement away from boundaries") {
  GridSpec coarse;
  coarse.n_1 = coarse.n_2 = 11;
  GridSpec fine = coarse;
  fine.n_1 = fine.n_2 = 21;
  DiagramOptions o;
  o.annotate = false;
  const PhaseDiagram a = sweep_grid(coarse, 1, o);
  const PhaseDiagram b = sweep_grid(fine, 1, o);
  for (int i = 0; i < coarse.n_1; ++i)
    for (int j = 0; j < coarse.n_2; ++j) {
      // Compare only where every coarse neighbour carries the same label.
      bool interior = true;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < coarse.n_1 && jj < coarse.n_2)
            interior = interior && a.at(ii, jj).phase == a.at(i, j).phase;
        }
      if (interior) CHECK(b.at(2 * i, 2 * j).phase == a.at(i, j).phase);
    }
}

TEST_CASE("worker count does not change the diagram") {
  GridSpec g;
  g.n_1 = g.n_2 = 13;
  const std::string ref = phase_diagram_json(sweep_grid(g, 1), "x") + to_csv(phase_grid_csv(sweep_grid(g, 1), "x"));
  for (int w : {4, 16}) {
    const PhaseDiagram d = sweep_grid(g, w);
    CHECK(phase_diagram_json(d, "x") + to_csv(phase_grid_csv(d, "x")) == ref);
  }
}

TEST_CASE("analytic overlays") {
  const OverlayCurves o = analytic_overlays({0.5, 1.0, 2.0, 50.0});
  CHECK(o.alpha_1c[0] == 1.0);
  CHECK(o.alpha_1c[1] == 1.0);
  CHECK(o.alpha_1c[2] == doctest::Approx(1.0 / (1.0 + oracle::nematic_root(2.0))).epsilon(1e-9));
  CHECK(std::abs(o.alpha_1c[3] - 0.5) < 0.02);
  CHECK(o.alpha_1c_negative[2] > 1.0);
}

TEST_CASE("grid validation") {
  GridSpec g;
  g.n_1 = 1;
  CHECK_THROWS_AS(sweep_grid(g), ValidationError);
  g = GridSpec{};
  g.alpha_1_range = {1.0, 0.5};
  CHECK_THROWS_AS(sweep_grid(g), ValidationError);
  g = GridSpec{};
  g.thermo.beta = 0.0;
  CHECK_THROWS_AS(sweep_grid(g), ValidationError);
}

TEST_CASE("minimum continuation") {
  FixedPoint out;
  const double t = oracle::nematic_root(2.0);
  REQUIRE(continue_minimum({0.0, 0.8}, {0.5, 2.0}, SolverOptions{}, out));
  CHECK(out.y_2 == doctest::Approx(t).epsilon(1e-8));
  // Past the threshold the nematic point is a saddle.
  CHECK_FALSE((continue_minimum({0.0, t}, {0.7, 2.0}, SolverOptions{}, out) && std::abs(out.y_1) < 1e-6));
}
