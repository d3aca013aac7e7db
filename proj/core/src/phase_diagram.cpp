#include "selforg/phase_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "selforg/errors.hpp"
#include "selforg/parallel.hpp"

namespace selforg {

namespace {

// A continued branch must be stable by at least this margin to count as
// metastable; marginal points at a second-order boundary do not.
constexpr double kPersistenceMargin = 1e-8;

struct LineView {
  std::vector<const PhasePoint*> points;
  double step = 0.0;
  Couplings alpha_at(std::size_t k) const { return {points[k]->alpha_1, points[k]->alpha_2}; }
};

LineView line_view(const PhaseDiagram& d, Axis direction, int line) {
  LineView v;
  if (direction == Axis::alpha_1) {
    v.step = d.spec.step_1();
    for (int i = 0; i < d.spec.n_1; ++i) v.points.push_back(&d.at(i, line));
  } else {
    v.step = d.spec.step_2();
    for (int j = 0; j < d.spec.n_2; ++j) v.points.push_back(&d.at(line, j));
  }
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool persists(Point2 seed, Couplings target, Phase label, const SolverOptions& opts) {
  FixedPoint fp;
  if (!continue_minimum(seed, target, opts, fp)) return false;
  if (label_phase(fp.y_1, fp.y_2) != label) return false;
  const StabilityReport rep = hessian_classify(fp.point(), target, 1e-8, opts.quadrature);
  return rep.eigenvalues[0] > kPersistenceMargin;
}

double refine_crossing(Couplings from, Couplings to, Phase from_label, const GridSpec& spec,
                       const DiagramOptions& opts) {
  // Bisect on the label along the edge; the returned value is the varying coordinate.
  const bool along_1 = from.alpha_1 != to.alpha_1;
  double lo = along_1 ? from.alpha_1 : from.alpha_2;
  double hi = along_1 ? to.alpha_1 : to.alpha_2;
  for (int it = 0; it < opts.refine_depth; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Couplings a = along_1 ? Couplings{mid, from.alpha_2} : Couplings{from.alpha_1, mid};
    const PhasePoint pp = classify_phase(a, spec.thermo, opts.solver);
    (pp.phase == from_label ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TransitionAnnotation annotate_crossing(const PhaseDiagram& d, Axis direction, int line, int k,
                                       const DiagramOptions& opts) {
  const LineView v = line_view(d, direction, line);
  const int n = static_cast<int>(v.points.size());
  const double h = v.step;
  auto label = [&](int m) { return v.points[m]->phase; };
  auto f = [&](int m) { return v.points[m]->free_energy; };

  TransitionAnnotation a;
  a.direction = direction;
  a.line = line;
  a.index = k;
  a.from = label(k);
  a.to = label(k + 1);

  std::optional<double> d_left, d_right;
  if (k >= 1 && label(k - 1) == a.from) d_left = (f(k) - f(k - 1)) / h;
  if (k + 2 < n && label(k + 2) == a.to) d_right = (f(k + 2) - f(k + 1)) / h;

  std::vector<double> left_noise, right_noise;
  for (int m = k - 1; m >= 1 && m >= k - opts.noise_window; --m) {
    if (label(m - 1) != a.from || label(m) != a.from) break;
    left_noise.push_back(std::abs(f(m + 1) - 2.0 * f(m) + f(m - 1)) / h);
  }
  for (int m = k + 2; m + 1 < n && m <= k + 1 + opts.noise_window; ++m) {
    if (label(m + 1) != a.to || label(m) != a.to) break;
    right_noise.push_back(std::abs(f(m + 1) - 2.0 * f(m) + f(m - 1)) / h);
  }

  bool resolved = d_left && d_right && (!left_noise.empty() || !right_noise.empty());
  if (resolved) {
    a.jump = std::abs(*d_right - *d_left);
    a.noise = std::max(left_noise.empty() ? 0.0 : median(left_noise),
                       right_noise.empty() ? 0.0 : median(right_noise));
    a.threshold = std::max(opts.jump_factor * a.noise, 1e-12);
    a.insufficient_resolution = a.jump > 0.5 * a.threshold && a.jump < 2.0 * a.threshold;
  } else {
    a.insufficient_resolution = true;
  }

  const PhasePoint& pa = *v.points[k];
  const PhasePoint& pb = *v.points[k + 1];
  a.hysteresis = persists(pa.global_min.point(), v.alpha_at(k + 1), a.from, opts.solver) ||
                 persists(pb.global_min.point(), v.alpha_at(k), a.to, opts.solver);

  const bool jump_says_first = resolved && !a.insufficient_resolution && a.jump > a.threshold;
  a.order = (a.hysteresis || jump_says_first) ? TransitionOrder::first : TransitionOrder::second;

  const double crossing = refine_crossing(v.alpha_at(k), v.alpha_at(k + 1), a.from, d.spec, opts);
  a.alpha_1 = direction == Axis::alpha_1 ? crossing : pa.alpha_1;
  a.alpha_2 = direction == Axis::alpha_2 ? crossing : pa.alpha_2;
  return a;
}

using Key = std::array<double, 2>;

struct Segment {
  Phase a, b;
  TransitionOrder order;
  Key p, q;
};

}  // namespace

const char* to_string(Axis a) { return a == Axis::alpha_1 ? "alpha_1" : "alpha_2"; }
const char* to_string(TransitionOrder o) { return o == TransitionOrder::first ? "first" : "second"; }

void GridSpec::validate() const {
  auto check = [](const Interval& r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi || r.lo < 0.0)
      throw ValidationError(std::string(name) + " range must be finite with 0 <= lo <= hi");
  };
  check(alpha_1_range, "alpha_1");
  check(alpha_2_range, "alpha_2");
  if (n_1 < 2 || n_2 < 2) throw ValidationError("grid counts must be at least 2");
  if (!(thermo.beta > 0.0)) throw ValidationError("beta must be positive");
}

double GridSpec::alpha_1(int i) const {
  return alpha_1_range.lo + (alpha_1_range.hi - alpha_1_range.lo) * i / (n_1 - 1);
}

double GridSpec::alpha_2(int j) const {
  return alpha_2_range.lo + (alpha_2_range.hi - alpha_2_range.lo) * j / (n_2 - 1);
}

bool continue_minimum(Point2 seed, Couplings alpha, const SolverOptions& opts, FixedPoint& out) {
  if (!refine_fixed_point(seed, alpha, opts, out)) return false;
  return out.stability == Stability::minimum;
}

OverlayCurves analytic_overlays(const std::vector<double>& alpha_2_samples) {
  if (!std::is_sorted(alpha_2_samples.begin(), alpha_2_samples.end()))
    throw ValidationError("overlay samples must be sorted");
  OverlayCurves o;
  o.alpha_2 = alpha_2_samples;
  for (double a2 : alpha_2_samples) {
    const double t = nematic_bessel_solve(a2);
    o.theta_2.push_back(t);
    o.alpha_1c.push_back(1.0 / (1.0 + t));
    o.alpha_1c_negative.push_back(1.0 / (1.0 - t));
  }
  return o;
}

PhaseDiagram sweep_grid(const GridSpec& spec, int workers, const DiagramOptions& opts) {
  spec.validate();
  PhaseDiagram d;
  d.spec = spec;
  const std::size_t count = static_cast<std::size_t>(spec.n_1) * spec.n_2;
  d.grid.resize(count);
  parallel_for(count, workers, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / spec.n_2);
    const int j = static_cast<int>(idx % spec.n_2);
    d.grid[idx] = classify_phase({spec.alpha_1(i), spec.alpha_2(j)}, spec.thermo, opts.solver);
  });
  for (const auto& p : d.grid) d.dropped_seeds += p.dropped_seeds;

  std::vector<double> a2;
  for (int j = 0; j < spec.n_2; ++j) a2.push_back(spec.alpha_2(j));
  d.overlays = analytic_overlays(a2);

  if (opts.annotate) {
    d.transitions = transition_order(d, Axis::alpha_1, workers, opts);
    auto second = transition_order(d, Axis::alpha_2, workers, opts);
    d.transitions.insert(d.transitions.end(), second.begin(), second.end());
    d.boundaries = extract_boundaries(d, &d.triple_cells);
  }
  return d;
}

std::vector<TransitionAnnotation> transition_order(const PhaseDiagram& diagram, Axis direction, int workers,
                                                   const DiagramOptions& opts) {
  const int lines = direction == Axis::alpha_1 ? diagram.spec.n_2 : diagram.spec.n_1;
  std::vector<std::pair<int, int>> crossings;  // (line, k)
  for (int line = 0; line < lines; ++line) {
    const LineView v = line_view(diagram, direction, line);
    for (std::size_t k = 0; k + 1 < v.points.size(); ++k)
      if (v.points[k]->phase != v.points[k + 1]->phase) crossings.emplace_back(line, static_cast<int>(k));
  }
  std::vector<TransitionAnnotation> out(crossings.size());
  parallel_for(crossings.size(), workers, [&](std::size_t c) {
    out[c] = annotate_crossing(diagram, direction, crossings[c].first, crossings[c].second, opts);
  });
  return out;
}

std::vector<BoundaryPolyline> extract_boundaries(const PhaseDiagram& d,
                                                std::vector<std::array<double, 2>>* triple_cells) {
  const int n1 = d.spec.n_1, n2 = d.spec.n_2;
  // Edge lookup: edges along alpha_1 keyed (i, j) for (i,j)-(i+1,j); along alpha_2 for (i,j)-(i,j+1).
  std::map<std::pair<int, int>, const TransitionAnnotation*> edge1, edge2;
  for (const auto& t : d.transitions) {
    if (t.direction == Axis::alpha_1)
      edge1[{t.index, t.line}] = &t;
    else
      edge2[{t.line, t.index}] = &t;
  }
  auto find = [](const auto& m, int i, int j) -> const TransitionAnnotation* {
    auto it = m.find({i, j});
    return it == m.end() ? nullptr : it->second;
  };

  std::vector<Segment> segments;
  auto add = [&](const TransitionAnnotation* s, const TransitionAnnotation* t) {
    Phase a = std::min(s->from, s->to), b = std::max(s->from, s->to);
    const bool first = s->order == TransitionOrder::first || t->order == TransitionOrder::first;
    segments.push_back({a, b, first ? TransitionOrder::first : TransitionOrder::second,
                        {s->alpha_1, s->alpha_2}, {t->alpha_1, t->alpha_2}});
  };

  for (int i = 0; i + 1 < n1; ++i) {
    for (int j = 0; j + 1 < n2; ++j) {
      const Phase c00 = d.at(i, j).phase, c10 = d.at(i + 1, j).phase;
      const Phase c01 = d.at(i, j + 1).phase, c11 = d.at(i + 1, j + 1).phase;
      const TransitionAnnotation* bottom = find(edge1, i, j);
      const TransitionAnnotation* top = find(edge1, i, j + 1);
      const TransitionAnnotation* left = find(edge2, i, j);
      const TransitionAnnotation* right = find(edge2, i + 1, j);
      std::vector<const TransitionAnnotation*> edges;
      for (auto* e : {bottom, right, top, left})
        if (e) edges.push_back(e);
      if (edges.empty()) continue;

      const std::set<Phase> labels{c00, c10, c01, c11};
      if (labels.size() == 3) {
        const Key centre{0.5 * (d.spec.alpha_1(i) + d.spec.alpha_1(i + 1)),
                         0.5 * (d.spec.alpha_2(j) + d.spec.alpha_2(j + 1))};
        if (triple_cells) triple_cells->push_back(centre);
        for (auto* e : edges) {
          segments.push_back({std::min(e->from, e->to), std::max(e->from, e->to), e->order,
                              {e->alpha_1, e->alpha_2}, centre});
        }
      } else if (edges.size() == 2) {
        add(edges[0], edges[1]);
      } else if (edges.size() == 4) {
        if (c00 != c10 && c00 != c01) {
          add(bottom, left);
          add(top, right);
        } else {
          add(bottom, right);
          add(top, left);
        }
      }
    }
  }

  // Chain segments of the same (a, b, order) group through shared endpoints.
  using Group = std::tuple<Phase, Phase, TransitionOrder>;
  std::map<std::pair<Group, Key>, std::vector<std::size_t>> at_point;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const Group g{segments[s].a, segments[s].b, segments[s].order};
    at_point[{g, segments[s].p}].push_back(s);
    at_point[{g, segments[s].q}].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<BoundaryPolyline> lines;
  auto next_from = [&](const Group& g, const Key& k) -> std::optional<std::size_t> {
    for (std::size_t s : at_point[{g, k}])
      if (!used[s]) return s;
    return std::nullopt;
  };
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    const Segment& seg = segments[s0];
    const Group g{seg.a, seg.b, seg.order};
    std::vector<Key> pts{seg.p, seg.q};
    // Extend forward from the tail, then backward from the head.
    for (auto s = next_from(g, pts.back()); s; s = next_from(g, pts.back())) {
      used[*s] = true;
      pts.push_back(segments[*s].p == pts.back() ? segments[*s].q : segments[*s].p);
    }
    for (auto s = next_from(g, pts.front()); s; s = next_from(g, pts.front())) {
      used[*s] = true;
      const Key nk = segments[*s].p == pts.front() ? segments[*s].q : segments[*s].p;
      pts.insert(pts.begin(), nk);
    }
    lines.push_back({seg.a, seg.b, seg.order, std::move(pts)});
  }
  return lines;
}

}  // namespace selforg
