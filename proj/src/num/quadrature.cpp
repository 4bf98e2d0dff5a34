#include "layerspec/num/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "layerspec/error.hpp"
#include "layerspec/num/parallel.hpp"

namespace layerspec::num {
namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Final derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "gauss_rule: need at least one point");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

QuadratureGrid gauss_legendre(int points_per_panel, std::span<const double> panels) {
  if (points_per_panel < 1) throw Error(ErrorKind::invalid_input, "gauss_legendre: points_per_panel must be >= 1");
  if (panels.size() < 2) throw Error(ErrorKind::invalid_input, "gauss_legendre: need at least one panel");
  for (std::size_t i = 1; i < panels.size(); ++i) {
    if (!(panels[i] > panels[i - 1])) {
      throw Error(ErrorKind::invalid_input, "gauss_legendre: panel boundaries must be strictly increasing");
    }
  }
  const GaussRule& rule = gauss_rule(points_per_panel);
  QuadratureGrid grid;
  grid.points_per_panel = points_per_panel;
  grid.panels.assign(panels.begin(), panels.end());
  grid.nodes.reserve((panels.size() - 1) * points_per_panel);
  grid.weights.reserve(grid.nodes.capacity());
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    const double mid = 0.5 * (panels[p] + panels[p + 1]);
    const double half = 0.5 * (panels[p + 1] - panels[p]);
    for (int i = 0; i < points_per_panel; ++i) {
      grid.nodes.push_back(mid + half * rule.x[i]);
      grid.weights.push_back(half * rule.w[i]);
    }
  }
  return grid;
}

std::vector<double> panel_breaks(double a, double b, std::span<const double> breaks, double max_width) {
  std::vector<double> cuts{a};
  for (double c : breaks) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> out{cuts.front()};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double width = cuts[i] - cuts[i - 1];
    const int pieces = max_width > 0.0 ? std::max(1, static_cast<int>(std::ceil(width / max_width))) : 1;
    for (int p = 1; p < pieces; ++p) out.push_back(cuts[i - 1] + width * p / pieces);
    out.push_back(cuts[i]);
  }
  return out;
}

std::vector<double> geometric_panels(double a, double b, double h0, double ratio) {
  if (!(b > a) || !(h0 > 0.0) || !(ratio >= 1.0)) {
    throw Error(ErrorKind::invalid_input, "geometric_panels: need b > a, h0 > 0, ratio >= 1");
  }
  std::vector<double> out{a};
  double h = h0;
  double x = a;
  while (x + 1.5 * h < b) {
    x += h;
    out.push_back(x);
    h *= ratio;
  }
  out.push_back(b);
  return out;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  double abs_tol, int max_panels) {
  if (a == b) return {0.0, 0.0, 0, true};
  const GaussRule& rule = gauss_rule(10);
  AdaptiveResult result;
  auto apply = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
    result.evaluations += static_cast<int>(rule.x.size());
    return sum * half;
  };
  struct Panel {
    double lo, hi, left, right, error;
    double fine() const { return left + right; }
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto make = [&](double lo, double hi, double coarse) {
    const double mid = 0.5 * (lo + hi);
    const double left = apply(lo, mid), right = apply(mid, hi);
    return Panel{lo, hi, left, right, std::abs(left + right - coarse)};
  };
  std::vector<Panel> heap{make(a, b, apply(a, b))};
  double value = heap.front().fine();
  double error = heap.front().error;
  int panels = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && panels < max_panels) {
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    Panel left = make(worst.lo, mid, worst.left), right = make(mid, worst.hi, worst.right);
    value += left.fine() + right.fine() - worst.fine();
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    ++panels;
  }
  value = 0.0;
  error = 0.0;
  for (const Panel& p : heap) {
    value += p.fine();
    error += p.error;
  }
  result.value = value;
  result.error = error;
  result.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  if (!std::isfinite(value)) throw Error(ErrorKind::evaluation, "integrate_adaptive: non-finite integrand");
  return result;
}

VectorQuadratureResult integrate_vector(const VectorIntegrand& f, std::span<const double> breaks, std::size_t width,
                                        const VectorQuadratureOptions& options) {
  if (breaks.size() < 2) throw Error(ErrorKind::invalid_input, "integrate_vector: need at least one panel");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw Error(ErrorKind::invalid_input, "integrate_vector: breaks must increase");
  }
  const GaussRule& rule = gauss_rule(options.points);
  const std::size_t np = rule.x.size();
  VectorQuadratureResult res;

  // Rule applied on each span; evaluations optionally in parallel, reduction in fixed order.
  const auto apply = [&](const std::vector<std::pair<double, double>>& spans) {
    std::vector<double> vals(spans.size() * np * width);
    const auto eval = [&](std::size_t k) {
      const auto [lo, hi] = spans[k / np];
      const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.x[k % np];
      f(x, std::span<double>(vals.data() + k * width, width));
    };
    if (options.parallel) {
      parallel_for(spans.size() * np, eval);
    } else {
      for (std::size_t k = 0; k < spans.size() * np; ++k) eval(k);
    }
    res.evaluations += static_cast<int>(spans.size() * np);
    std::vector<double> out(spans.size() * width, 0.0);
    for (std::size_t p = 0; p < spans.size(); ++p) {
      const double half = 0.5 * (spans[p].second - spans[p].first);
      for (std::size_t i = 0; i < np; ++i) {
        const double* v = vals.data() + (p * np + i) * width;
        for (std::size_t c = 0; c < width; ++c) out[p * width + c] += half * rule.w[i] * v[c];
      }
    }
    for (double v : out) {
      if (!std::isfinite(v)) throw Error(ErrorKind::evaluation, "integrate_vector: non-finite integrand");
    }
    return out;
  };

  struct Panel {
    double lo, hi;
    std::vector<double> left, right, error;
  };
  // Builds panels from spans whose whole-span estimates are known.
  const auto refine = [&](const std::vector<std::pair<double, double>>& spans, const std::vector<double>& coarse) {
    std::vector<std::pair<double, double>> halves;
    for (const auto& [lo, hi] : spans) {
      const double mid = 0.5 * (lo + hi);
      halves.emplace_back(lo, mid);
      halves.emplace_back(mid, hi);
    }
    const auto fine = apply(halves);
    std::vector<Panel> out;
    for (std::size_t p = 0; p < spans.size(); ++p) {
      Panel pa{spans[p].first, spans[p].second, {}, {}, {}};
      pa.left.assign(fine.begin() + 2 * p * width, fine.begin() + (2 * p + 1) * width);
      pa.right.assign(fine.begin() + (2 * p + 1) * width, fine.begin() + (2 * p + 2) * width);
      pa.error.resize(width);
      for (std::size_t c = 0; c < width; ++c) pa.error[c] = std::abs(pa.left[c] + pa.right[c] - coarse[p * width + c]);
      out.push_back(std::move(pa));
    }
    return out;
  };

  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 1; i < breaks.size(); ++i) spans.emplace_back(breaks[i - 1], breaks[i]);
  std::vector<Panel> panels = refine(spans, apply(spans));

  std::vector<double> scale(width), tol(width);
  while (true) {
    res.value.assign(width, 0.0);
    res.error.assign(width, 0.0);
    std::fill(scale.begin(), scale.end(), 0.0);
    for (const auto& p : panels) {
      for (std::size_t c = 0; c < width; ++c) {
        const double v = p.left[c] + p.right[c];
        res.value[c] += v;
        res.error[c] += p.error[c];
        scale[c] += std::abs(p.left[c]) + std::abs(p.right[c]);
      }
    }
    for (std::size_t c = 0; c < width; ++c) tol[c] = options.rel_tol * scale[c];
    if (options.tolerance) options.tolerance(scale, tol);
    for (auto& t : tol) t = std::max(t, std::numeric_limits<double>::min());

    // Share of the tolerance each panel uses; refine the worst until the rest fits in half.
    std::vector<std::pair<double, std::size_t>> load(panels.size());
    bool done = true;
    for (std::size_t c = 0; c < width; ++c) done = done && res.error[c] <= tol[c];
    if (done) break;
    if (static_cast<int>(panels.size()) >= options.max_panels) {
      res.converged = false;
      break;
    }
    for (std::size_t p = 0; p < panels.size(); ++p) {
      double w = 0.0;
      for (std::size_t c = 0; c < width; ++c) w = std::max(w, panels[p].error[c] / tol[c]);
      load[p] = {w, p};
    }
    std::sort(load.begin(), load.end(), [](const auto& x, const auto& y) {
      return x.first > y.first || (x.first == y.first && x.second < y.second);
    });
    double remaining = 0.0;
    for (const auto& l : load) remaining += l.first;
    std::vector<std::size_t> pick;
    for (const auto& l : load) {
      if (remaining <= 0.5 || static_cast<int>(panels.size() + pick.size()) >= options.max_panels) break;
      const auto& pa = panels[l.second];
      if (!(0.5 * (pa.lo + pa.hi) > pa.lo && 0.5 * (pa.lo + pa.hi) < pa.hi)) continue;
      pick.push_back(l.second);
      remaining -= l.first;
    }
    if (pick.empty()) {
      res.converged = false;
      break;
    }
    std::sort(pick.begin(), pick.end());
    std::vector<std::pair<double, double>> child_spans;
    std::vector<double> child_coarse;
    for (std::size_t idx : pick) {
      const auto& pa = panels[idx];
      const double mid = 0.5 * (pa.lo + pa.hi);
      child_spans.emplace_back(pa.lo, mid);
      child_spans.emplace_back(mid, pa.hi);
      child_coarse.insert(child_coarse.end(), pa.left.begin(), pa.left.end());
      child_coarse.insert(child_coarse.end(), pa.right.begin(), pa.right.end());
    }
    auto children = refine(child_spans, child_coarse);
    std::vector<Panel> next;
    std::size_t k = 0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
      if (k < pick.size() && pick[k] == p) {
        next.push_back(std::move(children[2 * k]));
        next.push_back(std::move(children[2 * k + 1]));
        ++k;
      } else {
        next.push_back(std::move(panels[p]));
      }
    }
    panels = std::move(next);
  }
  res.panels = static_cast<int>(panels.size());
  return res;
}

}  // namespace layerspec::num
