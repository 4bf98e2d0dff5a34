#include "layerspec/layer/layer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "layerspec/error.hpp"
#include "layerspec/surface/totals.hpp"

namespace layerspec::layer {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sample_thetas(const PolarChart& chart, int n) {
  if (chart.axisymmetric()) return {0.0};
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = 2.0 * kPi * i / n;
  return t;
}

}  // namespace

CurvatureRadius rho_m(const PolarChart& chart, const RadiusOptions& options) {
  std::vector<double> radii = options.probe_radii;
  if (radii.empty()) radii = surface::geometric_schedule(std::min(1.0, chart.s_max() / 64.0), chart.s_max());
  const auto thetas = sample_thetas(chart, options.theta_samples);
  CurvatureRadius out;
  const auto visit = [&](double s) {
    for (double th : thetas) {
      const auto cs = chart.sample(s, th);
      const double k = std::max(std::abs(cs.k1), std::abs(cs.k2));
      if (k > out.sup_abs_k) {
        out.sup_abs_k = k;
        out.argmax_s = s;
        out.argmax_theta = th;
      }
    }
  };
  visit(1e-6 * radii.front());
  double inner = 0.0;
  const int n = std::max(options.samples_per_annulus, 2);
  for (double outer : radii) {
    for (int i = 1; i <= n; ++i) visit(inner + (outer - inner) * i / n);
    inner = outer;
  }
  for (double k : chart.kinks()) {
    if (k > 0.0 && k <= chart.s_max()) visit(k);
  }
  if (out.sup_abs_k > 0.0) {
    out.raw = 1.0 / out.sup_abs_k;
    out.safe = out.raw / options.safety;
  }
  return out;
}

LayerSpec::LayerSpec(std::shared_ptr<const PolarChart> chart, double a, const LayerOptions& options)
    : chart_(std::move(chart)), a_(a) {
  if (!chart_) throw Error(ErrorKind::invalid_input, "layer: missing chart");
  if (!(a_ > 0.0) || !std::isfinite(a_)) throw Error(ErrorKind::invalid_input, "layer: half-width a must be positive");
  radius_ = rho_m(*chart_, options.radius);
  if (!omega1()) {
    std::ostringstream msg;
    msg << "layer over " << chart_->name() << ": a = " << a_ << " is not below the minimal curvature radius "
        << radius_.safe << " (sampled " << radius_.raw << ", safety " << options.radius.safety << ")";
    if (!options.force) throw Error(ErrorKind::hypothesis_violation, msg.str());
    warnings_.push_back(msg.str() + "; continuing because forced");
  }
}

double LayerSpec::kappa(int n) const {
  if (n < 1) throw Error(ErrorKind::invalid_input, "layer: mode index must be >= 1");
  return n * kPi / d();
}

double det_factor(const LayerSpec& layer, double s, double theta, double u) {
  const auto cs = layer.chart().sample(s, theta);
  return 1.0 - 2.0 * cs.M * u + cs.K * u * u;
}

LayerMetricSample layer_metric(const surface::ChartSample& cs, double u) {
  // B = I - u L in the orthonormal frame; G = B^2 there, then rescale e_theta -> d_theta = r e_theta.
  const double b11 = 1.0 - u * cs.l_ss, b12 = -u * cs.l_st, b22 = 1.0 - u * cs.l_tt;
  LayerMetricSample m;
  m.G11 = b11 * b11 + b12 * b12;
  m.G12 = cs.r * (b11 * b12 + b12 * b22);
  m.G22 = cs.r * cs.r * (b12 * b12 + b22 * b22);
  m.f = b11 * b22 - b12 * b12;
  m.sqrt_g = cs.r;
  m.sqrt_G = cs.r * m.f;
  return m;
}

LayerMetricSample layer_metric(const LayerSpec& layer, double s, double theta, double u) {
  return layer_metric(layer.chart().sample(s, theta), u);
}

std::pair<double, double> c_bounds(double a, double rho) {
  if (!(a < rho)) {
    std::ostringstream msg;
    msg << "C+- bounds need a < rho_m (a = " << a << ", rho_m = " << rho << ")";
    throw Error(ErrorKind::hypothesis_violation, msg.str());
  }
  if (std::isinf(rho)) return {1.0, 1.0};
  const double t = a / rho;
  return {(1.0 - t) * (1.0 - t), (1.0 + t) * (1.0 + t)};
}

std::pair<double, double> c_bounds(const LayerSpec& layer) { return c_bounds(layer.a(), layer.curvature_radius().safe); }

double TransverseMode::operator()(double u) const {
  const double amp = std::sqrt(1.0 / a);
  return n % 2 ? amp * std::cos(kappa * u) : amp * std::sin(kappa * u);
}

double TransverseMode::derivative(double u) const {
  const double amp = std::sqrt(1.0 / a) * kappa;
  return n % 2 ? -amp * std::sin(kappa * u) : amp * std::cos(kappa * u);
}

TransverseMode transverse_mode(double a, int n) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "transverse mode index must be >= 1");
  if (!(a > 0.0)) throw Error(ErrorKind::invalid_input, "transverse mode needs a > 0");
  return {n, a, n * kPi / (2.0 * a)};
}

TransverseMode transverse_mode(const LayerSpec& layer, int n) { return transverse_mode(layer.a(), n); }

EffectivePotential effective_potential(const LayerSpec& layer, double s, double theta, double u) {
  const auto cs = layer.chart().sample(s, theta);
  const double f = 1.0 - 2.0 * cs.M * u + cs.K * u * u;
  // K - M^2 = -(k1 - k2)^2 / 4, computed in the cancellation-free form.
  const double half_gap = 0.5 * (cs.k1 - cs.k2);
  const double km = -half_gap * half_gap;
  return {km / (f * f), km};
}

CollisionScan omega0_scan(const LayerSpec& layer, double s_limit, int s_samples, int theta_samples) {
  const PolarChart& chart = layer.chart();
  const double a = layer.a();
  const double S = s_limit > 0.0 ? std::min(s_limit, chart.s_max()) : chart.s_max();
  // A valid tube has a Lipschitz inverse: layer points within delta have base points
  // within about delta / (1 - a/rho). Pairs violating that by a factor 4 are flagged.
  const double cell = 0.25 * a;
  const double rho = layer.curvature_radius().safe;
  const double spread = 4.0 * cell / (a < rho ? 1.0 - a / rho : 1.0);

  struct Entry {
    surface::Vec3 base, point;
  };
  std::vector<Entry> pts;
  CollisionScan scan;
  std::vector<double> thetas(theta_samples);
  for (int i = 0; i < theta_samples; ++i) thetas[i] = 2.0 * kPi * i / theta_samples;
  for (int i = 1; i <= s_samples; ++i) {
    const double s = S * i / s_samples;
    for (double th : thetas) {
      const auto p = chart.point(s, th);
      const auto n = chart.normal(s, th);
      const auto cs = chart.sample(s, th);
      for (int k = -3; k <= 3; ++k) {
        const double u = a * k / 3.0;
        scan.min_det_factor = std::min(scan.min_det_factor, 1.0 - 2.0 * cs.M * u + cs.K * u * u);
        pts.push_back({p, {p[0] + u * n[0], p[1] + u * n[1], p[2] + u * n[2]}});
      }
    }
  }
  scan.points = pts.size();

  struct Key {
    long long x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return static_cast<std::size_t>(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
    }
  };
  const auto key_of = [cell](const surface::Vec3& p) {
    return Key{static_cast<long long>(std::floor(p[0] / cell)), static_cast<long long>(std::floor(p[1] / cell)),
               static_cast<long long>(std::floor(p[2] / cell))};
  };
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> grid;
  for (std::size_t i = 0; i < pts.size(); ++i) grid[key_of(pts[i].point)].push_back(i);

  const auto dist = [](const surface::Vec3& p, const surface::Vec3& q) {
    return std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[2] - q[2]));
  };
  for (std::size_t i = 0; i < pts.size() && !scan.collision_detected; ++i) {
    const Key k = key_of(pts[i].point);
    for (long long dx = -1; dx <= 1 && !scan.collision_detected; ++dx) {
      for (long long dy = -1; dy <= 1 && !scan.collision_detected; ++dy) {
        for (long long dz = -1; dz <= 1 && !scan.collision_detected; ++dz) {
          auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == grid.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            if (dist(pts[i].point, pts[j].point) < cell && dist(pts[i].base, pts[j].base) > spread) {
              scan.collision_detected = true;
              break;
            }
          }
        }
      }
    }
  }
  if (scan.min_det_factor <= 0.0) scan.collision_detected = true;
  scan.note = scan.collision_detected ? "possible self-intersection detected by sampled scan"
                                      : "no collision detected (sampled heuristic, not a proof)";
  return scan;
}

}  // namespace layerspec::layer
