#include "layerspec/num/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::num {
namespace {

// Dormand-Prince 5(4) tableau with the continuous extension of Hairer & Wanner.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

[[noreturn]] void fail(const std::string& why, double s) {
  std::ostringstream msg;
  msg << "integrate_ode: " << why << " (last good s = " << s << ")";
  throw IntegrationFailure(msg.str(), s);
}

}  // namespace

std::size_t OdeTrajectory::locate(double s) const {
  if (s_.empty() || !(s >= std::min(s_.front(), s_.back()) && s <= std::max(s_.front(), s_.back()))) {
    std::ostringstream msg;
    msg << "OdeTrajectory: s = " << s << " outside [" << (s_.empty() ? 0.0 : s_.front()) << ", "
        << (s_.empty() ? 0.0 : s_.back()) << "]";
    throw Error(ErrorKind::domain, msg.str());
  }
  const bool forward = s_.back() >= s_.front();
  auto it = forward ? std::upper_bound(s_.begin(), s_.end(), s)
                    : std::upper_bound(s_.begin(), s_.end(), s, std::greater<double>());
  std::size_t idx = static_cast<std::size_t>(it - s_.begin());
  return idx == 0 ? 0 : std::min(idx - 1, s_.size() - 2);
}

double OdeTrajectory::dense(std::size_t step, double s, std::size_t i) const {
  const double* c = coeff_.data() + step * 5 * dim_;
  const double theta = (s - s_[step]) / h_[step];
  const double theta1 = 1.0 - theta;
  return c[i] + theta * (c[dim_ + i] + theta1 * (c[2 * dim_ + i] + theta * (c[3 * dim_ + i] + theta1 * c[4 * dim_ + i])));
}

void OdeTrajectory::eval(double s, std::span<double> out) const {
  if (s_.size() == 1) {
    if (s != s_.front()) locate(s);
    std::copy_n(states_.begin(), dim_, out.begin());
    return;
  }
  const std::size_t step = locate(s);
  for (std::size_t node : {step, step + 1}) {
    if (s == s_[node]) {
      std::copy_n(states_.begin() + node * dim_, dim_, out.begin());
      return;
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) out[i] = dense(step, s, i);
}

std::vector<double> OdeTrajectory::eval(double s) const {
  std::vector<double> out(dim_);
  eval(s, out);
  return out;
}

double OdeTrajectory::eval(double s, std::size_t component) const {
  if (s_.size() == 1) {
    if (s != s_.front()) locate(s);
    return states_[component];
  }
  const std::size_t step = locate(s);
  if (s == s_[step]) return states_[step * dim_ + component];
  if (s == s_[step + 1]) return states_[(step + 1) * dim_ + component];
  return dense(step, s, component);
}

OdeTrajectory integrate_ode(const OdeRhs& rhs, std::span<const double> initial, double s0, double s1,
                            const OdeOptions& opt) {
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw Error(ErrorKind::invalid_input, "integrate_ode: tol must be > 0");
  const std::size_t n = initial.size();
  if (n == 0) throw Error(ErrorKind::invalid_input, "integrate_ode: empty state");

  OdeTrajectory traj;
  traj.dim_ = n;
  traj.s_.push_back(s0);
  traj.states_.assign(initial.begin(), initial.end());
  if (s1 == s0) return traj;

  const double dir = s1 > s0 ? 1.0 : -1.0;
  std::vector<double> y(initial.begin(), initial.end()), ynew(n), ytmp(n), yerr(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  double s = s0;
  rhs(s, y, k1);
  for (double v : k1) {
    if (!std::isfinite(v)) fail("non-finite derivative at the initial point", s);
  }

  auto scale = [&](std::size_t, double a, double b) {
    return opt.atol + opt.rtol * std::max(std::abs(a), std::abs(b));
  };

  // Initial step as in Hairer's hinit.
  double h = opt.initial_step;
  if (h <= 0.0) {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = scale(i, y[i], y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min({h, opt.max_step, std::abs(s1 - s0)});
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dir * h * k1[i];
    rhs(s + dir * h, ytmp, k2);
    double der2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = scale(i, y[i], y[i]);
      der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
    }
    der2 = std::sqrt(der2 / n) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf / n));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, opt.max_step, std::abs(s1 - s0)});
  }

  double prev_event = opt.event ? opt.event(s, y) : 0.0;
  double facold = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (dir * (s1 - s) > 0.0) {
    if (++steps > opt.max_steps) fail("maximum number of steps exceeded", s);
    bool last = false;
    if (h >= std::abs(s1 - s)) {
      h = std::abs(s1 - s);
      last = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(s))) fail("step size underflow", s);
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    rhs(s + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(s + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(s + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(s + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double snew = last ? s1 : s + hs;
    rhs(snew, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(snew, ynew, k7);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      yerr[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double q = yerr[i] / scale(i, y[i], ynew[i]);
      err += q * q;
      finite = finite && std::isfinite(ynew[i]) && std::isfinite(k7[i]);
    }
    err = std::sqrt(err / n);
    if (!finite) err = 1e10;

    // PI step-size controller (beta = 0.04).
    const double fac11 = std::pow(std::max(err, 1e-300), 0.2 - 0.04 * 0.75);
    double fac = fac11 / std::pow(facold, 0.04);
    fac = std::clamp(fac / 0.9, 1.0 / 10.0, 5.0);
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      // Continuous extension coefficients.
      const std::size_t base = traj.coeff_.size();
      traj.coeff_.resize(base + 5 * n);
      double* c = traj.coeff_.data() + base;
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        c[i] = y[i];
        c[n + i] = ydiff;
        c[2 * n + i] = bspl;
        c[3 * n + i] = ydiff - hs * k7[i] - bspl;
        c[4 * n + i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      traj.h_.push_back(hs);
      traj.s_.push_back(snew);
      traj.states_.insert(traj.states_.end(), ynew.begin(), ynew.end());

      if (opt.event) {
        const double g = opt.event(snew, ynew);
        if (prev_event > 0.0 && g <= 0.0) {
          // Bisection on the dense output.
          const std::size_t step = traj.h_.size() - 1;
          double lo = s, hi = snew;
          std::vector<double> probe(n);
          for (int it = 0; it < 200 && std::abs(hi - lo) > 4e-16 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < n; ++i) probe[i] = traj.dense(step, mid, i);
            if (opt.event(mid, probe) > 0.0) lo = mid;
            else hi = mid;
          }
          for (std::size_t i = 0; i < n; ++i) probe[i] = traj.dense(step, hi, i);
          traj.s_.back() = hi;
          std::copy(probe.begin(), probe.end(), traj.states_.end() - n);
          traj.event_hit_ = true;
          traj.event_s_ = hi;
          return traj;
        }
        prev_event = g;
      }

      std::swap(y, ynew);
      std::swap(k1, k7);
      s = snew;
      if (last) break;
      hnew = std::min(hnew, opt.max_step);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
    } else {
      hnew = h / std::min(1.0 / 0.2, fac11 / 0.9);
      last_rejected = true;
    }
    h = hnew;
  }
  return traj;
}

}  // namespace layerspec::num
