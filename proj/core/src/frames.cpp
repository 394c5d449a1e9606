#include "qrdm/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qrdm/errors.hpp"

namespace qrdm {

namespace {

void check_event(const Event& e) {
  if (!std::isfinite(e.t) || !std::isfinite(e.x)) throw DomainError("event coordinates must be finite");
}

void check_velocity(double v, double c) {
  if (!(c > 0) || !std::isfinite(c)) throw DomainError("c must be positive");
  if (!(std::abs(v) < c)) throw DomainError("|v| = " + std::to_string(std::abs(v)) + " must be below c");
}

double boosted_time(double t, double x, double v, double c) {
  return (t - x * v / (c * c)) / std::sqrt(1.0 - (v / c) * (v / c));
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

double pair_velocity(double dt, double dx, double c, const char* which) {
  if (dt == 0) return 0.0;
  if (!(std::abs(dx) > c * std::abs(dt))) throw NoSuchFrame(std::string(which) + ": pair is not spacelike");
  return c * c * dt / dx;
}

}  // namespace

double lorentz_gamma(double v, double c) {
  check_velocity(v, c);
  return 1.0 / std::sqrt(1.0 - (v / c) * (v / c));
}

Event lorentz_transform(const Event& e, double v, double c) {
  check_event(e);
  const double g = lorentz_gamma(v, c);
  return {g * (e.t - e.x * v / (c * c)), g * (e.x - v * e.t), e.frame + "'"};
}

double interval(const Event& a, const Event& b, double c) {
  const double dt = b.t - a.t;
  const double dx = b.x - a.x;
  return c * c * dt * dt - dx * dx;
}

double simultaneity_frame(const Event& a, const Event& b, double c) {
  check_event(a);
  check_event(b);
  const double dx = b.x - a.x;
  const double dt = b.t - a.t;
  if (!(std::abs(dx) > c * std::abs(dt))) throw NoSuchFrame("event pair is timelike or lightlike");
  const double v = c * c * dt / dx;
  const Event ta = lorentz_transform(a, v, c);
  const Event tb = lorentz_transform(b, v, c);
  if (!same_time(ta.t, tb.t)) throw NumericError("simultaneity", "boosted times differ after solving for v");
  return v;
}

std::pair<double, double> entangled_frame_velocities(const EntangledStay& a, const EntangledStay& b, double c) {
  const double dt = a.t - b.t;
  const double v1 = pair_velocity(dt, a.x1 - b.x2, c, "v'");
  const double v2 = pair_velocity(dt, a.x2 - b.x1, c, "v''");
  if (!same_time(boosted_time(a.t, a.x1, v1, c), boosted_time(b.t, b.x2, v1, c)) ||
      !same_time(boosted_time(a.t, a.x2, v2, c), boosted_time(b.t, b.x1, v2, c)))
    throw NumericError("simultaneity", "entangled stays are not simultaneous in the solved frames");
  return {v1, v2};
}

double edwards_winnie_eta(const SynchronyParams& p, double c) {
  check_velocity(p.v, c);
  if (std::abs(p.k) > 1 || std::abs(p.k_prime) > 1) throw DomainError("synchrony parameters must lie in [-1, 1]");
  const double b = p.v / c;
  const double den = (1.0 + b * p.k) * (1.0 + b * p.k) - b * b;
  if (!(den > 0)) throw DomainError("degenerate eta: (1 + beta k)^2 - beta^2 <= 0");
  return 1.0 / std::sqrt(den);
}

Event edwards_winnie_transform(const Event& e, const SynchronyParams& p, double c) {
  check_event(e);
  const double eta = edwards_winnie_eta(p, c);
  const double b = p.v / c;
  const double t = eta * (1.0 + b * (p.k + p.k_prime)) * e.t + eta * (b * (p.k * p.k - 1.0) + p.k - p.k_prime) * e.x / c;
  return {t, eta * (e.x - p.v * e.t), e.frame + "'"};
}

OneWaySpeeds one_way_speeds(const SynchronyParams& p, double c) {
  if (!(std::abs(p.k) < 1) || !(std::abs(p.k_prime) < 1)) throw DomainError("|k| = 1 gives an infinite one-way speed");
  return {c / (1.0 - p.k), c / (1.0 + p.k), c / (1.0 - p.k_prime), c / (1.0 + p.k_prime)};
}

CorrelationStats boosted_correlation_stats(const PairedStayTrajectory& p, const SiteGeometry& geometry, double v,
                                           double tolerance, double c) {
  const std::size_t n = p.instants();
  if (p.stays2.size() != n || p.branches.size() != n) throw DimensionMismatch("paired trajectory columns differ");
  const double g = lorentz_gamma(v, c);
  CorrelationStats s;
  s.velocity = v;
  s.tolerance = tolerance > 0 ? tolerance : 0.5 * g * p.dt_instant;
  std::vector<double> t1(n), t2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = p.dt_instant * static_cast<double>(i);
    t1[i] = boosted_time(t, geometry.position(p.stays1[i]), v, c);
    t2[i] = boosted_time(t, geometry.position(p.stays2[i]), v, c);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t2[a] < t2[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = t2[order[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t1[i]);
    std::size_t best = n;
    double gap = 0;
    for (auto cand : {it, it == sorted.begin() ? it : it - 1}) {
      if (cand == sorted.end()) continue;
      const double d = std::abs(*cand - t1[i]);
      if (best == n || d < gap) {
        best = static_cast<std::size_t>(cand - sorted.begin());
        gap = d;
      }
    }
    if (best == n || gap > s.tolerance) continue;
    ++s.pairs;
    if (p.branches[i] == p.branches[order[best]])
      ++s.kept;
    else
      ++s.reversed;
  }
  if (s.pairs == 0) throw InsufficientOverlap("no coincident stays within tolerance " + std::to_string(s.tolerance));
  s.kept_fraction = static_cast<double>(s.kept) / static_cast<double>(s.pairs);
  s.reversed_fraction = static_cast<double>(s.reversed) / static_cast<double>(s.pairs);
  return s;
}

std::size_t multiparticle_appearance_scan(const StayTrajectory& t, const SiteGeometry& geometry, double v,
                                          double tolerance, double c) {
  const std::size_t n = t.instants();
  std::vector<std::pair<double, double>> ev(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = geometry.position(t.stays[i]);
    ev[i] = {boosted_time(t.dt_instant * static_cast<double>(i), x, v, c), x};
  }
  std::sort(ev.begin(), ev.end());
  std::size_t count = 0;
  std::size_t lo = 0;
  for (std::size_t j = 0; j < n; ++j) {
    while (ev[j].first - ev[lo].first > tolerance) ++lo;
    for (std::size_t i = lo; i < j; ++i)
      if (ev[i].second != ev[j].second) ++count;
  }
  return count;
}

CollapseWindow collapse_window(double t, double x1, double x2, double v, double c) {
  check_velocity(v, c);
  CollapseWindow w;
  w.t1_prime = boosted_time(t, x1, v, c);
  w.t2_prime = boosted_time(t, x2, v, c);
  w.begin = std::min(w.t1_prime, w.t2_prime);
  w.end = std::max(w.t1_prime, w.t2_prime);
  return w;
}

}  // namespace qrdm
