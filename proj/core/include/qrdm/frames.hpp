#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrdm/rdm.hpp"

namespace qrdm {

struct Event {
  double t = 0;
  double x = 0;
  std::string frame = "S";
};

struct SynchronyParams {
  double v = 0;
  double k = 0;
  double k_prime = 0;
};

double lorentz_gamma(double v, double c = 1.0);
Event lorentz_transform(const Event& e, double v, double c = 1.0);
// c^2 dt^2 - dx^2
double interval(const Event& a, const Event& b, double c = 1.0);
double simultaneity_frame(const Event& a, const Event& b, double c = 1.0);

struct EntangledStay {
  double t = 0;
  double x1 = 0;
  double x2 = 0;
};
std::pair<double, double> entangled_frame_velocities(const EntangledStay& a, const EntangledStay& b,
                                                     double c = 1.0);

double edwards_winnie_eta(const SynchronyParams& p, double c = 1.0);
Event edwards_winnie_transform(const Event& e, const SynchronyParams& p, double c = 1.0);

struct OneWaySpeeds {
  double plus_x = 0;
  double minus_x = 0;
  double plus_x_prime = 0;
  double minus_x_prime = 0;
};
// c/(1 - k), c/(1 + k) in S and the same with k' in S'.
OneWaySpeeds one_way_speeds(const SynchronyParams& p, double c = 1.0);

// Maps a site index to a position.
struct SiteGeometry {
  double x0 = 0;
  double dx = 1;
  double position(std::uint32_t site) const noexcept { return x0 + dx * static_cast<double>(site); }
};

struct CorrelationStats {
  std::size_t pairs = 0;
  std::size_t kept = 0;
  std::size_t reversed = 0;
  double kept_fraction = 0;
  double reversed_fraction = 0;
  double tolerance = 0;
  double velocity = 0;
};

// tolerance <= 0 selects half the boosted inter-instant spacing, gamma dt / 2.
CorrelationStats boosted_correlation_stats(const PairedStayTrajectory& p, const SiteGeometry& geometry, double v,
                                           double tolerance = 0, double c = 1.0);

std::size_t multiparticle_appearance_scan(const StayTrajectory& t, const SiteGeometry& geometry, double v,
                                          double tolerance, double c = 1.0);

// Window between the boosted times of two simultaneous S-frame stays.
struct CollapseWindow {
  double t1_prime = 0;
  double t2_prime = 0;
  double begin = 0;
  double end = 0;
};
CollapseWindow collapse_window(double t, double x1, double x2, double v, double c = 1.0);

}  // namespace qrdm
