#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qrdm::stats {

struct ChiSquareResult {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

// Pearson goodness of fit. Bins with zero expectation must have zero counts and are dropped.
ChiSquareResult chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probabilities);
double chi_square_sf(double statistic, std::size_t dof);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

double mean(std::span<const double> xs);
double standard_error(std::span<const double> xs);
double total_variation(std::span<const double> p, std::span<const double> q);
// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> xs);

}  // namespace qrdm::stats
