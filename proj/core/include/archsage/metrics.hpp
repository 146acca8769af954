#pragma once

#include <span>
#include <string>

#include "archsage/common.hpp"

namespace archsage::metrics {

// Kendall tau-b, tie-corrected: (C - D) / sqrt((C+D+Tp)(C+D+Tt)) where Tp/Tt
// count pairs tied only in pred / only in truth. The fast path is Knight's
// O(n log n) merge-sort algorithm; the brute-force path enumerates all pairs.
// Both end in the same closing expression over the same integer counts, so
// they agree bitwise.
double kendall_tau(std::span<const double> pred, std::span<const double> truth);
double kendall_tau_bruteforce(std::span<const double> pred, std::span<const double> truth);

double mse_metric(std::span<const double> pred, std::span<const double> truth);

double pearson(std::span<const double> pred, std::span<const double> truth);

struct MetricsReport {
  int n = 0;
  double ktau = 0.0;
  double mse = 0.0;
  double pearson_r = 0.0;
};

MetricsReport evaluate(std::span<const double> pred, std::span<const double> truth);

// {"n":..., "ktau":..., "mse":..., "pearson_r":...}
std::string report_json(const MetricsReport& report);

}  // namespace archsage::metrics
