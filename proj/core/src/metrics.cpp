#include "archsage/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <json.hpp>

namespace archsage::metrics {

namespace {

void require_pair(std::span<const double> pred, std::span<const double> truth, size_t min_n) {
  if (pred.size() != truth.size()) {
    raise(ErrorCode::LengthMismatch, "pred has " + std::to_string(pred.size()) +
                                         " values, truth has " + std::to_string(truth.size()));
  }
  if (pred.size() < min_n) {
    raise(ErrorCode::LengthMismatch,
          "need at least " + std::to_string(min_n) + " values, got " + std::to_string(pred.size()));
  }
  for (double v : pred) {
    if (!std::isfinite(v)) raise(ErrorCode::NonFinite, "pred contains NaN or Inf");
  }
  for (double v : truth) {
    if (!std::isfinite(v)) raise(ErrorCode::NonFinite, "truth contains NaN or Inf");
  }
}

// Shared closing expression: both tau paths must produce identical floats.
double tau_from_counts(int64_t concordant, int64_t discordant, int64_t pairs_minus_pred_ties,
                       int64_t pairs_minus_truth_ties) {
  if (pairs_minus_pred_ties == 0 || pairs_minus_truth_ties == 0) {
    raise(ErrorCode::DegenerateInput, "kendall_tau undefined for a constant vector");
  }
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(pairs_minus_pred_ties) *
                   static_cast<double>(pairs_minus_truth_ties));
}

// Merge sort over values counting inversions (strict descents only).
int64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, size_t lo,
                         size_t hi) {
  if (hi - lo < 2) return 0;
  const size_t mid = lo + (hi - lo) / 2;
  int64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      inv += static_cast<int64_t>(mid - a);
      scratch[out++] = v[b++];
    } else {
      scratch[out++] = v[a++];
    }
  }
  while (a < mid) scratch[out++] = v[a++];
  while (b < hi) scratch[out++] = v[b++];
  std::copy(scratch.begin() + static_cast<long>(lo), scratch.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return inv;
}

int64_t tied_pairs_in_sorted(const std::vector<double>& v) {
  int64_t t = 0;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    const int64_t g = static_cast<int64_t>(j - i);
    t += g * (g - 1) / 2;
    i = j;
  }
  return t;
}

}  // namespace

double kendall_tau_bruteforce(std::span<const double> pred, std::span<const double> truth) {
  require_pair(pred, truth, 2);
  const size_t n = pred.size();
  int64_t concordant = 0, discordant = 0, tied_pred_only = 0, tied_truth_only = 0, tied_both = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double dp = pred[i] - pred[j];
      const double dt = truth[i] - truth[j];
      if (dp == 0.0 && dt == 0.0) {
        ++tied_both;
      } else if (dp == 0.0) {
        ++tied_pred_only;
      } else if (dt == 0.0) {
        ++tied_truth_only;
      } else if ((dp > 0.0) == (dt > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  return tau_from_counts(concordant, discordant, concordant + discordant + tied_truth_only,
                         concordant + discordant + tied_pred_only);
}

double kendall_tau(std::span<const double> pred, std::span<const double> truth) {
  require_pair(pred, truth, 2);
  const size_t n = pred.size();
  const int64_t n0 = static_cast<int64_t>(n) * (static_cast<int64_t>(n) - 1) / 2;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (pred[a] != pred[b]) return pred[a] < pred[b];
    return truth[a] < truth[b];
  });

  // Tied-pair counts from group sizes in the (pred, truth) ordering.
  int64_t ties_pred = 0, ties_both = 0;
  {
    size_t i = 0;
    while (i < n) {
      size_t j = i + 1;
      while (j < n && pred[order[j]] == pred[order[i]]) ++j;
      const int64_t g = static_cast<int64_t>(j - i);
      ties_pred += g * (g - 1) / 2;
      size_t a = i;
      while (a < j) {
        size_t b = a + 1;
        while (b < j && truth[order[b]] == truth[order[a]]) ++b;
        const int64_t gb = static_cast<int64_t>(b - a);
        ties_both += gb * (gb - 1) / 2;
        a = b;
      }
      i = j;
    }
  }

  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) y[i] = truth[order[i]];
  std::vector<double> scratch(n);
  // Equal-pred groups were pre-sorted by truth, so every counted inversion
  // crosses a strict pred difference: inversions == discordant pairs.
  const int64_t discordant = count_inversions(y, scratch, 0, n);

  std::sort(y.begin(), y.end());
  const int64_t ties_truth = tied_pairs_in_sorted(y);

  const int64_t strictly_ordered = n0 - ties_pred - ties_truth + ties_both;  // C + D
  const int64_t concordant = strictly_ordered - discordant;
  return tau_from_counts(concordant, discordant, n0 - ties_pred, n0 - ties_truth);
}

double mse_metric(std::span<const double> pred, std::span<const double> truth) {
  require_pair(pred, truth, 1);
  double total = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    total += d * d;
  }
  return total / static_cast<double>(pred.size());
}

double pearson(std::span<const double> pred, std::span<const double> truth) {
  require_pair(pred, truth, 2);
  const size_t n = pred.size();
  double mean_p = 0.0, mean_t = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_p += pred[i];
    mean_t += truth[i];
  }
  mean_p /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double spt = 0.0, spp = 0.0, stt = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dp = pred[i] - mean_p;
    const double dt = truth[i] - mean_t;
    spt += dp * dt;
    spp += dp * dp;
    stt += dt * dt;
  }
  if (spp == 0.0 || stt == 0.0) {
    raise(ErrorCode::DegenerateInput, "pearson undefined for a constant vector");
  }
  return spt / std::sqrt(spp * stt);
}

MetricsReport evaluate(std::span<const double> pred, std::span<const double> truth) {
  MetricsReport r;
  r.n = static_cast<int>(pred.size());
  r.ktau = kendall_tau(pred, truth);
  r.mse = mse_metric(pred, truth);
  r.pearson_r = pearson(pred, truth);
  return r;
}

std::string report_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["ktau"] = report.ktau;
  j["mse"] = report.mse;
  j["pearson_r"] = report.pearson_r;
  return j.dump();
}

}  // namespace archsage::metrics
