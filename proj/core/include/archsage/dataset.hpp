#pragma once

#include <optional>
#include <string>
#include <vector>

#include "archsage/archspace.hpp"
#include "archsage/matrix.hpp"

namespace archsage::data {

// Deterministic stand-in for trained-network accuracy. Rewards a high-quality
// long operation path plus a direct skip connection, mildly penalizes wiring
// beyond a chain, and adds a small bonus for a live pooling node. Noise is a
// pure hash of (spec, seed), so the oracle is a function, not a process.
struct OracleParams {
  uint64_t seed = 0;
  double noise_std = 0.005;
  double base = 0.80;
  double w_path = 0.10;
  double w_skip = 0.03;
  double w_edge_excess = 0.02;
  double w_pool = 0.01;
  // Normalization constants so the structural terms live in [0,1]; they match
  // the default space (7 nodes -> at most 5 interior path nodes, 9 edges).
  double path_norm = 5.0;
  double edge_norm = 9.0;

  bool operator==(const OracleParams&) const = default;
};

double synth_performance(const space::CellSpec& spec, const OracleParams& oracle,
                         const space::SpaceParams& params);

struct ArchDataset {
  space::SpaceParams space_params;
  OracleParams oracle_params;
  std::vector<space::CellSpec> specs;
  num::Matrix features;                       // N x feature_dim
  std::vector<std::optional<double>> labels;  // present iff labeled
  std::vector<int> labeled_idx;
  std::vector<int> unlabeled_idx;

  int size() const { return static_cast<int>(specs.size()); }
  int n_labeled() const { return static_cast<int>(labeled_idx.size()); }
  int n_unlabeled() const { return static_cast<int>(unlabeled_idx.size()); }
  int feature_dim() const { return features.cols; }

  std::vector<double> labeled_values() const;

  bool operator==(const ArchDataset&) const = default;
};

// Samples n valid specs, labels a uniform random subset of size n_labeled via
// the oracle, leaves the rest unlabeled. Deterministic given seed.
ArchDataset build_dataset(int n, int n_labeled, uint64_t seed, const space::SpaceParams& params,
                          const OracleParams& oracle);

// Rebuilds index sets and features from specs + labels (after manual edits).
void rebuild_derived(ArchDataset& ds);

// JSON-lines on disk, one record per architecture:
//   {"adjacency": ..., "ops": ..., "accuracy": <real in [0,1] | null>}
// preceded by a '#' comment header carrying the space and oracle parameters.
void save_dataset(const ArchDataset& ds, const std::string& path);
ArchDataset load_dataset(const std::string& path);

}  // namespace archsage::data
