#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "archsage/matrix.hpp"

namespace archsage::assess {

enum class DistanceKind {
  SquaredEuclidean,  // default; smooth everywhere
  Euclidean,
};

struct GraphConfig {
  double sigma = 0.01;
  double tau = 1e-5;
  DistanceKind distance = DistanceKind::SquaredEuclidean;

  bool operator==(const GraphConfig&) const = default;
};

void validate_config(const GraphConfig& cfg);

// RBF similarity s = exp(-d / (2 sigma^2)); s(e, e) = 1, symmetric, strictly
// decreasing in the distance.
double similarity(std::span<const double> e_i, std::span<const double> e_j,
                  const GraphConfig& cfg);

struct RelationGraph {
  num::Matrix a;          // similarity matrix, unit diagonal, thresholded
  num::Matrix a_hat;      // D^{-1/2} A D^{-1/2}
  std::vector<double> degrees;

  int size() const { return a.rows; }

  static RelationGraph identity(int n);
};

// Cached forward state needed to push gradients from A-hat back to embeddings.
struct GraphCache {
  num::Matrix emb;
  GraphConfig cfg;
  num::Matrix a;
  std::vector<double> degrees;
  std::vector<double> inv_sqrt_deg;
};

// Off-diagonal entries keep s only when s > tau; the diagonal is fixed at 1.
RelationGraph build_graph(const num::Matrix& emb, const GraphConfig& cfg,
                          GraphCache* cache = nullptr);

// d(loss)/d(emb) given d(loss)/d(A-hat). Thresholded-out pairs carry zero
// gradient; kept pairs use the smooth RBF derivative.
num::Matrix graph_backward(const GraphCache& cache, const num::Matrix& da_hat);

struct AssessorWeights {
  num::Matrix w0;  // embed_dim x hidden
  num::Matrix w1;  // hidden x 1

  bool operator==(const AssessorWeights&) const = default;
};

AssessorWeights init_assessor(int embed_dim, int hidden, RngStream& rng);

struct GcnCache {
  num::Matrix emb;
  num::Matrix h0;  // A-hat * emb
  num::Matrix z0;  // h0 * W0
  num::Matrix h1;  // ReLU(z0)
  num::Matrix h2;  // A-hat * h1
};

// y-hat = A-hat * ReLU(A-hat * emb * W0) * W1; two propagation layers, no
// bias terms, linear output. Returns an n x 1 column.
num::Matrix gcn_forward(const num::Matrix& emb, const RelationGraph& graph,
                        const AssessorWeights& weights, GcnCache* cache = nullptr);

struct GcnGrads {
  num::Matrix demb;    // direct input gradient (through the propagation only)
  num::Matrix dw0;
  num::Matrix dw1;
  num::Matrix da_hat;  // gradient w.r.t. the propagation operator
};

GcnGrads gcn_backward(const RelationGraph& graph, const AssessorWeights& weights,
                      const GcnCache& cache, const num::Matrix& dy);

// Mean squared error over labeled rows only; unlabeled predictions are free.
double regression_loss(const num::Matrix& preds, std::span<const double> labels,
                       std::span<const int> labeled_rows);
num::Matrix regression_loss_backward(const num::Matrix& preds, std::span<const double> labels,
                                     std::span<const int> labeled_rows);

// Debug dump: one "i j s_ij" line per kept off-diagonal edge (i < j), then a
// degree summary.
void dump_graph(const RelationGraph& graph, std::ostream& os);

}  // namespace archsage::assess
