#include "archsage/assessor.hpp"

#include <cmath>
#include <ostream>

namespace archsage::assess {

namespace {

double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  double sq = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return kind == DistanceKind::SquaredEuclidean ? sq : std::sqrt(sq);
}

}  // namespace

void validate_config(const GraphConfig& cfg) {
  if (!(cfg.sigma > 0.0)) raise(ErrorCode::InvalidArgument, "sigma must be > 0");
  if (!(cfg.tau >= 0.0 && cfg.tau < 1.0)) raise(ErrorCode::InvalidArgument, "tau must be in [0,1)");
}

double similarity(std::span<const double> e_i, std::span<const double> e_j,
                  const GraphConfig& cfg) {
  if (e_i.size() != e_j.size()) {
    raise(ErrorCode::ShapeMismatch, "similarity of vectors with different dims");
  }
  validate_config(cfg);
  return std::exp(-distance(e_i, e_j, cfg.distance) / (2.0 * cfg.sigma * cfg.sigma));
}

RelationGraph RelationGraph::identity(int n) {
  RelationGraph g;
  g.a = num::Matrix(n, n, 0.0);
  g.a_hat = num::Matrix(n, n, 0.0);
  g.degrees.assign(static_cast<size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    g.a.at(i, i) = 1.0;
    g.a_hat.at(i, i) = 1.0;
  }
  return g;
}

RelationGraph build_graph(const num::Matrix& emb, const GraphConfig& cfg, GraphCache* cache) {
  validate_config(cfg);
  if (emb.rows < 1) raise(ErrorCode::ShapeMismatch, "build_graph needs at least one row");
  num::require_finite(emb, "build_graph embeddings");

  const int n = emb.rows;
  RelationGraph g;
  g.a = num::Matrix(n, n, 0.0);
  const double inv_two_sigma_sq = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
  for (int i = 0; i < n; ++i) {
    g.a.at(i, i) = 1.0;
    std::span<const double> ei(emb.row(i), static_cast<size_t>(emb.cols));
    for (int j = i + 1; j < n; ++j) {
      std::span<const double> ej(emb.row(j), static_cast<size_t>(emb.cols));
      const double s = std::exp(-distance(ei, ej, cfg.distance) * inv_two_sigma_sq);
      const double kept = s > cfg.tau ? s : 0.0;
      g.a.at(i, j) = kept;
      g.a.at(j, i) = kept;
    }
  }

  g.degrees.assign(static_cast<size_t>(n), 0.0);
  std::vector<double> inv_sqrt(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) d += g.a.at(i, j);
    g.degrees[static_cast<size_t>(i)] = d;
    inv_sqrt[static_cast<size_t>(i)] = 1.0 / std::sqrt(d);
  }

  g.a_hat = num::Matrix(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g.a_hat.at(i, j) = g.a.at(i, j) * inv_sqrt[static_cast<size_t>(i)] * inv_sqrt[static_cast<size_t>(j)];
    }
  }

  if (cache) {
    cache->emb = emb;
    cache->cfg = cfg;
    cache->a = g.a;
    cache->degrees = g.degrees;
    cache->inv_sqrt_deg = inv_sqrt;
  }
  return g;
}

num::Matrix graph_backward(const GraphCache& cache, const num::Matrix& da_hat) {
  const int n = cache.a.rows;
  const int dim = cache.emb.cols;
  if (da_hat.rows != n || da_hat.cols != n) {
    raise(ErrorCode::ShapeMismatch, "graph_backward gradient shape");
  }

  // d(loss)/d(degree_k): A-hat_kl depends on d_k through both scale factors.
  std::vector<double> ddeg(static_cast<size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const double dk = cache.degrees[static_cast<size_t>(k)];
    const double coef = -0.5 / (dk * std::sqrt(dk));  // d(d^-1/2)/dd
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      const double a_kl = cache.a.at(k, l);
      if (a_kl == 0.0) continue;
      acc += (da_hat.at(k, l) + da_hat.at(l, k)) * a_kl * cache.inv_sqrt_deg[static_cast<size_t>(l)];
    }
    ddeg[static_cast<size_t>(k)] = coef * acc;
  }

  const double inv_two_sigma_sq = 1.0 / (2.0 * cache.cfg.sigma * cache.cfg.sigma);
  num::Matrix demb(n, dim, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = cache.a.at(i, j);
      if (s == 0.0) continue;  // thresholded out: straight-through zero gradient
      // One free parameter per unordered pair; it appears at (i,j) and (j,i)
      // and feeds both degrees.
      const double dtheta = (da_hat.at(i, j) + da_hat.at(j, i)) *
                                cache.inv_sqrt_deg[static_cast<size_t>(i)] *
                                cache.inv_sqrt_deg[static_cast<size_t>(j)] +
                            ddeg[static_cast<size_t>(i)] + ddeg[static_cast<size_t>(j)];
      const double* ei = cache.emb.row(i);
      const double* ej = cache.emb.row(j);
      double scale;
      if (cache.cfg.distance == DistanceKind::SquaredEuclidean) {
        // ds/de_i = -s/(2 sigma^2) * 2 (e_i - e_j)
        scale = dtheta * (-s) * inv_two_sigma_sq * 2.0;
      } else {
        double dist = 0.0;
        for (int k = 0; k < dim; ++k) {
          const double d = ei[k] - ej[k];
          dist += d * d;
        }
        dist = std::sqrt(dist);
        if (dist < 1e-12) continue;  // kink at coincident points
        scale = dtheta * (-s) * inv_two_sigma_sq / dist;
      }
      double* di = demb.row(i);
      double* dj = demb.row(j);
      for (int k = 0; k < dim; ++k) {
        const double diff = ei[k] - ej[k];
        di[k] += scale * diff;
        dj[k] -= scale * diff;
      }
    }
  }
  return demb;
}

AssessorWeights init_assessor(int embed_dim, int hidden, RngStream& rng) {
  AssessorWeights w;
  const double lim0 = std::sqrt(6.0 / (embed_dim + hidden));
  w.w0 = num::Matrix(embed_dim, hidden);
  for (double& v : w.w0.data) v = (2.0 * rng.uniform() - 1.0) * lim0;
  const double lim1 = std::sqrt(6.0 / (hidden + 1));
  w.w1 = num::Matrix(hidden, 1);
  for (double& v : w.w1.data) v = (2.0 * rng.uniform() - 1.0) * lim1;
  return w;
}

num::Matrix gcn_forward(const num::Matrix& emb, const RelationGraph& graph,
                        const AssessorWeights& weights, GcnCache* cache) {
  if (emb.rows != graph.size()) {
    raise(ErrorCode::ShapeMismatch, "gcn_forward: " + std::to_string(emb.rows) +
                                        " embeddings vs graph of size " +
                                        std::to_string(graph.size()));
  }
  if (emb.cols != weights.w0.rows || weights.w0.cols != weights.w1.rows || weights.w1.cols != 1) {
    raise(ErrorCode::ShapeMismatch, "gcn_forward weight shapes");
  }
  num::Matrix h0 = num::matmul(graph.a_hat, emb);
  num::Matrix z0 = num::matmul(h0, weights.w0);
  num::Matrix h1 = num::relu(z0);
  num::Matrix h2 = num::matmul(graph.a_hat, h1);
  num::Matrix y = num::matmul(h2, weights.w1);
  if (cache) {
    cache->emb = emb;
    cache->h0 = std::move(h0);
    cache->z0 = std::move(z0);
    cache->h1 = std::move(h1);
    cache->h2 = std::move(h2);
  }
  return y;
}

GcnGrads gcn_backward(const RelationGraph& graph, const AssessorWeights& weights,
                      const GcnCache& cache, const num::Matrix& dy) {
  GcnGrads g;
  g.dw1 = num::matmul(num::transpose(cache.h2), dy);
  num::Matrix dh2 = num::matmul(dy, num::transpose(weights.w1));

  // h2 = A-hat * h1
  g.da_hat = num::matmul(dh2, num::transpose(cache.h1));
  num::Matrix dh1 = num::matmul(num::transpose(graph.a_hat), dh2);

  num::Matrix dz0 = num::relu_backward(cache.z0, dh1);
  g.dw0 = num::matmul(num::transpose(cache.h0), dz0);
  num::Matrix dh0 = num::matmul(dz0, num::transpose(weights.w0));

  // h0 = A-hat * emb
  num::add_inplace(g.da_hat, num::matmul(dh0, num::transpose(cache.emb)));
  g.demb = num::matmul(num::transpose(graph.a_hat), dh0);
  return g;
}

double regression_loss(const num::Matrix& preds, std::span<const double> labels,
                       std::span<const int> labeled_rows) {
  if (labeled_rows.empty()) raise(ErrorCode::EmptyLabeledBatch, "no labeled rows in batch");
  if (labels.size() != labeled_rows.size()) {
    raise(ErrorCode::LengthMismatch, "labels vs labeled_rows");
  }
  double total = 0.0;
  for (size_t k = 0; k < labeled_rows.size(); ++k) {
    const double d = preds.at(labeled_rows[k], 0) - labels[k];
    total += d * d;
  }
  return total / static_cast<double>(labeled_rows.size());
}

num::Matrix regression_loss_backward(const num::Matrix& preds, std::span<const double> labels,
                                     std::span<const int> labeled_rows) {
  num::Matrix dy(preds.rows, 1, 0.0);
  const double inv = 2.0 / static_cast<double>(labeled_rows.size());
  for (size_t k = 0; k < labeled_rows.size(); ++k) {
    dy.at(labeled_rows[k], 0) = inv * (preds.at(labeled_rows[k], 0) - labels[k]);
  }
  return dy;
}

void dump_graph(const RelationGraph& graph, std::ostream& os) {
  const int n = graph.size();
  int edges = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = graph.a.at(i, j);
      if (s > 0.0) {
        os << i << " " << j << " " << s << "\n";
        ++edges;
      }
    }
  }
  double min_deg = n ? graph.degrees[0] : 0.0, max_deg = min_deg, sum_deg = 0.0;
  for (double d : graph.degrees) {
    min_deg = std::min(min_deg, d);
    max_deg = std::max(max_deg, d);
    sum_deg += d;
  }
  os << "# nodes=" << n << " edges=" << edges << " degree_min=" << min_deg
     << " degree_mean=" << (n ? sum_deg / n : 0.0) << " degree_max=" << max_deg << "\n";
}

}  // namespace archsage::assess
