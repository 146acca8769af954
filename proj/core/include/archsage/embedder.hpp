#pragma once

#include <utility>
#include <vector>

#include "archsage/dataset.hpp"
#include "archsage/matrix.hpp"

namespace archsage::embed {

// Plain fully-connected stack: affine -> ReLU -> ... -> affine, ReLU between
// every pair of affines, linear output.
struct MlpWeights {
  std::vector<num::Matrix> w;  // layer i: in_i x out_i
  std::vector<num::Matrix> b;  // layer i: 1 x out_i

  int num_layers() const { return static_cast<int>(w.size()); }
  int in_dim() const { return w.empty() ? 0 : w.front().rows; }
  int out_dim() const { return w.empty() ? 0 : w.back().cols; }

  std::vector<num::Matrix*> param_ptrs();
  bool operator==(const MlpWeights&) const = default;
};

using EncoderWeights = MlpWeights;
using DecoderWeights = MlpWeights;

// dims = {in, hidden..., out}; Glorot-uniform weights, zero biases.
MlpWeights init_mlp(const std::vector<int>& dims, RngStream& rng);

struct MlpCache {
  std::vector<num::Matrix> inputs;     // input to each affine layer
  std::vector<num::Matrix> preact;     // affine outputs before ReLU (hidden layers)
};

num::Matrix mlp_forward(const num::Matrix& x, const MlpWeights& weights, MlpCache* cache = nullptr);

// Returns dX; accumulates per-layer gradients into grads (same shapes as weights).
num::Matrix mlp_backward(const MlpWeights& weights, const MlpCache& cache, const num::Matrix& dout,
                         MlpWeights& grads);

MlpWeights zero_grads_like(const MlpWeights& weights);

// Encoder E: hand-crafted features -> learned representation.
num::Matrix encode_batch(const num::Matrix& features, const EncoderWeights& enc);

// Decoder D: learned representation -> reconstructed features.
num::Matrix decode_batch(const num::Matrix& embedding, const DecoderWeights& dec);

// Reconstruction objective: the labeled and unlabeled mean squared errors are
// averaged separately and then added; an empty side contributes zero.
double reconstruction_loss(const num::Matrix& feat_labeled, const num::Matrix& feat_unlabeled,
                           const EncoderWeights& enc, const DecoderWeights& dec);

struct PretrainConfig {
  int epochs = 50;
  int batch_size = 256;
  double lr = 0.001;
  uint64_t seed = 0;
  int embed_dim = 32;
  std::vector<int> hidden = {128, 64};
};

// Minimizes the reconstruction loss alone with Adam over mini-batches drawn
// from `subset` (all rows when empty). Deterministic given the seed.
std::pair<EncoderWeights, DecoderWeights> pretrain(const data::ArchDataset& ds,
                                                   const PretrainConfig& cfg,
                                                   const std::vector<int>& subset = {});

}  // namespace archsage::embed
