#include "archsage/embedder.hpp"

#include <algorithm>
#include <cmath>

namespace archsage::embed {

std::vector<num::Matrix*> MlpWeights::param_ptrs() {
  std::vector<num::Matrix*> out;
  out.reserve(w.size() * 2);
  for (size_t i = 0; i < w.size(); ++i) {
    out.push_back(&w[i]);
    out.push_back(&b[i]);
  }
  return out;
}

MlpWeights init_mlp(const std::vector<int>& dims, RngStream& rng) {
  if (dims.size() < 2) raise(ErrorCode::InvalidArgument, "mlp needs at least input and output dims");
  MlpWeights weights;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    num::Matrix w(fan_in, fan_out);
    for (double& v : w.data) v = (2.0 * rng.uniform() - 1.0) * limit;
    weights.w.push_back(std::move(w));
    weights.b.emplace_back(1, fan_out, 0.0);
  }
  return weights;
}

num::Matrix mlp_forward(const num::Matrix& x, const MlpWeights& weights, MlpCache* cache) {
  if (weights.num_layers() == 0) raise(ErrorCode::ShapeMismatch, "mlp has no layers");
  if (x.cols != weights.in_dim()) {
    raise(ErrorCode::ShapeMismatch, "mlp input dim " + std::to_string(x.cols) + ", expected " +
                                        std::to_string(weights.in_dim()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->preact.clear();
  }
  num::Matrix h = x;
  const int n_layers = weights.num_layers();
  for (int l = 0; l < n_layers; ++l) {
    if (cache) cache->inputs.push_back(h);
    num::Matrix z = num::affine(h, weights.w[static_cast<size_t>(l)], weights.b[static_cast<size_t>(l)]);
    if (l + 1 < n_layers) {
      if (cache) cache->preact.push_back(z);
      h = num::relu(z);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

num::Matrix mlp_backward(const MlpWeights& weights, const MlpCache& cache, const num::Matrix& dout,
                         MlpWeights& grads) {
  const int n_layers = weights.num_layers();
  num::Matrix d = dout;
  for (int l = n_layers - 1; l >= 0; --l) {
    if (l < n_layers - 1) {
      d = num::relu_backward(cache.preact[static_cast<size_t>(l)], d);
    }
    num::AffineGrads g = num::affine_backward(cache.inputs[static_cast<size_t>(l)],
                                              weights.w[static_cast<size_t>(l)], d);
    num::add_inplace(grads.w[static_cast<size_t>(l)], g.dw);
    num::add_inplace(grads.b[static_cast<size_t>(l)], g.db);
    d = std::move(g.dx);
  }
  return d;
}

MlpWeights zero_grads_like(const MlpWeights& weights) {
  MlpWeights g;
  for (size_t l = 0; l < weights.w.size(); ++l) {
    g.w.emplace_back(weights.w[l].rows, weights.w[l].cols, 0.0);
    g.b.emplace_back(1, weights.b[l].cols, 0.0);
  }
  return g;
}

num::Matrix encode_batch(const num::Matrix& features, const EncoderWeights& enc) {
  return mlp_forward(features, enc);
}

num::Matrix decode_batch(const num::Matrix& embedding, const DecoderWeights& dec) {
  return mlp_forward(embedding, dec);
}

double reconstruction_loss(const num::Matrix& feat_labeled, const num::Matrix& feat_unlabeled,
                           const EncoderWeights& enc, const DecoderWeights& dec) {
  if (feat_labeled.rows == 0 && feat_unlabeled.rows == 0) {
    raise(ErrorCode::InvalidArgument, "reconstruction_loss needs at least one example");
  }
  double loss = 0.0;
  if (feat_labeled.rows > 0) {
    loss += num::mse(decode_batch(encode_batch(feat_labeled, enc), dec), feat_labeled);
  }
  if (feat_unlabeled.rows > 0) {
    loss += num::mse(decode_batch(encode_batch(feat_unlabeled, enc), dec), feat_unlabeled);
  }
  return loss;
}

std::pair<EncoderWeights, DecoderWeights> pretrain(const data::ArchDataset& ds,
                                                   const PretrainConfig& cfg,
                                                   const std::vector<int>& subset) {
  if (ds.size() == 0) raise(ErrorCode::InvalidArgument, "pretrain on empty dataset");
  if (cfg.batch_size < 1) raise(ErrorCode::InvalidArgument, "pretrain batch_size must be >= 1");

  std::vector<int> rows = subset;
  if (rows.empty()) {
    rows.resize(static_cast<size_t>(ds.size()));
    for (int i = 0; i < ds.size(); ++i) rows[static_cast<size_t>(i)] = i;
  }

  const int feat_dim = ds.feature_dim();
  std::vector<int> enc_dims = {feat_dim};
  enc_dims.insert(enc_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  enc_dims.push_back(cfg.embed_dim);
  std::vector<int> dec_dims(enc_dims.rbegin(), enc_dims.rend());

  RngStream init_rng(derive_seed(cfg.seed, 0xAE01));
  EncoderWeights enc = init_mlp(enc_dims, init_rng);
  DecoderWeights dec = init_mlp(dec_dims, init_rng);
  if (cfg.epochs <= 0) return {enc, dec};

  std::vector<num::Matrix*> params = enc.param_ptrs();
  {
    auto dec_params = dec.param_ptrs();
    params.insert(params.end(), dec_params.begin(), dec_params.end());
  }
  num::AdamState adam = num::AdamState::for_params(params, {.lr = cfg.lr});

  RngStream order_rng(derive_seed(cfg.seed, 0xAE02));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(rows);
    for (size_t start = 0; start < rows.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t end = std::min(rows.size(), start + static_cast<size_t>(cfg.batch_size));
      std::vector<int> batch_l, batch_u;
      for (size_t i = start; i < end; ++i) {
        if (ds.labels[static_cast<size_t>(rows[i])].has_value()) {
          batch_l.push_back(rows[i]);
        } else {
          batch_u.push_back(rows[i]);
        }
      }

      EncoderWeights enc_grads = zero_grads_like(enc);
      DecoderWeights dec_grads = zero_grads_like(dec);
      // Two separately-averaged terms, as in the reconstruction objective.
      for (const std::vector<int>* part : {&batch_l, &batch_u}) {
        if (part->empty()) continue;
        const num::Matrix x = num::gather_rows(ds.features, *part);
        MlpCache enc_cache, dec_cache;
        const num::Matrix emb = mlp_forward(x, enc, &enc_cache);
        const num::Matrix recon = mlp_forward(emb, dec, &dec_cache);
        const num::Matrix drecon = num::mse_backward(recon, x);
        const num::Matrix demb = mlp_backward(dec, dec_cache, drecon, dec_grads);
        mlp_backward(enc, enc_cache, demb, enc_grads);
      }

      std::vector<num::Matrix> grads;
      for (size_t l = 0; l < enc_grads.w.size(); ++l) {
        grads.push_back(enc_grads.w[l]);
        grads.push_back(enc_grads.b[l]);
      }
      for (size_t l = 0; l < dec_grads.w.size(); ++l) {
        grads.push_back(dec_grads.w[l]);
        grads.push_back(dec_grads.b[l]);
      }
      num::adam_step(params, grads, adam);
    }
  }
  return {enc, dec};
}

}  // namespace archsage::embed
