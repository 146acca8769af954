#pragma once

#include <string>
#include <vector>

#include "archsage/assessor.hpp"
#include "archsage/dataset.hpp"
#include "archsage/embedder.hpp"

namespace archsage::train {

struct TrainConfig {
  double lambda = 0.5;          // reconstruction weight in the combined loss
  int batch_size = 256;
  int epochs = 200;
  int labeled_per_batch = 0;    // 0 = auto: batch_size / 4 (1:3 labeled:unlabeled)
  double lr = 0.001;
  uint64_t seed = 0;
  assess::GraphConfig graph;
  int pretrain_epochs = 50;
  int embed_dim = 32;
  std::vector<int> encoder_hidden = {128, 64};
  int gcn_hidden = 64;
  bool use_autoencoder = true;  // false: hand-crafted features feed the GCN directly
  bool identity_graph = false;  // true: A-hat = I (no relation graph)
  // l2-normalize embeddings before the graph and GCN. Raw embeddings let the
  // network regulate graph density through its own scale, as with the
  // unnormalized distances the similarity scale factor was reported for.
  bool normalize_embeddings = false;
  int max_anchors = 512;
};

void validate_config(const TrainConfig& cfg);

struct LossBreakdown {
  double total = 0.0;
  double rg = 0.0;  // regression term
  double rc = 0.0;  // reconstruction term
};

// All trainable tensors of the end-to-end system.
struct ModelParams {
  embed::EncoderWeights enc;
  embed::DecoderWeights dec;
  assess::AssessorWeights gcn;

  // Fixed enumeration order: encoder layers, decoder layers, gcn.w0, gcn.w1.
  std::vector<num::Matrix*> param_ptrs();
  ModelParams zeros_like() const;
  std::vector<num::Matrix> take_grads();  // flattens in param_ptrs order
};

struct PipelineOptions {
  double lambda = 0.5;
  assess::GraphConfig graph;
  bool identity_graph = false;
  bool use_autoencoder = true;
  bool normalize_embeddings = false;
};

// One mini-batch: labeled rows first, then unlabeled rows.
struct BatchData {
  num::Matrix features;
  std::vector<double> labels;  // one per labeled row
  int n_labeled = 0;
};

// Full forward pass of the combined objective; fills gradients for every
// parameter when grads != nullptr. This is the single code path used by the
// training loop and by gradient checks.
LossBreakdown combined_loss(const BatchData& batch, const ModelParams& params,
                            const PipelineOptions& opts, ModelParams* grads);

struct TrainedAssessor {
  bool use_autoencoder = true;
  bool identity_graph = false;
  bool normalize_embeddings = false;
  embed::EncoderWeights enc;
  embed::DecoderWeights dec;
  assess::AssessorWeights gcn;
  assess::GraphConfig graph;
  space::SpaceParams space_params;
  int feature_dim = 0;
  int embed_dim = 0;
  num::Matrix anchors;  // features of labeled training architectures
  int max_anchors = 512;

  bool operator==(const TrainedAssessor&) const = default;
};

struct TrainResult {
  TrainedAssessor model;
  std::vector<LossBreakdown> history;  // one entry per epoch (mean over steps)
};

// Mini-batch plan for one epoch; exposed so batch composition is testable.
struct EpochPlan {
  std::vector<std::vector<int>> labeled;    // dataset indices per batch
  std::vector<std::vector<int>> unlabeled;  // dataset indices per batch
};
EpochPlan plan_epoch(const data::ArchDataset& ds, const TrainConfig& cfg, bool labeled_only,
                     RngStream& rng);

// Joint end-to-end training: auto-encoder pretraining, then mini-batch
// optimization of the combined loss with Adam.
TrainResult train(const data::ArchDataset& ds, const TrainConfig& cfg);

// Supervised-only reference: regression loss alone, labeled-only batches,
// identity propagation; unlabeled architectures are never touched.
TrainResult train_supervised_baseline(const data::ArchDataset& ds, const TrainConfig& cfg);

// Batch inference: queries are appended to the anchor set so they receive
// graph context from the labeled training architectures.
std::vector<double> predict(const TrainedAssessor& model,
                            const std::vector<space::CellSpec>& queries);

// Prediction from raw feature rows (anchor handling identical to predict).
std::vector<double> predict_features(const TrainedAssessor& model, const num::Matrix& queries);

// Checkpoint: <prefix>.tensors (numcore tensor file) + <prefix>.json sidecar.
// extra_json, when non-empty, is embedded verbatim under "run".
void save_checkpoint(const TrainedAssessor& model, const std::string& prefix,
                     const std::string& extra_json = "");
TrainedAssessor load_checkpoint(const std::string& prefix);

void write_history_csv(const std::vector<LossBreakdown>& history, const std::string& path,
                       const std::string& comment = "");

}  // namespace archsage::train
