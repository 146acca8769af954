#include "archsage/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "archsage/checkpoint.hpp"

namespace archsage::train {

namespace {

num::Matrix take_rows(const num::Matrix& m, int start, int count) {
  num::Matrix out(count, m.cols);
  for (int i = 0; i < count; ++i) {
    std::copy(m.row(start + i), m.row(start + i) + m.cols, out.row(i));
  }
  return out;
}

const char* distance_name(assess::DistanceKind kind) {
  return kind == assess::DistanceKind::SquaredEuclidean ? "squared_euclidean" : "euclidean";
}

assess::DistanceKind distance_from_name(const std::string& name) {
  if (name == "squared_euclidean") return assess::DistanceKind::SquaredEuclidean;
  if (name == "euclidean") return assess::DistanceKind::Euclidean;
  raise(ErrorCode::SchemaError, "unknown distance kind '" + name + "'");
}

}  // namespace

void validate_config(const TrainConfig& cfg) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    raise(ErrorCode::InvalidArgument, "lambda must be in [0,1]");
  }
  if (cfg.batch_size < 2) raise(ErrorCode::InvalidArgument, "batch_size must be >= 2");
  if (cfg.labeled_per_batch < 0) raise(ErrorCode::InvalidArgument, "labeled_per_batch must be >= 0");
  if (cfg.epochs < 0) raise(ErrorCode::InvalidArgument, "epochs must be >= 0");
  if (cfg.pretrain_epochs < 0) raise(ErrorCode::InvalidArgument, "pretrain_epochs must be >= 0");
  if (!(cfg.lr > 0.0)) raise(ErrorCode::InvalidArgument, "lr must be > 0");
  if (cfg.embed_dim < 1) raise(ErrorCode::InvalidArgument, "embed_dim must be >= 1");
  if (cfg.gcn_hidden < 1) raise(ErrorCode::InvalidArgument, "gcn_hidden must be >= 1");
  assess::validate_config(cfg.graph);
}

std::vector<num::Matrix*> ModelParams::param_ptrs() {
  std::vector<num::Matrix*> out = enc.param_ptrs();
  auto dec_ptrs = dec.param_ptrs();
  out.insert(out.end(), dec_ptrs.begin(), dec_ptrs.end());
  out.push_back(&gcn.w0);
  out.push_back(&gcn.w1);
  return out;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.enc = embed::zero_grads_like(enc);
  z.dec = embed::zero_grads_like(dec);
  z.gcn.w0 = num::Matrix(gcn.w0.rows, gcn.w0.cols, 0.0);
  z.gcn.w1 = num::Matrix(gcn.w1.rows, gcn.w1.cols, 0.0);
  return z;
}

std::vector<num::Matrix> ModelParams::take_grads() {
  std::vector<num::Matrix> out;
  for (num::Matrix* p : param_ptrs()) out.push_back(std::move(*p));
  return out;
}

LossBreakdown combined_loss(const BatchData& batch, const ModelParams& params,
                            const PipelineOptions& opts, ModelParams* grads) {
  const int n = batch.features.rows;
  const int n_labeled = batch.n_labeled;
  const int n_unlabeled = n - n_labeled;
  if (n_labeled <= 0) raise(ErrorCode::EmptyLabeledBatch, "batch has no labeled rows");
  if (static_cast<int>(batch.labels.size()) != n_labeled) {
    raise(ErrorCode::LengthMismatch, "labels vs n_labeled");
  }

  const bool use_ae = opts.use_autoencoder;
  const double lambda = use_ae ? opts.lambda : 0.0;

  // Encode.
  embed::MlpCache enc_cache;
  num::Matrix raw =
      use_ae ? embed::mlp_forward(batch.features, params.enc, grads ? &enc_cache : nullptr)
             : batch.features;
  num::Matrix normed = opts.normalize_embeddings ? num::l2_normalize_rows(raw) : raw;

  // Relation graph over the mini-batch.
  assess::GraphCache graph_cache;
  assess::RelationGraph graph = opts.identity_graph
                                    ? assess::RelationGraph::identity(n)
                                    : assess::build_graph(normed, opts.graph, grads ? &graph_cache : nullptr);

  // Predict and regress on labeled rows.
  assess::GcnCache gcn_cache;
  num::Matrix preds = assess::gcn_forward(normed, graph, params.gcn, grads ? &gcn_cache : nullptr);
  std::vector<int> labeled_rows(static_cast<size_t>(n_labeled));
  for (int i = 0; i < n_labeled; ++i) labeled_rows[static_cast<size_t>(i)] = i;
  const double loss_rg = assess::regression_loss(preds, batch.labels, labeled_rows);

  // Reconstruct.
  embed::MlpCache dec_cache;
  num::Matrix recon;
  double loss_rc = 0.0;
  if (use_ae) {
    recon = embed::mlp_forward(raw, params.dec, grads ? &dec_cache : nullptr);
    loss_rc += num::mse(take_rows(recon, 0, n_labeled), take_rows(batch.features, 0, n_labeled));
    if (n_unlabeled > 0) {
      loss_rc += num::mse(take_rows(recon, n_labeled, n_unlabeled),
                          take_rows(batch.features, n_labeled, n_unlabeled));
    }
  }

  LossBreakdown out;
  out.rg = loss_rg;
  out.rc = loss_rc;
  out.total = (1.0 - lambda) * loss_rg + lambda * loss_rc;
  if (!std::isfinite(out.total)) raise(ErrorCode::NonFinite, "combined loss is NaN or Inf");
  if (!grads) return out;

  // Backward. Regression branch, scaled by (1 - lambda).
  num::Matrix dy = assess::regression_loss_backward(preds, batch.labels, labeled_rows);
  for (double& v : dy.data) v *= (1.0 - lambda);
  assess::GcnGrads gg = assess::gcn_backward(graph, params.gcn, gcn_cache, dy);
  grads->gcn.w0 = std::move(gg.dw0);
  grads->gcn.w1 = std::move(gg.dw1);

  num::Matrix dnormed = std::move(gg.demb);
  if (!opts.identity_graph) {
    num::add_inplace(dnormed, assess::graph_backward(graph_cache, gg.da_hat));
  }
  num::Matrix draw = opts.normalize_embeddings ? num::l2_normalize_rows_backward(raw, dnormed)
                                               : std::move(dnormed);

  if (use_ae) {
    // Reconstruction branch, scaled by lambda; the two set means keep their
    // own normalizations.
    num::Matrix drecon(n, recon.cols, 0.0);
    const double scale_l = lambda * 2.0 / n_labeled;
    for (int i = 0; i < n_labeled; ++i) {
      for (int j = 0; j < recon.cols; ++j) {
        drecon.at(i, j) = scale_l * (recon.at(i, j) - batch.features.at(i, j));
      }
    }
    if (n_unlabeled > 0) {
      const double scale_u = lambda * 2.0 / n_unlabeled;
      for (int i = n_labeled; i < n; ++i) {
        for (int j = 0; j < recon.cols; ++j) {
          drecon.at(i, j) = scale_u * (recon.at(i, j) - batch.features.at(i, j));
        }
      }
    }
    num::add_inplace(draw, embed::mlp_backward(params.dec, dec_cache, drecon, grads->dec));
    embed::mlp_backward(params.enc, enc_cache, draw, grads->enc);
  }
  return out;
}

EpochPlan plan_epoch(const data::ArchDataset& ds, const TrainConfig& cfg, bool labeled_only,
                     RngStream& rng) {
  EpochPlan plan;
  const int n_l = ds.n_labeled();
  const int n_u = ds.n_unlabeled();
  if (n_l == 0) raise(ErrorCode::EmptyLabeledSet, "dataset has no labeled architectures");

  int lpb = cfg.labeled_per_batch > 0 ? cfg.labeled_per_batch : std::max(1, cfg.batch_size / 4);
  lpb = std::min(lpb, n_l);
  const int upb = std::max(1, cfg.batch_size - lpb);

  if (labeled_only || n_u == 0) {
    // Labeled-only pass, independent of the unlabeled set: deleting
    // unlabeled architectures must not change a baseline run.
    const size_t n_batches = (static_cast<size_t>(n_l) + static_cast<size_t>(cfg.batch_size) - 1) /
                             static_cast<size_t>(cfg.batch_size);
    const int per_batch = std::min(n_l, cfg.batch_size);
    std::vector<int> pool = ds.labeled_idx;
    for (size_t b = 0; b < n_batches; ++b) {
      std::vector<int> batch(static_cast<size_t>(per_batch));
      for (int i = 0; i < per_batch; ++i) {
        const size_t j = static_cast<size_t>(i) + rng.uniform_index(pool.size() - static_cast<size_t>(i));
        std::swap(pool[static_cast<size_t>(i)], pool[j]);
        batch[static_cast<size_t>(i)] = pool[static_cast<size_t>(i)];
      }
      plan.labeled.push_back(std::move(batch));
      plan.unlabeled.emplace_back();
    }
    return plan;
  }

  // One pass over the unlabeled set per epoch; labeled rows are redrawn
  // without replacement within each batch.
  std::vector<int> unlabeled_order = ds.unlabeled_idx;
  rng.shuffle(unlabeled_order);
  std::vector<int> labeled_pool = ds.labeled_idx;
  for (size_t start = 0; start < unlabeled_order.size(); start += static_cast<size_t>(upb)) {
    const size_t end = std::min(unlabeled_order.size(), start + static_cast<size_t>(upb));
    std::vector<int> batch_l(static_cast<size_t>(lpb));
    for (int i = 0; i < lpb; ++i) {
      const size_t j = static_cast<size_t>(i) + rng.uniform_index(labeled_pool.size() - static_cast<size_t>(i));
      std::swap(labeled_pool[static_cast<size_t>(i)], labeled_pool[j]);
      batch_l[static_cast<size_t>(i)] = labeled_pool[static_cast<size_t>(i)];
    }
    plan.labeled.push_back(std::move(batch_l));
    plan.unlabeled.emplace_back(unlabeled_order.begin() + static_cast<long>(start),
                                unlabeled_order.begin() + static_cast<long>(end));
  }
  return plan;
}

namespace {

TrainResult train_impl(const data::ArchDataset& ds, const TrainConfig& cfg, bool baseline) {
  validate_config(cfg);
  if (ds.n_labeled() == 0) raise(ErrorCode::EmptyLabeledSet, "dataset has no labeled architectures");

  const double lambda = baseline ? 0.0 : cfg.lambda;

  ModelParams params;
  if (cfg.use_autoencoder) {
    embed::PretrainConfig pre;
    pre.epochs = cfg.pretrain_epochs;
    pre.batch_size = cfg.batch_size;
    pre.lr = cfg.lr;
    pre.seed = derive_seed(cfg.seed, 0x7101);
    pre.embed_dim = cfg.embed_dim;
    pre.hidden = cfg.encoder_hidden;
    // The supervised baseline never touches unlabeled architectures.
    std::vector<int> subset;
    if (baseline) subset = ds.labeled_idx;
    auto [enc, dec] = embed::pretrain(ds, pre, subset);
    params.enc = std::move(enc);
    params.dec = std::move(dec);
  }
  RngStream gcn_rng(derive_seed(cfg.seed, 0x7102));
  const int gcn_in = cfg.use_autoencoder ? cfg.embed_dim : ds.feature_dim();
  params.gcn = assess::init_assessor(gcn_in, cfg.gcn_hidden, gcn_rng);

  PipelineOptions opts;
  opts.lambda = lambda;
  opts.graph = cfg.graph;
  opts.identity_graph = baseline ? true : cfg.identity_graph;
  opts.use_autoencoder = cfg.use_autoencoder;
  opts.normalize_embeddings = cfg.normalize_embeddings;

  std::vector<num::Matrix*> param_ptrs = params.param_ptrs();
  num::AdamState adam = num::AdamState::for_params(param_ptrs, {.lr = cfg.lr});

  RngStream batch_rng(derive_seed(cfg.seed, 0x7103));
  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const EpochPlan plan = plan_epoch(ds, cfg, baseline, batch_rng);
    LossBreakdown epoch_mean;
    for (size_t bi = 0; bi < plan.labeled.size(); ++bi) {
      std::vector<int> rows = plan.labeled[bi];
      rows.insert(rows.end(), plan.unlabeled[bi].begin(), plan.unlabeled[bi].end());
      BatchData batch;
      batch.features = num::gather_rows(ds.features, rows);
      batch.n_labeled = static_cast<int>(plan.labeled[bi].size());
      batch.labels.reserve(plan.labeled[bi].size());
      for (int idx : plan.labeled[bi]) batch.labels.push_back(*ds.labels[static_cast<size_t>(idx)]);

      ModelParams grads = params.zeros_like();
      const LossBreakdown step = combined_loss(batch, params, opts, &grads);
      const std::vector<num::Matrix> flat = grads.take_grads();
      num::adam_step(param_ptrs, flat, adam);

      epoch_mean.total += step.total;
      epoch_mean.rg += step.rg;
      epoch_mean.rc += step.rc;
    }
    const double inv = 1.0 / static_cast<double>(plan.labeled.size());
    epoch_mean.total *= inv;
    epoch_mean.rg *= inv;
    epoch_mean.rc *= inv;
    result.history.push_back(epoch_mean);
  }

  TrainedAssessor& model = result.model;
  model.use_autoencoder = cfg.use_autoencoder;
  model.identity_graph = opts.identity_graph;
  model.normalize_embeddings = cfg.normalize_embeddings;
  model.enc = std::move(params.enc);
  model.dec = std::move(params.dec);
  model.gcn = std::move(params.gcn);
  model.graph = cfg.graph;
  model.space_params = ds.space_params;
  model.feature_dim = ds.feature_dim();
  model.embed_dim = cfg.use_autoencoder ? cfg.embed_dim : ds.feature_dim();
  model.anchors = num::gather_rows(ds.features, ds.labeled_idx);
  model.max_anchors = cfg.max_anchors;
  return result;
}

}  // namespace

TrainResult train(const data::ArchDataset& ds, const TrainConfig& cfg) {
  return train_impl(ds, cfg, false);
}

TrainResult train_supervised_baseline(const data::ArchDataset& ds, const TrainConfig& cfg) {
  return train_impl(ds, cfg, true);
}

std::vector<double> predict_features(const TrainedAssessor& model, const num::Matrix& queries) {
  if (queries.cols != model.feature_dim) {
    raise(ErrorCode::ShapeMismatch, "query feature dim " + std::to_string(queries.cols) +
                                        ", model expects " + std::to_string(model.feature_dim));
  }
  if (queries.rows == 0) return {};

  // Anchor subsampling: nearest to the mean query feature vector, capped.
  num::Matrix anchors = model.anchors;
  if (anchors.rows > model.max_anchors) {
    std::vector<double> centroid(static_cast<size_t>(queries.cols), 0.0);
    for (int i = 0; i < queries.rows; ++i) {
      const double* row = queries.row(i);
      for (int j = 0; j < queries.cols; ++j) centroid[static_cast<size_t>(j)] += row[j];
    }
    for (double& v : centroid) v /= queries.rows;
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(static_cast<size_t>(anchors.rows));
    for (int i = 0; i < anchors.rows; ++i) {
      double d = 0.0;
      const double* row = anchors.row(i);
      for (int j = 0; j < anchors.cols; ++j) {
        const double diff = row[j] - centroid[static_cast<size_t>(j)];
        d += diff * diff;
      }
      by_dist.emplace_back(d, i);
    }
    std::stable_sort(by_dist.begin(), by_dist.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<int> keep;
    keep.reserve(static_cast<size_t>(model.max_anchors));
    for (int i = 0; i < model.max_anchors; ++i) keep.push_back(by_dist[static_cast<size_t>(i)].second);
    std::sort(keep.begin(), keep.end());
    anchors = num::gather_rows(anchors, keep);
  }

  const int n_anchor = anchors.rows;
  num::Matrix batch(n_anchor + queries.rows, queries.cols);
  for (int i = 0; i < n_anchor; ++i) {
    std::copy(anchors.row(i), anchors.row(i) + anchors.cols, batch.row(i));
  }
  for (int i = 0; i < queries.rows; ++i) {
    std::copy(queries.row(i), queries.row(i) + queries.cols, batch.row(n_anchor + i));
  }

  const num::Matrix raw = model.use_autoencoder ? embed::encode_batch(batch, model.enc) : batch;
  const num::Matrix normed = model.normalize_embeddings ? num::l2_normalize_rows(raw) : raw;
  const assess::RelationGraph graph = model.identity_graph
                                          ? assess::RelationGraph::identity(normed.rows)
                                          : assess::build_graph(normed, model.graph);
  const num::Matrix preds = assess::gcn_forward(normed, graph, model.gcn);

  std::vector<double> out(static_cast<size_t>(queries.rows));
  for (int i = 0; i < queries.rows; ++i) out[static_cast<size_t>(i)] = preds.at(n_anchor + i, 0);
  return out;
}

std::vector<double> predict(const TrainedAssessor& model,
                            const std::vector<space::CellSpec>& queries) {
  num::Matrix feats(static_cast<int>(queries.size()), model.feature_dim);
  for (size_t i = 0; i < queries.size(); ++i) {
    const auto v = space::encode(queries[i], model.space_params);
    std::copy(v.begin(), v.end(), feats.row(static_cast<int>(i)));
  }
  return predict_features(model, feats);
}

void save_checkpoint(const TrainedAssessor& model, const std::string& prefix,
                     const std::string& extra_json) {
  std::vector<num::NamedTensor> tensors;
  for (size_t l = 0; l < model.enc.w.size(); ++l) {
    tensors.push_back({"enc." + std::to_string(l) + ".w", model.enc.w[l]});
    tensors.push_back({"enc." + std::to_string(l) + ".b", model.enc.b[l]});
  }
  for (size_t l = 0; l < model.dec.w.size(); ++l) {
    tensors.push_back({"dec." + std::to_string(l) + ".w", model.dec.w[l]});
    tensors.push_back({"dec." + std::to_string(l) + ".b", model.dec.b[l]});
  }
  tensors.push_back({"gcn.w0", model.gcn.w0});
  tensors.push_back({"gcn.w1", model.gcn.w1});
  tensors.push_back({"anchors", model.anchors});
  num::save_tensors(prefix + ".tensors", tensors);

  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["use_autoencoder"] = model.use_autoencoder;
  j["identity_graph"] = model.identity_graph;
  j["normalize_embeddings"] = model.normalize_embeddings;
  j["feature_dim"] = model.feature_dim;
  j["embed_dim"] = model.embed_dim;
  j["enc_layers"] = model.enc.w.size();
  j["dec_layers"] = model.dec.w.size();
  j["graph"] = {{"sigma", model.graph.sigma},
                {"tau", model.graph.tau},
                {"distance", distance_name(model.graph.distance)}};
  j["space"] = {{"max_nodes", model.space_params.max_nodes},
                {"max_edges", model.space_params.max_edges},
                {"op_labels", model.space_params.op_labels}};
  j["max_anchors"] = model.max_anchors;
  if (!extra_json.empty()) {
    try {
      j["run"] = nlohmann::ordered_json::parse(extra_json);
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::ParseError, std::string("extra_json: ") + e.what());
    }
  }
  std::ofstream os(prefix + ".json", std::ios::trunc);
  if (!os) raise(ErrorCode::IoError, "cannot open for write: " + prefix + ".json");
  os << j.dump(2) << "\n";
  os.flush();
  if (!os) raise(ErrorCode::IoError, "write failed: " + prefix + ".json");
}

TrainedAssessor load_checkpoint(const std::string& prefix) {
  std::ifstream is(prefix + ".json");
  if (!is) raise(ErrorCode::IoError, "cannot open for read: " + prefix + ".json");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, prefix + ".json: " + e.what());
  }

  TrainedAssessor model;
  try {
    model.use_autoencoder = j.at("use_autoencoder").get<bool>();
    model.identity_graph = j.at("identity_graph").get<bool>();
    model.normalize_embeddings = j.value("normalize_embeddings", false);
    model.feature_dim = j.at("feature_dim").get<int>();
    model.embed_dim = j.at("embed_dim").get<int>();
    model.graph.sigma = j.at("graph").at("sigma").get<double>();
    model.graph.tau = j.at("graph").at("tau").get<double>();
    model.graph.distance = distance_from_name(j.at("graph").at("distance").get<std::string>());
    model.space_params.max_nodes = j.at("space").at("max_nodes").get<int>();
    model.space_params.max_edges = j.at("space").at("max_edges").get<int>();
    model.space_params.op_labels = j.at("space").at("op_labels").get<std::vector<std::string>>();
    model.max_anchors = j.value("max_anchors", 512);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaError, prefix + ".json: " + e.what());
  }

  const size_t enc_layers = j.value("enc_layers", 0);
  const size_t dec_layers = j.value("dec_layers", 0);
  auto tensors = num::load_tensors(prefix + ".tensors");
  auto find = [&](const std::string& name) -> num::Matrix {
    for (auto& t : tensors) {
      if (t.name == name) return std::move(t.value);
    }
    raise(ErrorCode::SchemaError, prefix + ".tensors: missing tensor '" + name + "'");
  };
  for (size_t l = 0; l < enc_layers; ++l) {
    model.enc.w.push_back(find("enc." + std::to_string(l) + ".w"));
    model.enc.b.push_back(find("enc." + std::to_string(l) + ".b"));
  }
  for (size_t l = 0; l < dec_layers; ++l) {
    model.dec.w.push_back(find("dec." + std::to_string(l) + ".w"));
    model.dec.b.push_back(find("dec." + std::to_string(l) + ".b"));
  }
  model.gcn.w0 = find("gcn.w0");
  model.gcn.w1 = find("gcn.w1");
  model.anchors = find("anchors");
  if (model.anchors.rows == 0) {
    raise(ErrorCode::SchemaError, prefix + ".tensors: anchor set is empty");
  }
  if (model.anchors.cols != model.feature_dim) {
    raise(ErrorCode::SchemaError, prefix + ".tensors: anchor feature dim mismatch");
  }
  return model;
}

void write_history_csv(const std::vector<LossBreakdown>& history, const std::string& path,
                       const std::string& comment) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) raise(ErrorCode::IoError, "cannot open for write: " + path);
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "epoch,L,L_rg,L_rc\n";
  char buf[128];
  for (size_t e = 0; e < history.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", e + 1, history[e].total,
                  history[e].rg, history[e].rc);
    os << buf;
  }
  os.flush();
  if (!os) raise(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace archsage::train
