// archsage: dataset generation, assessor training, evaluation, evolutionary
// search, and ablation sweeps over the synthetic architecture benchmark.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "archsage/dataset.hpp"
#include "archsage/evosearch.hpp"
#include "archsage/metrics.hpp"
#include "archsage/trainer.hpp"

namespace {

using namespace archsage;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
      return 3;
    case ErrorCode::NonFinite:
    case ErrorCode::DegenerateInput:
    case ErrorCode::NonDeterministicLoss:
      return 4;
    default:
      return 2;
  }
}

// Canonical "key=value" listing of the fully resolved configuration; its hash
// stamps every output artifact so reruns are verifiable.
class ResolvedConfig {
public:
  explicit ResolvedConfig(std::string command) : command_(std::move(command)) {}

  template <typename T>
  void set(const std::string& key, const T& value) {
    std::ostringstream ss;
    if constexpr (std::is_floating_point_v<T>) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(value));
      ss << buf;
    } else if constexpr (std::is_same_v<T, bool>) {
      ss << (value ? "true" : "false");
    } else {
      ss << value;
    }
    entries_.emplace_back(key, ss.str());
  }

  std::string canonical() const {
    std::vector<std::pair<std::string, std::string>> sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    std::string out = "command=" + command_ + "\n";
    for (const auto& [k, v] : sorted) out += k + "=" + v + "\n";
    return out;
  }

  std::string hash_hex() const {
    const uint64_t h = fnv1a64(canonical());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["config_hash"] = hash_hex();
    nlohmann::ordered_json cfg;
    std::vector<std::pair<std::string, std::string>> sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [k, v] : sorted) cfg[k] = v;
    j["config"] = cfg;
    return j;
  }

private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct SpaceOpts {
  int max_nodes = 7;
  int max_edges = 9;

  space::SpaceParams to_params() const {
    space::SpaceParams p;
    p.max_nodes = max_nodes;
    p.max_edges = max_edges;
    return p;
  }
  void add_to(CLI::App* app) {
    app->add_option("--max-nodes", max_nodes, "Cell node budget")->capture_default_str();
    app->add_option("--max-edges", max_edges, "Cell edge budget")->capture_default_str();
  }
  void record(ResolvedConfig& rc) const {
    rc.set("space.max_nodes", max_nodes);
    rc.set("space.max_edges", max_edges);
  }
};

struct OracleOpts {
  uint64_t seed = 0;
  double noise_std = 0.005;

  data::OracleParams to_params() const {
    data::OracleParams p;
    p.seed = seed;
    p.noise_std = noise_std;
    return p;
  }
  void add_to(CLI::App* app) {
    app->add_option("--oracle-seed", seed, "Oracle noise seed")->capture_default_str();
    app->add_option("--noise-std", noise_std, "Oracle noise standard deviation")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }
  void record(ResolvedConfig& rc) const {
    rc.set("oracle.seed", seed);
    rc.set("oracle.noise_std", noise_std);
  }
};

struct TrainOpts {
  double lambda = 0.5;
  int batch_size = 256;
  int epochs = 200;
  int labeled_per_batch = 0;
  double lr = 0.001;
  uint64_t seed = 0;
  int pretrain_epochs = 50;
  int embed_dim = 32;
  std::vector<int> enc_hidden = {128, 64};
  int gcn_hidden = 64;
  double sigma = 0.01;
  double tau = 1e-5;
  std::string distance = "squared_euclidean";
  bool no_autoencoder = false;
  bool identity_graph = false;
  bool normalize_embeddings = false;
  int max_anchors = 512;

  train::TrainConfig to_config() const {
    train::TrainConfig cfg;
    cfg.lambda = lambda;
    cfg.batch_size = batch_size;
    cfg.epochs = epochs;
    cfg.labeled_per_batch = labeled_per_batch;
    cfg.lr = lr;
    cfg.seed = seed;
    cfg.pretrain_epochs = pretrain_epochs;
    cfg.embed_dim = embed_dim;
    cfg.encoder_hidden = enc_hidden;
    cfg.gcn_hidden = gcn_hidden;
    cfg.graph.sigma = sigma;
    cfg.graph.tau = tau;
    cfg.graph.distance = distance == "euclidean" ? assess::DistanceKind::Euclidean
                                                 : assess::DistanceKind::SquaredEuclidean;
    cfg.use_autoencoder = !no_autoencoder;
    cfg.identity_graph = identity_graph;
    cfg.normalize_embeddings = normalize_embeddings;
    cfg.max_anchors = max_anchors;
    return cfg;
  }
  void add_to(CLI::App* app) {
    app->add_option("--lambda", lambda, "Reconstruction weight in the combined loss")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--batch-size", batch_size)->check(CLI::Range(2, 1 << 20))->capture_default_str();
    app->add_option("--epochs", epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--labeled-per-batch", labeled_per_batch,
                    "Labeled rows per mini-batch (0 = batch_size/4)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--lr", lr)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--seed", seed, "Training seed")->capture_default_str();
    app->add_option("--pretrain-epochs", pretrain_epochs)
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--embed-dim", embed_dim)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--enc-hidden", enc_hidden, "Encoder hidden layer widths")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--gcn-hidden", gcn_hidden)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--sigma", sigma, "RBF scale factor")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--tau", tau, "Similarity threshold")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    app->add_option("--distance", distance, "Distance in the RBF")
        ->check(CLI::IsMember({"squared_euclidean", "euclidean"}))
        ->capture_default_str();
    app->add_flag("--no-autoencoder", no_autoencoder,
                  "Feed hand-crafted features to the GCN directly");
    app->add_flag("--identity-graph", identity_graph, "Disable the relation graph (A-hat = I)");
    app->add_flag("--normalize-embeddings", normalize_embeddings,
                  "l2-normalize embeddings before graph construction");
    app->add_option("--max-anchors", max_anchors)->check(CLI::PositiveNumber)->capture_default_str();
  }
  void record(ResolvedConfig& rc) const {
    rc.set("train.lambda", lambda);
    rc.set("train.batch_size", batch_size);
    rc.set("train.epochs", epochs);
    rc.set("train.labeled_per_batch", labeled_per_batch);
    rc.set("train.lr", lr);
    rc.set("train.seed", seed);
    rc.set("train.pretrain_epochs", pretrain_epochs);
    rc.set("train.embed_dim", embed_dim);
    std::string hidden;
    for (int h : enc_hidden) hidden += (hidden.empty() ? "" : ",") + std::to_string(h);
    rc.set("train.enc_hidden", hidden);
    rc.set("train.gcn_hidden", gcn_hidden);
    rc.set("graph.sigma", sigma);
    rc.set("graph.tau", tau);
    rc.set("graph.distance", distance);
    rc.set("train.use_autoencoder", !no_autoencoder);
    rc.set("train.identity_graph", identity_graph);
    rc.set("train.normalize_embeddings", normalize_embeddings);
    rc.set("train.max_anchors", max_anchors);
  }
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) raise(ErrorCode::IoError, "cannot open for write: " + path);
  os << content;
  os.flush();
  if (!os) raise(ErrorCode::IoError, "write failed: " + path);
}

std::vector<int> ordinal_ranks(const std::vector<double>& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[static_cast<size_t>(a)] > values[static_cast<size_t>(b)]; });
  std::vector<int> rank(values.size());
  for (size_t pos = 0; pos < order.size(); ++pos) rank[static_cast<size_t>(order[pos])] = static_cast<int>(pos) + 1;
  return rank;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
  int n = 3000;
  int labeled = 100;
  uint64_t seed = 0;
  std::string out;
  SpaceOpts space;
  OracleOpts oracle;
};

int run_gen_data(const GenDataArgs& args) {
  ResolvedConfig rc("gen-data");
  rc.set("n", args.n);
  rc.set("labeled", args.labeled);
  rc.set("seed", args.seed);
  args.space.record(rc);
  args.oracle.record(rc);

  data::ArchDataset ds =
      data::build_dataset(args.n, args.labeled, args.seed, args.space.to_params(), args.oracle.to_params());
  data::save_dataset(ds, args.out);

  // Append the config stamp to the header-comment block.
  {
    std::ifstream is(args.out);
    std::string body((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    is.close();
    write_text_file(args.out, "# config_hash=" + rc.hash_hex() + "\n" + body);
  }

  const std::vector<double> labels = ds.labeled_values();
  const double mean = std::accumulate(labels.begin(), labels.end(), 0.0) / labels.size();
  const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
  std::cout << "wrote " << args.out << ": N=" << ds.size() << " N_l=" << ds.n_labeled()
            << " N_u=" << ds.n_unlabeled() << " label_mean=" << mean << " label_min=" << *lo
            << " label_max=" << *hi << " config_hash=" << rc.hash_hex() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string data;
  std::string out;
  std::string history;
  bool baseline = false;
  TrainOpts train;
};

int run_train(const TrainArgs& args) {
  ResolvedConfig rc("train");
  rc.set("data", args.data);
  rc.set("baseline", args.baseline);
  args.train.record(rc);

  data::ArchDataset ds = data::load_dataset(args.data);
  const train::TrainConfig cfg = args.train.to_config();
  train::TrainResult result =
      args.baseline ? train::train_supervised_baseline(ds, cfg) : train::train(ds, cfg);

  train::save_checkpoint(result.model, args.out, rc.to_json().dump());
  if (!args.history.empty()) {
    train::write_history_csv(result.history, args.history, "config_hash=" + rc.hash_hex());
  }
  const double final_rg = result.history.empty() ? 0.0 : result.history.back().rg;
  std::cout << "trained " << (args.baseline ? "baseline" : "assessor") << " on " << ds.size()
            << " architectures (" << ds.n_labeled() << " labeled), epochs=" << cfg.epochs
            << " final_L_rg=" << final_rg << " checkpoint=" << args.out
            << " config_hash=" << rc.hash_hex() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::string scatter;
  std::string dump_graph_path;
};

int run_eval(const EvalArgs& args) {
  ResolvedConfig rc("eval");
  rc.set("checkpoint", args.checkpoint);
  rc.set("data", args.data);

  train::TrainedAssessor model = train::load_checkpoint(args.checkpoint);
  data::ArchDataset ds = data::load_dataset(args.data);
  if (ds.n_labeled() < 2) {
    raise(ErrorCode::EmptyLabeledSet, "eval dataset needs at least 2 labeled architectures");
  }

  std::vector<space::CellSpec> specs;
  for (int i : ds.labeled_idx) specs.push_back(ds.specs[static_cast<size_t>(i)]);
  const std::vector<double> preds = train::predict(model, specs);
  const std::vector<double> truth = ds.labeled_values();

  const metrics::MetricsReport report = metrics::evaluate(preds, truth);
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(metrics::report_json(report));
  j["config_hash"] = rc.hash_hex();
  write_text_file(args.out, j.dump(2) + "\n");

  if (!args.scatter.empty()) {
    const std::vector<int> true_rank = ordinal_ranks(truth);
    const std::vector<int> pred_rank = ordinal_ranks(preds);
    std::string csv = "# config_hash=" + rc.hash_hex() + "\ntrue_rank,pred_rank\n";
    for (size_t i = 0; i < true_rank.size(); ++i) {
      csv += std::to_string(true_rank[i]) + "," + std::to_string(pred_rank[i]) + "\n";
    }
    write_text_file(args.scatter, csv);
  }

  if (!args.dump_graph_path.empty()) {
    // Diagnostics: the relation graph the model sees for this eval batch.
    num::Matrix feats(static_cast<int>(specs.size()), model.feature_dim);
    for (size_t i = 0; i < specs.size(); ++i) {
      const auto v = space::encode(specs[i], model.space_params);
      std::copy(v.begin(), v.end(), feats.row(static_cast<int>(i)));
    }
    num::Matrix batch(model.anchors.rows + feats.rows, feats.cols);
    for (int i = 0; i < model.anchors.rows; ++i) {
      std::copy(model.anchors.row(i), model.anchors.row(i) + model.anchors.cols, batch.row(i));
    }
    for (int i = 0; i < feats.rows; ++i) {
      std::copy(feats.row(i), feats.row(i) + feats.cols, batch.row(model.anchors.rows + i));
    }
    const num::Matrix raw =
        model.use_autoencoder ? embed::encode_batch(batch, model.enc) : batch;
    const num::Matrix normed = model.normalize_embeddings ? num::l2_normalize_rows(raw) : raw;
    const assess::RelationGraph g = model.identity_graph
                                        ? assess::RelationGraph::identity(normed.rows)
                                        : assess::build_graph(normed, model.graph);
    std::ofstream os(args.dump_graph_path, std::ios::trunc);
    if (!os) raise(ErrorCode::IoError, "cannot open for write: " + args.dump_graph_path);
    assess::dump_graph(g, os);
  }

  std::cout << "eval n=" << report.n << " ktau=" << report.ktau << " mse=" << report.mse
            << " pearson_r=" << report.pearson_r << " report=" << args.out
            << " config_hash=" << rc.hash_hex() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// search

struct SearchArgs {
  std::string checkpoint;
  std::string out;
  std::string trajectory;
  int repeats = 20;
  uint64_t seed = 0;
  int population = 100;
  int generations = 50;
  int tournament = 5;
  double mutation_rate = 0.1;
  double crossover_rate = 0.5;
  int elitism = 2;
  int top_k = 10;
  OracleOpts oracle;
};

int run_search(const SearchArgs& args) {
  ResolvedConfig rc("search");
  rc.set("checkpoint", args.checkpoint);
  rc.set("repeats", args.repeats);
  rc.set("seed", args.seed);
  rc.set("ea.population", args.population);
  rc.set("ea.generations", args.generations);
  rc.set("ea.tournament", args.tournament);
  rc.set("ea.mutation_rate", args.mutation_rate);
  rc.set("ea.crossover_rate", args.crossover_rate);
  rc.set("ea.elitism", args.elitism);
  rc.set("ea.top_k", args.top_k);
  args.oracle.record(rc);

  train::TrainedAssessor model = train::load_checkpoint(args.checkpoint);
  const data::OracleParams oracle = args.oracle.to_params();

  evo::EAConfig ea;
  ea.population_size = args.population;
  ea.generations = args.generations;
  ea.tournament_size = args.tournament;
  ea.mutation_rate = args.mutation_rate;
  ea.crossover_rate = args.crossover_rate;
  ea.elitism = args.elitism;
  ea.top_k = args.top_k;

  nlohmann::ordered_json repeats_json = nlohmann::ordered_json::array();
  std::vector<double> best_true;
  std::string traj_csv = "# config_hash=" + rc.hash_hex() + "\nrepeat,generation,best_predicted,mean_predicted\n";
  for (int r = 0; r < args.repeats; ++r) {
    ea.seed = args.seed + static_cast<uint64_t>(r);
    evo::SearchResult result = evo::evaluate_topk(
        evo::evolve(model, model.space_params, ea), oracle, model.space_params);
    best_true.push_back(*result.best_true_accuracy);

    nlohmann::ordered_json rj;
    rj["seed"] = ea.seed;
    rj["best_true_accuracy"] = *result.best_true_accuracy;
    nlohmann::ordered_json topk = nlohmann::ordered_json::array();
    for (const evo::ScoredSpec& s : result.top_k) {
      nlohmann::ordered_json sj =
          nlohmann::ordered_json::parse(space::cell_to_json(s.spec, model.space_params));
      sj["predicted_accuracy"] = s.predicted;
      sj["true_accuracy"] = *s.true_accuracy;
      topk.push_back(std::move(sj));
    }
    rj["top_k"] = std::move(topk);
    repeats_json.push_back(std::move(rj));

    for (size_t g = 0; g < result.trajectory.size(); ++g) {
      char line[128];
      std::snprintf(line, sizeof(line), "%d,%zu,%.17g,%.17g\n", r, g,
                    result.trajectory[g].best_predicted, result.trajectory[g].mean_predicted);
      traj_csv += line;
    }
  }

  const double mean = std::accumulate(best_true.begin(), best_true.end(), 0.0) / best_true.size();
  double var = 0.0;
  for (double v : best_true) var += (v - mean) * (v - mean);
  var /= static_cast<double>(best_true.size());
  const auto [lo, hi] = std::minmax_element(best_true.begin(), best_true.end());

  nlohmann::ordered_json j = rc.to_json();
  j["repeats"] = std::move(repeats_json);
  j["summary"] = {{"mean_best_true_accuracy", mean},
                  {"std_best_true_accuracy", std::sqrt(var)},
                  {"min_best_true_accuracy", *lo},
                  {"max_best_true_accuracy", *hi}};
  write_text_file(args.out, j.dump(2) + "\n");
  if (!args.trajectory.empty()) write_text_file(args.trajectory, traj_csv);

  std::cout << "search repeats=" << args.repeats << " mean_best_true=" << mean
            << " std=" << std::sqrt(var) << " out=" << args.out << " config_hash=" << rc.hash_hex()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// ablate

struct AblateArgs {
  std::string axis;
  std::vector<double> values;
  int seeds = 5;
  std::string out;
  int n = 3000;
  int labeled = 100;
  int eval_n = 200;
  uint64_t data_seed = 1000;
  uint64_t eval_seed = 500000;
  SpaceOpts space;
  OracleOpts oracle;
  TrainOpts train;
};

int run_ablate(const AblateArgs& args) {
  ResolvedConfig rc("ablate");
  rc.set("axis", args.axis);
  std::string vals;
  for (double v : args.values) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    vals += (vals.empty() ? "" : ",") + std::string(buf);
  }
  rc.set("values", vals);
  rc.set("seeds", args.seeds);
  rc.set("n", args.n);
  rc.set("labeled", args.labeled);
  rc.set("eval_n", args.eval_n);
  rc.set("data_seed", args.data_seed);
  rc.set("eval_seed", args.eval_seed);
  args.space.record(rc);
  args.oracle.record(rc);
  args.train.record(rc);

  const space::SpaceParams sp = args.space.to_params();
  const data::OracleParams op = args.oracle.to_params();

  std::string csv = "# config_hash=" + rc.hash_hex() + "\naxis,value,seed,n_labeled,n_unlabeled,ktau,mse,pearson_r\n";
  for (double value : args.values) {
    for (int s = 0; s < args.seeds; ++s) {
      train::TrainConfig cfg = args.train.to_config();
      cfg.seed = args.train.seed + static_cast<uint64_t>(s);
      int n_total = args.n;
      if (args.axis == "sigma") {
        cfg.graph.sigma = value;
      } else if (args.axis == "lambda") {
        cfg.lambda = value;
      } else if (args.axis == "nu") {
        n_total = args.labeled + static_cast<int>(value);
      } else if (args.axis == "autoencoder") {
        cfg.use_autoencoder = value != 0.0;
      } else {
        raise(ErrorCode::InvalidArgument, "unknown ablation axis '" + args.axis + "'");
      }

      data::ArchDataset train_ds =
          data::build_dataset(n_total, args.labeled, args.data_seed + static_cast<uint64_t>(s), sp, op);
      data::ArchDataset eval_ds = data::build_dataset(
          args.eval_n, args.eval_n, args.eval_seed + static_cast<uint64_t>(s), sp, op);

      train::TrainedAssessor model = train::train(train_ds, cfg).model;
      std::vector<space::CellSpec> specs;
      for (int i : eval_ds.labeled_idx) specs.push_back(eval_ds.specs[static_cast<size_t>(i)]);
      const std::vector<double> preds = train::predict(model, specs);
      const metrics::MetricsReport report = metrics::evaluate(preds, eval_ds.labeled_values());

      char line[256];
      std::snprintf(line, sizeof(line), "%s,%.17g,%d,%d,%d,%.17g,%.17g,%.17g\n", args.axis.c_str(),
                    value, s, train_ds.n_labeled(), train_ds.n_unlabeled(), report.ktau, report.mse,
                    report.pearson_r);
      csv += line;
      std::cout << "ablate " << args.axis << "=" << value << " seed=" << s
                << " ktau=" << report.ktau << " mse=" << report.mse << " r=" << report.pearson_r
                << "\n";
    }
  }
  write_text_file(args.out, csv);
  std::cout << "wrote " << args.out << " config_hash=" << rc.hash_hex() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"archsage: semi-supervised neural architecture assessor"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  // ARCHSAGE_DETERMINISTIC=1 pins the deterministic numeric mode. The build
  // is single-threaded with a fixed accumulation order, so this is already
  // the only mode; the variable is accepted for forward compatibility.
  [[maybe_unused]] const char* deterministic = std::getenv("ARCHSAGE_DETERMINISTIC");

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic architecture dataset");
  gen_cmd->add_option("--n", gen.n, "Total architectures")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--labeled", gen.labeled, "Labeled architectures")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output JSON-lines path")->required();
  gen.space.add_to(gen_cmd);
  gen.oracle.add_to(gen_cmd);

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the assessor on a dataset");
  train_cmd->add_option("--data", tr.data, "Training dataset (JSON-lines)")->required();
  train_cmd->add_option("--out", tr.out, "Checkpoint path prefix")->required();
  train_cmd->add_option("--history", tr.history, "Loss history CSV path");
  train_cmd->add_flag("--baseline", tr.baseline, "Supervised-only baseline (labeled rows, A-hat = I)");
  tr.train.add_to(train_cmd);

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on labeled data");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint path prefix")->required();
  eval_cmd->add_option("--data", ev.data, "Held-out labeled dataset")->required();
  eval_cmd->add_option("--out", ev.out, "Metrics report JSON path")->required();
  eval_cmd->add_option("--scatter", ev.scatter, "Rank-scatter CSV path (true rank, predicted rank)");
  eval_cmd->add_option("--dump-graph", ev.dump_graph_path, "Relation-graph edge dump path");

  SearchArgs se;
  CLI::App* search_cmd = app.add_subcommand("search", "Evolutionary search with the trained assessor");
  search_cmd->add_option("--checkpoint", se.checkpoint, "Checkpoint path prefix")->required();
  search_cmd->add_option("--out", se.out, "Search result JSON path")->required();
  search_cmd->add_option("--trajectory", se.trajectory, "Per-generation fitness CSV path");
  search_cmd->add_option("--repeats", se.repeats)->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--seed", se.seed)->capture_default_str();
  search_cmd->add_option("--population", se.population)->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--generations", se.generations)->check(CLI::NonNegativeNumber)->capture_default_str();
  search_cmd->add_option("--tournament", se.tournament)->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--mutation-rate", se.mutation_rate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  search_cmd->add_option("--crossover-rate", se.crossover_rate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  search_cmd->add_option("--elitism", se.elitism)->check(CLI::NonNegativeNumber)->capture_default_str();
  search_cmd->add_option("--top-k", se.top_k)->check(CLI::PositiveNumber)->capture_default_str();
  se.oracle.add_to(search_cmd);

  AblateArgs ab;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Sweep sigma / lambda / N_u / autoencoder");
  ablate_cmd->add_option("--axis", ab.axis, "Sweep axis")
      ->check(CLI::IsMember({"sigma", "lambda", "nu", "autoencoder"}))
      ->required();
  ablate_cmd->add_option("--values", ab.values, "Axis values")->delimiter(',')->required();
  ablate_cmd->add_option("--seeds", ab.seeds, "Seeds per setting")->check(CLI::PositiveNumber)->capture_default_str();
  ablate_cmd->add_option("--out", ab.out, "Sweep CSV path")->required();
  ablate_cmd->add_option("--n", ab.n, "Training architectures")->check(CLI::PositiveNumber)->capture_default_str();
  ablate_cmd->add_option("--labeled", ab.labeled)->check(CLI::PositiveNumber)->capture_default_str();
  ablate_cmd->add_option("--eval-n", ab.eval_n, "Held-out eval architectures")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate_cmd->add_option("--data-seed", ab.data_seed)->capture_default_str();
  ablate_cmd->add_option("--eval-seed", ab.eval_seed)->capture_default_str();
  ab.space.add_to(ablate_cmd);
  ab.oracle.add_to(ablate_cmd);
  ab.train.add_to(ablate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen_cmd->parsed()) {
      if (gen.labeled > gen.n) {
        std::cerr << "argument error: --labeled must be <= --n\n";
        return 2;
      }
      return run_gen_data(gen);
    }
    if (train_cmd->parsed()) return run_train(tr);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (search_cmd->parsed()) return run_search(se);
    if (ablate_cmd->parsed()) return run_ablate(ab);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
