#include "archsage/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace archsage::data {

namespace {

double op_quality(int code) {
  switch (code) {
    case space::kConv3x3: return 1.0;
    case space::kConv1x1: return 0.6;
    case space::kMaxPool3x3: return 0.3;
    default: return 0.0;
  }
}

// Highest summed interior-op quality over all INPUT->OUTPUT paths (DP over
// the index order, which is topological for upper-triangular adjacency).
double best_path_quality(const space::CellSpec& spec) {
  constexpr double kUnreachable = -1.0;
  std::vector<double> best(spec.n, kUnreachable);
  best[0] = 0.0;
  for (int j = 1; j < spec.n; ++j) {
    double b = kUnreachable;
    for (int i = 0; i < j; ++i) {
      if (spec.edge(i, j) && best[i] != kUnreachable) {
        b = std::max(b, best[i]);
      }
    }
    if (b != kUnreachable && j < spec.n - 1) b += op_quality(spec.ops[j]);
    best[j] = b;
  }
  return best[spec.n - 1];
}

double hash_noise(const space::CellSpec& spec, uint64_t seed) {
  uint64_t h = fnv1a64(&spec.n, sizeof(spec.n));
  h = fnv1a64(spec.adj.data(), spec.adj.size(), h);
  h = fnv1a64(spec.ops.data(), spec.ops.size() * sizeof(int), h);
  uint64_t state = h ^ (seed * 0x9E3779B97F4A7C15ULL);
  const uint64_t a = splitmix64(state);
  const uint64_t b = splitmix64(state);
  const double u1 = 1.0 - static_cast<double>(a >> 11) * 0x1.0p-53;  // (0,1]
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;        // [0,1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

nlohmann::ordered_json oracle_to_json(const OracleParams& p) {
  nlohmann::ordered_json j;
  j["seed"] = p.seed;
  j["noise_std"] = p.noise_std;
  j["base"] = p.base;
  j["w_path"] = p.w_path;
  j["w_skip"] = p.w_skip;
  j["w_edge_excess"] = p.w_edge_excess;
  j["w_pool"] = p.w_pool;
  j["path_norm"] = p.path_norm;
  j["edge_norm"] = p.edge_norm;
  return j;
}

OracleParams oracle_from_json(const nlohmann::json& j) {
  OracleParams p;
  p.seed = j.value("seed", p.seed);
  p.noise_std = j.value("noise_std", p.noise_std);
  p.base = j.value("base", p.base);
  p.w_path = j.value("w_path", p.w_path);
  p.w_skip = j.value("w_skip", p.w_skip);
  p.w_edge_excess = j.value("w_edge_excess", p.w_edge_excess);
  p.w_pool = j.value("w_pool", p.w_pool);
  p.path_norm = j.value("path_norm", p.path_norm);
  p.edge_norm = j.value("edge_norm", p.edge_norm);
  return p;
}

nlohmann::ordered_json space_to_json(const space::SpaceParams& p) {
  nlohmann::ordered_json j;
  j["max_nodes"] = p.max_nodes;
  j["max_edges"] = p.max_edges;
  j["op_labels"] = p.op_labels;
  return j;
}

space::SpaceParams space_from_json(const nlohmann::json& j) {
  space::SpaceParams p;
  p.max_nodes = j.value("max_nodes", p.max_nodes);
  p.max_edges = j.value("max_edges", p.max_edges);
  if (j.contains("op_labels")) p.op_labels = j["op_labels"].get<std::vector<std::string>>();
  return p;
}

}  // namespace

double synth_performance(const space::CellSpec& spec, const OracleParams& oracle,
                         const space::SpaceParams& params) {
  const space::ValidationResult vr = space::validate(spec, params);
  if (!vr.ok()) {
    raise(ErrorCode::InvalidSpec, std::string("synth_performance: ") +
                                      space::validation_code_name(vr.code) + " (" + vr.detail + ")");
  }
  const double path_term = best_path_quality(spec) / oracle.path_norm;
  const double skip_term = spec.edge(0, spec.n - 1) ? 1.0 : 0.0;
  const double excess_edges =
      std::max(0, spec.edge_count() - (spec.n - 1)) / oracle.edge_norm;
  double pool_term = 0.0;
  for (int i = 1; i < spec.n - 1; ++i) {
    if (spec.ops[i] == space::kMaxPool3x3 && spec.degree(i) > 0) {
      pool_term = 1.0;
      break;
    }
  }
  const double clean = oracle.base + oracle.w_path * path_term + oracle.w_skip * skip_term -
                       oracle.w_edge_excess * excess_edges + oracle.w_pool * pool_term;
  const double noisy = clean + oracle.noise_std * hash_noise(spec, oracle.seed);
  return std::clamp(noisy, 0.0, 1.0);
}

std::vector<double> ArchDataset::labeled_values() const {
  std::vector<double> out;
  out.reserve(labeled_idx.size());
  for (int i : labeled_idx) out.push_back(*labels[static_cast<size_t>(i)]);
  return out;
}

void rebuild_derived(ArchDataset& ds) {
  const int n = ds.size();
  ds.labeled_idx.clear();
  ds.unlabeled_idx.clear();
  ds.features = num::Matrix(n, ds.space_params.feature_dim());
  for (int i = 0; i < n; ++i) {
    const auto feats = space::encode(ds.specs[static_cast<size_t>(i)], ds.space_params);
    std::copy(feats.begin(), feats.end(), ds.features.row(i));
    if (ds.labels[static_cast<size_t>(i)].has_value()) {
      ds.labeled_idx.push_back(i);
    } else {
      ds.unlabeled_idx.push_back(i);
    }
  }
}

ArchDataset build_dataset(int n, int n_labeled, uint64_t seed, const space::SpaceParams& params,
                          const OracleParams& oracle) {
  if (n_labeled <= 0 || n_labeled > n) {
    raise(ErrorCode::InvalidArgument,
          "need 0 < n_labeled <= n, got n_labeled=" + std::to_string(n_labeled) +
              " n=" + std::to_string(n));
  }
  ArchDataset ds;
  ds.space_params = params;
  ds.oracle_params = oracle;
  ds.specs.reserve(static_cast<size_t>(n));
  RngStream rng(derive_seed(seed, 0x5A5A01));
  for (int i = 0; i < n; ++i) ds.specs.push_back(space::sample_random(rng, params));

  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  RngStream label_rng(derive_seed(seed, 0x5A5A02));
  label_rng.shuffle(perm);
  std::vector<bool> is_labeled(static_cast<size_t>(n), false);
  for (int i = 0; i < n_labeled; ++i) is_labeled[static_cast<size_t>(perm[i])] = true;

  ds.labels.assign(static_cast<size_t>(n), std::nullopt);
  for (int i = 0; i < n; ++i) {
    if (is_labeled[static_cast<size_t>(i)]) {
      ds.labels[static_cast<size_t>(i)] = synth_performance(ds.specs[static_cast<size_t>(i)], oracle, params);
    }
  }
  rebuild_derived(ds);
  return ds;
}

void save_dataset(const ArchDataset& ds, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) raise(ErrorCode::IoError, "cannot open for write: " + path);
  nlohmann::ordered_json header;
  header["space"] = space_to_json(ds.space_params);
  header["oracle"] = oracle_to_json(ds.oracle_params);
  os << "# archsage-dataset v1 " << header.dump() << "\n";
  for (int i = 0; i < ds.size(); ++i) {
    const auto& spec = ds.specs[static_cast<size_t>(i)];
    nlohmann::ordered_json rec = nlohmann::ordered_json::parse(space::cell_to_json(spec, ds.space_params));
    if (ds.labels[static_cast<size_t>(i)].has_value()) {
      rec["accuracy"] = *ds.labels[static_cast<size_t>(i)];
    } else {
      rec["accuracy"] = nullptr;
    }
    os << rec.dump() << "\n";
  }
  os.flush();
  if (!os) raise(ErrorCode::IoError, "write failed: " + path);
}

ArchDataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) raise(ErrorCode::IoError, "cannot open for read: " + path);
  ArchDataset ds;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!saw_header) {
        const size_t brace = line.find('{');
        if (brace != std::string::npos) {
          try {
            const nlohmann::json header = nlohmann::json::parse(line.substr(brace));
            if (header.contains("space")) ds.space_params = space_from_json(header["space"]);
            if (header.contains("oracle")) ds.oracle_params = oracle_from_json(header["oracle"]);
          } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": bad header (" + e.what() + ")");
          }
        }
        saw_header = true;
      }
      continue;
    }
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    space::CellSpec spec;
    try {
      spec = space::cell_from_json(line, ds.space_params);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      raise(ErrorCode::SchemaError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const space::ValidationResult vr = space::validate(spec, ds.space_params);
    if (!vr.ok()) {
      raise(ErrorCode::SchemaError, path + ":" + std::to_string(line_no) + ": invalid cell (" +
                                        space::validation_code_name(vr.code) + ": " + vr.detail + ")");
    }
    if (!rec.contains("accuracy")) {
      raise(ErrorCode::SchemaError, path + ":" + std::to_string(line_no) + ": missing 'accuracy'");
    }
    std::optional<double> label;
    if (!rec["accuracy"].is_null()) {
      if (!rec["accuracy"].is_number()) {
        raise(ErrorCode::SchemaError, path + ":" + std::to_string(line_no) + ": accuracy must be a number or null");
      }
      const double v = rec["accuracy"].get<double>();
      if (!(v >= 0.0 && v <= 1.0)) {
        raise(ErrorCode::SchemaError,
              path + ":" + std::to_string(line_no) + ": accuracy " + std::to_string(v) + " outside [0,1]");
      }
      label = v;
    }
    ds.specs.push_back(std::move(spec));
    ds.labels.push_back(label);
  }
  rebuild_derived(ds);
  return ds;
}

}  // namespace archsage::data
