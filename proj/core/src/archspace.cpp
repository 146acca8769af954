#include "archsage/archspace.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace archsage::space {

namespace {

// Forward reachability from node `start` along edges i->j.
std::vector<bool> reach_forward(const CellSpec& spec, int start) {
  std::vector<bool> seen(spec.n, false);
  seen[start] = true;
  for (int i = start; i < spec.n; ++i) {
    if (!seen[i]) continue;
    for (int j = i + 1; j < spec.n; ++j) {
      if (spec.edge(i, j)) seen[j] = true;
    }
  }
  return seen;
}

// Backward reachability: nodes from which `target` is reachable.
std::vector<bool> reach_backward(const CellSpec& spec, int target) {
  std::vector<bool> seen(spec.n, false);
  seen[target] = true;
  for (int j = target; j >= 0; --j) {
    if (!seen[j]) continue;
    for (int i = 0; i < j; ++i) {
      if (spec.edge(i, j)) seen[i] = true;
    }
  }
  return seen;
}

std::vector<std::pair<int, int>> all_edge_slots(int n) {
  std::vector<std::pair<int, int>> slots;
  slots.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  }
  return slots;
}

}  // namespace

int SpaceParams::op_code_for(const std::string& label) const {
  for (size_t c = 0; c < op_labels.size(); ++c) {
    if (op_labels[c] == label) return static_cast<int>(c);
  }
  return -1;
}

CellSpec CellSpec::empty(int nodes) {
  CellSpec s;
  s.n = nodes;
  s.adj.assign(static_cast<size_t>(nodes) * nodes, 0);
  s.ops.assign(nodes, kNone);
  return s;
}

int CellSpec::edge_count() const {
  int count = 0;
  for (uint8_t v : adj) count += v != 0;
  return count;
}

int CellSpec::degree(int i) const {
  int d = 0;
  for (int j = 0; j < n; ++j) {
    if (j < i && edge(j, i)) ++d;
    if (j > i && edge(i, j)) ++d;
  }
  return d;
}

const char* validation_code_name(ValidationCode code) {
  switch (code) {
    case ValidationCode::Ok: return "OK";
    case ValidationCode::RejectCycleShape: return "REJECT_CYCLE_SHAPE";
    case ValidationCode::RejectNoPath: return "REJECT_NO_PATH";
    case ValidationCode::RejectTooManyEdges: return "REJECT_TOO_MANY_EDGES";
    case ValidationCode::RejectBadOp: return "REJECT_BAD_OP";
  }
  return "UNKNOWN";
}

ValidationResult validate(const CellSpec& spec, const SpaceParams& params) {
  // Shape checks first: everything after assumes a well-formed triangular DAG.
  if (spec.n < 2) {
    return {ValidationCode::RejectCycleShape, "cell needs at least INPUT and OUTPUT nodes"};
  }
  if (spec.n > params.max_nodes) {
    return {ValidationCode::RejectCycleShape,
            "cell has " + std::to_string(spec.n) + " nodes, max is " +
                std::to_string(params.max_nodes)};
  }
  if (static_cast<int>(spec.ops.size()) != spec.n ||
      spec.adj.size() != static_cast<size_t>(spec.n) * spec.n) {
    return {ValidationCode::RejectCycleShape, "adjacency dimensions do not match ops length"};
  }
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      const uint8_t v = spec.adj[static_cast<size_t>(i) * spec.n + j];
      if (v != 0 && v != 1) {
        return {ValidationCode::RejectCycleShape, "adjacency entries must be 0 or 1"};
      }
      if (v != 0 && j <= i) {
        return {ValidationCode::RejectCycleShape,
                "edge (" + std::to_string(i) + "," + std::to_string(j) +
                    ") breaks strict upper-triangular form"};
      }
    }
  }

  if (spec.edge_count() > params.max_edges) {
    return {ValidationCode::RejectTooManyEdges,
            std::to_string(spec.edge_count()) + " edges, max is " +
                std::to_string(params.max_edges)};
  }

  const std::vector<bool> fwd = reach_forward(spec, 0);
  const std::vector<bool> bwd = reach_backward(spec, spec.n - 1);
  if (!fwd[spec.n - 1]) {
    return {ValidationCode::RejectNoPath, "no INPUT->OUTPUT path"};
  }
  for (int i = 1; i < spec.n - 1; ++i) {
    if (spec.degree(i) > 0 && !(fwd[i] && bwd[i])) {
      return {ValidationCode::RejectNoPath,
              "node " + std::to_string(i) + " has edges but lies on no INPUT->OUTPUT path"};
    }
  }

  if (spec.ops[0] != params.input_code()) {
    return {ValidationCode::RejectBadOp, "node 0 must be INPUT"};
  }
  if (spec.ops[spec.n - 1] != params.output_code()) {
    return {ValidationCode::RejectBadOp, "last node must be OUTPUT"};
  }
  for (int i = 1; i < spec.n - 1; ++i) {
    if (spec.ops[i] < params.first_interior_code() || spec.ops[i] > params.last_interior_code()) {
      return {ValidationCode::RejectBadOp,
              "node " + std::to_string(i) + " has op code " + std::to_string(spec.ops[i]) +
                  ", not an interior operation"};
    }
  }

  return {ValidationCode::Ok, ""};
}

std::vector<double> encode(const CellSpec& spec, const SpaceParams& params) {
  const ValidationResult vr = validate(spec, params);
  if (!vr.ok()) {
    raise(ErrorCode::InvalidSpec,
          std::string("encode: ") + validation_code_name(vr.code) + " (" + vr.detail + ")");
  }
  const int m = params.max_nodes;
  const double inv = 1.0 / params.max_op_code();
  std::vector<double> out(static_cast<size_t>(params.feature_dim()), 0.0);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = i + 1; j < spec.n; ++j) {
      if (spec.edge(i, j)) {
        out[static_cast<size_t>(i) * m + j] = spec.ops[j] * inv;
      }
    }
  }
  for (int i = 0; i < spec.n; ++i) {
    out[static_cast<size_t>(m) * m + i] = spec.ops[i] * inv;
  }
  return out;
}

CellSpec decode(const std::vector<double>& features, const SpaceParams& params) {
  const int m = params.max_nodes;
  if (static_cast<int>(features.size()) != params.feature_dim()) {
    raise(ErrorCode::ShapeMismatch, "decode: feature length " + std::to_string(features.size()) +
                                        ", expected " + std::to_string(params.feature_dim()));
  }
  const double max_code = params.max_op_code();
  // Node count: op codes are positive, padding slots are zero.
  int n = 0;
  while (n < m && features[static_cast<size_t>(m) * m + n] > 0.5 / max_code) ++n;
  if (n < 2) raise(ErrorCode::InvalidSpec, "decode: feature vector encodes fewer than 2 nodes");
  CellSpec spec = CellSpec::empty(n);
  for (int i = 0; i < n; ++i) {
    spec.ops[i] = static_cast<int>(std::lround(features[static_cast<size_t>(m) * m + i] * max_code));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      spec.set_edge(i, j, features[static_cast<size_t>(i) * m + j] != 0.0);
    }
  }
  return spec;
}

CellSpec sample_random(RngStream& rng, const SpaceParams& params) {
  for (int attempt = 0; attempt < params.sample_attempts; ++attempt) {
    const int n = 2 + static_cast<int>(rng.uniform_index(params.max_nodes - 1));
    CellSpec spec = CellSpec::empty(n);
    spec.ops[0] = params.input_code();
    spec.ops[n - 1] = params.output_code();
    for (int i = 1; i < n - 1; ++i) {
      spec.ops[i] =
          params.first_interior_code() + static_cast<int>(rng.uniform_index(params.num_interior_codes()));
    }
    auto slots = all_edge_slots(n);
    const int max_k = std::min<int>(params.max_edges, static_cast<int>(slots.size()));
    const int k = 1 + static_cast<int>(rng.uniform_index(max_k));
    // Partial Fisher-Yates: the first k slots become the edge set.
    for (int i = 0; i < k; ++i) {
      const size_t j = i + rng.uniform_index(slots.size() - i);
      std::swap(slots[i], slots[j]);
      spec.set_edge(slots[i].first, slots[i].second, true);
    }
    if (validate(spec, params).ok()) return spec;
  }
  raise(ErrorCode::SamplingExhausted,
        "no valid cell after " + std::to_string(params.sample_attempts) + " attempts");
}

CellSpec mutate(const CellSpec& spec, RngStream& rng, double rate, const SpaceParams& params) {
  if (rate < 0.0 || rate > 1.0) raise(ErrorCode::InvalidArgument, "mutation rate outside [0,1]");
  if (rate == 0.0) return spec;
  // Each touched edge slot is redrawn at the input's edge density (toggling
  // would complement the graph at rate=1 and bust the edge budget for good).
  const int slots = spec.n * (spec.n - 1) / 2;
  const double density = static_cast<double>(spec.edge_count()) / slots;
  for (int attempt = 0; attempt < params.sample_attempts; ++attempt) {
    CellSpec cand = spec;
    for (int i = 1; i < cand.n - 1; ++i) {
      if (rng.bernoulli(rate)) {
        cand.ops[i] = params.first_interior_code() +
                      static_cast<int>(rng.uniform_index(params.num_interior_codes()));
      }
    }
    for (int i = 0; i < cand.n; ++i) {
      for (int j = i + 1; j < cand.n; ++j) {
        if (rng.bernoulli(rate)) cand.set_edge(i, j, rng.bernoulli(density));
      }
    }
    if (validate(cand, params).ok()) return cand;
  }
  raise(ErrorCode::SamplingExhausted,
        "no valid mutation after " + std::to_string(params.sample_attempts) + " attempts");
}

CellSpec crossover(const CellSpec& a, const CellSpec& b, RngStream& rng,
                   const SpaceParams& params) {
  for (int attempt = 0; attempt < params.sample_attempts; ++attempt) {
    const int n = rng.bernoulli(0.5) ? a.n : b.n;
    CellSpec child = CellSpec::empty(n);
    child.ops[0] = params.input_code();
    child.ops[n - 1] = params.output_code();
    // Per op slot, draw uniformly among parents that have an interior node there.
    for (int i = 1; i < n - 1; ++i) {
      const bool in_a = i < a.n - 1;
      const bool in_b = i < b.n - 1;
      if (in_a && in_b) {
        child.ops[i] = rng.bernoulli(0.5) ? a.ops[i] : b.ops[i];
      } else {
        child.ops[i] = in_a ? a.ops[i] : b.ops[i];
      }
    }
    // Per edge slot, same rule; a parent has slot (i,j) when j fits its node range.
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool in_a = j <= a.n - 1;
        const bool in_b = j <= b.n - 1;
        bool present;
        if (in_a && in_b) {
          present = rng.bernoulli(0.5) ? a.edge(i, j) : b.edge(i, j);
        } else {
          present = in_a ? a.edge(i, j) : b.edge(i, j);
        }
        child.set_edge(i, j, present);
      }
    }
    if (validate(child, params).ok()) return child;
  }
  raise(ErrorCode::SamplingExhausted,
        "no valid crossover after " + std::to_string(params.sample_attempts) + " attempts");
}

std::string cell_to_json(const CellSpec& spec, const SpaceParams& params) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < spec.n; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int k = 0; k < spec.n; ++k) row.push_back(spec.adj[static_cast<size_t>(i) * spec.n + k]);
    rows.push_back(std::move(row));
  }
  j["adjacency"] = std::move(rows);
  auto ops = nlohmann::ordered_json::array();
  for (int code : spec.ops) {
    if (code < 0 || code > params.max_op_code()) {
      raise(ErrorCode::InvalidSpec, "op code " + std::to_string(code) + " outside vocabulary");
    }
    ops.push_back(params.op_labels[static_cast<size_t>(code)]);
  }
  j["ops"] = std::move(ops);
  return j.dump();
}

CellSpec cell_from_json(const std::string& json_text, const SpaceParams& params) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("cell json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("adjacency") || !j.contains("ops")) {
    raise(ErrorCode::SchemaError, "cell json must contain 'adjacency' and 'ops'");
  }
  const auto& adj = j["adjacency"];
  const auto& ops = j["ops"];
  if (!adj.is_array() || !ops.is_array() || adj.size() != ops.size()) {
    raise(ErrorCode::SchemaError, "adjacency and ops must be arrays of equal length");
  }
  const int n = static_cast<int>(ops.size());
  CellSpec spec = CellSpec::empty(n);
  for (int i = 0; i < n; ++i) {
    if (!adj[i].is_array() || static_cast<int>(adj[i].size()) != n) {
      raise(ErrorCode::SchemaError, "adjacency row " + std::to_string(i) + " has wrong length");
    }
    for (int k = 0; k < n; ++k) {
      if (!adj[i][k].is_number_integer()) {
        raise(ErrorCode::SchemaError, "adjacency entries must be integers");
      }
      const int v = adj[i][k].get<int>();
      if (v != 0 && v != 1) raise(ErrorCode::SchemaError, "adjacency entries must be 0 or 1");
      spec.adj[static_cast<size_t>(i) * n + k] = static_cast<uint8_t>(v);
    }
    if (!ops[i].is_string()) raise(ErrorCode::SchemaError, "ops entries must be strings");
    const int code = params.op_code_for(ops[i].get<std::string>());
    if (code < 0) {
      raise(ErrorCode::SchemaError, "unknown op label '" + ops[i].get<std::string>() + "'");
    }
    spec.ops[i] = code;
  }
  return spec;
}

}  // namespace archsage::space
