#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "archsage/common.hpp"

namespace archsage::space {

// Operation codes. 0 is reserved for padding / no-edge, interior operations
// sit strictly between INPUT and OUTPUT in the vocabulary ordering.
enum Op : int {
  kNone = 0,
  kInput = 1,
  kConv1x1 = 2,
  kConv3x3 = 3,
  kMaxPool3x3 = 4,
  kOutput = 5,
};

struct SpaceParams {
  int max_nodes = 7;
  int max_edges = 9;
  // index == op code; [0] is the padding label
  std::vector<std::string> op_labels = {"NONE",       "INPUT",  "CONV1X1",
                                        "CONV3X3",    "MAXPOOL3X3", "OUTPUT"};
  int sample_attempts = 1000;

  bool operator==(const SpaceParams&) const = default;

  int max_op_code() const { return static_cast<int>(op_labels.size()) - 1; }
  int input_code() const { return 1; }
  int output_code() const { return max_op_code(); }
  int first_interior_code() const { return 2; }
  int last_interior_code() const { return max_op_code() - 1; }
  int num_interior_codes() const { return last_interior_code() - first_interior_code() + 1; }
  int op_code_for(const std::string& label) const;  // -1 when unknown

  // Flattened feature length: padded adjacency plus one op code per node slot.
  int feature_dim() const { return max_nodes * max_nodes + max_nodes; }
};

// One architecture: a DAG cell. Node 0 is INPUT, node n-1 is OUTPUT, edges
// run only from lower to higher index (acyclic by construction).
struct CellSpec {
  int n = 0;
  std::vector<uint8_t> adj;  // n*n row-major, entries 0/1
  std::vector<int> ops;      // length n, op codes

  static CellSpec empty(int nodes);

  bool edge(int i, int j) const { return adj[static_cast<size_t>(i) * n + j] != 0; }
  void set_edge(int i, int j, bool present) {
    adj[static_cast<size_t>(i) * n + j] = present ? 1 : 0;
  }
  int edge_count() const;
  int degree(int i) const;  // in-degree + out-degree

  bool operator==(const CellSpec&) const = default;
};

enum class ValidationCode {
  Ok,
  RejectCycleShape,    // not strictly upper-triangular / malformed dimensions
  RejectNoPath,        // no INPUT->OUTPUT path, or a live node off every path
  RejectTooManyEdges,
  RejectBadOp,
};

const char* validation_code_name(ValidationCode code);

struct ValidationResult {
  ValidationCode code = ValidationCode::Ok;
  std::string detail;

  bool ok() const { return code == ValidationCode::Ok; }
};

ValidationResult validate(const CellSpec& spec, const SpaceParams& params);

// Hand-crafted positional encoding: adjacency padded to max_nodes x max_nodes
// with entry (i,j) = op code of node j when the edge exists, followed by the
// op codes of all node slots, everything scaled by 1/max_op_code.
std::vector<double> encode(const CellSpec& spec, const SpaceParams& params);

// Exact inverse of encode on valid specs.
CellSpec decode(const std::vector<double>& features, const SpaceParams& params);

CellSpec sample_random(RngStream& rng, const SpaceParams& params);
CellSpec mutate(const CellSpec& spec, RngStream& rng, double rate, const SpaceParams& params);
CellSpec crossover(const CellSpec& a, const CellSpec& b, RngStream& rng,
                   const SpaceParams& params);

// JSON object form: {"adjacency": [[0,1,...],...], "ops": ["INPUT",...]}
std::string cell_to_json(const CellSpec& spec, const SpaceParams& params);
CellSpec cell_from_json(const std::string& json_text, const SpaceParams& params);

}  // namespace archsage::space
