#pragma once

#include <string>
#include <vector>

#include "archsage/matrix.hpp"

namespace archsage::num {

struct NamedTensor {
  std::string name;
  Matrix value;
};

// Binary tensor file, little-endian:
//   magic "ASTF", u32 version (1), u32 tensor count, then per tensor:
//   u32 name length, name bytes, u32 rows, u32 cols, rows*cols f64 payload.
void save_tensors(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_tensors(const std::string& path);

}  // namespace archsage::num
