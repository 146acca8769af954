#include "archsage/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace archsage::num {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'T', 'F'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(buf), 4);
}

uint32_t read_u32(std::istream& is, const std::string& path) {
  unsigned char buf[4];
  if (!is.read(reinterpret_cast<char*>(buf), 4)) {
    raise(ErrorCode::ParseError, path + ": truncated tensor file");
  }
  return static_cast<uint32_t>(buf[0]) | (static_cast<uint32_t>(buf[1]) << 8) |
         (static_cast<uint32_t>(buf[2]) << 16) | (static_cast<uint32_t>(buf[3]) << 24);
}

}  // namespace

void save_tensors(const std::string& path, const std::vector<NamedTensor>& tensors) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) raise(ErrorCode::IoError, "cannot open for write: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<uint32_t>(tensors.size()));
  for (const NamedTensor& t : tensors) {
    write_u32(os, static_cast<uint32_t>(t.name.size()));
    os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_u32(os, static_cast<uint32_t>(t.value.rows));
    write_u32(os, static_cast<uint32_t>(t.value.cols));
    os.write(reinterpret_cast<const char*>(t.value.data.data()),
             static_cast<std::streamsize>(t.value.size() * sizeof(double)));
  }
  os.flush();
  if (!os) raise(ErrorCode::IoError, "write failed: " + path);
}

std::vector<NamedTensor> load_tensors(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorCode::IoError, "cannot open for read: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    raise(ErrorCode::ParseError, path + ": not a tensor file (bad magic)");
  }
  const uint32_t version = read_u32(is, path);
  if (version != kVersion) {
    raise(ErrorCode::SchemaError, path + ": unsupported tensor file version " +
                                      std::to_string(version));
  }
  const uint32_t count = read_u32(is, path);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_u32(is, path);
    if (name_len > 1u << 20) raise(ErrorCode::SchemaError, path + ": absurd tensor name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) raise(ErrorCode::ParseError, path + ": truncated name");
    const uint32_t rows = read_u32(is, path);
    const uint32_t cols = read_u32(is, path);
    if (static_cast<uint64_t>(rows) * cols > (1ull << 32)) {
      raise(ErrorCode::SchemaError, path + ": absurd tensor shape");
    }
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    if (!is.read(reinterpret_cast<char*>(m.data.data()),
                 static_cast<std::streamsize>(m.size() * sizeof(double)))) {
      raise(ErrorCode::ParseError, path + ": truncated payload for tensor '" + name + "'");
    }
    tensors.push_back({std::move(name), std::move(m)});
  }
  return tensors;
}

}  // namespace archsage::num
