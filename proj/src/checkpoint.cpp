#include "sgl/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace sgl {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'L', 'C', 'K', 'P', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail("parse_error", "truncated checkpoint file " + path);
  return v;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in, const std::string& path) {
  const uint32_t n = read_pod<uint32_t>(in, path);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) fail("parse_error", "truncated checkpoint file " + path);
  return s;
}

}  // namespace

void Checkpoint::put_tensor(const std::string& name, const Tensor& t) {
  tensors[name] = {t.shape(), t.data()};
}

Tensor Checkpoint::get_tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    fail("version_error", "checkpoint is missing tensor " + name);
  return Tensor::from(it->second.first, it->second.second);
}

bool Checkpoint::has_tensor(const std::string& name) const {
  return tensors.count(name) > 0;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io_error", "cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<uint64_t>(out, tensors.size());
  for (const auto& [name, entry] : tensors) {
    write_string(out, name);
    write_pod<uint32_t>(out, static_cast<uint32_t>(entry.first.size()));
    for (int64_t d : entry.first) write_pod<uint64_t>(out, static_cast<uint64_t>(d));
    out.write(reinterpret_cast<const char*>(entry.second.data()),
              static_cast<std::streamsize>(entry.second.size() * sizeof(double)));
  }
  write_pod<uint64_t>(out, strings.size());
  for (const auto& [name, value] : strings) {
    write_string(out, name);
    write_pod<uint64_t>(out, value.size());
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
  }
  if (!out) fail("io_error", "failed writing checkpoint " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io_error", "cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail("version_error", "bad checkpoint magic in " + path);
  Checkpoint ck;
  const uint64_t nt = read_pod<uint64_t>(in, path);
  for (uint64_t i = 0; i < nt; ++i) {
    const std::string name = read_string(in, path);
    const uint32_t ndims = read_pod<uint32_t>(in, path);
    Shape shape(ndims);
    for (uint32_t d = 0; d < ndims; ++d)
      shape[d] = static_cast<int64_t>(read_pod<uint64_t>(in, path));
    std::vector<double> data(static_cast<size_t>(shape_numel(shape)));
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) fail("parse_error", "truncated checkpoint file " + path);
    ck.tensors[name] = {std::move(shape), std::move(data)};
  }
  const uint64_t ns = read_pod<uint64_t>(in, path);
  for (uint64_t i = 0; i < ns; ++i) {
    const std::string name = read_string(in, path);
    const uint64_t len = read_pod<uint64_t>(in, path);
    std::string value(len, '\0');
    in.read(value.data(), static_cast<std::streamsize>(len));
    if (!in) fail("parse_error", "truncated checkpoint file " + path);
    ck.strings[name] = std::move(value);
  }
  return ck;
}

}  // namespace sgl
