#pragma once

#include <string>
#include <vector>

namespace sgl {

// Token table, one token per line on disk; the line number is the id.
// Id 0 is reserved for padding, id 1 for the sequence-start marker.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;

  Vocab() = default;
  explicit Vocab(std::vector<std::string> tokens);

  static Vocab load(const std::string& path);
  void save(const std::string& path) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const;
  int id(const std::string& token) const;  // -1 if unknown

 private:
  std::vector<std::string> tokens_;
};

}  // namespace sgl
