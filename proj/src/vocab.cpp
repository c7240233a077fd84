#include "sgl/vocab.hpp"

#include <fstream>

#include "sgl/tensor.hpp"

namespace sgl {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != "<pad>")
    fail("vocab_error", "vocab must reserve id 0 for <pad>");
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open vocab file " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return Vocab(std::move(tokens));
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write vocab file " + path);
  for (const std::string& t : tokens_) out << t << "\n";
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size())
    fail("vocab_error", "token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<size_t>(id)];
}

int Vocab::id(const std::string& token) const {
  for (size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i] == token) return static_cast<int>(i);
  return -1;
}

}  // namespace sgl
