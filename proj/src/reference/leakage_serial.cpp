#include "sapleak/reference.hpp"

namespace sapleak::reference {

Matrix tag_cooccurrence(std::span<const std::shared_ptr<const AccessPattern>> patterns,
                        std::size_t n_docs) {
  std::vector<std::vector<char>> dense(patterns.size(), std::vector<char>(n_docs, 0));
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    for (auto id : patterns[j]->ids) dense[j][id] = 1;
  }
  Matrix out(patterns.size(), patterns.size());
  for (std::size_t a = 0; a < patterns.size(); ++a) {
    for (std::size_t b = 0; b < patterns.size(); ++b) {
      std::size_t common = 0;
      for (std::size_t d = 0; d < n_docs; ++d) common += dense[a][d] & dense[b][d];
      out(a, b) = static_cast<double>(common) / static_cast<double>(n_docs);
    }
  }
  return out;
}

}  // namespace sapleak::reference
