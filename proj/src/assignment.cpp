#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "sapleak/attack.hpp"

namespace sapleak {

namespace {

constexpr std::int64_t kFree = -1;

// Among all optimal assignments, finds the one with the lexicographically
// smallest keyword_of. The Hungarian potentials certify optimality: a full
// assignment is optimal iff it only uses tight edges (zero reduced cost) and
// leaves unused only keywords with zero potential. Tags are fixed in order;
// tag j moves to a smaller tight keyword when an exchange cycle through the
// not-yet-fixed tags (and the pool of unused keywords) brings the freed
// keyword back into use.
class TieBreaker {
 public:
  TieBreaker(const Matrix& c, const std::vector<double>& u, const std::vector<double>& v,
             std::vector<std::uint32_t>& kw)
      : c_(c), n_(c.rows()), m_(c.cols()), kw_(kw), occupant_(n_, kFree),
        tight_cols_(m_), tight_tags_(n_), freeable_(n_), frozen_(m_, 0) {
    for (std::size_t t = 0; t < m_; ++t) occupant_[kw[t]] = static_cast<std::int64_t>(t);
    for (std::size_t i = 0; i < n_; ++i) {
      freeable_[i] = v[i + 1] >= -tolerance(v[i + 1]);
      for (std::size_t t = 0; t < m_; ++t) {
        const double reduced = c(i, t) - u[t + 1] - v[i + 1];
        if (reduced <= tolerance(std::abs(c(i, t)) + std::abs(u[t + 1]) + std::abs(v[i + 1]))) {
          tight_cols_[t].push_back(static_cast<std::uint32_t>(i));
          tight_tags_[i].push_back(static_cast<std::uint32_t>(t));
        }
      }
    }
  }

  void run() {
    for (std::size_t j = 0; j < m_; ++j) {
      const std::uint32_t home = kw_[j];
      std::vector<std::uint32_t> candidates;
      for (std::uint32_t i : tight_cols_[j]) {
        if (i < home && !blocked(i)) candidates.push_back(i);
      }
      if (!candidates.empty()) {
        const auto reach = reaching(home, j);
        std::sort(candidates.begin(), candidates.end());
        for (std::uint32_t i : candidates) {
          if (reach[i] && try_move(j, i)) break;
        }
      }
      frozen_[j] = 1;
    }
  }

 private:
  static double tolerance(double magnitude) { return 1e-11 * (1.0 + magnitude); }

  bool blocked(std::uint32_t col) const {
    return occupant_[col] != kFree && frozen_[static_cast<std::size_t>(occupant_[col])];
  }

  // Columns from which an exchange chain can end in `target`. Edge a -> b
  // means the occupant of a can move to b.
  std::vector<char> reaching(std::uint32_t target, std::size_t mover) const {
    std::vector<char> seen(n_, 0);
    std::vector<std::uint32_t> queue{target};
    seen[target] = 1;
    bool free_added = false;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::uint32_t b = queue[q];
      for (std::uint32_t t : tight_tags_[b]) {
        if (frozen_[t] || t == mover) continue;
        const std::uint32_t a = kw_[t];
        if (!seen[a]) {
          seen[a] = 1;
          queue.push_back(a);
        }
      }
      if (freeable_[b] && !free_added) {
        free_added = true;
        for (std::uint32_t a = 0; a < n_; ++a) {
          if (occupant_[a] == kFree && !seen[a]) {
            seen[a] = 1;
            queue.push_back(a);
          }
        }
      }
    }
    return seen;
  }

  // Moves tag j onto column `start` along a shortest exchange chain that ends
  // in j's old column. Returns false if the chain would raise the objective.
  bool try_move(std::size_t j, std::uint32_t start) {
    const std::uint32_t target = kw_[j];
    std::vector<std::int64_t> parent(n_, -2);
    std::vector<std::uint32_t> queue{start};
    parent[start] = -1;
    bool pool_added = false;
    for (std::size_t q = 0; q < queue.size() && parent[target] == -2; ++q) {
      const std::uint32_t a = queue[q];
      auto visit = [&](std::uint32_t b) {
        if (parent[b] == -2 && !(blocked(b) && b != target)) {
          parent[b] = a;
          queue.push_back(b);
        }
      };
      const std::int64_t occ = occupant_[a];
      if (occ == kFree) {
        if (!pool_added) {
          pool_added = true;
          for (std::uint32_t b = 0; b < n_; ++b) {
            if (freeable_[b]) visit(b);
          }
        }
      } else if (static_cast<std::size_t>(occ) != j) {
        for (std::uint32_t b : tight_cols_[static_cast<std::size_t>(occ)]) visit(b);
      }
    }
    if (parent[target] == -2) return false;

    std::vector<std::uint32_t> path;
    for (std::int64_t col = target; col != -1; col = parent[col]) path.push_back(static_cast<std::uint32_t>(col));
    std::reverse(path.begin(), path.end());  // start ... target

    double delta = c_(start, j) - c_(target, j);
    double scale = std::abs(c_(start, j)) + std::abs(c_(target, j));
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      const std::int64_t occ = occupant_[path[s]];
      if (occ == kFree) continue;
      const auto t = static_cast<std::size_t>(occ);
      delta += c_(path[s + 1], t) - c_(path[s], t);
      scale += std::abs(c_(path[s + 1], t)) + std::abs(c_(path[s], t));
    }
    if (delta > tolerance(scale)) return false;

    for (std::size_t s = path.size() - 1; s > 0; --s) {
      const std::int64_t occ = occupant_[path[s - 1]];
      occupant_[path[s]] = occ;
      if (occ != kFree) kw_[static_cast<std::size_t>(occ)] = path[s];
    }
    occupant_[start] = static_cast<std::int64_t>(j);
    kw_[j] = start;
    return true;
  }

  const Matrix& c_;
  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint32_t>& kw_;
  std::vector<std::int64_t> occupant_;
  std::vector<std::vector<std::uint32_t>> tight_cols_;
  std::vector<std::vector<std::uint32_t>> tight_tags_;
  std::vector<char> freeable_;
  std::vector<char> frozen_;
};

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  const Matrix& c = cost.values;
  const std::size_t n = c.rows();  // keywords
  const std::size_t m = c.cols();  // tags
  if (m == 0) return {};
  if (m > n) throw std::invalid_argument("more tags than keywords");
  for (double v : c.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("cost matrix has non-finite entries");
  }

  // Shortest augmenting path Hungarian over tags (rows, 1-based) and
  // keywords (columns, 1-based); index 0 is the virtual source.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> visited(n + 1);
  for (std::size_t tag = 1; tag <= m; ++tag) {
    owner[0] = tag;
    std::size_t col = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(visited.begin(), visited.end(), 0);
    do {
      visited[col] = 1;
      const std::size_t row = owner[col];
      double delta = kInf;
      std::size_t next = 0;
      for (std::size_t k = 1; k <= n; ++k) {
        if (visited[k]) continue;
        const double slack = c(k - 1, row - 1) - u[row] - v[k];
        if (slack < min_slack[k]) {
          min_slack[k] = slack;
          way[k] = col;
        }
        if (min_slack[k] < delta) {
          delta = min_slack[k];
          next = k;
        }
      }
      for (std::size_t k = 0; k <= n; ++k) {
        if (visited[k]) {
          u[owner[k]] += delta;
          v[k] -= delta;
        } else {
          min_slack[k] -= delta;
        }
      }
      col = next;
    } while (owner[col] != 0);
    do {
      const std::size_t prev = way[col];
      owner[col] = owner[prev];
      col = prev;
    } while (col != 0);
  }

  Assignment out;
  out.keyword_of.assign(m, 0);
  for (std::size_t k = 1; k <= n; ++k) {
    if (owner[k] != 0) out.keyword_of[owner[k] - 1] = static_cast<std::uint32_t>(k - 1);
  }
  TieBreaker(c, u, v, out.keyword_of).run();
  for (std::size_t j = 0; j < m; ++j) out.objective += c(out.keyword_of[j], j);
  return out;
}

}  // namespace sapleak
