#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <omp.h>

#include "sapleak/attack.hpp"
#include "sapleak/leakage.hpp"
#include "sapleak/numeric.hpp"
#include "sapleak/reference.hpp"

using namespace sapleak;

namespace {

class Threads {
 public:
  explicit Threads(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved_); }

 private:
  int saved_;
};

void expect_close(const Matrix& got, const Matrix& want, double rel, double abs = 0.0) {
  ASSERT_EQ(got.rows(), want.rows());
  ASSERT_EQ(got.cols(), want.cols());
  for (std::size_t i = 0; i < got.rows(); ++i) {
    for (std::size_t j = 0; j < got.cols(); ++j) {
      const double tol = abs + rel * std::max(1.0, std::abs(want(i, j)));
      ASSERT_NEAR(got(i, j), want(i, j), tol) << i << "," << j;
    }
  }
}

Matrix random_stochastic(std::size_t rows, std::size_t cols, Rng& rng, double zero_rate = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = u(rng) < zero_rate ? 0.0 : u(rng);
  normalize_columns(m);
  return m;
}

std::vector<double> random_volumes(std::size_t n, Rng& rng, double hi = 0.5) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  v[0] = 0.0;  // exercise the clamp
  return v;
}

// Runs a kernel at one and four threads; the two results must be identical.
template <class F>
auto at_both_widths(F&& f) {
  auto one = [&] { Threads t(1); return f(); }();
  auto four = [&] { Threads t(4); return f(); }();
  EXPECT_TRUE(one == four);
  return one;
}

}  // namespace

TEST(Reference, CostFreq) {
  Rng rng(1);
  const Matrix obs = random_stochastic(40, 12, rng, 0.3);
  const Matrix aux = random_stochastic(70, 12, rng, 0.1);
  std::vector<std::int64_t> counts(12);
  for (auto& c : counts) c = static_cast<std::int64_t>(rng() % 30);
  const auto got = at_both_widths([&] { return cost_freq(obs, counts, aux, 1e-6).values; });
  expect_close(got, reference::cost_freq(obs, counts, aux, 1e-6), 1e-12);
}

TEST(Reference, CostVolPlainAndClrz) {
  Rng rng(2);
  const auto obs = random_volumes(50, rng);
  const auto aux = random_volumes(80, rng);
  const auto plain = at_both_widths([&] { return cost_vol_plain(obs, 4000, aux, 0.5).values; });
  expect_close(plain, reference::cost_vol_plain(obs, 4000, aux, 0.5), 1e-12);
  const auto clrz =
      at_both_widths([&] { return cost_vol_clrz(obs, 4000, aux, 0.999, 0.05, 0.5).values; });
  expect_close(clrz, reference::cost_vol_clrz(obs, 4000, aux, 0.999, 0.05, 0.5), 1e-12);
}

TEST(Reference, CostVolPpyy) {
  Rng rng(3);
  const std::size_t n_docs = 600, n = 30;
  const auto aux = random_volumes(25, rng, 0.3);
  const double shift = ppyy_pad_constant(0.2, static_cast<std::int64_t>(n));
  std::vector<std::int64_t> raw;
  for (double v : random_volumes(20, rng, 0.3)) {
    raw.push_back(static_cast<std::int64_t>(v * n_docs + shift) + static_cast<std::int64_t>(rng() % 20));
  }
  const auto got =
      at_both_widths([&] { return cost_vol_ppyy(raw, n_docs, aux, 0.2, n, 1e-12, 0.5).values; });
  const Matrix want = reference::cost_vol_ppyy(raw, n_docs, aux, 0.2, n, 0.5);
  // compare likelihoods: truncation drops at most tail_mass of probability
  for (std::size_t i = 0; i < want.rows(); ++i) {
    for (std::size_t j = 0; j < want.cols(); ++j) {
      const double pw = std::exp(-want(i, j)), pg = std::exp(-got(i, j));
      EXPECT_NEAR(pg, pw, 1e-12 + 1e-9 * pw) << i << "," << j;
      if (want(i, j) < 30) {
        EXPECT_NEAR(got(i, j), want(i, j), 1e-8 * want(i, j));
      }
    }
  }
}

TEST(Reference, CostVolSeal) {
  Rng rng(4);
  const std::size_t n_docs = 3000;
  const auto aux = random_volumes(30, rng, 0.4);
  std::vector<std::int64_t> padded;
  for (double v : random_volumes(25, rng, 0.4)) {
    padded.push_back(seal_padded_volume(static_cast<std::int64_t>(v * n_docs), 2));
  }
  const auto got = at_both_widths([&] { return cost_vol_seal(padded, n_docs, aux, 2, 0.5).values; });
  const Matrix want = reference::cost_vol_seal(padded, n_docs, aux, 2, 0.5);
  for (std::size_t i = 0; i < want.rows(); ++i) {
    for (std::size_t j = 0; j < want.cols(); ++j) {
      if (want(i, j) < 600) {
        EXPECT_NEAR(got(i, j), want(i, j), 1e-9 * std::max(1.0, want(i, j))) << i << "," << j;
      } else {
        EXPECT_GE(got(i, j), 600.0);  // linear-space sum underflows out there
      }
    }
  }
}

TEST(Reference, Liu) {
  Rng rng(5);
  const Matrix obs = random_stochastic(60, 10, rng, 0.2);
  const Matrix aux = random_stochastic(90, 10, rng);
  const auto got = at_both_widths([&] { return liu_attack(obs, aux); });
  EXPECT_EQ(got, reference::liu_attack(obs, aux));
}

TEST(Reference, TagCooccurrence) {
  Rng rng(6);
  const std::size_t n_docs = 500;
  std::vector<std::shared_ptr<const AccessPattern>> pats;
  for (int t = 0; t < 40; ++t) {
    auto p = std::make_shared<AccessPattern>();
    for (std::uint32_t d = 0; d < n_docs; ++d) {
      if (rng() % 7 == 0) p->ids.push_back(d);
    }
    p->volume = static_cast<std::int64_t>(p->ids.size());
    pats.push_back(std::move(p));
  }
  const auto got = at_both_widths([&] { return tag_cooccurrence(pats, n_docs); });
  expect_close(got, reference::tag_cooccurrence(pats, n_docs), 1e-15);
}

TEST(Reference, ClrzObfuscationIndependentOfThreads) {
  Rng rng(7);
  InvertedIndex idx;
  idx.n_docs = 2000;
  for (int k = 0; k < 50; ++k) {
    std::vector<std::uint32_t> col;
    for (std::uint32_t d = 0; d < idx.n_docs; ++d) {
      if (rng() % 10 == 0) col.push_back(d);
    }
    idx.columns.push_back(std::move(col));
  }
  at_both_widths([&] {
    Rng r(99);
    return obfuscate_index_clrz(idx, 0.9, 0.05, r);
  });
}

TEST(Reference, SolveAssignmentIndependentOfThreads) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CostMatrix c{Matrix(120, 80), CostKind::Combined};
  for (double& x : c.values.data()) x = std::floor(u(rng) * 50);
  at_both_widths([&] { return solve_assignment(c).keyword_of; });
}
