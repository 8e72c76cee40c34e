// Production kernels against the serial reference versions. Threads follow
// OMP_NUM_THREADS; the Arg is the number of keywords.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sapleak/attack.hpp"
#include "sapleak/leakage.hpp"
#include "sapleak/numeric.hpp"
#include "sapleak/reference.hpp"

using namespace sapleak;

namespace {

struct Inputs {
  std::size_t n_docs = 20000;
  Matrix obs, aux;
  std::vector<std::int64_t> counts;
  std::vector<double> volumes, aux_volumes;
  std::vector<std::int64_t> raw, padded;
};

Inputs make_inputs(std::size_t n, std::size_t n_docs = 20000) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Inputs in;
  in.n_docs = n_docs;
  const std::size_t m = n / 2, rho = 50;
  in.obs = Matrix(m, rho);
  in.aux = Matrix(n, rho);
  for (double& x : in.obs.data()) x = u(rng);
  for (double& x : in.aux.data()) x = u(rng);
  normalize_columns(in.obs);
  normalize_columns(in.aux);
  in.counts.assign(rho, 5);
  const double shift = ppyy_pad_constant(0.2, static_cast<std::int64_t>(n));
  for (std::size_t j = 0; j < m; ++j) {
    const double v = 0.3 * u(rng);
    in.volumes.push_back(v);
    const auto d = static_cast<std::int64_t>(v * static_cast<double>(n_docs));
    in.raw.push_back(d + static_cast<std::int64_t>(shift));
    in.padded.push_back(seal_padded_volume(d, 2));
  }
  for (std::size_t i = 0; i < n; ++i) in.aux_volumes.push_back(0.3 * u(rng));
  return in;
}

void BM_CostFreq(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(cost_freq(in.obs, in.counts, in.aux, 1e-6));
}
void BM_CostFreqSerial(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::cost_freq(in.obs, in.counts, in.aux, 1e-6));
}

void BM_CostVolPlain(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(cost_vol_plain(in.volumes, in.n_docs, in.aux_volumes, 0.5));
}
void BM_CostVolPlainSerial(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(reference::cost_vol_plain(in.volumes, in.n_docs, in.aux_volumes, 0.5));
  }
}

// the full-support reference is quadratic in N_D, so PPYY runs on a smaller corpus
void BM_CostVolPpyy(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)), 2000);
  for (auto _ : st) {
    benchmark::DoNotOptimize(cost_vol_ppyy(in.raw, in.n_docs, in.aux_volumes, 0.2,
                                           in.aux_volumes.size(), 1e-12, 0.5));
  }
}
void BM_CostVolPpyySerial(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)), 2000);
  for (auto _ : st) {
    benchmark::DoNotOptimize(reference::cost_vol_ppyy(in.raw, in.n_docs, in.aux_volumes, 0.2,
                                                      in.aux_volumes.size(), 0.5));
  }
}

void BM_CostVolSeal(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(cost_vol_seal(in.padded, in.n_docs, in.aux_volumes, 2, 0.5));
}
void BM_CostVolSealSerial(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(reference::cost_vol_seal(in.padded, in.n_docs, in.aux_volumes, 2, 0.5));
  }
}

void BM_Liu(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(liu_attack(in.obs, in.aux));
}
void BM_LiuSerial(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::liu_attack(in.obs, in.aux));
}

std::vector<std::shared_ptr<const AccessPattern>> patterns(std::size_t count, std::size_t n_docs) {
  Rng rng(2);
  std::vector<std::shared_ptr<const AccessPattern>> out;
  for (std::size_t t = 0; t < count; ++t) {
    auto p = std::make_shared<AccessPattern>();
    for (std::uint32_t d = 0; d < n_docs; ++d) {
      if (rng() % 20 == 0) p->ids.push_back(d);
    }
    p->volume = static_cast<std::int64_t>(p->ids.size());
    out.push_back(std::move(p));
  }
  return out;
}

void BM_Cooccurrence(benchmark::State& st) {
  const auto pats = patterns(static_cast<std::size_t>(st.range(0)), 20000);
  for (auto _ : st) benchmark::DoNotOptimize(tag_cooccurrence(pats, 20000));
}
void BM_CooccurrenceSerial(benchmark::State& st) {
  const auto pats = patterns(static_cast<std::size_t>(st.range(0)), 20000);
  for (auto _ : st) benchmark::DoNotOptimize(reference::tag_cooccurrence(pats, 20000));
}

void BM_SolveAssignment(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)));
  const auto c = combine(cost_vol_plain(in.volumes, in.n_docs, in.aux_volumes, 0.5),
                         cost_freq(in.obs, in.counts, in.aux, 1e-6), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(solve_assignment(c));
}

}  // namespace

BENCHMARK(BM_CostFreq)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostFreqSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolPlain)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolPlainSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolPpyy)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolPpyySerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolSeal)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolSealSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Liu)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LiuSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cooccurrence)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CooccurrenceSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveAssignment)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
