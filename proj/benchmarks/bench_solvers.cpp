#include <benchmark/benchmark.h>

#include "trustcoop/channel.hpp"
#include "trustcoop/linalg.hpp"
#include "trustcoop/mimo.hpp"
#include "trustcoop/miso.hpp"
#include "trustcoop/simo.hpp"
#include "trustcoop/siso.hpp"
#include "trustcoop/solve.hpp"

namespace {

using namespace trustcoop;

ChannelConfig config_for(int n1, int n2, double rho_dB) {
  ChannelConfig c;
  c.n1 = n1;
  c.n2 = n2;
  c.rho1_dB = rho_dB;
  c.rho2_dB = rho_dB;
  return c;
}

SystemParams params_for(const ChannelConfig& c, const ChannelSet& ch,
                        double alpha, double q_frac) {
  SystemParams p = params_from_config(c, alpha, 0.0);
  p.Q = q_frac * q_max(ch, p);
  return p;
}

void BM_ChannelSample(benchmark::State& state) {
  const ChannelConfig c = config_for(2, 2, 50);
  std::uint64_t trial = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample(c, 7, trial++));
}
BENCHMARK(BM_ChannelSample);

void BM_TopEigvec(benchmark::State& state) {
  const ChannelSet ch = sample(config_for(4, 4, 50), 7, 0);
  const CMat m = ch.H0.adjoint() * ch.H0;
  for (auto _ : state)
    benchmark::DoNotOptimize(linalg::top_eigvec(m));
}
BENCHMARK(BM_TopEigvec);

void BM_RankOneExtract(benchmark::State& state) {
  const ChannelSet ch = sample(config_for(2, 2, 50), 7, 0);
  CMat v(2, 2);
  v.col(0) = ch.h2;
  v.col(1) = ch.h21;
  linalg::HermitianPSD X(v * v.adjoint());
  std::vector<CMat> funcs{ch.h2 * ch.h2.adjoint(), CMat::Identity(2, 2)};
  for (auto _ : state)
    benchmark::DoNotOptimize(linalg::rank_one_extract(X, funcs));
}
BENCHMARK(BM_RankOneExtract);

void BM_SolveSiso(benchmark::State& state) {
  const ChannelConfig c = config_for(1, 1, 40);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    const ChannelSet ch = sample(c, 7, trial++);
    SystemParams p = params_for(c, ch, 0.7, 0.4);
    benchmark::DoNotOptimize(siso::solve_siso(ch, p));
  }
}
BENCHMARK(BM_SolveSiso);

void BM_SolveMiso(benchmark::State& state) {
  const ChannelConfig c = config_for(2, 1, 50);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    const ChannelSet ch = sample(c, 7, trial++);
    SystemParams p = params_for(c, ch, 0.7, 0.4);
    benchmark::DoNotOptimize(miso::solve_miso(ch, p));
  }
}
BENCHMARK(BM_SolveMiso);

void BM_SolveSimo(benchmark::State& state) {
  const ChannelConfig c = config_for(1, 2, 50);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    const ChannelSet ch = sample(c, 7, trial++);
    SystemParams p = params_for(c, ch, 0.7, 0.4);
    benchmark::DoNotOptimize(simo::solve_simo(ch, p));
  }
}
BENCHMARK(BM_SolveSimo);

void BM_SolveMimo(benchmark::State& state) {
  const ChannelConfig c = config_for(2, 2, 50);
  std::uint64_t trial = 0;
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const ChannelSet ch = sample(c, 7, trial++);
    SystemParams p = params_for(c, ch, 0.7, 0.4);
    benchmark::DoNotOptimize(
        mimo::solve_mimo(ch, p, {M, 1e-6, 100, true}));
  }
}
BENCHMARK(BM_SolveMimo)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
