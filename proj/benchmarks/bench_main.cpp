#include <benchmark/benchmark.h>

#include <ctbn/cliquetree.hpp>
#include <ctbn/exact.hpp>
#include <ctbn/io.hpp>
#include <ctbn/sampling.hpp>

#include <random>
#include <string>

using namespace ctbn;

namespace {

std::string data_path(const std::string& name) {
  return std::string(CTBN_DATA_DIR) + "/" + name;
}

Matrix random_intensity(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> rate(0.05, 5.0);
  Matrix q = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double total = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      q(i, j) = rate(rng);
      total += q(i, j);
    }
    q(i, i) = -total;
  }
  return q;
}

void bm_matrix_exp(benchmark::State& state) {
  std::mt19937 rng(1);
  Matrix q = random_intensity(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(q, 1.0));
}
BENCHMARK(bm_matrix_exp)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void bm_joint_intensity_drug(benchmark::State& state) {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  for (auto _ : state) benchmark::DoNotOptimize(joint_intensity(drug));
}
BENCHMARK(bm_joint_intensity_drug);

void bm_sample_trajectory(benchmark::State& state) {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  std::uint64_t stream = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_trajectory(drug, 10.0, 42, stream++));
}
BENCHMARK(bm_sample_trajectory);

void bm_exact_posterior(benchmark::State& state) {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  Evidence ev(drug, {{1.0, "Hungry", "not-hungry"}, {3.0, "Drowsy", "drowsy"}});
  for (auto _ : state) benchmark::DoNotOptimize(posterior_at(drug, ev, 6.0));
}
BENCHMARK(bm_exact_posterior);

void bm_calibrate_dynamics(benchmark::State& state) {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  ApproxConfig cfg;
  cfg.method = state.range(0) == 0 ? MargMethod::linear : MargMethod::subsystem;
  for (auto _ : state) {
    CliqueTree tree = build_clique_tree(drug);
    calibrate_dynamics(tree, cfg);
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(bm_calibrate_dynamics)->Arg(0)->Arg(1);

void bm_propagate_recalc(benchmark::State& state) {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  ApproxConfig cfg;
  cfg.method = MargMethod::subsystem;
  cfg.recalc = 0.5;
  for (auto _ : state) {
    CliqueTree tree = build_clique_tree(drug);
    calibrate_dynamics(tree, cfg);
    propagate(tree, 6.0, cfg);
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(bm_propagate_recalc);

} // namespace

BENCHMARK_MAIN();
