// Pseudospectrum sweeps: serial reference vs OpenMP, dense SVD vs banded slices.

#include "mpspec/pseudospectrum.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace mpspec;

namespace {

MultiParamPencil random_pencil(int l, int extra_rows) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(l * 31 + extra_rows));
    std::normal_distribution<double> nd;
    std::vector<CMatrix> a;
    for (int i = 0; i < 3; ++i) {
        CMatrix c(l + extra_rows, l);
        for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = cplx(nd(rng), nd(rng));
        a.push_back(c);
    }
    return MultiParamPencil::linear(a);
}

GridSpec grid() { return {{Axis::real(-1, 1, 8), Axis::complex_box(-1, 1, -1, 1, 16, 16)}}; }

template <bool Parallel>
void sweep(benchmark::State& state, FieldMethod method, int extra_rows) {
    const auto p = random_pencil(static_cast<int>(state.range(0)), extra_rows);
    const auto model = PerturbationModel::relative(p);
    const GridSpec g = grid();
    for (auto _ : state) {
        PseudospectrumField f = Parallel ? field(p, model, g, method) : field_serial(p, model, g, method);
        benchmark::DoNotOptimize(f.values.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.size()));
}

void naive_serial(benchmark::State& s) { sweep<false>(s, FieldMethod::naive, 1); }
void naive_parallel(benchmark::State& s) { sweep<true>(s, FieldMethod::naive, 1); }
void slightly_tall_serial(benchmark::State& s) { sweep<false>(s, FieldMethod::slightly_tall, 1); }
void slightly_tall_parallel(benchmark::State& s) { sweep<true>(s, FieldMethod::slightly_tall, 1); }
void very_tall_serial(benchmark::State& s) {
    const auto l = static_cast<int>(s.range(0));
    sweep<false>(s, FieldMethod::very_tall, l);
}
void very_tall_parallel(benchmark::State& s) {
    const auto l = static_cast<int>(s.range(0));
    sweep<true>(s, FieldMethod::very_tall, l);
}

}  // namespace

BENCHMARK(naive_serial)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(naive_parallel)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(slightly_tall_serial)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(slightly_tall_parallel)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(very_tall_serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(very_tall_parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
