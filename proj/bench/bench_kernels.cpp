// Serial reference vs OpenMP execution of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "renewcast/models.hpp"
#include "renewcast/neural.hpp"
#include "renewcast/synthgen.hpp"

using namespace renewcast;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const ModelSpec& negbin_model() {
    static const ModelSpec model = [] {
        GeneratorSpec g;
        g.kind = GeneratorKind::random;
        g.n_series = 50;
        g.n_periods = 500;
        return fit(ModelSpec::parse("static-nb-nb"), generate(g));
    }();
    return model;
}

const std::vector<IssueSequence>& training_batch() {
    static const std::vector<IssueSequence> batch = [] {
        GeneratorSpec g;
        g.kind = GeneratorKind::random;
        g.n_series = 200;
        g.n_periods = 300;
        std::vector<IssueSequence> out;
        for (const auto& s : generate(g)) out.push_back(to_sequence(decompose(s)));
        return out;
    }();
    return batch;
}

void BM_SamplePaths(benchmark::State& state) {
    const ModelSpec& model = negbin_model();
    const DemandSeries history{"h", 0, {0, 3, 0, 0, 1, 0, 5, 0, 0}};
    for (auto _ : state) {
        auto r = sample_paths(model, history, 24, 10'000, 1, kDefaultQuantileLevels, mode(state));
        benchmark::DoNotOptimize(r.mean_per_period.data());
    }
}
BENCHMARK(BM_SamplePaths)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_BatchNll(benchmark::State& state) {
    const RnnParams params = RnnParams::initialize(20, 1, 3);
    const auto& batch = training_batch();
    std::vector<double> grad(params.size());
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        benchmark::DoNotOptimize(batch_nll(params, {}, batch, grad, mode(state)));
    }
}
BENCHMARK(BM_BatchNll)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
    GeneratorSpec g;
    g.kind = GeneratorKind::random;
    g.n_series = 200;
    g.n_periods = 1680;
    for (auto _ : state) benchmark::DoNotOptimize(generate(g, mode(state)).size());
}
BENCHMARK(BM_Generate)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
