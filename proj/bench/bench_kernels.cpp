#include "ldagan/data.hpp"
#include "ldagan/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace ldagan;

namespace {

// Default training sizes: K = 8, 256-d noise, 128-wide heads, 96 noise columns.
struct Setup {
    RngStream rng{7};
    GeneratorBank bank = make_generator_bank({8, 256, 128, {}}, InitScheme::normal(0.02), rng);
    DiscriminatorNet disc = make_discriminator({128, 128}, InitScheme::normal(0.02), rng);
    NoiseBatch noise = sample_noise(256, 96, rng);
    Matrix weights = Matrix::Constant(96, 8, 1.0 / 8.0);
};

Setup& setup() {
    static Setup s;
    return s;
}

template <auto Fn>
void bm_bank_forward(benchmark::State& state) {
    Setup& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(Fn(s.bank, s.disc, s.noise.values));
}

template <auto Forward, auto Backward>
void bm_bank_backward(benchmark::State& state) {
    Setup& s = setup();
    const kernels::BankPass pass = Forward(s.bank, s.disc, s.noise.values);
    for (auto _ : state) benchmark::DoNotOptimize(Backward(pass, s.bank, s.disc, s.weights));
}

template <auto Fn>
void bm_batch_e_step(benchmark::State& state) {
    RngStream rng(11);
    Matrix scores(state.range(0), 8);
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = rng.uniform(0.01, 0.99);
    const DirichletParams alpha(std::vector<double>(8, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(Fn(scores, alpha, EStepOptions{}));
}

template <auto Fn>
void bm_nearest_centers(benchmark::State& state) {
    RngStream rng(13);
    const GaussianMixtureSpec ring = ring_spec(8, 2.0, 0.02);
    const Dataset2D data = sample_mixture(ring, static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(data.samples, ring.centers));
}

} // namespace

BENCHMARK(bm_bank_forward<kernels::serial::bank_forward>)->Name("bank_forward/serial");
BENCHMARK(bm_bank_forward<kernels::parallel::bank_forward>)->Name("bank_forward/parallel");
BENCHMARK(bm_bank_backward<kernels::serial::bank_forward, kernels::serial::bank_backward>)
    ->Name("bank_backward/serial");
BENCHMARK(bm_bank_backward<kernels::serial::bank_forward, kernels::parallel::bank_backward>)
    ->Name("bank_backward/parallel");
BENCHMARK(bm_batch_e_step<kernels::serial::batch_e_step>)->Name("batch_e_step/serial")->Arg(96)->Arg(4096);
BENCHMARK(bm_batch_e_step<kernels::parallel::batch_e_step>)->Name("batch_e_step/parallel")->Arg(96)->Arg(4096);
BENCHMARK(bm_nearest_centers<kernels::serial::nearest_centers>)->Name("nearest_centers/serial")->Arg(4096);
BENCHMARK(bm_nearest_centers<kernels::parallel::nearest_centers>)->Name("nearest_centers/parallel")->Arg(4096);

BENCHMARK_MAIN();
