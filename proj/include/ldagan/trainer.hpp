#pragma once

#include "ldagan/data.hpp"
#include "ldagan/gan.hpp"
#include "ldagan/inference.hpp"
#include "ldagan/kernels.hpp"
#include "ldagan/metrics.hpp"
#include "ldagan/neural.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ldagan {

enum class FakeSampling { ancestral, stratified };

struct TrainConfig {
    int K = 8;
    int noise_dim = 256;
    int head_width = 128;
    std::vector<int> trunk_hidden;
    std::vector<int> disc_hidden{128, 128};
    std::string init = "xavier";   // "xavier" or "gaussian"
    double init_sigma = 0.02;
    double lr_d = 1e-4;
    double lr_g = 1e-4;
    double lr_alpha = 1e-3;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int real_batch = 64;
    int per_gen = 12;
    FakeSampling fake_sampling = FakeSampling::stratified;
    double estep_tol = 1e-10;
    int estep_max_iter = 1000;
    // gamma/omega stay frozen at the uniform state while iteration < warmup.
    std::int64_t warmup_iterations = 0;
    double alpha_init = 2.0;
    double alpha_min = kDefaultAlphaMin;
    std::int64_t total_iterations = 10000;
    std::int64_t eval_interval = 500;
    int eval_samples = 512;
    std::uint64_t seed = 0;

    // Noise rows per generator update: one per fake in the discriminator batch.
    int noise_batch() const { return K * per_gen; }
    void validate() const;
};

inline constexpr std::int64_t kNeverUpdate = std::numeric_limits<std::int64_t>::max();

struct TrainState {
    GeneratorBank bank;
    DiscriminatorNet disc;
    DirichletParams alpha;
    AdamState adam_disc;
    std::vector<AdamState> adam_heads;
    AdamState adam_trunk;
    std::int64_t iteration = 0;
    RngStream rng;
};

TrainState init_state(const TrainConfig& cfg);

struct MetricsRecord {
    std::int64_t iteration = 0;
    double d_loss = 0.0;
    std::vector<double> g_losses;
    std::vector<double> alpha;
    std::optional<int> modes_covered;
    std::optional<double> hq_ratio;
    std::optional<double> usage_entropy;

    friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

// Per-step internals that are not part of the metrics stream.
struct StepDiagnostics {
    Matrix weights;                     // M x K omega rows fed to the generator update
    std::vector<std::vector<double>> gammas;
    bool estep_active = false;
    int estep_max_iterations = 0;
    double estep_mean_iterations = 0.0;
    int estep_unconverged = 0;
    std::vector<double> alpha_grad;
    GradientBuffer trunk_grad;
};

struct StepResult {
    MetricsRecord metrics;
    StepDiagnostics diag;
};

// Sub-steps of one iteration, in the order train_step runs them.

// Samples reals and fakes and ascends phi. Returns the discriminator loss.
double discriminator_substep(TrainState& state, const Dataset2D& data, const TrainConfig& cfg);

struct EStepBatch {
    NoiseBatch noise;
    kernels::BankPass pass;
    Matrix weights;
    std::vector<std::vector<double>> gammas;
    std::vector<EStepReport> reports;
    bool active = false;
};

// Draws the noise batch, scores every generator on it, and computes the
// variational parameters (or the frozen uniform state during warmup).
EStepBatch estep_substep(TrainState& state, const TrainConfig& cfg);

// Ascends every head and the shared trunk on the omega-weighted objective.
GeneratorStep generator_substep(TrainState& state, const EStepBatch& batch, const TrainConfig& cfg);

// One gradient-ascent step on alpha. Returns the gradient used.
std::vector<double> alpha_substep(TrainState& state, const EStepBatch& batch, const TrainConfig& cfg);

StepResult train_step(TrainState& state, const Dataset2D& data, const TrainConfig& cfg);

struct TrainOptions {
    // Used for coverage metrics; estimated from dataset labels when unset.
    std::optional<GaussianMixtureSpec> eval_spec;
    std::function<void(const MetricsRecord&)> on_metrics;
    std::optional<std::filesystem::path> checkpoint_path;
};

struct TrainResult {
    TrainState state;
    std::vector<MetricsRecord> metrics;
};

TrainResult train(const TrainConfig& cfg, const Dataset2D& data, const TrainOptions& opts = {});

// Fills the coverage fields of a record from ancestral samples of the model.
void evaluate_into(MetricsRecord& record, const TrainState& state, const TrainConfig& cfg,
                   const GaussianMixtureSpec& spec);

struct Checkpoint {
    TrainConfig config;
    TrainState state;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const TrainState& state, const TrainConfig& cfg, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace ldagan
