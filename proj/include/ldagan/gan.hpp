#pragma once

#include "ldagan/inference.hpp"
#include "ldagan/neural.hpp"
#include "ldagan/special_math.hpp"

#include <vector>

namespace ldagan {

// noise_dim x M, entries in [-1, 1].
struct NoiseBatch {
    Matrix values;

    Eigen::Index size() const { return values.cols(); }
};

NoiseBatch sample_noise(int noise_dim, int count, RngStream& rng);

// K generators. Each has its own first affine layer (head, noise -> hidden,
// ReLU); everything after it (trunk, hidden -> ... -> 2, identity output)
// is shared across generators.
struct GeneratorBank {
    std::vector<MlpParams> heads;
    MlpParams trunk;

    int k() const { return static_cast<int>(heads.size()); }
    int noise_dim() const { return static_cast<int>(heads.front().input_dim()); }
};

struct BankShape {
    int k = 8;
    int noise_dim = 256;
    int head_width = 128;
    std::vector<int> trunk_hidden;   // widths of extra shared ReLU layers
};

GeneratorBank make_generator_bank(const BankShape& shape, const InitScheme& scheme, RngStream& rng);

// 2 -> hidden ReLU ... -> 1 sigmoid.
struct DiscriminatorNet {
    MlpParams net;
};

DiscriminatorNet make_discriminator(const std::vector<int>& hidden, const InitScheme& scheme, RngStream& rng);

struct FakeBatch {
    Matrix samples;              // 2 x M
    std::vector<int> mode_ids;   // M, each in [0, num_generators)
    NoiseBatch noise;
    int num_generators = 0;

    Eigen::Index size() const { return samples.cols(); }
};

Eigen::Vector2d generate(const GeneratorBank& bank, int k, const Vector& z);
// G_k applied to every column of noise; returns 2 x M.
Matrix generate_batch(const GeneratorBank& bank, int k, const Matrix& noise);

// Raw sigmoid scores, unclamped. Samples are columns.
Vector discriminator_scores(const DiscriminatorNet& d, const Matrix& x);
// Clamped to [kLikelihoodEps, 1 - kLikelihoodEps].
double discriminate(const DiscriminatorNet& d, const Eigen::Vector2d& x);
Vector discriminate(const DiscriminatorNet& d, const Matrix& x);

// Mean-of-batch objective for fixed scores, used by the discriminator loss:
//   mean log D(real) + mean log(1 - D(fake)), with clamping.
double discriminator_objective(const Vector& real_scores, const Vector& fake_scores);

struct DiscriminatorStep {
    double loss = 0.0;
    GradientBuffer grads;   // ascent direction for the objective above
};

DiscriminatorStep discriminator_loss_and_grads(const DiscriminatorNet& d, const Matrix& real,
                                               const FakeBatch& fake);

struct GeneratorStep {
    std::vector<double> losses;          // per generator: mean_m w_mk log D(G_k(z_m))
    std::vector<GradientBuffer> heads;   // ascent directions, one per generator
    GradientBuffer trunk;                // summed over generators
};

// weights is M x K with simplex rows.
GeneratorStep generator_loss_and_grads(const GeneratorBank& bank, const DiscriminatorNet& d,
                                       const NoiseBatch& noise, const Matrix& weights);

// Per row: pi ~ Dir(alpha), k ~ Mult(pi), z' ~ U[-1,1]^noise_dim, x' = G_k(z').
FakeBatch ancestral_sample_fakes(const GeneratorBank& bank, const DirichletParams& alpha, int count,
                                 RngStream& rng);

// per_gen rows from each generator, generator-major order.
FakeBatch stratified_sample_fakes(const GeneratorBank& bank, int per_gen, RngStream& rng);

} // namespace ldagan
