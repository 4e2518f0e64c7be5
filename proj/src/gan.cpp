#include "ldagan/gan.hpp"

#include "ldagan/error.hpp"
#include "ldagan/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ldagan {

NoiseBatch sample_noise(int noise_dim, int count, RngStream& rng) {
    if (noise_dim < 1 || count < 1) {
        throw DomainError("sample_noise: dimensions must be positive");
    }
    NoiseBatch batch{Matrix(noise_dim, count)};
    // Column by column: one noise vector at a time.
    for (int c = 0; c < count; ++c) {
        for (int r = 0; r < noise_dim; ++r) {
            batch.values(r, c) = rng.uniform(-1.0, 1.0);
        }
    }
    return batch;
}

GeneratorBank make_generator_bank(const BankShape& shape, const InitScheme& scheme, RngStream& rng) {
    if (shape.k < 1 || shape.noise_dim < 1 || shape.head_width < 1) {
        throw DomainError("make_generator_bank: sizes must be positive");
    }
    GeneratorBank bank;
    for (int k = 0; k < shape.k; ++k) {
        bank.heads.push_back(init_mlp({shape.noise_dim, shape.head_width}, {Activation::relu}, scheme, rng));
    }
    std::vector<int> dims{shape.head_width};
    std::vector<Activation> acts;
    for (int h : shape.trunk_hidden) {
        dims.push_back(h);
        acts.push_back(Activation::relu);
    }
    dims.push_back(2);
    acts.push_back(Activation::identity);
    bank.trunk = init_mlp(dims, acts, scheme, rng);
    return bank;
}

DiscriminatorNet make_discriminator(const std::vector<int>& hidden, const InitScheme& scheme, RngStream& rng) {
    std::vector<int> dims{2};
    std::vector<Activation> acts;
    for (int h : hidden) {
        dims.push_back(h);
        acts.push_back(Activation::relu);
    }
    dims.push_back(1);
    acts.push_back(Activation::sigmoid);
    return {init_mlp(dims, acts, scheme, rng)};
}

Eigen::Vector2d generate(const GeneratorBank& bank, int k, const Vector& z) {
    const Matrix out = generate_batch(bank, k, Matrix(z));
    return out.col(0);
}

Matrix generate_batch(const GeneratorBank& bank, int k, const Matrix& noise) {
    if (k < 0 || k >= bank.k()) {
        throw DomainError("generate: generator index out of range");
    }
    const ForwardTrace head = mlp_forward(bank.heads[static_cast<std::size_t>(k)], noise);
    return mlp_forward(bank.trunk, head.output()).output();
}

Vector discriminator_scores(const DiscriminatorNet& d, const Matrix& x) {
    return mlp_forward(d.net, x).output().row(0).transpose();
}

Vector discriminate(const DiscriminatorNet& d, const Matrix& x) {
    return discriminator_scores(d, x).cwiseMax(kLikelihoodEps).cwiseMin(1.0 - kLikelihoodEps);
}

double discriminate(const DiscriminatorNet& d, const Eigen::Vector2d& x) {
    return discriminate(d, Matrix(x))(0);
}

namespace {

double clamp_score(double s) {
    return std::clamp(s, kLikelihoodEps, 1.0 - kLikelihoodEps);
}

} // namespace

double discriminator_objective(const Vector& real_scores, const Vector& fake_scores) {
    if (real_scores.size() == 0 || fake_scores.size() == 0) {
        throw DomainError("discriminator_objective: empty batch");
    }
    double real_term = 0.0;
    for (double s : real_scores) {
        real_term += std::log(clamp_score(s));
    }
    double fake_term = 0.0;
    for (double s : fake_scores) {
        fake_term += std::log(1.0 - clamp_score(s));
    }
    return real_term / static_cast<double>(real_scores.size()) +
           fake_term / static_cast<double>(fake_scores.size());
}

DiscriminatorStep discriminator_loss_and_grads(const DiscriminatorNet& d, const Matrix& real,
                                               const FakeBatch& fake) {
    const Eigen::Index n_real = real.cols();
    const Eigen::Index n_fake = fake.samples.cols();
    if (n_real < 1 || n_fake < 1 || real.rows() != 2 || fake.samples.rows() != 2) {
        throw DomainError("discriminator_loss_and_grads: batches must be non-empty 2 x M");
    }
    Matrix input(2, n_real + n_fake);
    input << real, fake.samples;
    const ForwardTrace trace = mlp_forward(d.net, input);
    const Vector scores = trace.output().row(0).transpose();

    DiscriminatorStep step;
    step.loss = discriminator_objective(scores.head(n_real), scores.tail(n_fake));

    // d/dlogit log sigmoid = 1 - D; d/dlogit log(1 - sigmoid) = -D.
    Matrix preact(1, n_real + n_fake);
    for (Eigen::Index i = 0; i < n_real; ++i) {
        preact(0, i) = (1.0 - scores(i)) / static_cast<double>(n_real);
    }
    for (Eigen::Index i = 0; i < n_fake; ++i) {
        preact(0, n_real + i) = -scores(n_real + i) / static_cast<double>(n_fake);
    }
    step.grads = mlp_backward_preactivation(d.net, trace, preact).grads;
    return step;
}

GeneratorStep generator_loss_and_grads(const GeneratorBank& bank, const DiscriminatorNet& d,
                                       const NoiseBatch& noise, const Matrix& weights) {
    if (weights.rows() != noise.size() || weights.cols() != bank.k()) {
        throw DomainError("generator_loss_and_grads: weights must be M x K");
    }
    for (Eigen::Index r = 0; r < weights.rows(); ++r) {
        if ((weights.row(r).array() < 0.0).any() || std::abs(weights.row(r).sum() - 1.0) > 1e-9) {
            throw DomainError("generator_loss_and_grads: weight rows must lie on the simplex");
        }
    }
    const kernels::BankPass pass = kernels::parallel::bank_forward(bank, d, noise.values);
    return kernels::parallel::bank_backward(pass, bank, d, weights);
}

namespace {

// Evaluates each generator once on the columns assigned to it.
void fill_samples(FakeBatch& batch, const GeneratorBank& bank) {
    batch.samples.resize(2, batch.noise.size());
    for (int k = 0; k < bank.k(); ++k) {
        std::vector<Eigen::Index> cols;
        for (std::size_t i = 0; i < batch.mode_ids.size(); ++i) {
            if (batch.mode_ids[i] == k) {
                cols.push_back(static_cast<Eigen::Index>(i));
            }
        }
        if (cols.empty()) {
            continue;
        }
        Matrix z(batch.noise.values.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            z.col(static_cast<Eigen::Index>(j)) = batch.noise.values.col(cols[j]);
        }
        const Matrix x = generate_batch(bank, k, z);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            batch.samples.col(cols[j]) = x.col(static_cast<Eigen::Index>(j));
        }
    }
}

} // namespace

FakeBatch ancestral_sample_fakes(const GeneratorBank& bank, const DirichletParams& alpha, int count,
                                 RngStream& rng) {
    if (count < 1) {
        throw DomainError("ancestral_sample_fakes: count must be >= 1");
    }
    if (static_cast<int>(alpha.size()) != bank.k()) {
        throw DomainError("ancestral_sample_fakes: alpha length must equal K");
    }
    FakeBatch batch;
    batch.num_generators = bank.k();
    batch.noise.values.resize(bank.noise_dim(), count);
    for (int m = 0; m < count; ++m) {
        const SimplexVector pi = sample_dirichlet(alpha.values(), rng);
        batch.mode_ids.push_back(static_cast<int>(sample_categorical(pi, rng)));
        for (int r = 0; r < bank.noise_dim(); ++r) {
            batch.noise.values(r, m) = rng.uniform(-1.0, 1.0);
        }
    }
    fill_samples(batch, bank);
    return batch;
}

FakeBatch stratified_sample_fakes(const GeneratorBank& bank, int per_gen, RngStream& rng) {
    if (per_gen < 1) {
        throw DomainError("stratified_sample_fakes: per_gen must be >= 1");
    }
    FakeBatch batch;
    batch.num_generators = bank.k();
    batch.noise = sample_noise(bank.noise_dim(), per_gen * bank.k(), rng);
    for (int k = 0; k < bank.k(); ++k) {
        batch.mode_ids.insert(batch.mode_ids.end(), static_cast<std::size_t>(per_gen), k);
    }
    fill_samples(batch, bank);
    return batch;
}

} // namespace ldagan
