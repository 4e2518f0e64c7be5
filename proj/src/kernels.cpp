#include "ldagan/kernels.hpp"

#include "ldagan/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ldagan::kernels {

namespace {

void check_pass_inputs(const GeneratorBank& bank, const DiscriminatorNet& d, const Matrix& noise) {
    if (bank.heads.empty() || noise.rows() != bank.noise_dim() || noise.cols() < 1) {
        throw DomainError("bank_forward: noise shape does not match the generator bank");
    }
    if (d.net.input_dim() != bank.trunk.output_dim()) {
        throw DomainError("bank_forward: discriminator input does not match generator output");
    }
}

BankPass make_pass(int k) {
    BankPass pass;
    pass.head.resize(static_cast<std::size_t>(k));
    pass.trunk.resize(static_cast<std::size_t>(k));
    pass.disc.resize(static_cast<std::size_t>(k));
    return pass;
}

void forward_one(BankPass& pass, const GeneratorBank& bank, const DiscriminatorNet& d,
                 const Matrix& noise, int k) {
    const auto i = static_cast<std::size_t>(k);
    pass.head[i] = mlp_forward(bank.heads[i], noise);
    pass.trunk[i] = mlp_forward(bank.trunk, pass.head[i].output());
    pass.disc[i] = mlp_forward(d.net, pass.trunk[i].output());
    pass.scores.col(k) = pass.disc[i].output().row(0).transpose();
}

struct OneGenerator {
    double loss = 0.0;
    GradientBuffer head;
    GradientBuffer trunk;
};

OneGenerator backward_one(const BankPass& pass, const GeneratorBank& bank, const DiscriminatorNet& d,
                          const Matrix& weights, int k) {
    const auto i = static_cast<std::size_t>(k);
    const Eigen::Index m = weights.rows();
    const double inv_m = 1.0 / static_cast<double>(m);

    OneGenerator out;
    Matrix preact(1, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const double w = weights(r, k);
        const double score = pass.scores(r, k);
        out.loss += w * std::log(std::clamp(score, kLikelihoodEps, 1.0 - kLikelihoodEps));
        // d/dlogit of w log sigmoid(logit) = w (1 - sigmoid(logit)).
        preact(0, r) = inv_m * w * (1.0 - score);
    }
    out.loss *= inv_m;

    BackwardResult through_d = mlp_backward_preactivation(d.net, pass.disc[i], preact, false);
    BackwardResult through_trunk = mlp_backward(bank.trunk, pass.trunk[i], through_d.input_grad);
    BackwardResult through_head = mlp_backward(bank.heads[i], pass.head[i], through_trunk.input_grad);
    out.head = std::move(through_head.grads);
    out.trunk = std::move(through_trunk.grads);
    return out;
}

void check_weights(const BankPass& pass, const Matrix& weights) {
    if (weights.rows() != pass.scores.rows() || weights.cols() != pass.scores.cols()) {
        throw DomainError("generator weights must be M x K");
    }
}

GeneratorStep gather(std::vector<OneGenerator>& parts, const GeneratorBank& bank) {
    GeneratorStep step;
    step.trunk = GradientBuffer::zeros_like(bank.trunk);
    for (auto& part : parts) {
        step.losses.push_back(part.loss);
        step.heads.push_back(std::move(part.head));
        step.trunk += part.trunk;
    }
    return step;
}

void nearest_one(NearestCenters& out, const Matrix& samples, const Matrix& centers, Eigen::Index n) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (Eigen::Index j = 0; j < centers.cols(); ++j) {
        const double dist = (samples.col(n) - centers.col(j)).squaredNorm();
        if (dist < best) {
            best = dist;
            best_j = static_cast<int>(j);
        }
    }
    out.index[static_cast<std::size_t>(n)] = best_j;
    out.sq_dist[static_cast<std::size_t>(n)] = best;
}

NearestCenters make_nearest(const Matrix& samples, const Matrix& centers) {
    if (centers.cols() < 1 || centers.rows() != samples.rows()) {
        throw DomainError("nearest_centers: empty or mismatched center set");
    }
    NearestCenters out;
    out.index.resize(static_cast<std::size_t>(samples.cols()));
    out.sq_dist.resize(static_cast<std::size_t>(samples.cols()));
    return out;
}

VariationalState placeholder_state() {
    return {SimplexVector::uniform(1), {1.0}};
}

} // namespace

namespace serial {

BankPass bank_forward(const GeneratorBank& bank, const DiscriminatorNet& d, const Matrix& noise) {
    check_pass_inputs(bank, d, noise);
    BankPass pass = make_pass(bank.k());
    pass.scores.resize(noise.cols(), bank.k());
    for (int k = 0; k < bank.k(); ++k) {
        forward_one(pass, bank, d, noise, k);
    }
    return pass;
}

GeneratorStep bank_backward(const BankPass& pass, const GeneratorBank& bank, const DiscriminatorNet& d,
                            const Matrix& weights) {
    check_weights(pass, weights);
    std::vector<OneGenerator> parts;
    for (int k = 0; k < bank.k(); ++k) {
        parts.push_back(backward_one(pass, bank, d, weights, k));
    }
    return gather(parts, bank);
}

BatchEStep batch_e_step(const Matrix& scores, const DirichletParams& alpha, const EStepOptions& opts) {
    BatchEStep out;
    for (Eigen::Index m = 0; m < scores.rows(); ++m) {
        const Vector row = scores.row(m).transpose();
        auto [state, report] = e_step(LikelihoodVector({row.data(), row.data() + row.size()}), alpha, opts);
        out.states.push_back(std::move(state));
        out.reports.push_back(report);
    }
    return out;
}

NearestCenters nearest_centers(const Matrix& samples, const Matrix& centers) {
    NearestCenters out = make_nearest(samples, centers);
    for (Eigen::Index n = 0; n < samples.cols(); ++n) {
        nearest_one(out, samples, centers, n);
    }
    return out;
}

} // namespace serial

namespace parallel {

BankPass bank_forward(const GeneratorBank& bank, const DiscriminatorNet& d, const Matrix& noise) {
    check_pass_inputs(bank, d, noise);
    BankPass pass = make_pass(bank.k());
    pass.scores.resize(noise.cols(), bank.k());
#pragma omp parallel for schedule(static)
    for (int k = 0; k < bank.k(); ++k) {
        forward_one(pass, bank, d, noise, k);
    }
    return pass;
}

GeneratorStep bank_backward(const BankPass& pass, const GeneratorBank& bank, const DiscriminatorNet& d,
                            const Matrix& weights) {
    check_weights(pass, weights);
    std::vector<OneGenerator> parts(static_cast<std::size_t>(bank.k()));
#pragma omp parallel for schedule(static)
    for (int k = 0; k < bank.k(); ++k) {
        parts[static_cast<std::size_t>(k)] = backward_one(pass, bank, d, weights, k);
    }
    return gather(parts, bank);
}

BatchEStep batch_e_step(const Matrix& scores, const DirichletParams& alpha, const EStepOptions& opts) {
    if (!scores.allFinite()) {
        throw DomainError("batch_e_step: non-finite discriminator scores");
    }
    const auto rows = static_cast<std::size_t>(scores.rows());
    BatchEStep out;
    out.states.assign(rows, placeholder_state());
    out.reports.resize(rows);
    // No exception can escape the region: scores are finite and get clamped.
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index m = 0; m < scores.rows(); ++m) {
        const Vector row = scores.row(m).transpose();
        auto [state, report] = e_step(LikelihoodVector({row.data(), row.data() + row.size()}), alpha, opts);
        out.states[static_cast<std::size_t>(m)] = std::move(state);
        out.reports[static_cast<std::size_t>(m)] = report;
    }
    return out;
}

NearestCenters nearest_centers(const Matrix& samples, const Matrix& centers) {
    NearestCenters out = make_nearest(samples, centers);
#pragma omp parallel for schedule(static)
    for (Eigen::Index n = 0; n < samples.cols(); ++n) {
        nearest_one(out, samples, centers, n);
    }
    return out;
}

} // namespace parallel

} // namespace ldagan::kernels
