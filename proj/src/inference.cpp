#include "ldagan/inference.hpp"

#include "ldagan/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldagan {

DirichletParams::DirichletParams(std::vector<double> alpha, double floor)
    : alpha_(std::move(alpha)), floor_(floor) {
    if (alpha_.empty()) {
        throw DomainError("DirichletParams: empty concentration vector");
    }
    if (!std::isfinite(floor_) || floor_ <= 0.0) {
        throw DomainError("DirichletParams: floor must be positive");
    }
    for (double a : alpha_) {
        if (!std::isfinite(a) || a < floor_) {
            throw DomainError("DirichletParams: entries must be finite and >= floor");
        }
    }
}

DirichletParams DirichletParams::symmetric(std::size_t k, double value, double floor) {
    return DirichletParams(std::vector<double>(k, value), floor);
}

double DirichletParams::total() const {
    return std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

LikelihoodVector::LikelihoodVector(std::vector<double> scores) : d_(std::move(scores)) {
    if (d_.empty()) {
        throw DomainError("LikelihoodVector: empty");
    }
    for (double& d : d_) {
        if (std::isnan(d)) {
            throw DomainError("LikelihoodVector: NaN score");
        }
        d = std::clamp(d, kLikelihoodEps, 1.0 - kLikelihoodEps);
    }
}

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DomainError(std::string(what) + ": dimension mismatch");
    }
}

void check_gamma(std::span<const double> gamma) {
    for (double g : gamma) {
        if (!std::isfinite(g) || g <= 0.0) {
            throw DomainError("gamma entries must be positive and finite");
        }
    }
}

double max_abs_diff(const SimplexVector& a, const SimplexVector& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

} // namespace

std::vector<double> expected_log_pi(std::span<const double> gamma) {
    check_gamma(gamma);
    const double psi_total = digamma(std::accumulate(gamma.begin(), gamma.end(), 0.0));
    std::vector<double> out(gamma.size());
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        out[k] = digamma(gamma[k]) - psi_total;
    }
    return out;
}

SimplexVector update_omega(const LikelihoodVector& like, std::span<const double> gamma) {
    check_sizes(like.size(), gamma.size(), "update_omega");
    std::vector<double> logw = expected_log_pi(gamma);
    for (std::size_t k = 0; k < logw.size(); ++k) {
        logw[k] += std::log(like[k]);
    }
    return normalize_log_weights(logw);
}

std::vector<double> update_gamma(const DirichletParams& alpha, const SimplexVector& omega) {
    check_sizes(alpha.size(), omega.size(), "update_gamma");
    std::vector<double> gamma(alpha.size());
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        gamma[k] = alpha[k] + omega[k];
    }
    return gamma;
}

std::pair<VariationalState, EStepReport> e_step(const LikelihoodVector& like,
                                                const DirichletParams& alpha,
                                                const EStepOptions& opts,
                                                const SweepObserver& observer) {
    check_sizes(like.size(), alpha.size(), "e_step");
    if (!(opts.tol > 0.0) || opts.max_iter < 1) {
        throw DomainError("e_step: tol must be positive and max_iter >= 1");
    }
    SimplexVector omega = SimplexVector::uniform(alpha.size());
    EStepReport report;
    for (int it = 0; it < opts.max_iter; ++it) {
        const std::vector<double> gamma = update_gamma(alpha, omega);
        SimplexVector next = update_omega(like, gamma);
        report.iterations = it + 1;
        report.final_delta = max_abs_diff(next, omega);
        omega = std::move(next);
        if (observer) {
            observer(omega, gamma);
        }
        if (report.final_delta <= opts.tol) {
            report.converged = true;
            break;
        }
    }
    VariationalState state{omega, update_gamma(alpha, omega)};
    return {std::move(state), report};
}

VariationalState uniform_state(const DirichletParams& alpha) {
    SimplexVector omega = SimplexVector::uniform(alpha.size());
    std::vector<double> gamma = update_gamma(alpha, omega);
    return {std::move(omega), std::move(gamma)};
}

double exact_log_marginal(const LikelihoodVector& like, const DirichletParams& alpha) {
    check_sizes(like.size(), alpha.size(), "exact_log_marginal");
    double num = 0.0;
    for (std::size_t k = 0; k < like.size(); ++k) {
        num += like[k] * alpha[k];
    }
    return std::log(num / alpha.total());
}

SimplexVector exact_mode_posterior(const LikelihoodVector& like, const DirichletParams& alpha) {
    check_sizes(like.size(), alpha.size(), "exact_mode_posterior");
    std::vector<double> w(like.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = alpha[k] * like[k];
        sum += w[k];
    }
    for (double& v : w) {
        v /= sum;
    }
    return SimplexVector(std::move(w));
}

double lower_bound(const LikelihoodVector& like, const DirichletParams& alpha,
                   const SimplexVector& omega, std::span<const double> gamma) {
    check_sizes(like.size(), alpha.size(), "lower_bound");
    check_sizes(omega.size(), alpha.size(), "lower_bound");
    check_sizes(gamma.size(), alpha.size(), "lower_bound");
    const std::vector<double> elog = expected_log_pi(gamma);
    const std::size_t k_count = alpha.size();

    double log_prior = log_gamma(alpha.total());
    double log_q_pi = log_gamma(std::accumulate(gamma.begin(), gamma.end(), 0.0));
    double log_p_z = 0.0;
    double log_like = 0.0;
    double log_q_z = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        log_prior += -log_gamma(alpha[k]) + (alpha[k] - 1.0) * elog[k];
        log_q_pi += -log_gamma(gamma[k]) + (gamma[k] - 1.0) * elog[k];
        log_p_z += omega[k] * elog[k];
        log_like += omega[k] * std::log(like[k]);
        if (omega[k] > 0.0) {
            log_q_z += omega[k] * std::log(omega[k]);
        }
    }
    return log_prior + log_p_z + log_like - log_q_pi - log_q_z;
}

double lower_bound(const LikelihoodVector& like, const DirichletParams& alpha,
                   const VariationalState& state) {
    return lower_bound(like, alpha, state.omega, state.gamma);
}

double kl_gap(const LikelihoodVector& like, const DirichletParams& alpha,
              const VariationalState& state) {
    return exact_log_marginal(like, alpha) - lower_bound(like, alpha, state);
}

std::vector<double> mean_expected_log_pi(std::span<const std::vector<double>> gamma_batch,
                                         std::size_t k) {
    if (gamma_batch.empty()) {
        throw DomainError("gamma batch must be non-empty");
    }
    std::vector<double> mean(k, 0.0);
    for (const auto& gamma : gamma_batch) {
        check_sizes(gamma.size(), k, "gamma batch");
        const std::vector<double> elog = expected_log_pi(gamma);
        for (std::size_t j = 0; j < k; ++j) {
            mean[j] += elog[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(gamma_batch.size());
    for (double& m : mean) {
        m *= inv;
    }
    return mean;
}

double alpha_objective(std::span<const std::vector<double>> gamma_batch, const DirichletParams& alpha) {
    const std::vector<double> stat = mean_expected_log_pi(gamma_batch, alpha.size());
    double value = log_gamma(alpha.total());
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        value += -log_gamma(alpha[k]) + (alpha[k] - 1.0) * stat[k];
    }
    return value;
}

std::vector<double> alpha_gradient(std::span<const std::vector<double>> gamma_batch,
                                   const DirichletParams& alpha) {
    std::vector<double> grad = mean_expected_log_pi(gamma_batch, alpha.size());
    const double psi_total = digamma(alpha.total());
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        grad[k] += psi_total - digamma(alpha[k]);
    }
    return grad;
}

DirichletParams alpha_step(const DirichletParams& alpha, std::span<const double> grad, double lr) {
    check_sizes(alpha.size(), grad.size(), "alpha_step");
    std::vector<double> next(alpha.size());
    for (std::size_t k = 0; k < next.size(); ++k) {
        if (!std::isfinite(grad[k])) {
            throw DomainError("alpha_step: non-finite gradient");
        }
        next[k] = std::max(alpha[k] + lr * grad[k], alpha.floor());
    }
    return DirichletParams(std::move(next), alpha.floor());
}

} // namespace ldagan
