#pragma once

#include "ldagan/special_math.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ldagan {

inline constexpr double kLikelihoodEps = 1e-7;
inline constexpr double kDefaultAlphaMin = 1e-3;

// Dirichlet concentration over K modes. Every entry is finite and >= floor.
class DirichletParams {
public:
    DirichletParams() = default;
    explicit DirichletParams(std::vector<double> alpha, double floor = kDefaultAlphaMin);

    static DirichletParams symmetric(std::size_t k, double value, double floor = kDefaultAlphaMin);

    std::size_t size() const { return alpha_.size(); }
    double operator[](std::size_t k) const { return alpha_[k]; }
    const std::vector<double>& values() const { return alpha_; }
    double floor() const { return floor_; }
    double total() const;

    friend bool operator==(const DirichletParams&, const DirichletParams&) = default;

private:
    std::vector<double> alpha_;
    double floor_ = kDefaultAlphaMin;
};

// Realness scores D(G_k(z')) for one noise draw, clamped to [eps, 1 - eps].
class LikelihoodVector {
public:
    LikelihoodVector() = default;
    explicit LikelihoodVector(std::vector<double> scores);

    std::size_t size() const { return d_.size(); }
    double operator[](std::size_t k) const { return d_[k]; }
    const std::vector<double>& values() const { return d_; }

private:
    std::vector<double> d_;
};

struct VariationalState {
    SimplexVector omega;
    std::vector<double> gamma;
};

struct EStepReport {
    int iterations = 0;
    double final_delta = 0.0;
    bool converged = false;
};

struct EStepOptions {
    double tol = 1e-10;
    int max_iter = 1000;
};

// Called after every sweep with the freshly updated omega and the gamma it
// was computed from.
using SweepObserver = std::function<void(const SimplexVector& omega, std::span<const double> gamma)>;

// E_q[log pi_k] = digamma(gamma_k) - digamma(sum_j gamma_j).
std::vector<double> expected_log_pi(std::span<const double> gamma);

SimplexVector update_omega(const LikelihoodVector& like, std::span<const double> gamma);
std::vector<double> update_gamma(const DirichletParams& alpha, const SimplexVector& omega);

// Alternates gamma <- alpha + omega and omega <- update_omega(gamma), starting
// from uniform omega, until max_k |delta omega_k| <= tol. The returned state
// always satisfies gamma = alpha + omega.
std::pair<VariationalState, EStepReport> e_step(const LikelihoodVector& like,
                                                const DirichletParams& alpha,
                                                const EStepOptions& opts = {},
                                                const SweepObserver& observer = {});

// The frozen warmup state: omega uniform, gamma = alpha + 1/K.
VariationalState uniform_state(const DirichletParams& alpha);

// log p(y=1 | z') with pi integrated out: log(sum_k D_k alpha_k / alpha_0).
double exact_log_marginal(const LikelihoodVector& like, const DirichletParams& alpha);

// p(z_k = 1 | y = 1, z') proportional to alpha_k D_k.
SimplexVector exact_mode_posterior(const LikelihoodVector& like, const DirichletParams& alpha);

// Evidence lower bound L(gamma, omega; alpha, theta), term by term:
//   E[log p(pi|alpha)] + E[log p(z|pi)] + E[log p(y=1|z)] - E[log q(pi|gamma)] - E[log q(z|omega)]
// with 0 log 0 = 0.
double lower_bound(const LikelihoodVector& like, const DirichletParams& alpha,
                   const SimplexVector& omega, std::span<const double> gamma);
double lower_bound(const LikelihoodVector& like, const DirichletParams& alpha,
                   const VariationalState& state);

// exact_log_marginal - lower_bound, i.e. KL(q || posterior).
double kl_gap(const LikelihoodVector& like, const DirichletParams& alpha,
              const VariationalState& state);

// Minibatch mean of E_q[log pi_k] over the gamma batch.
std::vector<double> mean_expected_log_pi(std::span<const std::vector<double>> gamma_batch,
                                         std::size_t k);

// Terms of the expected bound that depend on alpha; the expectation over z'
// is the minibatch mean.
double alpha_objective(std::span<const std::vector<double>> gamma_batch, const DirichletParams& alpha);
std::vector<double> alpha_gradient(std::span<const std::vector<double>> gamma_batch,
                                   const DirichletParams& alpha);

// alpha_k <- max(alpha_k + lr * grad_k, floor).
DirichletParams alpha_step(const DirichletParams& alpha, std::span<const double> grad, double lr);

} // namespace ldagan
