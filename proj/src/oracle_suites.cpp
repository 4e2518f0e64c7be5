#include "ldagan/oracle_suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ldagan::oracle {

namespace {

std::string format(const char* fmt, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

std::size_t argmax(const SimplexVector& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double top_two_gap(const SimplexVector& v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end(), std::greater<>());
    return s.size() > 1 ? s[0] - s[1] : 1.0;
}

} // namespace

Instance random_instance(RngStream& rng) {
    const std::size_t k = 2 + rng.index(9);
    std::vector<double> alpha(k), d(k);
    for (std::size_t i = 0; i < k; ++i) {
        alpha[i] = rng.uniform(0.5, 10.0);
        d[i] = rng.uniform(0.01, 0.99);
    }
    return {LikelihoodVector(std::move(d)), DirichletParams(std::move(alpha))};
}

std::vector<double> finite_difference(const std::function<double()>& f, std::vector<double*> coords, double h) {
    std::vector<double> out;
    out.reserve(coords.size());
    for (double* x : coords) {
        const double saved = *x;
        *x = saved + h;
        const double up = f();
        *x = saved - h;
        const double down = f();
        *x = saved;
        out.push_back((up - down) / (2.0 * h));
    }
    return out;
}

std::vector<double> finite_difference5(const std::function<double()>& f, std::vector<double*> coords, double h) {
    std::vector<double> out;
    out.reserve(coords.size());
    for (double* x : coords) {
        const double saved = *x;
        auto at = [&](double offset) {
            *x = saved + offset;
            return f();
        };
        const double d = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12.0 * h);
        *x = saved;
        out.push_back(d);
    }
    return out;
}

double relative_error(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

std::vector<double*> parameter_coords(MlpParams& params) {
    std::vector<double*> out;
    for (auto& l : params.layers) {
        for (Eigen::Index i = 0; i < l.weights.size(); ++i) out.push_back(l.weights.data() + i);
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) out.push_back(l.bias.data() + i);
    }
    return out;
}

std::vector<double> flatten(const GradientBuffer& g) {
    std::vector<double> out;
    for (const auto& l : g.layers) {
        out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
        out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
}

BoundStats bound_stats(int instances, std::uint64_t seed) {
    RngStream rng(seed);
    BoundStats st;
    for (int n = 0; n < instances; ++n) {
        const Instance inst = random_instance(rng);
        const double log_marginal = exact_log_marginal(inst.like, inst.alpha);
        double prev = -1e300;
        auto check = [&](double bound) {
            st.max_bound_excess = std::max(st.max_bound_excess, bound - log_marginal);
            if (bound > log_marginal + 1e-9) ++st.bound_violations;
        };
        // Uniform starting state counts too: the bound holds for any q.
        check(lower_bound(inst.like, inst.alpha, uniform_state(inst.alpha)));
        auto [state, report] = e_step(inst.like, inst.alpha, {}, [&](const SimplexVector& omega, std::span<const double> gamma) {
            const double bound = lower_bound(inst.like, inst.alpha, omega, gamma);
            if (bound < prev - 1e-12) ++st.monotonicity_violations;
            prev = bound;
            check(bound);
        });
        check(lower_bound(inst.like, inst.alpha, state));
        const double gap = kl_gap(inst.like, inst.alpha, state);
        st.min_gap = std::min(st.min_gap, gap);
        if (gap < -1e-9) ++st.gap_violations;
        ++st.instances;
    }
    return st;
}

FidelityStats posterior_fidelity(int instances, std::uint64_t seed) {
    RngStream rng(seed);
    FidelityStats st;
    for (int n = 0; n < instances; ++n) {
        const Instance inst = random_instance(rng);
        const SimplexVector exact = exact_mode_posterior(inst.like, inst.alpha);
        if (top_two_gap(exact) < 0.05) {
            continue;
        }
        auto [state, report] = e_step(inst.like, inst.alpha);
        ++st.eligible;
        st.unconverged += report.converged ? 0 : 1;
        if (argmax(state.omega) == argmax(exact)) ++st.agree;
    }
    return st;
}

std::vector<CheckResult> bounds_suite(std::uint64_t seed) {
    const BoundStats st = bound_stats(1000, seed);
    return {
        {"lower_bound <= exact_log_marginal + 1e-9", st.bound_violations == 0,
         format("max excess %.3e over %g instances", st.max_bound_excess, st.instances)},
        {"lower_bound non-decreasing across sweeps", st.monotonicity_violations == 0,
         format("%g violations", st.monotonicity_violations)},
        {"kl_gap >= -1e-9 at convergence", st.gap_violations == 0, format("min gap %.3e", st.min_gap)},
    };
}

std::vector<CheckResult> estep_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const FidelityStats fid = posterior_fidelity(1000, seed);
    out.push_back({"argmax(omega) == argmax(exact posterior) in >= 99%", fid.rate() >= 0.99,
                   format("agreement %.4f over %g eligible instances", fid.rate(), fid.eligible)});
    out.push_back({"all E-steps converge within max_iter", fid.unconverged == 0,
                   format("%g unconverged", fid.unconverged)});

    RngStream rng(seed + 1);
    int coupling = 0, fixed_point = 0, scale = 0;
    for (int n = 0; n < 200; ++n) {
        const Instance inst = random_instance(rng);
        auto [state, report] = e_step(inst.like, inst.alpha);
        for (std::size_t k = 0; k < state.gamma.size(); ++k) {
            if (state.gamma[k] != inst.alpha[k] + state.omega[k]) ++coupling;
        }
        const SimplexVector again = update_omega(inst.like, update_gamma(inst.alpha, state.omega));
        for (std::size_t k = 0; k < again.size(); ++k) {
            if (std::abs(again[k] - state.omega[k]) > 1e-10) ++fixed_point;
        }
        const double c = 0.5 / *std::max_element(inst.like.values().begin(), inst.like.values().end());
        std::vector<double> scaled = inst.like.values();
        for (double& d : scaled) d *= c;
        auto [scaled_state, r2] = e_step(LikelihoodVector(scaled), inst.alpha);
        for (std::size_t k = 0; k < again.size(); ++k) {
            if (std::abs(scaled_state.omega[k] - state.omega[k]) > 1e-9) ++scale;
        }
    }
    out.push_back({"gamma == alpha + omega after e_step", coupling == 0, format("%g mismatches", coupling)});
    out.push_back({"one more sweep moves omega by <= tol", fixed_point == 0, format("%g violations", fixed_point)});
    out.push_back({"omega invariant to a common scale of D", scale == 0, format("%g violations", scale)});
    return out;
}

namespace {

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, relative_error(a[i], b[i]));
    }
    return m;
}

CheckResult mlp_check(Activation hidden, Activation out, RngStream& rng) {
    MlpParams net = init_mlp({3, 5, 4, 2}, {hidden, hidden, out}, InitScheme::normal(0.7), rng);
    for (auto& l : net.layers) {
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = rng.uniform(-0.5, 0.5);
    }
    Matrix x(3, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
    Matrix upstream(2, 4);
    for (Eigen::Index i = 0; i < upstream.size(); ++i) upstream.data()[i] = rng.uniform(-1.0, 1.0);
    // Scalar loss sum(upstream .* output) has dLoss/dOutput = upstream.
    auto loss = [&] { return (mlp_forward(net, x).output().array() * upstream.array()).sum(); };
    const BackwardResult back = mlp_backward(net, mlp_forward(net, x), upstream);
    const double err = max_rel(flatten(back.grads), finite_difference(loss, parameter_coords(net), 1e-5));
    std::vector<double*> input_coords;
    for (Eigen::Index i = 0; i < x.size(); ++i) input_coords.push_back(x.data() + i);
    const std::vector<double> fd_in = finite_difference(loss, input_coords, 1e-5);
    const double err_in = max_rel({back.input_grad.data(), back.input_grad.data() + back.input_grad.size()}, fd_in);
    const std::string name = "mlp_backward (" + std::string(to_string(hidden)) + " hidden, " +
                             std::string(to_string(out)) + " output) vs finite differences";
    return {name, err <= 1e-4 && err_in <= 1e-4, format("max rel err params %.2e, input %.2e", err, err_in)};
}

} // namespace

std::vector<CheckResult> gradients_suite(std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<CheckResult> out;
    for (Activation hidden : {Activation::relu, Activation::sigmoid, Activation::identity}) {
        for (Activation last : {Activation::identity, Activation::sigmoid, Activation::relu}) {
            out.push_back(mlp_check(hidden, last, rng));
        }
    }

    // Discriminator objective.
    {
        DiscriminatorNet d = make_discriminator({6, 5}, InitScheme::normal(0.5), rng);
        Matrix real(2, 5);
        FakeBatch fake;
        fake.samples.resize(2, 7);
        for (Eigen::Index i = 0; i < real.size(); ++i) real.data()[i] = rng.normal(0.0, 1.0);
        for (Eigen::Index i = 0; i < fake.samples.size(); ++i) fake.samples.data()[i] = rng.normal(0.0, 1.0);
        fake.mode_ids.assign(7, 0);
        fake.num_generators = 1;
        auto loss = [&] { return discriminator_loss_and_grads(d, real, fake).loss; };
        const DiscriminatorStep step = discriminator_loss_and_grads(d, real, fake);
        const double err = max_rel(flatten(step.grads), finite_difference(loss, parameter_coords(d.net), 1e-5));
        out.push_back({"discriminator_loss_and_grads vs finite differences", err <= 1e-4,
                       format("max rel err %.2e", err)});
    }

    // Weighted generator objective through D o G_k, heads and shared trunk.
    {
        GeneratorBank bank = make_generator_bank({3, 4, 6, {5}}, InitScheme::normal(0.6), rng);
        DiscriminatorNet d = make_discriminator({6, 5}, InitScheme::normal(0.6), rng);
        const NoiseBatch noise = sample_noise(4, 5, rng);
        Matrix w(5, 3);
        for (Eigen::Index r = 0; r < 5; ++r) {
            const SimplexVector p = sample_dirichlet(std::vector<double>{1.0, 2.0, 1.5}, rng);
            for (Eigen::Index k = 0; k < 3; ++k) w(r, k) = p[static_cast<std::size_t>(k)];
        }
        auto total = [&] {
            const GeneratorStep s = generator_loss_and_grads(bank, d, noise, w);
            double t = 0.0;
            for (double l : s.losses) t += l;
            return t;
        };
        const GeneratorStep step = generator_loss_and_grads(bank, d, noise, w);
        double err = 0.0;
        for (std::size_t k = 0; k < bank.heads.size(); ++k) {
            err = std::max(err, max_rel(flatten(step.heads[k]), finite_difference(total, parameter_coords(bank.heads[k]), 1e-5)));
        }
        err = std::max(err, max_rel(flatten(step.trunk), finite_difference(total, parameter_coords(bank.trunk), 1e-5)));
        out.push_back({"generator_loss_and_grads vs finite differences", err <= 1e-4,
                       format("max rel err %.2e", err)});
    }

    // alpha gradient vs its objective.
    {
        double err = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            const Instance inst = random_instance(rng);
            std::vector<std::vector<double>> batch;
            for (int m = 0; m < 6; ++m) {
                std::vector<double> g(inst.alpha.size());
                for (double& v : g) v = rng.uniform(0.5, 12.0);
                batch.push_back(std::move(g));
            }
            std::vector<double> alpha = inst.alpha.values();
            auto objective = [&] { return alpha_objective(batch, DirichletParams(alpha)); };
            std::vector<double*> coords;
            for (double& a : alpha) coords.push_back(&a);
            const std::vector<double> fd = finite_difference5(objective, coords, 1e-3);
            const std::vector<double> grad = alpha_gradient(batch, inst.alpha);
            for (std::size_t i = 0; i < grad.size(); ++i) {
                err = std::max(err, relative_error(grad[i], fd[i]));
            }
        }
        out.push_back({"alpha_gradient vs finite differences of alpha_objective", err <= 1e-6,
                       format("max rel err %.2e", err)});
    }
    return out;
}

std::vector<CheckResult> run_suite(std::string_view name, std::uint64_t seed) {
    if (name == "bounds") return bounds_suite(seed);
    if (name == "estep") return estep_suite(seed);
    if (name == "gradients") return gradients_suite(seed);
    throw std::invalid_argument("unknown oracle suite '" + std::string(name) + "'");
}

} // namespace ldagan::oracle
