#include "ldagan/trainer.hpp"

#include "ldagan/error.hpp"
#include "ldagan/kernels.hpp"

#include <cmath>
#include <string>

namespace ldagan {

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok) {
            throw ConfigError(std::string("config key '") + key + "': " + what);
        }
    };
    require(K >= 1, "K", "must be >= 1");
    require(noise_dim >= 1, "noise_dim", "must be >= 1");
    require(head_width >= 1, "head_width", "must be >= 1");
    for (int h : trunk_hidden) require(h >= 1, "trunk_hidden", "widths must be >= 1");
    for (int h : disc_hidden) require(h >= 1, "disc_hidden", "widths must be >= 1");
    require(init == "xavier" || init == "gaussian", "init", "must be 'xavier' or 'gaussian'");
    require(init_sigma > 0.0, "init_sigma", "must be > 0");
    require(lr_d >= 0.0 && std::isfinite(lr_d), "lr_d", "must be finite and >= 0");
    require(lr_g >= 0.0 && std::isfinite(lr_g), "lr_g", "must be finite and >= 0");
    require(lr_alpha >= 0.0 && std::isfinite(lr_alpha), "lr_alpha", "must be finite and >= 0");
    require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1", "must be in [0, 1)");
    require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2", "must be in [0, 1)");
    require(adam_eps > 0.0, "adam_eps", "must be > 0");
    require(real_batch >= 1, "real_batch", "must be >= 1");
    require(per_gen >= 1, "per_gen", "must be >= 1");
    require(estep_tol > 0.0, "estep_tol", "must be > 0");
    require(estep_max_iter >= 1, "estep_max_iter", "must be >= 1");
    require(warmup_iterations >= 0, "warmup_iterations", "must be >= 0");
    require(alpha_min > 0.0, "alpha_min", "must be > 0");
    require(alpha_init >= alpha_min, "alpha_init", "must be >= alpha_min");
    require(total_iterations >= 0, "total_iterations", "must be >= 0");
    require(eval_interval >= 1, "eval_interval", "must be >= 1");
    require(eval_samples >= 1, "eval_samples", "must be >= 1");
}

namespace {

InitScheme init_scheme(const TrainConfig& cfg) {
    return cfg.init == "gaussian" ? InitScheme::normal(cfg.init_sigma) : InitScheme::xavier();
}

AdamConfig adam_config(const TrainConfig& cfg, double lr) {
    return {lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
}

bool params_finite(const MlpParams& p) {
    for (const auto& l : p.layers) {
        if (!l.weights.allFinite() || !l.bias.allFinite()) {
            return false;
        }
    }
    return true;
}

void guard(bool ok, std::int64_t iteration, const char* substep, const char* what) {
    if (!ok) {
        throw DivergenceError("iteration " + std::to_string(iteration) + ", " + substep + ": non-finite " + what);
    }
}

} // namespace

TrainState init_state(const TrainConfig& cfg) {
    cfg.validate();
    RngStream rng(cfg.seed);
    const InitScheme scheme = init_scheme(cfg);
    GeneratorBank bank = make_generator_bank({cfg.K, cfg.noise_dim, cfg.head_width, cfg.trunk_hidden}, scheme, rng);
    DiscriminatorNet disc = make_discriminator(cfg.disc_hidden, scheme, rng);
    TrainState state{std::move(bank), std::move(disc),
                     DirichletParams::symmetric(static_cast<std::size_t>(cfg.K), cfg.alpha_init, cfg.alpha_min),
                     {}, {}, {}, 0, rng};
    state.adam_disc = AdamState::for_params(state.disc.net, adam_config(cfg, cfg.lr_d));
    for (const auto& head : state.bank.heads) {
        state.adam_heads.push_back(AdamState::for_params(head, adam_config(cfg, cfg.lr_g)));
    }
    state.adam_trunk = AdamState::for_params(state.bank.trunk, adam_config(cfg, cfg.lr_g));
    return state;
}

double discriminator_substep(TrainState& state, const Dataset2D& data, const TrainConfig& cfg) {
    if (data.size() < 1 || data.samples.rows() != 2) {
        throw DomainError("training data must be a non-empty 2D dataset");
    }
    FakeBatch fakes = cfg.fake_sampling == FakeSampling::stratified
                          ? stratified_sample_fakes(state.bank, cfg.per_gen, state.rng)
                          : ancestral_sample_fakes(state.bank, state.alpha, cfg.noise_batch(), state.rng);
    Matrix real(2, cfg.real_batch);
    for (int m = 0; m < cfg.real_batch; ++m) {
        real.col(m) = data.samples.col(static_cast<Eigen::Index>(state.rng.index(static_cast<std::size_t>(data.size()))));
    }
    DiscriminatorStep step = discriminator_loss_and_grads(state.disc, real, fakes);
    guard(std::isfinite(step.loss) && step.grads.all_finite(), state.iteration, "discriminator step", "loss or gradient");
    adam_update(state.adam_disc, state.disc.net, step.grads, true);
    guard(params_finite(state.disc.net), state.iteration, "discriminator step", "parameters");
    return step.loss;
}

EStepBatch estep_substep(TrainState& state, const TrainConfig& cfg) {
    EStepBatch batch;
    batch.noise = sample_noise(cfg.noise_dim, cfg.noise_batch(), state.rng);
    batch.pass = kernels::parallel::bank_forward(state.bank, state.disc, batch.noise.values);
    guard(batch.pass.scores.allFinite(), state.iteration, "E-step", "discriminator scores");

    const auto m_count = static_cast<std::size_t>(batch.noise.size());
    batch.weights.resize(batch.noise.size(), cfg.K);
    batch.gammas.resize(m_count);
    batch.active = state.iteration >= cfg.warmup_iterations;
    if (batch.active) {
        kernels::BatchEStep e = kernels::parallel::batch_e_step(
            batch.pass.scores, state.alpha, {cfg.estep_tol, cfg.estep_max_iter});
        for (std::size_t m = 0; m < m_count; ++m) {
            for (int k = 0; k < cfg.K; ++k) {
                batch.weights(static_cast<Eigen::Index>(m), k) = e.states[m].omega[static_cast<std::size_t>(k)];
            }
            batch.gammas[m] = std::move(e.states[m].gamma);
        }
        batch.reports = std::move(e.reports);
    } else {
        const VariationalState frozen = uniform_state(state.alpha);
        for (std::size_t m = 0; m < m_count; ++m) {
            for (int k = 0; k < cfg.K; ++k) {
                batch.weights(static_cast<Eigen::Index>(m), k) = frozen.omega[static_cast<std::size_t>(k)];
            }
            batch.gammas[m] = frozen.gamma;
        }
    }
    return batch;
}

GeneratorStep generator_substep(TrainState& state, const EStepBatch& batch, const TrainConfig& /*cfg*/) {
    GeneratorStep step = kernels::parallel::bank_backward(batch.pass, state.bank, state.disc, batch.weights);
    for (double l : step.losses) {
        guard(std::isfinite(l), state.iteration, "generator step", "loss");
    }
    for (std::size_t k = 0; k < step.heads.size(); ++k) {
        adam_update(state.adam_heads[k], state.bank.heads[k], step.heads[k], true);
        guard(params_finite(state.bank.heads[k]), state.iteration, "generator step", "head parameters");
    }
    adam_update(state.adam_trunk, state.bank.trunk, step.trunk, true);
    guard(params_finite(state.bank.trunk), state.iteration, "generator step", "trunk parameters");
    return step;
}

std::vector<double> alpha_substep(TrainState& state, const EStepBatch& batch, const TrainConfig& cfg) {
    std::vector<double> grad = alpha_gradient(batch.gammas, state.alpha);
    for (double g : grad) {
        guard(std::isfinite(g), state.iteration, "alpha step", "gradient");
    }
    state.alpha = alpha_step(state.alpha, grad, cfg.lr_alpha);
    return grad;
}

StepResult train_step(TrainState& state, const Dataset2D& data, const TrainConfig& cfg) {
    StepResult result;
    result.metrics.d_loss = discriminator_substep(state, data, cfg);

    EStepBatch batch = estep_substep(state, cfg);
    GeneratorStep g = generator_substep(state, batch, cfg);
    result.diag.alpha_grad = alpha_substep(state, batch, cfg);

    state.iteration += 1;
    result.metrics.iteration = state.iteration;
    result.metrics.g_losses = g.losses;
    result.metrics.alpha = state.alpha.values();

    StepDiagnostics& diag = result.diag;
    diag.estep_active = batch.active;
    if (!batch.reports.empty()) {
        double total = 0.0;
        for (const auto& r : batch.reports) {
            total += r.iterations;
            diag.estep_max_iterations = std::max(diag.estep_max_iterations, r.iterations);
            diag.estep_unconverged += r.converged ? 0 : 1;
        }
        diag.estep_mean_iterations = total / static_cast<double>(batch.reports.size());
    }
    diag.weights = std::move(batch.weights);
    diag.gammas = std::move(batch.gammas);
    diag.trunk_grad = std::move(g.trunk);
    return result;
}

void evaluate_into(MetricsRecord& record, const TrainState& state, const TrainConfig& cfg,
                   const GaussianMixtureSpec& spec) {
    // Separate stream so evaluation never perturbs the training draws.
    RngStream rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(record.iteration + 1)));
    const FakeBatch fakes = ancestral_sample_fakes(state.bank, state.alpha, cfg.eval_samples, rng);
    const CoverageReport report = coverage_report(fakes, spec);
    record.modes_covered = report.modes_covered;
    record.hq_ratio = report.hq_ratio;
    record.usage_entropy = report.usage_entropy;
}

TrainResult train(const TrainConfig& cfg, const Dataset2D& data, const TrainOptions& opts) {
    TrainResult result{init_state(cfg), {}};
    std::optional<GaussianMixtureSpec> spec = opts.eval_spec;
    if (!spec && data.labels) {
        spec = estimate_mixture_spec(data);
    }
    TrainState& state = result.state;
    while (state.iteration < cfg.total_iterations) {
        StepResult step = train_step(state, data, cfg);
        const bool record = state.iteration % cfg.eval_interval == 0 || state.iteration == cfg.total_iterations;
        if (!record) {
            continue;
        }
        if (spec) {
            evaluate_into(step.metrics, state, cfg, *spec);
        }
        if (opts.on_metrics) {
            opts.on_metrics(step.metrics);
        }
        result.metrics.push_back(std::move(step.metrics));
    }
    if (opts.checkpoint_path) {
        save_checkpoint(state, cfg, *opts.checkpoint_path);
    }
    return result;
}

} // namespace ldagan
