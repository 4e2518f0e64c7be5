#include "ldagan/error.hpp"
#include "ldagan/oracle_suites.hpp"
#include "ldagan/trainer.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ldagan;

namespace {

// A scaled-down configuration so the tests run in seconds.
TrainConfig small_config() {
    TrainConfig cfg;
    cfg.K = 4;
    cfg.noise_dim = 8;
    cfg.head_width = 16;
    cfg.disc_hidden = {16, 16};
    cfg.real_batch = 32;
    cfg.per_gen = 6;
    cfg.total_iterations = 30;
    cfg.eval_interval = 10;
    cfg.eval_samples = 128;
    cfg.lr_d = 1e-3;
    cfg.lr_g = 1e-3;
    cfg.seed = 77;
    return cfg;
}

Dataset2D ring_data() {
    RngStream rng(5);
    return sample_mixture(ring_spec(4, 2.0, 0.08), 512, rng);
}

} // namespace

TEST_CASE("TrainConfig defaults and validation") {
    const TrainConfig d;
    CHECK(d.K == 8);
    CHECK(d.alpha_init == 2.0);
    CHECK(d.lr_d == 1e-4);
    CHECK(d.lr_g == 1e-4);
    CHECK(d.adam_beta1 == 0.5);
    CHECK(d.adam_beta2 == 0.999);
    CHECK(d.per_gen == 12);
    CHECK(d.real_batch == 64);
    CHECK(d.fake_sampling == FakeSampling::stratified);
    CHECK(d.warmup_iterations == 0);
    CHECK(d.noise_batch() == 96);
    CHECK_NOTHROW(d.validate());

    TrainConfig bad = d;
    bad.K = 0;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("'K'"), ConfigError);
    bad = d;
    bad.alpha_init = 1e-4;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("alpha_init"), ConfigError);
    bad = d;
    bad.init = "he";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("init_state is deterministic") {
    const TrainConfig cfg = small_config();
    const TrainState a = init_state(cfg), b = init_state(cfg);
    CHECK(a.bank.trunk == b.bank.trunk);
    CHECK(a.disc.net == b.disc.net);
    CHECK(a.rng == b.rng);
    CHECK(a.alpha.values() == std::vector<double>(4, 2.0));
    CHECK(a.iteration == 0);
}

TEST_CASE("step isolation") {
    const TrainConfig cfg = small_config();
    const Dataset2D data = ring_data();
    TrainState state = init_state(cfg);

    const GeneratorBank bank_before = state.bank;
    const DirichletParams alpha_before = state.alpha;
    const MlpParams disc_before = state.disc.net;
    discriminator_substep(state, data, cfg);
    CHECK(state.disc.net != disc_before);
    for (std::size_t k = 0; k < bank_before.heads.size(); ++k) CHECK(state.bank.heads[k] == bank_before.heads[k]);
    CHECK(state.bank.trunk == bank_before.trunk);
    CHECK(state.alpha == alpha_before);

    const MlpParams disc_after = state.disc.net;
    const EStepBatch batch = estep_substep(state, cfg);
    generator_substep(state, batch, cfg);
    CHECK(state.disc.net == disc_after);
    CHECK(state.bank.trunk != bank_before.trunk);
    alpha_substep(state, batch, cfg);
    CHECK(state.disc.net == disc_after);
}

TEST_CASE("zero learning rates leave parameters and alpha bitwise unchanged") {
    TrainConfig cfg = small_config();
    cfg.lr_d = cfg.lr_g = cfg.lr_alpha = 0.0;
    const Dataset2D data = ring_data();
    TrainState state = init_state(cfg);
    const TrainState before = state;
    for (int i = 0; i < 3; ++i) {
        const StepResult r = train_step(state, data, cfg);
        CHECK(r.diag.estep_active);
        CHECK(r.diag.estep_max_iterations >= 1);
        CHECK(r.diag.estep_unconverged == 0);
    }
    CHECK(state.disc.net == before.disc.net);
    for (std::size_t k = 0; k < 4; ++k) CHECK(state.bank.heads[k] == before.bank.heads[k]);
    CHECK(state.bank.trunk == before.bank.trunk);
    CHECK(state.alpha == before.alpha);
    CHECK(state.iteration == 3);
}

TEST_CASE("frozen warmup feeds exact 1/K weights") {
    TrainConfig cfg = small_config();
    cfg.warmup_iterations = kNeverUpdate;
    const Dataset2D data = ring_data();
    TrainState state = init_state(cfg);
    for (int i = 0; i < 5; ++i) {
        const StepResult r = train_step(state, data, cfg);
        CHECK_FALSE(r.diag.estep_active);
        CHECK((r.diag.weights.array() == 0.25).all());
    }
}

TEST_CASE("frozen warmup gradient equals the unweighted update scaled by 1/K") {
    TrainConfig cfg = small_config();
    cfg.warmup_iterations = kNeverUpdate;
    TrainState state = init_state(cfg);
    const EStepBatch batch = estep_substep(state, cfg);
    const GeneratorStep weighted = kernels::serial::bank_backward(batch.pass, state.bank, state.disc, batch.weights);
    const Matrix ones = Matrix::Ones(batch.weights.rows(), batch.weights.cols());
    const GeneratorStep plain = kernels::serial::bank_backward(batch.pass, state.bank, state.disc, ones);
    double worst = 0.0;
    auto compare = [&](const GradientBuffer& a, const GradientBuffer& b) {
        const std::vector<double> fa = oracle::flatten(a), fb = oracle::flatten(b);
        for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::abs(fa[i] - fb[i] / 4.0));
    };
    for (std::size_t k = 0; k < 4; ++k) compare(weighted.heads[k], plain.heads[k]);
    compare(weighted.trunk, plain.trunk);
    CHECK(worst <= 1e-12);
}

TEST_CASE("gamma equals the frozen alpha + 1/K during warmup") {
    TrainConfig cfg = small_config();
    cfg.warmup_iterations = 2;
    TrainState state = init_state(cfg);
    const EStepBatch frozen = estep_substep(state, cfg);
    CHECK_FALSE(frozen.active);
    for (const auto& g : frozen.gammas) {
        for (std::size_t k = 0; k < 4; ++k) CHECK(g[k] == state.alpha[k] + 0.25);
    }
    state.iteration = 2;
    const EStepBatch live = estep_substep(state, cfg);
    CHECK(live.active);
    CHECK(live.reports.size() == static_cast<std::size_t>(cfg.noise_batch()));
}

TEST_CASE("every weight row is on the simplex and alpha stays above its floor") {
    TrainConfig cfg = small_config();
    cfg.lr_alpha = 5.0;   // large enough to drive some alpha into the floor
    const Dataset2D data = ring_data();
    TrainState state = init_state(cfg);
    for (int i = 0; i < 20; ++i) {
        const StepResult r = train_step(state, data, cfg);
        for (Eigen::Index m = 0; m < r.diag.weights.rows(); ++m) {
            CHECK(std::abs(r.diag.weights.row(m).sum() - 1.0) <= 1e-12);
            CHECK(r.diag.weights.row(m).minCoeff() >= 0.0);
        }
        for (double a : state.alpha.values()) CHECK(a >= cfg.alpha_min);
    }
}

TEST_CASE("train is deterministic and records metrics on schedule") {
    const TrainConfig cfg = small_config();
    const Dataset2D data = ring_data();
    const TrainResult a = train(cfg, data);
    const TrainResult b = train(cfg, data);
    REQUIRE(a.metrics.size() == 3);
    CHECK(a.metrics == b.metrics);
    CHECK(a.metrics[0].iteration == 10);
    CHECK(a.metrics[2].iteration == 30);
    CHECK(a.metrics[0].modes_covered.has_value());
    CHECK(*a.metrics[0].hq_ratio >= 0.0);
    CHECK(*a.metrics[0].usage_entropy <= std::log(4.0) + 1e-12);
    CHECK(a.state.iteration == 30);
    CHECK(a.state.bank.trunk == b.state.bank.trunk);
}

TEST_CASE("zero iterations returns the initial state and no metrics") {
    TrainConfig cfg = small_config();
    cfg.total_iterations = 0;
    const TrainResult r = train(cfg, ring_data());
    CHECK(r.metrics.empty());
    CHECK(r.state.iteration == 0);
    CHECK(r.state.bank.trunk == init_state(cfg).bank.trunk);
}

TEST_CASE("ancestral fake sampling trains too") {
    TrainConfig cfg = small_config();
    cfg.fake_sampling = FakeSampling::ancestral;
    cfg.total_iterations = 5;
    const TrainResult r = train(cfg, ring_data());
    CHECK(r.state.iteration == 5);
}

TEST_CASE("divergence is reported with the sub-step") {
    TrainConfig cfg = small_config();
    TrainState state = init_state(cfg);
    state.disc.net.layers[0].weights(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(train_step(state, ring_data(), cfg), doctest::Contains("discriminator"), DivergenceError);
}

TEST_CASE("checkpoint round-trip") {
    const TrainConfig cfg = small_config();
    TrainConfig short_cfg = cfg;
    short_cfg.total_iterations = 4;
    const TrainResult r = train(short_cfg, ring_data());
    const auto path = std::filesystem::temp_directory_path() / "ldagan_trainer_ckpt.json";
    save_checkpoint(r.state, short_cfg, path);
    const Checkpoint c = load_checkpoint(path);
    CHECK(c.state.iteration == 4);
    CHECK(c.state.disc.net == r.state.disc.net);
    CHECK(c.state.bank.trunk == r.state.bank.trunk);
    CHECK(c.state.alpha == r.state.alpha);
    CHECK(c.state.rng == r.state.rng);
    CHECK(c.state.adam_trunk.t == r.state.adam_trunk.t);

    // Continuing from the checkpoint matches continuing in memory.
    TrainState mem = r.state;
    TrainState disk = c.state;
    const Dataset2D data = ring_data();
    train_step(mem, data, short_cfg);
    train_step(disk, data, c.config);
    CHECK(mem.bank.trunk == disk.bank.trunk);
    CHECK(mem.disc.net == disk.disc.net);
    std::filesystem::remove(path);
}
