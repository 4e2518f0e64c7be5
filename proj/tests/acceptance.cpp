// Acceptance suite: one PASS/FAIL line per primary criterion.

#include "ldagan/data.hpp"
#include "ldagan/inference.hpp"
#include "ldagan/metrics.hpp"
#include "ldagan/oracle_suites.hpp"
#include "ldagan/serialization.hpp"
#include "ldagan/trainer.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

using namespace ldagan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s  %s  (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void bound_suite() {
    const auto t0 = Clock::now();
    const oracle::BoundStats st = oracle::bound_stats(1000, 1);
    const double t = seconds_since(t0);
    const bool ok = st.bound_violations == 0 && st.monotonicity_violations == 0 && st.gap_violations == 0 && t < 5.0;
    report(ok, "E-step bound suite: L <= log marginal, monotone sweeps, kl_gap >= 0 over 1000 instances",
           fmt("bound violations %g, monotonicity violations %g, min gap %.3g, %.3f s", st.bound_violations,
               st.monotonicity_violations, st.min_gap, t));
}

void posterior_fidelity() {
    const auto t0 = Clock::now();
    const oracle::FidelityStats st = oracle::posterior_fidelity(1000, 1);
    const double t = seconds_since(t0);
    report(st.rate() >= 0.99 && t < 5.0, "Posterior fidelity: argmax agreement >= 99% where the top-two gap >= 0.05",
           fmt("%g / %g eligible agree (%.4f), %.3f s", st.agree, st.eligible, st.rate(), t));
}

void gradient_suite() {
    const auto t0 = Clock::now();
    const auto checks = oracle::gradients_suite(1);
    const double t = seconds_since(t0);
    bool ok = t < 30.0;
    std::string failed;
    for (const auto& c : checks) {
        if (!c.passed) {
            ok = false;
            failed += " " + c.name + " [" + c.detail + "]";
        }
    }
    report(ok, "Gradient suite: backprop vs finite differences (1e-4), alpha gradient (1e-6)",
           fmt("%g checks, %.3f s", static_cast<double>(checks.size()), t) + (failed.empty() ? "" : ";" + failed));
}

void special_functions() {
    const auto t0 = Clock::now();
    constexpr double euler = 0.57721566490153286060651209008240243;
    double worst = std::max({std::abs(digamma(1.0) + euler),
                             std::abs(digamma(0.5) + euler + 2 * std::numbers::ln2),
                             std::abs(log_gamma(0.5) - 0.5 * std::log(std::numbers::pi))});
    double psi_i = -euler, psi_h = -euler - 2 * std::numbers::ln2;
    double lg_i = 0.0, lg_h = 0.5 * std::log(std::numbers::pi);
    for (int n = 0; n < 25; ++n) {
        const double xi = 1.0 + n, xh = 0.5 + n;
        worst = std::max({worst, std::abs(digamma(xi) - psi_i), std::abs(digamma(xh) - psi_h),
                          std::abs(log_gamma(xi) - lg_i), std::abs(log_gamma(xh) - lg_h)});
        psi_i += 1 / xi;
        psi_h += 1 / xh;
        lg_i += std::log(xi);
        lg_h += std::log(xh);
    }
    const double t = seconds_since(t0);
    report(worst <= 1e-10 && t < 1.0, "Special functions: anchors and 50-point recurrence grid within 1e-10",
           fmt("max abs error %.3g, %.4f s", worst, t));
}

void closed_form_anchors() {
    using Batch = std::vector<std::vector<double>>;
    const double obj = alpha_objective(Batch{{1.5, 1.5}}, DirichletParams({2, 2}));
    const double target = 0.0191206286;
    report(std::abs(obj - target) <= 1e-9, "Closed-form anchor: alpha_objective([1.5,1.5]; alpha=[2,2]) = 0.0191206286",
           fmt("computed %.10f, |diff| %.3g", obj, std::abs(obj - target)));

    const std::vector<double> g = alpha_gradient(Batch{{1.5, 1.5}}, DirichletParams({1, 1}));
    const double gt = 0.1137056389;
    const double diff = std::max(std::abs(g[0] - gt), std::abs(g[1] - gt));
    report(diff <= 1e-9, "Closed-form anchor: alpha_gradient([1.5,1.5]; alpha=[1,1]) = (0.1137056389, 0.1137056389)",
           fmt("computed (%.10f, %.10f), max |diff| %.3g", g[0], g[1], diff));
}

void ring_experiment() {
    const GaussianMixtureSpec spec = synth_spec(SynthKind::ring);
    int good = 0;
    double worst_time = 0.0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TrainConfig cfg;   // K = 8 and the documented defaults
        cfg.seed = seed;
        RngStream data_rng(1000 + seed);
        const Dataset2D data = sample_mixture(spec, 4096, data_rng);
        const auto t0 = Clock::now();
        TrainOptions opts;
        opts.eval_spec = spec;
        const TrainResult r = train(cfg, data, opts);
        const double t = seconds_since(t0);
        worst_time = std::max(worst_time, t);

        RngStream eval_rng(seed);
        const FakeBatch fakes = stratified_sample_fakes(r.state.bank, 64, eval_rng);   // 8 x 64 = 512
        const CoverageReport rep = coverage_report(fakes, spec);
        const bool ok = rep.modes_covered == 8 && rep.hq_ratio >= 0.75;
        good += ok ? 1 : 0;
        per_seed += fmt(" seed %g: %g/8 hq %.3f %.0fs;", static_cast<double>(seed), rep.modes_covered, rep.hq_ratio, t);
        std::printf("  ring seed %llu: modes %d/8, hq_ratio %.4f, %.1f s\n", static_cast<unsigned long long>(seed),
                    rep.modes_covered, rep.hq_ratio, t);
        std::fflush(stdout);
    }
    report(good >= 4 && worst_time <= 600.0,
           "8-ring experiment: 8/8 modes and hq_ratio >= 0.75 in >= 4 of 5 seeds, <= 10 min per seed",
           fmt("%g of 5 seeds pass;", good) + per_seed);
}

void dirichlet_multinomial() {
    RngStream rng(2024);
    const DirichletParams alpha = lda_ring_alpha(8);
    const double a0 = alpha.total();
    const GeneratorBank bank = make_generator_bank({8, 2, 2, {}}, InitScheme::xavier(), rng);
    const int n = 100000;
    const FakeBatch f = ancestral_sample_fakes(bank, alpha, n, rng);
    std::vector<long> counts(8, 0);
    for (int id : f.mode_ids) ++counts[static_cast<std::size_t>(id)];
    double worst_z = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
        const double p = alpha[k] / a0;
        worst_z = std::max(worst_z, std::abs(counts[k] / double(n) - p) / std::sqrt(p * (1 - p) / n));
    }

    // Dirichlet moments per coordinate: mean and variance, in standard errors.
    const std::vector<double> a{0.5, 2.0, 8.0, 4.0};
    const double s = 14.5;
    std::vector<double> sum(4, 0.0), sum2(4, 0.0);
    for (int i = 0; i < n; ++i) {
        const SimplexVector p = sample_dirichlet(a, rng);
        for (std::size_t k = 0; k < 4; ++k) {
            sum[k] += p[k];
            sum2[k] += p[k] * p[k];
        }
    }
    double worst_mean = 0.0, worst_var = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double mu = a[k] / s;
        const double var = a[k] * (s - a[k]) / (s * s * (s + 1));
        const double b = s - a[k];
        const double mu4 = 3 * a[k] * b * (a[k] * b * (s - 6) + 2 * s * s) / (s * s * s * s * (s + 1) * (s + 2) * (s + 3));
        const double m = sum[k] / n;
        const double v = (sum2[k] - n * m * m) / (n - 1);
        worst_mean = std::max(worst_mean, std::abs(m - mu) / std::sqrt(var / n));
        worst_var = std::max(worst_var, std::abs(v - var) / std::sqrt((mu4 - var * var) / n));
    }
    report(worst_z <= 3.0 && worst_mean <= 5.0 && worst_var <= 5.0,
           "Dirichlet-multinomial statistics: mode frequencies (3 SE), Dirichlet mean/variance (5 SE) at 1e5 draws",
           fmt("max |z| mode freq %.2f, mean %.2f, variance %.2f", worst_z, worst_mean, worst_var));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism() {
    const fs::path dir = fs::temp_directory_path() / "ldagan_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = LDAGAN_CLI_PATH;
    TrainConfig cfg;
    cfg.total_iterations = 300;
    cfg.eval_interval = 100;
    cfg.seed = 42;
    std::ofstream(dir / "config.json") << config_to_json(cfg).dump(2);
    const std::string data = (dir / "ring.csv").string();
    int rc = shell("\"" + cli + "\" synth ring --n 4096 --seed 42 --out \"" + data + "\"");
    for (const char* out : {"a", "b"}) {
        rc |= shell("\"" + cli + "\" train --config \"" + (dir / "config.json").string() + "\" --data \"" + data +
                    "\" --out \"" + (dir / out).string() + "\" > /dev/null");
    }
    const std::string a = slurp(dir / "a" / "metrics.jsonl");
    const std::string b = slurp(dir / "b" / "metrics.jsonl");
    report(rc == 0 && !a.empty() && a == b, "Determinism: cmd_train twice gives byte-identical metrics files",
           fmt("exit status %g, %g bytes of metrics", rc, static_cast<double>(a.size())));
    fs::remove_all(dir);
}

} // namespace

int main() {
    bound_suite();
    posterior_fidelity();
    gradient_suite();
    special_functions();
    closed_form_anchors();
    dirichlet_multinomial();
    determinism();
    ring_experiment();
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
