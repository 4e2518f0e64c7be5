#include "ldagan/cli.hpp"

#include "ldagan/data.hpp"
#include "ldagan/error.hpp"
#include "ldagan/metrics.hpp"
#include "ldagan/oracle_suites.hpp"
#include "ldagan/plot.hpp"
#include "ldagan/serialization.hpp"
#include "ldagan/trainer.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

namespace ldagan::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create directory '" + dir.string() + "'");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out = open_output(path);
    out << text;
    if (!out.flush()) {
        throw IoError("write failed: '" + path.string() + "'");
    }
}

// Maps the library's exception types onto exit codes.
template <typename F>
int guarded(const char* command, F&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        std::cerr << "ldagan " << command << ": " << e.what() << "\n";
        return kDivergence;
    } catch (const IoError& e) {
        std::cerr << "ldagan " << command << ": " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        // ConfigError, ParseError, DomainError and argument errors.
        std::cerr << "ldagan " << command << ": " << e.what() << "\n";
        return kUsage;
    }
}

std::optional<SynthKind> parse_kind(const std::string& kind) {
    if (kind == "ring") return SynthKind::ring;
    if (kind == "lda-ring") return SynthKind::lda_ring;
    if (kind == "small-ring") return SynthKind::small_ring;
    return std::nullopt;
}

} // namespace

std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) {
        return flag;
    }
    const char* env = std::getenv("LDAGAN_SEED");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || *env == '-') {
        throw ConfigError("LDAGAN_SEED must be a non-negative integer, got '" + std::string(env) + "'");
    }
    return static_cast<std::uint64_t>(v);
}

int cmd_synth(const std::string& kind, int n, std::uint64_t seed, const fs::path& out_path) {
    return guarded("synth", [&] {
        const auto k = parse_kind(kind);
        if (!k) {
            throw ConfigError("unknown dataset kind '" + kind + "' (expected ring, lda-ring or small-ring)");
        }
        if (n < 1) {
            throw ConfigError("--n must be positive");
        }
        RngStream rng(seed);
        const GaussianMixtureSpec spec = synth_spec(*k);
        const Dataset2D data = *k == SynthKind::lda_ring
                                   ? sample_lda_mixture(lda_ring_alpha(spec.size()), spec, n, rng)
                                   : sample_mixture(spec, n, rng);
        write_dataset_csv(data, out_path);
        return static_cast<int>(kOk);
    });
}

int cmd_train(const fs::path& config_path, const fs::path& data_path, const fs::path& out_dir,
              const TrainOverrides& overrides) {
    return guarded("train", [&] {
        TrainConfig cfg = read_config_file(config_path);
        if (overrides.iterations) cfg.total_iterations = *overrides.iterations;
        if (overrides.seed) cfg.seed = *overrides.seed;
        cfg.validate();
        const Dataset2D data = read_dataset_csv(data_path);
        ensure_dir(out_dir);

        const std::string started = utc_timestamp();
        const fs::path metrics_path = out_dir / "metrics.jsonl";
        const fs::path checkpoint_path = out_dir / "checkpoint.json";
        const fs::path manifest_path = out_dir / "run_manifest.json";

        std::ofstream metrics = open_output(metrics_path);
        TrainOptions opts;
        opts.checkpoint_path = checkpoint_path;
        opts.on_metrics = [&](const MetricsRecord& r) {
            metrics << metrics_to_jsonl(r) << '\n';
            if (!metrics) {
                throw IoError("write failed: '" + metrics_path.string() + "'");
            }
        };
        if (cfg.total_iterations == 0) {
            // Nothing to train; still leave a loadable checkpoint of the initial state.
            save_checkpoint(init_state(cfg), cfg, checkpoint_path);
        } else {
            train(cfg, data, opts);
        }
        metrics.close();

        Json manifest;
        manifest["artifact_version"] = kArtifactVersion;
        manifest["config"] = config_to_json(cfg);
        manifest["seed"] = cfg.seed;
        manifest["started_at"] = started;
        manifest["finished_at"] = utc_timestamp();
        manifest["outputs"] = {
            {"checkpoint", checkpoint_path.string()},
            {"metrics", metrics_path.string()},
            {"manifest", manifest_path.string()},
        };
        manifest["inputs"] = {{"config", config_path.string()}, {"data", data_path.string()}};
        write_text(manifest_path, manifest.dump(2) + "\n");
        return static_cast<int>(kOk);
    });
}

int cmd_eval(const fs::path& checkpoint_path, const fs::path& data_path, int n_samples, const fs::path& out_dir,
             std::optional<std::uint64_t> seed) {
    return guarded("eval", [&] {
        if (n_samples < 1) {
            throw ConfigError("--n must be positive");
        }
        const Checkpoint ckpt = load_checkpoint(checkpoint_path);
        const Dataset2D data = read_dataset_csv(data_path);
        if (!data.labels) {
            throw ConfigError("dataset '" + data_path.string() + "' has no labels; coverage needs component labels");
        }
        const std::set<int> distinct(data.labels->begin(), data.labels->end());
        const int k = ckpt.state.bank.k();
        if (static_cast<int>(distinct.size()) != k) {
            throw ConfigError("checkpoint has K=" + std::to_string(k) + " generators but the dataset has " +
                              std::to_string(distinct.size()) + " components");
        }
        ensure_dir(out_dir);

        RngStream rng(seed.value_or(ckpt.config.seed));
        const int per_gen = (n_samples + k - 1) / k;
        FakeBatch fakes = stratified_sample_fakes(ckpt.state.bank, per_gen, rng);
        fakes.samples.conservativeResize(Eigen::NoChange, n_samples);
        fakes.noise.values.conservativeResize(Eigen::NoChange, n_samples);
        fakes.mode_ids.resize(static_cast<std::size_t>(n_samples));
        if (!fakes.samples.allFinite()) {
            throw DivergenceError("generated samples contain non-finite values");
        }

        const GaussianMixtureSpec spec = estimate_mixture_spec(data);
        const CoverageReport report = coverage_report(fakes, spec);

        std::ofstream csv = open_output(out_dir / "samples.csv");
        csv << "x,y,generator_id\n";
        char row[96];
        for (Eigen::Index i = 0; i < fakes.size(); ++i) {
            std::snprintf(row, sizeof row, "%.17g,%.17g,%d\n", fakes.samples(0, i), fakes.samples(1, i),
                          fakes.mode_ids[static_cast<std::size_t>(i)]);
            csv << row;
        }
        if (!csv.flush()) {
            throw IoError("write failed: samples.csv");
        }
        write_text(out_dir / "coverage.json", coverage_to_json(report).dump(2) + "\n");
        write_scatter_svg(out_dir / "scatter.svg", data.samples, fakes.samples, fakes.mode_ids, k);

        std::cout << "modes_covered " << report.modes_covered << "/" << spec.size() << "  hq_ratio "
                  << report.hq_ratio << "  usage_entropy " << report.usage_entropy << "\n";
        return static_cast<int>(kOk);
    });
}

int cmd_oracle(const std::string& suite, std::uint64_t seed) {
    return guarded("oracle", [&] {
        if (suite != "estep" && suite != "gradients" && suite != "bounds") {
            throw ConfigError("unknown suite '" + suite + "' (expected estep, gradients or bounds)");
        }
        const auto checks = oracle::run_suite(suite, seed);
        bool all = true;
        for (const auto& c : checks) {
            std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
            all = all && c.passed;
        }
        return all ? static_cast<int>(kOk) : static_cast<int>(kUsage);
    });
}

int run(int argc, char** argv) {
    CLI::App app{"LDA over a bank of GAN generators: synthesis, training, evaluation, oracles"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed_flag;
    auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", seed_flag, "RNG seed (falls back to LDAGAN_SEED)");
    };

    std::string kind;
    int n = 4096;
    std::string out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset as x,y,label CSV");
    synth->add_option("kind", kind, "ring, lda-ring or small-ring")->required();
    synth->add_option("--n", n, "number of samples");
    synth->add_option("--out", out, "output CSV")->required();
    add_seed(synth);

    std::string config, data;
    std::optional<std::int64_t> iterations;
    auto* train_cmd = app.add_subcommand("train", "Train a model; writes checkpoint, metrics and manifest");
    train_cmd->add_option("--config", config, "training config JSON")->required();
    train_cmd->add_option("--data", data, "training data CSV")->required();
    train_cmd->add_option("--out", out, "output directory")->required();
    train_cmd->add_option("--iterations", iterations, "override total_iterations");
    add_seed(train_cmd);

    std::string checkpoint;
    int n_samples = 512;
    auto* eval = app.add_subcommand("eval", "Sample a checkpoint and score mode coverage");
    eval->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required();
    eval->add_option("--data", data, "labeled reference data CSV")->required();
    eval->add_option("--n", n_samples, "number of generated samples");
    eval->add_option("--out", out, "output directory")->required();
    add_seed(eval);

    std::string suite;
    auto* oracle_cmd = app.add_subcommand("oracle", "Run an oracle property suite");
    oracle_cmd->add_option("suite", suite, "estep, gradients or bounds")->required();
    add_seed(oracle_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    std::optional<std::uint64_t> seed;
    try {
        seed = resolve_seed(seed_flag);
    } catch (const ConfigError& e) {
        std::cerr << "ldagan: " << e.what() << "\n";
        return kUsage;
    }

    if (synth->parsed()) return cmd_synth(kind, n, seed.value_or(0), out);
    if (train_cmd->parsed()) return cmd_train(config, data, out, {iterations, seed});
    if (eval->parsed()) return cmd_eval(checkpoint, data, n_samples, out, seed);
    return cmd_oracle(suite, seed.value_or(1));
}

} // namespace ldagan::cli
