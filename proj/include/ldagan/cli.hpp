#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace ldagan::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDivergence = 2,
    kIo = 3,
};

inline constexpr const char* kArtifactVersion = "1";

int cmd_synth(const std::string& kind, int n, std::uint64_t seed, const std::filesystem::path& out_path);

struct TrainOverrides {
    std::optional<std::int64_t> iterations;
    std::optional<std::uint64_t> seed;
};
int cmd_train(const std::filesystem::path& config_path, const std::filesystem::path& data_path,
              const std::filesystem::path& out_dir, const TrainOverrides& overrides = {});

int cmd_eval(const std::filesystem::path& checkpoint_path, const std::filesystem::path& data_path, int n_samples,
             const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed = std::nullopt);

int cmd_oracle(const std::string& suite, std::uint64_t seed = 1);

// Seed from --seed, else LDAGAN_SEED, else nullopt. Throws ConfigError on a
// malformed environment value.
std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag);

int run(int argc, char** argv);

} // namespace ldagan::cli
