#pragma once

// Property suites that check the inference and gradient code against
// independent oracles: the closed-form marginal and posterior, and central
// finite differences. Used by `ldagan oracle` and the acceptance tests.

#include "ldagan/gan.hpp"
#include "ldagan/inference.hpp"
#include "ldagan/neural.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ldagan::oracle {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Instance {
    LikelihoodVector like;
    DirichletParams alpha;
};

// K in {2..10}, alpha_k in [0.5, 10], D_k in [0.01, 0.99].
Instance random_instance(RngStream& rng);

// Central differences of f around x (x is restored on return).
std::vector<double> finite_difference(const std::function<double()>& f, std::vector<double*> coords, double h);

// Five-point stencil, O(h^4) truncation; used where 1e-6 relative accuracy is needed.
std::vector<double> finite_difference5(const std::function<double()>& f, std::vector<double*> coords, double h);

// |a - b| / max(|a|, |b|, floor)
double relative_error(double a, double b, double floor = 1e-6);

// Pointers to every weight and bias of a network, layer by layer.
std::vector<double*> parameter_coords(MlpParams& params);
// Gradient entries in the same order as parameter_coords.
std::vector<double> flatten(const GradientBuffer& g);

struct BoundStats {
    int instances = 0;
    int bound_violations = 0;        // L > log marginal + 1e-9
    int monotonicity_violations = 0; // L decreased by more than 1e-12 between sweeps
    int gap_violations = 0;          // kl_gap < -1e-9
    double max_bound_excess = -1e300;
    double min_gap = 1e300;
};
BoundStats bound_stats(int instances, std::uint64_t seed);

struct FidelityStats {
    int eligible = 0;   // top-two exact posterior gap >= 0.05
    int agree = 0;
    int unconverged = 0;
    double rate() const { return eligible > 0 ? static_cast<double>(agree) / eligible : 1.0; }
};
FidelityStats posterior_fidelity(int instances, std::uint64_t seed);

std::vector<CheckResult> bounds_suite(std::uint64_t seed = 1);
std::vector<CheckResult> estep_suite(std::uint64_t seed = 1);
std::vector<CheckResult> gradients_suite(std::uint64_t seed = 1);

// Throws std::invalid_argument for unknown suite names.
std::vector<CheckResult> run_suite(std::string_view name, std::uint64_t seed = 1);

} // namespace ldagan::oracle
