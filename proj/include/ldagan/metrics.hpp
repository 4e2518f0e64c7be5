#pragma once

#include "ldagan/data.hpp"
#include "ldagan/gan.hpp"

#include <vector>

namespace ldagan {

inline constexpr double kDefaultCaptureSigmas = 3.0;

// Scaled from 5 hits per mode at the 512-sample reference.
int default_min_count(Eigen::Index n_samples);

struct CoverageReport {
    int modes_covered = 0;
    double hq_ratio = 0.0;
    std::vector<int> per_mode_counts;
    double usage_entropy = 0.0;
    std::vector<double> purity;
};

struct ModeCoverage {
    int modes_covered = 0;
    std::vector<int> per_mode_counts;   // samples within the capture radius, per center
};

// Samples are assigned to their nearest center; a mode counts as covered when
// at least min_count of its samples lie within capture_radius_sigmas * sigma.
ModeCoverage mode_coverage(const Matrix& samples, const GaussianMixtureSpec& spec,
                           double capture_radius_sigmas, int min_count);

double high_quality_ratio(const Matrix& samples, const GaussianMixtureSpec& spec, double radius_sigmas);

struct GeneratorUsage {
    std::vector<int> counts;
    double entropy = 0.0;   // nats
};

GeneratorUsage generator_usage(const FakeBatch& fakes);

// Per generator: share of its samples whose nearest center is that
// generator's plurality center. Generators without samples get 0.
std::vector<double> assignment_purity(const FakeBatch& fakes, const GaussianMixtureSpec& spec);

CoverageReport coverage_report(const FakeBatch& fakes, const GaussianMixtureSpec& spec,
                               double radius_sigmas = kDefaultCaptureSigmas, int min_count = -1);

} // namespace ldagan
