#include "ldagan/metrics.hpp"

#include "ldagan/error.hpp"
#include "ldagan/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ldagan {

int default_min_count(Eigen::Index n_samples) {
    return std::max<int>(1, static_cast<int>(n_samples * 5 / 512));
}

namespace {

void check_samples(const Matrix& samples, const GaussianMixtureSpec& spec) {
    spec.validate();
    if (samples.rows() != 2 || samples.cols() < 1) {
        throw DomainError("metrics: samples must be a non-empty 2 x N matrix");
    }
}

} // namespace

ModeCoverage mode_coverage(const Matrix& samples, const GaussianMixtureSpec& spec,
                           double capture_radius_sigmas, int min_count) {
    check_samples(samples, spec);
    const kernels::NearestCenters nearest = kernels::parallel::nearest_centers(samples, spec.centers);
    const double radius = capture_radius_sigmas * spec.sigma();
    const double r2 = radius * radius;
    ModeCoverage out;
    out.per_mode_counts.assign(static_cast<std::size_t>(spec.size()), 0);
    for (std::size_t i = 0; i < nearest.index.size(); ++i) {
        if (nearest.sq_dist[i] <= r2) {
            ++out.per_mode_counts[static_cast<std::size_t>(nearest.index[i])];
        }
    }
    for (int c : out.per_mode_counts) {
        if (c >= min_count) {
            ++out.modes_covered;
        }
    }
    return out;
}

double high_quality_ratio(const Matrix& samples, const GaussianMixtureSpec& spec, double radius_sigmas) {
    check_samples(samples, spec);
    const kernels::NearestCenters nearest = kernels::parallel::nearest_centers(samples, spec.centers);
    const double radius = radius_sigmas * spec.sigma();
    const double r2 = radius * radius;
    const auto hits = std::count_if(nearest.sq_dist.begin(), nearest.sq_dist.end(),
                                    [r2](double d) { return d <= r2; });
    return static_cast<double>(hits) / static_cast<double>(samples.cols());
}

GeneratorUsage generator_usage(const FakeBatch& fakes) {
    if (fakes.mode_ids.empty() || fakes.num_generators < 1) {
        throw DomainError("generator_usage: empty batch");
    }
    GeneratorUsage usage;
    usage.counts.assign(static_cast<std::size_t>(fakes.num_generators), 0);
    for (int id : fakes.mode_ids) {
        ++usage.counts.at(static_cast<std::size_t>(id));
    }
    const double n = static_cast<double>(fakes.mode_ids.size());
    for (int c : usage.counts) {
        if (c > 0) {
            const double p = c / n;
            usage.entropy -= p * std::log(p);
        }
    }
    return usage;
}

std::vector<double> assignment_purity(const FakeBatch& fakes, const GaussianMixtureSpec& spec) {
    check_samples(fakes.samples, spec);
    const kernels::NearestCenters nearest = kernels::parallel::nearest_centers(fakes.samples, spec.centers);
    const auto k = static_cast<std::size_t>(fakes.num_generators);
    std::vector<std::vector<int>> hist(k, std::vector<int>(static_cast<std::size_t>(spec.size()), 0));
    for (std::size_t i = 0; i < fakes.mode_ids.size(); ++i) {
        ++hist.at(static_cast<std::size_t>(fakes.mode_ids[i]))[static_cast<std::size_t>(nearest.index[i])];
    }
    std::vector<double> purity(k, 0.0);
    for (std::size_t g = 0; g < k; ++g) {
        int total = 0;
        int top = 0;
        for (int c : hist[g]) {
            total += c;
            top = std::max(top, c);
        }
        if (total > 0) {
            purity[g] = static_cast<double>(top) / total;
        }
    }
    return purity;
}

CoverageReport coverage_report(const FakeBatch& fakes, const GaussianMixtureSpec& spec,
                               double radius_sigmas, int min_count) {
    if (min_count < 0) {
        min_count = default_min_count(fakes.size());
    }
    CoverageReport report;
    ModeCoverage cov = mode_coverage(fakes.samples, spec, radius_sigmas, min_count);
    report.modes_covered = cov.modes_covered;
    report.per_mode_counts = std::move(cov.per_mode_counts);
    report.hq_ratio = high_quality_ratio(fakes.samples, spec, radius_sigmas);
    report.usage_entropy = generator_usage(fakes).entropy;
    report.purity = assignment_purity(fakes, spec);
    return report;
}

} // namespace ldagan
