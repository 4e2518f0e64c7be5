#pragma once

#include "ldagan/inference.hpp"
#include "ldagan/neural.hpp"
#include "ldagan/special_math.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace ldagan {

// Isotropic 2D Gaussian mixture; covariance variance * I for every component.
struct GaussianMixtureSpec {
    Matrix centers;    // 2 x C
    double variance = 1.0;
    SimplexVector weights;

    int size() const { return static_cast<int>(centers.cols()); }
    double sigma() const;
    void validate() const;
};

struct Dataset2D {
    Matrix samples;                         // 2 x N
    std::optional<std::vector<int>> labels; // true component per sample

    Eigen::Index size() const { return samples.cols(); }
};

// Centers at angle 2 pi j / n_modes, counterclockwise from the +x axis.
GaussianMixtureSpec ring_spec(int n_modes, double radius, double variance);

// The three synthetic training sets.
enum class SynthKind { ring, lda_ring, small_ring };
GaussianMixtureSpec synth_spec(SynthKind kind);
// alpha = [8, 4, 8, 4, ...] over the ring components.
DirichletParams lda_ring_alpha(int n_modes);

Dataset2D sample_mixture(const GaussianMixtureSpec& spec, int n, RngStream& rng);
// Per sample: pi ~ Dir(alpha), component ~ Mult(pi), point ~ N(center, variance I).
Dataset2D sample_lda_mixture(const DirichletParams& alpha, const GaussianMixtureSpec& spec, int n,
                             RngStream& rng);

// Labeled data -> per-label means, pooled per-axis variance, label frequencies.
GaussianMixtureSpec estimate_mixture_spec(const Dataset2D& data);

// `x,y,label`; label is empty for unlabeled rows.
void write_dataset_csv(const Dataset2D& data, const std::filesystem::path& path);
Dataset2D read_dataset_csv(const std::filesystem::path& path);

} // namespace ldagan
