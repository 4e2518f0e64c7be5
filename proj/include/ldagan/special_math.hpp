#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ldagan {

// Probability vector over K >= 1 outcomes; entries >= 0 and sum to 1.
class SimplexVector {
public:
    SimplexVector() = default;
    // Validates the simplex constraint (tolerance 1e-12 on the sum).
    explicit SimplexVector(std::vector<double> values);

    static SimplexVector uniform(std::size_t k);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

private:
    std::vector<double> values_;
};

// Seedable random stream. The engine is std::mt19937_64; all transforms to
// uniform, normal, and gamma variates are defined here, so draws are
// reproducible across standard libraries.
//
// Draw order:
//   uniform()   one engine word, top 53 bits.
//   normal()    two uniforms (Box-Muller, cosine branch only).
//   gamma(a)    per rejection attempt: one normal + one uniform; for a < 1
//               one further uniform for the boost u^(1/a) after acceptance.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }
    // Number of 64-bit engine words consumed so far.
    std::uint64_t draws() const { return draws_; }

    std::uint64_t next_u64();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal();
    double normal(double mean, double stddev);
    double gamma(double shape);
    std::size_t index(std::size_t n);       // uniform over [0, n)

    // Engine state as text; restores bitwise.
    std::string state() const;
    void restore(std::uint64_t seed, std::uint64_t draws, const std::string& state);

    friend bool operator==(const RngStream& a, const RngStream& b) {
        return a.seed_ == b.seed_ && a.draws_ == b.draws_ && a.engine_ == b.engine_;
    }

private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

double log_gamma(double x);
double digamma(double x);

// Dirichlet draw from K independent Gamma(alpha_k, 1) variates, normalized.
SimplexVector sample_dirichlet(std::span<const double> alpha, RngStream& rng);

// Consumes exactly one uniform.
std::size_t sample_categorical(const SimplexVector& p, RngStream& rng);

// exp(logw_k - logsumexp(logw)). -inf entries are allowed as long as one is finite.
SimplexVector normalize_log_weights(std::span<const double> logw);

double logsumexp(std::span<const double> x);

} // namespace ldagan
