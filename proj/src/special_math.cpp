#include "ldagan/special_math.hpp"

#include "ldagan/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ldagan {

SimplexVector::SimplexVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw DomainError("simplex vector must have at least one entry");
    }
    double sum = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("simplex entries must be finite and non-negative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw DomainError("simplex entries must sum to 1");
    }
}

SimplexVector SimplexVector::uniform(std::size_t k) {
    return SimplexVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RngStream::next_u64() {
    ++draws_;
    return engine_();
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double RngStream::normal() {
    // 1 - u lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("gamma shape must be positive and finite");
    }
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        const double u = 1.0 - uniform();
        return g * std::pow(u, 1.0 / shape);
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = normal();
        const double u = 1.0 - uniform();
        double v = 1.0 + c * x;
        if (v <= 0.0) {
            continue;
        }
        v = v * v * v;
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

std::size_t RngStream::index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
}

std::string RngStream::state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void RngStream::restore(std::uint64_t seed, std::uint64_t draws, const std::string& state) {
    std::istringstream is(state);
    std::mt19937_64 engine;
    is >> engine;
    if (is.fail()) {
        throw ParseError("rng.state: malformed engine state");
    }
    seed_ = seed;
    draws_ = draws;
    engine_ = engine;
}

namespace {

void check_positive(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(what) + ": argument must be positive and finite");
    }
}

} // namespace

double log_gamma(double x) {
    check_positive(x, "log_gamma");
    // Shift above 8, then Stirling with the correction series through x^-13.
    double shift = 0.0;
    double prod = 1.0;
    while (x < 8.0) {
        prod *= x;
        x += 1.0;
        if (prod < 1e-280 || prod > 1e280) {
            shift += std::log(prod);
            prod = 1.0;
        }
    }
    shift += std::log(prod);

    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 +
        inv2 * (-1.0 / 360.0 +
        inv2 * (1.0 / 1260.0 +
        inv2 * (-1.0 / 1680.0 +
        inv2 * (1.0 / 1188.0 +
        inv2 * (-691.0 / 360360.0 +
        inv2 * (1.0 / 156.0)))))));
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - shift;
}

double digamma(double x) {
    check_positive(x, "digamma");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli terms B_2k / (2k x^2k), k = 1..6.
    const double series =
        inv2 * (1.0 / 12.0 +
        inv2 * (-1.0 / 120.0 +
        inv2 * (1.0 / 252.0 +
        inv2 * (-1.0 / 240.0 +
        inv2 * (1.0 / 132.0 +
        inv2 * (-691.0 / 32760.0))))));
    return acc + std::log(x) - 0.5 * inv - series;
}

SimplexVector sample_dirichlet(std::span<const double> alpha, RngStream& rng) {
    if (alpha.empty()) {
        throw DomainError("sample_dirichlet: empty concentration vector");
    }
    std::vector<double> draws(alpha.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        draws[k] = rng.gamma(alpha[k]);
        sum += draws[k];
    }
    if (!(sum > 0.0)) {
        // Every gamma underflowed (tiny shapes); put the mass on the largest shape.
        const auto top = std::max_element(alpha.begin(), alpha.end()) - alpha.begin();
        std::fill(draws.begin(), draws.end(), 0.0);
        draws[static_cast<std::size_t>(top)] = 1.0;
        return SimplexVector(std::move(draws));
    }
    for (double& d : draws) {
        d /= sum;
    }
    return SimplexVector(std::move(draws));
}

std::size_t sample_categorical(const SimplexVector& p, RngStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] > 0.0) {
            last_positive = k;
            cum += p[k];
            if (u < cum) {
                return k;
            }
        }
    }
    // Rounding left u beyond the accumulated mass.
    return last_positive;
}

double logsumexp(std::span<const double> x) {
    double top = -std::numeric_limits<double>::infinity();
    for (double v : x) {
        top = std::max(top, v);
    }
    if (std::isinf(top)) {
        return top;
    }
    double s = 0.0;
    for (double v : x) {
        s += std::exp(v - top);
    }
    return top + std::log(s);
}

SimplexVector normalize_log_weights(std::span<const double> logw) {
    if (logw.empty()) {
        throw DomainError("normalize_log_weights: empty input");
    }
    for (double v : logw) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            throw DomainError("normalize_log_weights: entries must be finite or -inf");
        }
    }
    const double lse = logsumexp(logw);
    if (std::isinf(lse)) {
        throw DomainError("normalize_log_weights: all weights are zero");
    }
    std::vector<double> out(logw.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < logw.size(); ++k) {
        out[k] = std::exp(logw[k] - lse);
        sum += out[k];
    }
    for (double& v : out) {
        v /= sum;
    }
    return SimplexVector(std::move(out));
}

} // namespace ldagan
