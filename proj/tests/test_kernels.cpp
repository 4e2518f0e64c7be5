#include "ldagan/kernels.hpp"
#include "ldagan/oracle_suites.hpp"

#include <doctest.h>

#include <cstring>

using namespace ldagan;

namespace {

bool same_bits(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

struct Fixture {
    RngStream rng{31};
    GeneratorBank bank = make_generator_bank({8, 32, 16, {}}, InitScheme::xavier(), rng);
    DiscriminatorNet disc = make_discriminator({16, 16}, InitScheme::xavier(), rng);
    NoiseBatch noise = sample_noise(32, 96, rng);
};

} // namespace

TEST_CASE_FIXTURE(Fixture, "bank_forward serial and parallel agree bitwise") {
    const kernels::BankPass s = kernels::serial::bank_forward(bank, disc, noise.values);
    const kernels::BankPass p = kernels::parallel::bank_forward(bank, disc, noise.values);
    CHECK(same_bits(s.scores, p.scores));
    CHECK(s.scores.rows() == 96);
    CHECK(s.scores.cols() == 8);
    for (int k = 0; k < 8; ++k) {
        const Vector d = discriminator_scores(disc, generate_batch(bank, k, noise.values));
        CHECK(same_bits(Matrix(s.scores.col(k)), Matrix(d)));
    }
}

TEST_CASE_FIXTURE(Fixture, "bank_backward serial and parallel agree bitwise") {
    Matrix w(96, 8);
    for (Eigen::Index r = 0; r < 96; ++r) {
        const SimplexVector p = sample_dirichlet(std::vector<double>(8, 1.0), rng);
        for (Eigen::Index k = 0; k < 8; ++k) w(r, k) = p[static_cast<std::size_t>(k)];
    }
    const kernels::BankPass pass = kernels::serial::bank_forward(bank, disc, noise.values);
    const GeneratorStep s = kernels::serial::bank_backward(pass, bank, disc, w);
    const GeneratorStep p = kernels::parallel::bank_backward(pass, bank, disc, w);
    CHECK(same_bits(s.losses, p.losses));
    for (std::size_t k = 0; k < 8; ++k) CHECK(same_bits(oracle::flatten(s.heads[k]), oracle::flatten(p.heads[k])));
    CHECK(same_bits(oracle::flatten(s.trunk), oracle::flatten(p.trunk)));
}

TEST_CASE_FIXTURE(Fixture, "batch_e_step serial and parallel agree bitwise") {
    const kernels::BankPass pass = kernels::serial::bank_forward(bank, disc, noise.values);
    const DirichletParams alpha({8, 4, 8, 4, 8, 4, 8, 4});
    const kernels::BatchEStep s = kernels::serial::batch_e_step(pass.scores, alpha, {});
    const kernels::BatchEStep p = kernels::parallel::batch_e_step(pass.scores, alpha, {});
    REQUIRE(s.states.size() == 96);
    for (std::size_t m = 0; m < 96; ++m) {
        CHECK(same_bits(s.states[m].omega.values(), p.states[m].omega.values()));
        CHECK(same_bits(s.states[m].gamma, p.states[m].gamma));
        CHECK(s.reports[m].iterations == p.reports[m].iterations);
    }
    // Each row is the scalar e_step on that row's scores.
    std::vector<double> row(8);
    for (int k = 0; k < 8; ++k) row[static_cast<std::size_t>(k)] = pass.scores(5, k);
    auto [one, rep] = e_step(LikelihoodVector(row), alpha);
    CHECK(same_bits(one.omega.values(), s.states[5].omega.values()));

    Matrix bad = pass.scores;
    bad(3, 2) = std::nan("");
    CHECK_THROWS(kernels::parallel::batch_e_step(bad, alpha, {}));
}

TEST_CASE("nearest_centers serial and parallel agree") {
    RngStream rng(2);
    Matrix samples(2, 5000), centers(2, 8);
    for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = rng.normal(0.0, 2.0);
    for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = rng.normal(0.0, 2.0);
    const kernels::NearestCenters s = kernels::serial::nearest_centers(samples, centers);
    const kernels::NearestCenters p = kernels::parallel::nearest_centers(samples, centers);
    CHECK(s.index == p.index);
    CHECK(same_bits(s.sq_dist, p.sq_dist));
    for (Eigen::Index i = 0; i < 200; ++i) {
        Eigen::Index best;
        const double d = (centers.colwise() - samples.col(i)).colwise().squaredNorm().minCoeff(&best);
        CHECK(s.index[static_cast<std::size_t>(i)] == best);
        CHECK(std::abs(s.sq_dist[static_cast<std::size_t>(i)] - d) <= 1e-12);
    }
}
