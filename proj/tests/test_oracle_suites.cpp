#include "ldagan/oracle_suites.hpp"

#include <doctest.h>

#include <chrono>

using namespace ldagan;

namespace {

void check_all(const std::vector<oracle::CheckResult>& checks) {
    CHECK_FALSE(checks.empty());
    for (const auto& c : checks) {
        INFO(c.name << " [" << c.detail << "]");
        CHECK(c.passed);
    }
}

} // namespace

TEST_CASE("random instances respect the sampling ranges") {
    RngStream rng(1);
    for (int i = 0; i < 500; ++i) {
        const oracle::Instance inst = oracle::random_instance(rng);
        CHECK(inst.alpha.size() >= 2);
        CHECK(inst.alpha.size() <= 10);
        CHECK(inst.like.size() == inst.alpha.size());
        for (std::size_t k = 0; k < inst.alpha.size(); ++k) {
            CHECK(inst.alpha[k] >= 0.5);
            CHECK(inst.alpha[k] < 10.0);
            CHECK(inst.like[k] >= 0.01);
            CHECK(inst.like[k] < 0.99);
        }
    }
}

TEST_CASE("finite difference helpers") {
    double x = 1.5, y = -0.5;
    auto f = [&] { return x * x * x + 2 * y; };
    const std::vector<double> d2 = oracle::finite_difference(f, {&x, &y}, 1e-5);
    const std::vector<double> d5 = oracle::finite_difference5(f, {&x, &y}, 1e-3);
    CHECK(x == 1.5);
    CHECK(y == -0.5);
    CHECK(std::abs(d2[0] - 6.75) <= 1e-8);
    CHECK(std::abs(d5[0] - 6.75) <= 1e-10);
    CHECK(std::abs(d5[1] - 2.0) <= 1e-10);
    CHECK(oracle::relative_error(1.0, 1.0 + 1e-7) <= 1.01e-7);
    CHECK(oracle::relative_error(0.0, 1e-9) <= 1e-3);
}

TEST_CASE("bounds suite") {
    check_all(oracle::bounds_suite(1));
    check_all(oracle::bounds_suite(2));
}

TEST_CASE("estep suite") {
    check_all(oracle::estep_suite(1));
}

TEST_CASE("gradients suite") {
    check_all(oracle::gradients_suite(1));
}

TEST_CASE("unknown suite name") {
    CHECK_THROWS_AS(oracle::run_suite("nope"), std::invalid_argument);
}
