#include "ldagan/data.hpp"
#include "ldagan/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace ldagan;
namespace fs = std::filesystem;

namespace {

std::vector<long> label_counts(const Dataset2D& d, int c) {
    std::vector<long> counts(static_cast<std::size_t>(c), 0);
    for (int l : *d.labels) ++counts[static_cast<std::size_t>(l)];
    return counts;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("ldagan_test_data_" + name);
}

} // namespace

TEST_CASE("ring_spec geometry") {
    const GaussianMixtureSpec s = ring_spec(8, 2.0, 0.08);
    CHECK(s.size() == 8);
    for (double w : s.weights) CHECK(w == 0.125);
    CHECK(s.centers(0, 0) == 2.0);
    CHECK(s.centers(1, 0) == 0.0);
    CHECK(std::abs(s.centers(0, 2)) <= 1e-15);
    CHECK(std::abs(s.centers(1, 2) - 2.0) <= 1e-15);
    CHECK(s.variance == 0.08);

    const GaussianMixtureSpec small = synth_spec(SynthKind::small_ring);
    CHECK(small.variance == 0.02);
    CHECK(std::abs(small.centers.colwise().norm().maxCoeff() - 0.5) <= 1e-15);
    CHECK(synth_spec(SynthKind::lda_ring).centers == synth_spec(SynthKind::ring).centers);

    CHECK_THROWS_AS(ring_spec(0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(ring_spec(4, 1.0, 0.0), DomainError);
}

TEST_CASE("lda_ring_alpha alternates 8 and 4") {
    CHECK(lda_ring_alpha(8).values() == std::vector<double>{8, 4, 8, 4, 8, 4, 8, 4});
}

TEST_CASE("sample_mixture near-degenerate variance sits on the centers") {
    RngStream rng(1);
    const GaussianMixtureSpec s = ring_spec(8, 2.0, 1e-12);
    const Dataset2D d = sample_mixture(s, 1000, rng);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        CHECK((d.samples.col(i) - s.centers.col((*d.labels)[static_cast<std::size_t>(i)])).norm() <= 1e-5);
    }
}

TEST_CASE("sample_mixture statistics at n = 1e5") {
    RngStream rng(2);
    const int n = 100000;
    const GaussianMixtureSpec s = synth_spec(SynthKind::ring);
    const Dataset2D d = sample_mixture(s, n, rng);
    const auto counts = label_counts(d, 8);
    const double p = 0.125;
    const double se = std::sqrt(p * (1 - p) / n);
    for (long c : counts) CHECK(std::abs(c / double(n) - p) <= 3 * se);

    const double sigma = std::sqrt(0.08);
    for (int c = 0; c < 8; ++c) {
        CAPTURE(c);
        double sx = 0, sy = 0, sxx = 0;
        long m = 0;
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if ((*d.labels)[static_cast<std::size_t>(i)] != c) continue;
            const double dx = d.samples(0, i) - s.centers(0, c);
            sx += d.samples(0, i);
            sy += d.samples(1, i);
            sxx += dx * dx;
            ++m;
        }
        const double mean_se = sigma / std::sqrt(double(m));
        CHECK(std::abs(sx / m - s.centers(0, c)) <= 3 * mean_se);
        CHECK(std::abs(sy / m - s.centers(1, c)) <= 3 * mean_se);
        // Standard error of a Gaussian sample SD is sigma / sqrt(2m).
        CHECK(std::abs(std::sqrt(sxx / m) - sigma) <= 5 * sigma / std::sqrt(2.0 * m));
    }
}

TEST_CASE("sample_lda_mixture marginals") {
    RngStream rng(3);
    const int n = 100000;
    const DirichletParams alpha = lda_ring_alpha(8);
    const Dataset2D d = sample_lda_mixture(alpha, synth_spec(SynthKind::lda_ring), n, rng);
    const auto counts = label_counts(d, 8);
    for (int c = 0; c < 8; ++c) {
        const double p = alpha[static_cast<std::size_t>(c)] / 48.0;
        CHECK(std::abs(counts[static_cast<std::size_t>(c)] / double(n) - p) <= 3 * std::sqrt(p * (1 - p) / n));
    }

    RngStream a(4), b(4);
    const Dataset2D da = sample_lda_mixture(alpha, synth_spec(SynthKind::lda_ring), 500, a);
    const Dataset2D db = sample_lda_mixture(alpha, synth_spec(SynthKind::lda_ring), 500, b);
    CHECK(da.samples == db.samples);
    CHECK(da.labels == db.labels);

    CHECK_THROWS_AS(sample_lda_mixture(DirichletParams({1, 1}), synth_spec(SynthKind::ring), 10, a), DomainError);
}

TEST_CASE("symmetric alpha matches the uniform mixture in distribution") {
    RngStream rng(5);
    const int n = 100000;
    const Dataset2D d = sample_lda_mixture(DirichletParams::symmetric(8, 3.0), synth_spec(SynthKind::ring), n, rng);
    const auto counts = label_counts(d, 8);
    double chi2 = 0.0;
    for (long c : counts) chi2 += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);
    // 7 degrees of freedom; 24.32 is the 0.999 quantile.
    CHECK(chi2 < 24.32);
}

TEST_CASE("estimate_mixture_spec recovers the generating spec") {
    RngStream rng(6);
    const GaussianMixtureSpec truth = synth_spec(SynthKind::ring);
    const GaussianMixtureSpec est = estimate_mixture_spec(sample_mixture(truth, 20000, rng));
    CHECK(est.size() == 8);
    CHECK((est.centers - truth.centers).cwiseAbs().maxCoeff() <= 0.02);
    CHECK(std::abs(est.variance - 0.08) <= 0.003);
}

TEST_CASE("CSV round-trip is exact") {
    RngStream rng(7);
    const Dataset2D d = sample_mixture(synth_spec(SynthKind::small_ring), 300, rng);
    const fs::path p = temp_file("roundtrip.csv");
    write_dataset_csv(d, p);
    const Dataset2D back = read_dataset_csv(p);
    CHECK(back.samples == d.samples);
    CHECK(back.labels == d.labels);

    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,label");
    fs::remove(p);
}

TEST_CASE("CSV without labels") {
    Dataset2D d{Matrix{{1.5, -2.0}, {0.25, 3.0}}, std::nullopt};
    const fs::path p = temp_file("unlabeled.csv");
    write_dataset_csv(d, p);
    const Dataset2D back = read_dataset_csv(p);
    CHECK_FALSE(back.labels.has_value());
    CHECK(back.samples == d.samples);
    fs::remove(p);
}

TEST_CASE("CSV errors") {
    CHECK_THROWS_AS(read_dataset_csv(temp_file("does_not_exist.csv")), IoError);

    const fs::path p = temp_file("bad.csv");
    {
        std::ofstream(p) << "x,y,label\n1.0,2.0,0\n1.0,zz,1\n";
    }
    try {
        read_dataset_csv(p);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    {
        std::ofstream(p) << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(read_dataset_csv(p), ParseError);
    fs::remove(p);
}
