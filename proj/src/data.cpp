#include "ldagan/data.hpp"

#include "ldagan/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace ldagan {

double GaussianMixtureSpec::sigma() const {
    return std::sqrt(variance);
}

void GaussianMixtureSpec::validate() const {
    if (centers.cols() < 1 || centers.rows() != 2) {
        throw DomainError("mixture spec needs at least one 2D center");
    }
    if (static_cast<Eigen::Index>(weights.size()) != centers.cols()) {
        throw DomainError("mixture spec: weights and centers disagree in count");
    }
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw DomainError("mixture spec: variance must be positive");
    }
}

GaussianMixtureSpec ring_spec(int n_modes, double radius, double variance) {
    if (n_modes < 1) {
        throw DomainError("ring_spec: n_modes must be >= 1");
    }
    GaussianMixtureSpec spec{Matrix(2, n_modes), variance, SimplexVector::uniform(static_cast<std::size_t>(n_modes))};
    for (int j = 0; j < n_modes; ++j) {
        const double angle = 2.0 * std::numbers::pi * j / n_modes;
        spec.centers(0, j) = radius * std::cos(angle);
        spec.centers(1, j) = radius * std::sin(angle);
    }
    spec.validate();
    return spec;
}

GaussianMixtureSpec synth_spec(SynthKind kind) {
    switch (kind) {
    case SynthKind::ring:
    case SynthKind::lda_ring:
        return ring_spec(8, 2.0, 0.08);
    case SynthKind::small_ring:
        return ring_spec(8, 0.5, 0.02);
    }
    throw DomainError("unknown dataset kind");
}

DirichletParams lda_ring_alpha(int n_modes) {
    std::vector<double> alpha(static_cast<std::size_t>(n_modes));
    for (int j = 0; j < n_modes; ++j) {
        alpha[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 8.0 : 4.0;
    }
    return DirichletParams(std::move(alpha));
}

namespace {

void draw_point(Dataset2D& data, const GaussianMixtureSpec& spec, std::size_t c, Eigen::Index i, RngStream& rng) {
    const double s = spec.sigma();
    const auto col = static_cast<Eigen::Index>(c);
    data.samples(0, i) = rng.normal(spec.centers(0, col), s);
    data.samples(1, i) = rng.normal(spec.centers(1, col), s);
    (*data.labels)[static_cast<std::size_t>(i)] = static_cast<int>(c);
}

} // namespace

Dataset2D sample_mixture(const GaussianMixtureSpec& spec, int n, RngStream& rng) {
    spec.validate();
    if (n < 1) {
        throw DomainError("sample_mixture: n must be >= 1");
    }
    Dataset2D data{Matrix(2, n), std::vector<int>(static_cast<std::size_t>(n))};
    for (int i = 0; i < n; ++i) {
        draw_point(data, spec, sample_categorical(spec.weights, rng), i, rng);
    }
    return data;
}

Dataset2D sample_lda_mixture(const DirichletParams& alpha, const GaussianMixtureSpec& spec, int n,
                             RngStream& rng) {
    spec.validate();
    if (static_cast<int>(alpha.size()) != spec.size()) {
        throw DomainError("sample_lda_mixture: alpha length must equal the number of centers");
    }
    if (n < 1) {
        throw DomainError("sample_lda_mixture: n must be >= 1");
    }
    Dataset2D data{Matrix(2, n), std::vector<int>(static_cast<std::size_t>(n))};
    for (int i = 0; i < n; ++i) {
        const SimplexVector pi = sample_dirichlet(alpha.values(), rng);
        draw_point(data, spec, sample_categorical(pi, rng), i, rng);
    }
    return data;
}

GaussianMixtureSpec estimate_mixture_spec(const Dataset2D& data) {
    if (!data.labels || data.size() < 2) {
        throw DomainError("estimate_mixture_spec: needs at least two labeled samples");
    }
    const auto& labels = *data.labels;
    int n_labels = 0;
    for (int l : labels) {
        if (l < 0) {
            throw DomainError("estimate_mixture_spec: negative label");
        }
        n_labels = std::max(n_labels, l + 1);
    }
    Matrix sums = Matrix::Zero(2, n_labels);
    std::vector<double> counts(static_cast<std::size_t>(n_labels), 0.0);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        sums.col(l) += data.samples.col(i);
        counts[static_cast<std::size_t>(l)] += 1.0;
    }
    std::vector<double> weights(counts.size());
    for (int l = 0; l < n_labels; ++l) {
        const double c = counts[static_cast<std::size_t>(l)];
        if (c > 0.0) {
            sums.col(l) /= c;
        }
        weights[static_cast<std::size_t>(l)] = c / static_cast<double>(data.size());
    }
    double ss = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        ss += (data.samples.col(i) - sums.col(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    // Two axes per sample, one mean estimated per label.
    const double dof = std::max(1.0, 2.0 * (static_cast<double>(data.size()) - n_labels));
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (double& w : weights) w /= wsum;
    GaussianMixtureSpec spec{sums, ss / dof, SimplexVector(std::move(weights))};
    spec.validate();
    return spec;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_dataset_csv(const Dataset2D& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << "x,y,label\n";
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        out << format_double(data.samples(0, i)) << ',' << format_double(data.samples(1, i)) << ',';
        if (data.labels) {
            out << (*data.labels)[static_cast<std::size_t>(i)];
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

Dataset2D read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "x,y,label") {
        throw ParseError(path.string() + ": line 1: expected header 'x,y,label'");
    }
    std::vector<double> xs, ys;
    std::vector<int> labels;
    int labeled = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string fx, fy, fl;
        if (!std::getline(row, fx, ',') || !std::getline(row, fy, ',')) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected 3 fields");
        }
        std::getline(row, fl);
        try {
            std::size_t used = 0;
            xs.push_back(std::stod(fx, &used));
            if (used != fx.size()) throw std::invalid_argument("x");
            ys.push_back(std::stod(fy, &used));
            if (used != fy.size()) throw std::invalid_argument("y");
            if (!fl.empty()) {
                labels.push_back(std::stoi(fl, &used));
                if (used != fl.size()) throw std::invalid_argument("label");
                ++labeled;
            } else {
                labels.push_back(-1);
            }
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": malformed number");
        }
    }
    const auto n = static_cast<Eigen::Index>(xs.size());
    if (n == 0) {
        throw ParseError(path.string() + ": no data rows");
    }
    if (labeled != 0 && labeled != n) {
        throw ParseError(path.string() + ": label column must be filled on every row or none");
    }
    Dataset2D data{Matrix(2, n), std::nullopt};
    for (Eigen::Index i = 0; i < n; ++i) {
        data.samples(0, i) = xs[static_cast<std::size_t>(i)];
        data.samples(1, i) = ys[static_cast<std::size_t>(i)];
    }
    if (labeled == n) {
        data.labels = std::move(labels);
    }
    return data;
}

} // namespace ldagan
