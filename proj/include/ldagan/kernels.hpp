#pragma once

// Data-parallel kernels used by the trainer and metrics. Each kernel has a
// serial reference and an OpenMP variant; both produce bitwise-identical
// results because work items are independent and every reduction runs in a
// fixed order after the parallel region.

#include "ldagan/gan.hpp"
#include "ldagan/inference.hpp"

#include <vector>

namespace ldagan::kernels {

// Forward state for every generator on a shared noise batch.
struct BankPass {
    std::vector<ForwardTrace> head;
    std::vector<ForwardTrace> trunk;
    std::vector<ForwardTrace> disc;
    Matrix scores;   // M x K raw D(G_k(z'_m))
};

struct BatchEStep {
    std::vector<VariationalState> states;
    std::vector<EStepReport> reports;
};

struct NearestCenters {
    std::vector<int> index;       // nearest center per sample
    std::vector<double> sq_dist;  // squared distance to it
};

namespace serial {

BankPass bank_forward(const GeneratorBank& bank, const DiscriminatorNet& d, const Matrix& noise);
GeneratorStep bank_backward(const BankPass& pass, const GeneratorBank& bank, const DiscriminatorNet& d,
                            const Matrix& weights);
BatchEStep batch_e_step(const Matrix& scores, const DirichletParams& alpha, const EStepOptions& opts);
NearestCenters nearest_centers(const Matrix& samples, const Matrix& centers);

} // namespace serial

namespace parallel {

BankPass bank_forward(const GeneratorBank& bank, const DiscriminatorNet& d, const Matrix& noise);
GeneratorStep bank_backward(const BankPass& pass, const GeneratorBank& bank, const DiscriminatorNet& d,
                            const Matrix& weights);
BatchEStep batch_e_step(const Matrix& scores, const DirichletParams& alpha, const EStepOptions& opts);
NearestCenters nearest_centers(const Matrix& samples, const Matrix& centers);

} // namespace parallel

} // namespace ldagan::kernels
