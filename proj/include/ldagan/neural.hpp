#pragma once

#include "ldagan/special_math.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace ldagan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { relu, sigmoid, identity };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

// Numerically stable logistic function.
double sigmoid(double x);

struct LayerParams {
    Matrix weights;   // out_dim x in_dim
    Vector bias;      // out_dim
    Activation activation = Activation::identity;

    Eigen::Index in_dim() const { return weights.cols(); }
    Eigen::Index out_dim() const { return weights.rows(); }
};

struct MlpParams {
    std::vector<LayerParams> layers;

    Eigen::Index input_dim() const { return layers.front().in_dim(); }
    Eigen::Index output_dim() const { return layers.back().out_dim(); }
    std::size_t parameter_count() const;
};

bool operator==(const LayerParams& a, const LayerParams& b);
bool operator==(const MlpParams& a, const MlpParams& b);

struct LayerGrad {
    Matrix weights;
    Vector bias;
};

// Mirrors the shape of an MlpParams.
struct GradientBuffer {
    std::vector<LayerGrad> layers;

    static GradientBuffer zeros_like(const MlpParams& params);
    GradientBuffer& operator+=(const GradientBuffer& other);
    GradientBuffer& operator*=(double s);
    bool all_finite() const;
    double max_abs() const;
};

struct InitScheme {
    enum class Kind { xavier_uniform, gaussian, zero };
    Kind kind = Kind::xavier_uniform;
    double sigma = 0.02;   // gaussian only

    static InitScheme xavier() { return {}; }
    static InitScheme zeros() { return {Kind::zero, 0.0}; }
    static InitScheme normal(double s) { return {Kind::gaussian, s}; }
};

// Weights are drawn row-major, layer by layer; biases start at zero.
MlpParams init_mlp(const std::vector<int>& dims, const std::vector<Activation>& activations,
                   const InitScheme& scheme, RngStream& rng);

// Samples are columns. outputs[0] is the input, outputs[i + 1] the
// post-activation output of layer i.
struct ForwardTrace {
    std::vector<Matrix> outputs;

    const Matrix& output() const { return outputs.back(); }
};

ForwardTrace mlp_forward(const MlpParams& params, const Matrix& input);
Vector mlp_forward(const MlpParams& params, const Vector& input);

struct BackwardResult {
    GradientBuffer grads;
    Matrix input_grad;
};

// Reverse-mode gradients given dLoss/dOutput (post-activation).
BackwardResult mlp_backward(const MlpParams& params, const ForwardTrace& trace, const Matrix& output_grad);

// Same, with the gradient supplied w.r.t. the last layer's pre-activation.
// Lets callers fold log-sigmoid derivatives in stably.
BackwardResult mlp_backward_preactivation(const MlpParams& params, const ForwardTrace& trace,
                                          const Matrix& preact_grad, bool want_param_grads = true);

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    GradientBuffer m;
    GradientBuffer v;
    long long t = 0;

    static AdamState for_params(const MlpParams& params, const AdamConfig& config);
};

// Bias-corrected Adam. ascend = true moves along +grads.
void adam_update(AdamState& state, MlpParams& params, const GradientBuffer& grads, bool ascend);

} // namespace ldagan
