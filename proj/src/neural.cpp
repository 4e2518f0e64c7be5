#include "ldagan/neural.hpp"

#include "ldagan/error.hpp"

#include <cmath>
#include <string>

namespace ldagan {

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
    }
    return "identity";
}

Activation activation_from_string(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity") return Activation::identity;
    throw ParseError("unknown activation '" + std::string(name) + "'");
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    }
    return n;
}

bool operator==(const LayerParams& a, const LayerParams& b) {
    return a.activation == b.activation && a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.bias.size() == b.bias.size() &&
           a.weights == b.weights && a.bias == b.bias;
}

bool operator==(const MlpParams& a, const MlpParams& b) {
    return a.layers == b.layers;
}

GradientBuffer GradientBuffer::zeros_like(const MlpParams& params) {
    GradientBuffer g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        g.layers.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
    }
    return g;
}

GradientBuffer& GradientBuffer::operator+=(const GradientBuffer& other) {
    if (other.layers.size() != layers.size()) {
        throw DomainError("GradientBuffer: layer count mismatch");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].weights += other.layers[i].weights;
        layers[i].bias += other.layers[i].bias;
    }
    return *this;
}

GradientBuffer& GradientBuffer::operator*=(double s) {
    for (auto& l : layers) {
        l.weights *= s;
        l.bias *= s;
    }
    return *this;
}

bool GradientBuffer::all_finite() const {
    for (const auto& l : layers) {
        if (!l.weights.allFinite() || !l.bias.allFinite()) {
            return false;
        }
    }
    return true;
}

double GradientBuffer::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        if (l.weights.size() > 0) m = std::max(m, l.weights.cwiseAbs().maxCoeff());
        if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
    }
    return m;
}

MlpParams init_mlp(const std::vector<int>& dims, const std::vector<Activation>& activations,
                   const InitScheme& scheme, RngStream& rng) {
    if (dims.size() < 2 || activations.size() != dims.size() - 1) {
        throw DomainError("init_mlp: need >= 2 dims and one activation per layer");
    }
    for (int d : dims) {
        if (d < 1) {
            throw DomainError("init_mlp: layer sizes must be positive");
        }
    }
    MlpParams params;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const int in = dims[i];
        const int out = dims[i + 1];
        LayerParams layer{Matrix::Zero(out, in), Vector::Zero(out), activations[i]};
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        for (int r = 0; r < out; ++r) {
            for (int c = 0; c < in; ++c) {
                switch (scheme.kind) {
                case InitScheme::Kind::xavier_uniform:
                    layer.weights(r, c) = rng.uniform(-bound, bound);
                    break;
                case InitScheme::Kind::gaussian:
                    layer.weights(r, c) = rng.normal(0.0, scheme.sigma);
                    break;
                case InitScheme::Kind::zero:
                    break;
                }
            }
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

namespace {

void apply_activation(Matrix& z, Activation a) {
    switch (a) {
    case Activation::relu:
        z = z.cwiseMax(0.0);
        break;
    case Activation::sigmoid:
        z = z.unaryExpr([](double v) { return sigmoid(v); });
        break;
    case Activation::identity:
        break;
    }
}

// Multiplies dL/d(output) in place by d(output)/d(preactivation), expressed
// through the post-activation values.
void activation_backward(Matrix& grad, const Matrix& out, Activation a) {
    switch (a) {
    case Activation::relu:
        grad = (out.array() > 0.0).select(grad, 0.0);
        break;
    case Activation::sigmoid:
        grad.array() *= out.array() * (1.0 - out.array());
        break;
    case Activation::identity:
        break;
    }
}

} // namespace

ForwardTrace mlp_forward(const MlpParams& params, const Matrix& input) {
    if (params.layers.empty() || input.rows() != params.input_dim()) {
        throw DomainError("mlp_forward: input dimension mismatch");
    }
    ForwardTrace trace;
    trace.outputs.reserve(params.layers.size() + 1);
    trace.outputs.push_back(input);
    for (const auto& layer : params.layers) {
        Matrix z = layer.weights * trace.outputs.back();
        z.colwise() += layer.bias;
        apply_activation(z, layer.activation);
        trace.outputs.push_back(std::move(z));
    }
    return trace;
}

Vector mlp_forward(const MlpParams& params, const Vector& input) {
    return mlp_forward(params, Matrix(input)).output().col(0);
}

BackwardResult mlp_backward_preactivation(const MlpParams& params, const ForwardTrace& trace,
                                          const Matrix& preact_grad, bool want_param_grads) {
    const std::size_t n = params.layers.size();
    if (trace.outputs.size() != n + 1 || preact_grad.rows() != params.output_dim() ||
        preact_grad.cols() != trace.outputs.back().cols()) {
        throw DomainError("mlp_backward: trace or gradient shape mismatch");
    }
    BackwardResult result;
    if (want_param_grads) {
        result.grads.layers.resize(n);
    }
    Matrix delta = preact_grad;
    for (std::size_t i = n; i-- > 0;) {
        const LayerParams& layer = params.layers[i];
        const Matrix& in = trace.outputs[i];
        if (want_param_grads) {
            result.grads.layers[i].weights.noalias() = delta * in.transpose();
            result.grads.layers[i].bias = delta.rowwise().sum();
        }
        Matrix upstream = layer.weights.transpose() * delta;
        if (i > 0) {
            activation_backward(upstream, in, params.layers[i - 1].activation);
        }
        delta = std::move(upstream);
    }
    result.input_grad = std::move(delta);
    return result;
}

BackwardResult mlp_backward(const MlpParams& params, const ForwardTrace& trace, const Matrix& output_grad) {
    if (params.layers.empty() || trace.outputs.empty() || output_grad.rows() != params.output_dim() ||
        output_grad.cols() != trace.outputs.back().cols()) {
        throw DomainError("mlp_backward: output gradient shape mismatch");
    }
    Matrix preact = output_grad;
    activation_backward(preact, trace.outputs.back(), params.layers.back().activation);
    return mlp_backward_preactivation(params, trace, preact);
}

AdamState AdamState::for_params(const MlpParams& params, const AdamConfig& config) {
    return {config, GradientBuffer::zeros_like(params), GradientBuffer::zeros_like(params), 0};
}

void adam_update(AdamState& state, MlpParams& params, const GradientBuffer& grads, bool ascend) {
    if (grads.layers.size() != params.layers.size() || state.m.layers.size() != params.layers.size()) {
        throw DomainError("adam_update: shape mismatch");
    }
    if (!grads.all_finite()) {
        throw DomainError("adam_update: non-finite gradient");
    }
    const AdamConfig& c = state.config;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
    const double sign = ascend ? 1.0 : -1.0;

    auto step = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
        param.array() += sign * c.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.eps);
    };
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        auto& p = params.layers[i];
        const auto& g = grads.layers[i];
        if (g.weights.rows() != p.weights.rows() || g.weights.cols() != p.weights.cols() ||
            g.bias.size() != p.bias.size()) {
            throw DomainError("adam_update: layer shape mismatch");
        }
        step(p.weights, state.m.layers[i].weights, state.v.layers[i].weights, g.weights);
        step(p.bias, state.m.layers[i].bias, state.v.layers[i].bias, g.bias);
    }
}

} // namespace ldagan
