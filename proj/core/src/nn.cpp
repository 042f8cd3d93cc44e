#include "readc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace readc {

Mlp::Mlp(std::vector<int> layer_sizes, Rng& rng) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
    for (int s : sizes_) {
        if (s <= 0) throw std::invalid_argument("Mlp layer sizes must be positive");
    }
    const std::size_t n_layers = sizes_.size() - 1;
    weights_.resize(n_layers);
    biases_.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        weights_[l].resize(static_cast<std::size_t>(fan_in) * fan_out);
        for (double& w : weights_[l]) w = rng.uniform(-bound, bound);
        biases_[l].assign(fan_out, 0.0);
    }
}

Vec Mlp::forward(std::span<const double> x) const {
    Cache scratch;
    return forward(x, scratch);
}

Vec Mlp::forward(std::span<const double> x, Cache& cache) const {
    if (static_cast<int>(x.size()) != input_dim())
        throw std::invalid_argument("Mlp::forward: input length does not match input layer size");

    cache.inputs.resize(layer_count());
    Vec cur(x.begin(), x.end());
    for (std::size_t l = 0; l < layer_count(); ++l) {
        cache.inputs[l] = cur;
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        Vec next(out);
        const double* w = weights_[l].data();
        for (int i = 0; i < out; ++i) {
            double acc = biases_[l][i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) acc += row[j] * cur[j];
            next[i] = acc;
        }
        if (l + 1 < layer_count()) {
            for (double& v : next) v = v > 0.0 ? v : 0.0;  // rectifier on hidden layers
        }
        cur = std::move(next);
    }
    cache.output = cur;
    return cur;
}

Mlp::Gradients Mlp::zero_gradients() const {
    Gradients g;
    g.weights.resize(layer_count());
    g.biases.resize(layer_count());
    for (std::size_t l = 0; l < layer_count(); ++l) {
        g.weights[l].assign(weights_[l].size(), 0.0);
        g.biases[l].assign(biases_[l].size(), 0.0);
    }
    return g;
}

void Mlp::Gradients::accumulate(const Gradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
        for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
    }
}

void Mlp::Gradients::scale(double factor) {
    for (auto& layer : weights)
        for (double& v : layer) v *= factor;
    for (auto& layer : biases)
        for (double& v : layer) v *= factor;
}

Mlp::Gradients Mlp::backward(const Cache& cache, std::span<const double> upstream_grad) const {
    Gradients grads = zero_gradients();
    backward(cache, upstream_grad, grads);
    return grads;
}

void Mlp::backward(const Cache& cache, std::span<const double> upstream_grad,
                   Gradients& into) const {
    if (static_cast<int>(upstream_grad.size()) != output_dim())
        throw std::invalid_argument("Mlp::backward: upstream gradient length does not match output size");
    if (cache.inputs.size() != layer_count())
        throw std::invalid_argument("Mlp::backward: cache does not belong to this network");

    Vec delta(upstream_grad.begin(), upstream_grad.end());
    for (std::size_t li = layer_count(); li-- > 0;) {
        const int in = sizes_[li];
        const int out = sizes_[li + 1];
        const Vec& input = cache.inputs[li];

        double* gw = into.weights[li].data();
        for (int i = 0; i < out; ++i) {
            const double d = delta[i];
            into.biases[li][i] += d;
            double* row = gw + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) row[j] += d * input[j];
        }

        if (li == 0) break;
        Vec prev(in, 0.0);
        const double* w = weights_[li].data();
        for (int i = 0; i < out; ++i) {
            const double d = delta[i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) prev[j] += d * row[j];
        }
        // input[j] is a post-rectifier activation; its pre-activation gradient
        // is zero wherever the rectifier clipped.
        for (int j = 0; j < in; ++j) {
            if (input[j] <= 0.0) prev[j] = 0.0;
        }
        delta = std::move(prev);
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights_) n += w.size();
    for (const auto& b : biases_) n += b.size();
    return n;
}

bool Mlp::all_finite() const {
    for (const auto& layer : weights_)
        for (double v : layer)
            if (!std::isfinite(v)) return false;
    for (const auto& layer : biases_)
        for (double v : layer)
            if (!std::isfinite(v)) return false;
    return true;
}

std::uint64_t Mlp::content_hash() const {
    // FNV-1a over the raw parameter bytes.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const Vec& v) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
        for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& w : weights_) mix(w);
    for (const auto& b : biases_) mix(b);
    return h;
}

Adamax::Adamax(const Mlp& net, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_w_.resize(net.layer_count());
    m_b_.resize(net.layer_count());
    u_w_.resize(net.layer_count());
    u_b_.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        m_w_[l].assign(net.weights()[l].size(), 0.0);
        m_b_[l].assign(net.biases()[l].size(), 0.0);
        u_w_[l].assign(net.weights()[l].size(), 0.0);
        u_b_[l].assign(net.biases()[l].size(), 0.0);
    }
}

void Adamax::step(Mlp& net, const Mlp::Gradients& grads, double lr) {
    if (lr <= 0.0) throw std::invalid_argument("Adamax::step: learning rate must be positive");
    if (grads.weights.size() != net.layer_count())
        throw std::invalid_argument("Adamax::step: gradient shape mismatch");

    ++step_count_;
    const double correction = lr / (1.0 - std::pow(beta1_, static_cast<double>(step_count_)));

    auto update = [&](Vec& params, const Vec& g, Vec& m, Vec& u) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            const double mag = std::fabs(g[i]);
            u[i] = std::max(beta2_ * u[i], mag);
            params[i] -= correction * m[i] / (u[i] + eps_);
        }
    };
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        update(net.weights()[l], grads.weights[l], m_w_[l], u_w_[l]);
        update(net.biases()[l], grads.biases[l], m_b_[l], u_b_[l]);
    }
}

double softplus(double x) {
    // Stable for large |x|.
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace readc
