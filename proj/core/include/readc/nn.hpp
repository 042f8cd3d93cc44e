#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "readc/rng.hpp"

namespace readc {

using Vec = std::vector<double>;

// Fully-connected feed-forward network: rectifier on hidden layers, identity
// output. Weight matrix l is (sizes[l+1] x sizes[l]) row-major, so layer l
// maps sizes[l] -> sizes[l+1].
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> layer_sizes, Rng& rng);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    std::size_t layer_count() const { return weights_.size(); }

    Vec forward(std::span<const double> x) const;

    // Activations kept around for the backward pass.
    struct Cache {
        std::vector<Vec> inputs;   // inputs[l] is the input to layer l
        Vec output;
    };
    Vec forward(std::span<const double> x, Cache& cache) const;

    struct Gradients {
        std::vector<Vec> weights;  // same shapes as the parameters
        std::vector<Vec> biases;
        void accumulate(const Gradients& other);
        void scale(double factor);
    };
    Gradients zero_gradients() const;

    // Backpropagates d(loss)/d(output) through the cached activations.
    Gradients backward(const Cache& cache, std::span<const double> upstream_grad) const;
    void backward(const Cache& cache, std::span<const double> upstream_grad,
                  Gradients& into) const;

    std::vector<Vec>& weights() { return weights_; }
    std::vector<Vec>& biases() { return biases_; }
    const std::vector<Vec>& weights() const { return weights_; }
    const std::vector<Vec>& biases() const { return biases_; }

    std::size_t parameter_count() const;
    bool all_finite() const;
    std::uint64_t content_hash() const;

private:
    std::vector<int> sizes_;
    std::vector<Vec> weights_;
    std::vector<Vec> biases_;
};

// Adamax: m <- b1*m + (1-b1)*g; u <- max(b2*u, |g|);
// theta <- theta - (lr / (1 - b1^t)) * m / (u + eps).
class Adamax {
public:
    Adamax() = default;
    explicit Adamax(const Mlp& net, double beta1 = 0.9, double beta2 = 0.999,
                    double eps = 1e-8);

    void step(Mlp& net, const Mlp::Gradients& grads, double lr);

    long step_count() const { return step_count_; }
    const std::vector<Vec>& first_moment() const { return m_w_; }
    const std::vector<Vec>& inf_norm() const { return u_w_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }

private:
    std::vector<Vec> m_w_, m_b_;  // first moment
    std::vector<Vec> u_w_, u_b_;  // exponentially weighted infinity norm
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long step_count_ = 0;
};

double softplus(double x);
double sigmoid(double x);

}  // namespace readc
