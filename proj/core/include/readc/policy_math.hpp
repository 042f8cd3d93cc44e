#pragma once

#include <span>
#include <variant>
#include <vector>

#include "readc/nn.hpp"

namespace readc {

// Probabilities are floored here before any log is taken.
inline constexpr double kProbFloor = 1e-12;
inline constexpr double kStddevFloor = 1e-3;

// Action-probability vector over a discrete action set.
struct DiscreteDist {
    Vec probs;
};

// Diagonal Gaussian over a continuous action box.
struct GaussianDist {
    Vec mean;
    Vec stddev;  // componentwise >= kStddevFloor
};

using PolicyDistribution = std::variant<DiscreteDist, GaussianDist>;

// Floors entries at kProbFloor; throws if the input is not close to a
// distribution (negative mass or sum far from 1).
DiscreteDist make_discrete(Vec probs);
GaussianDist make_gaussian(Vec mean, Vec stddev);

// Transfer function: softmax over L2-normalized values,
// P(a) = exp(q_a / ||q||_2) / sum_b exp(q_b / ||q||_2).
// A zero-norm input maps to the uniform distribution.
DiscreteDist q_to_probs(std::span<const double> q);

// KL(p_true || p_learnt) = sum_a p_true(a) log(p_true(a) / p_learnt(a)).
double discrete_kl(const DiscreteDist& p_true, const DiscreteDist& p_learnt);

// H(p) = -sum_a p(a) log p(a).
double entropy(const DiscreteDist& p);

// Differential entropy of a diagonal Gaussian, sum_d 0.5*log(2*pi*e*sigma_d^2).
double entropy(const GaussianDist& g);

double entropy(const PolicyDistribution& p);

// Diagonal-Gaussian KL(true || learnt), summed over dimensions:
//   log(s_l/s_t) + (s_t^2 + (m_t - m_l)^2) / (2 s_l^2) - 1/2  per dimension.
// drop_half_term reproduces the variant without the -1/2 constant; since
// selection is an argmax over states the constant never changes a choice.
double gaussian_kl(const GaussianDist& true_g, const GaussianDist& learnt_g,
                   bool drop_half_term = false);

// KL between two policy distributions of the same kind.
double policy_kl(const PolicyDistribution& true_p, const PolicyDistribution& learnt_p,
                 bool gaussian_drop_half_term = false);

}  // namespace readc
