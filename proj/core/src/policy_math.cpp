#include "readc/policy_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace readc {

DiscreteDist make_discrete(Vec probs) {
    if (probs.empty()) throw std::invalid_argument("make_discrete: empty probability vector");
    double sum = 0.0;
    for (double& p : probs) {
        if (!std::isfinite(p) || p < -1e-9)
            throw std::invalid_argument("make_discrete: negative or non-finite probability");
        p = std::max(p, kProbFloor);
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("make_discrete: probabilities do not sum to 1");
    return DiscreteDist{std::move(probs)};
}

GaussianDist make_gaussian(Vec mean, Vec stddev) {
    if (mean.size() != stddev.size())
        throw std::invalid_argument("make_gaussian: mean/stddev dimension mismatch");
    if (mean.empty()) throw std::invalid_argument("make_gaussian: empty parameter vectors");
    for (double m : mean)
        if (!std::isfinite(m)) throw std::invalid_argument("make_gaussian: non-finite mean");
    for (double& s : stddev) {
        if (!std::isfinite(s)) throw std::invalid_argument("make_gaussian: non-finite stddev");
        s = std::max(s, kStddevFloor);
    }
    return GaussianDist{std::move(mean), std::move(stddev)};
}

DiscreteDist q_to_probs(std::span<const double> q) {
    if (q.empty()) throw std::invalid_argument("q_to_probs: empty Q-vector");

    double norm_sq = 0.0;
    for (double v : q) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);

    Vec probs(q.size());
    if (norm == 0.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(q.size()));
        return DiscreteDist{std::move(probs)};
    }

    Vec z(q.size());
    double z_max = -1.0;  // normalized entries lie in [-1, 1]
    for (std::size_t i = 0; i < q.size(); ++i) {
        z[i] = q[i] / norm;
        z_max = std::max(z_max, z[i]);
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        probs[i] = std::exp(z[i] - z_max);
        denom += probs[i];
    }
    for (double& p : probs) p = std::max(p / denom, kProbFloor);
    return DiscreteDist{std::move(probs)};
}

double discrete_kl(const DiscreteDist& p_true, const DiscreteDist& p_learnt) {
    if (p_true.probs.size() != p_learnt.probs.size())
        throw std::invalid_argument("discrete_kl: distributions have different support sizes");
    double kl = 0.0;
    for (std::size_t i = 0; i < p_true.probs.size(); ++i) {
        const double t = std::max(p_true.probs[i], kProbFloor);
        const double l = std::max(p_learnt.probs[i], kProbFloor);
        kl += t * std::log(t / l);
    }
    return kl;
}

double entropy(const DiscreteDist& p) {
    double h = 0.0;
    for (double v : p.probs) {
        const double q = std::max(v, kProbFloor);
        h -= q * std::log(q);
    }
    return h;
}

double entropy(const GaussianDist& g) {
    double h = 0.0;
    for (double s : g.stddev) h += 0.5 * std::log(2.0 * M_PI * M_E * s * s);
    return h;
}

double entropy(const PolicyDistribution& p) {
    return std::visit([](const auto& d) { return entropy(d); }, p);
}

double gaussian_kl(const GaussianDist& true_g, const GaussianDist& learnt_g,
                   bool drop_half_term) {
    if (true_g.mean.size() != learnt_g.mean.size())
        throw std::invalid_argument("gaussian_kl: dimension mismatch");
    double kl = 0.0;
    for (std::size_t d = 0; d < true_g.mean.size(); ++d) {
        const double st = std::max(true_g.stddev[d], kStddevFloor);
        const double sl = std::max(learnt_g.stddev[d], kStddevFloor);
        const double dm = true_g.mean[d] - learnt_g.mean[d];
        kl += std::log(sl / st) + (st * st + dm * dm) / (2.0 * sl * sl);
        if (!drop_half_term) kl -= 0.5;
    }
    return kl;
}

double policy_kl(const PolicyDistribution& true_p, const PolicyDistribution& learnt_p,
                 bool gaussian_drop_half_term) {
    if (std::holds_alternative<DiscreteDist>(true_p) &&
        std::holds_alternative<DiscreteDist>(learnt_p)) {
        return discrete_kl(std::get<DiscreteDist>(true_p), std::get<DiscreteDist>(learnt_p));
    }
    if (std::holds_alternative<GaussianDist>(true_p) &&
        std::holds_alternative<GaussianDist>(learnt_p)) {
        return gaussian_kl(std::get<GaussianDist>(true_p), std::get<GaussianDist>(learnt_p),
                           gaussian_drop_half_term);
    }
    throw std::invalid_argument("policy_kl: mixed discrete/Gaussian distributions");
}

}  // namespace readc
