#include "readc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace readc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Dendrogram {
    // Merge i: slots (a, b) with a < b combined into slot a, at cost heights[i].
    std::vector<std::pair<std::size_t, std::size_t>> merges;
    std::vector<double> heights;
};

double ward_cost(const StateVector& ca, double na, const StateVector& cb, double nb) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        const double diff = ca[k] - cb[k];
        d2 += diff * diff;
    }
    return (na * nb) / (na + nb) * d2;
}

// Full greedy agglomeration. Costs are cached in a dense matrix with a
// per-slot nearest-neighbour index so each merge is close to linear.
Dendrogram build_dendrogram(std::span<const StateVector> points) {
    const std::size_t n = points.size();
    Dendrogram out;
    if (n < 2) return out;
    const std::size_t dim = points[0].size();
    for (const StateVector& p : points) {
        if (p.size() != dim) throw std::invalid_argument("ward_cluster: inconsistent dimensions");
    }

    std::vector<StateVector> centroid(points.begin(), points.end());
    std::vector<double> count(n, 1.0);
    std::vector<bool> active(n, true);

    std::vector<double> cost(n * n, kInf);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return cost[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            at(i, j) = at(j, i) = ward_cost(centroid[i], 1.0, centroid[j], 1.0);

    // nearest[i] = lowest-index partner attaining the row minimum
    std::vector<std::size_t> nearest(n, n);
    std::vector<double> nearest_cost(n, kInf);
    auto rescan = [&](std::size_t i) {
        nearest_cost[i] = kInf;
        nearest[i] = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !active[j]) continue;
            if (at(i, j) < nearest_cost[i]) {
                nearest_cost[i] = at(i, j);
                nearest[i] = j;
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) rescan(i);

    for (std::size_t merge = 0; merge + 1 < n; ++merge) {
        // Global minimum; scanning ascending keeps ties on the lowest pair.
        std::size_t best = n;
        double best_cost = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            if (nearest_cost[i] < best_cost) {
                best_cost = nearest_cost[i];
                best = i;
            }
        }
        std::size_t a = best;
        std::size_t b = nearest[best];
        if (b < a) std::swap(a, b);

        out.merges.emplace_back(a, b);
        out.heights.push_back(best_cost);

        const double na = count[a];
        const double nb = count[b];
        for (std::size_t k = 0; k < dim; ++k)
            centroid[a][k] = (na * centroid[a][k] + nb * centroid[b][k]) / (na + nb);
        count[a] = na + nb;
        active[b] = false;

        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == a) continue;
            const double c = ward_cost(centroid[a], count[a], centroid[j], count[j]);
            at(a, j) = at(j, a) = c;
        }
        rescan(a);
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == a) continue;
            if (nearest[j] == a || nearest[j] == b) {
                rescan(j);
            } else if (at(j, a) < nearest_cost[j]) {
                nearest_cost[j] = at(j, a);
                nearest[j] = a;
            }
        }
    }
    return out;
}

ClusterPartition cut_dendrogram(std::span<const StateVector> points, const Dendrogram& dendro,
                                std::size_t n_merges) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> members(n);
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};

    ClusterPartition part;
    double prev = -kInf;
    for (std::size_t m = 0; m < n_merges; ++m) {
        const auto [a, b] = dendro.merges[m];
        const double h = dendro.heights[m];
        if (h + 1e-9 * (1.0 + std::fabs(prev)) < prev)
            throw std::logic_error("ward_cluster: merge costs decreased");
        prev = h;
        members[a].insert(members[a].end(), members[b].begin(), members[b].end());
        members[b].clear();
        active[b] = false;
        part.merge_heights.push_back(h);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        std::sort(members[i].begin(), members[i].end());
        part.clusters.push_back(std::move(members[i]));
    }
    std::sort(part.clusters.begin(), part.clusters.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });

    const std::size_t dim = n ? points[0].size() : 0;
    for (const auto& cluster : part.clusters) {
        StateVector c(dim, 0.0);
        for (std::size_t idx : cluster)
            for (std::size_t k = 0; k < dim; ++k) c[k] += points[idx][k];
        for (double& v : c) v /= static_cast<double>(cluster.size());
        part.centroids.push_back(std::move(c));
    }
    return part;
}

}  // namespace

std::size_t ClusterPartition::cluster_of(std::size_t point) const {
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (std::size_t idx : clusters[c])
            if (idx == point) return c;
    throw std::out_of_range("ClusterPartition::cluster_of");
}

ClusterPartition ward_cluster(std::span<const StateVector> points, double cutoff) {
    if (points.empty()) throw std::invalid_argument("ward_cluster: no points");
    if (cutoff <= 0.0) throw std::invalid_argument("ward_cluster: cutoff must be positive");
    const Dendrogram dendro = build_dendrogram(points);
    std::size_t n_merges = 0;
    while (n_merges < dendro.heights.size() && dendro.heights[n_merges] <= cutoff) ++n_merges;
    return cut_dendrogram(points, dendro, n_merges);
}

ClusterPartition ward_cluster_count(std::span<const StateVector> points,
                                    std::size_t target_count) {
    if (points.empty()) throw std::invalid_argument("ward_cluster: no points");
    if (target_count < 1) target_count = 1;
    const Dendrogram dendro = build_dendrogram(points);

    // Bisect the cutoff over the (sorted) merge-height range.
    double lo = 0.0;
    double hi = dendro.heights.empty() ? 1.0 : dendro.heights.back() + 1.0;
    auto count_at = [&](double cutoff) {
        std::size_t merges = 0;
        while (merges < dendro.heights.size() && dendro.heights[merges] <= cutoff) ++merges;
        return points.size() - merges;
    };
    if (count_at(hi) > target_count) return cut_dendrogram(points, dendro, dendro.merges.size());
    for (int iter = 0; iter < 200 && count_at(lo) != target_count; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (count_at(mid) >= target_count) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    std::size_t n_merges = 0;
    while (n_merges < dendro.heights.size() && dendro.heights[n_merges] <= lo) ++n_merges;
    return cut_dendrogram(points, dendro, n_merges);
}

std::size_t region_select(const ClusterPartition& partition,
                          std::span<const double> per_state_uncertainty, Rng& rng,
                          double* chosen_score, int* chosen_cluster) {
    if (partition.clusters.empty()) throw std::invalid_argument("region_select: empty partition");

    std::size_t best = 0;
    double best_score = -kInf;
    for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
        double sum = 0.0;
        for (std::size_t idx : partition.clusters[c]) {
            if (idx >= per_state_uncertainty.size())
                throw std::invalid_argument("region_select: uncertainties do not align with points");
            sum += per_state_uncertainty[idx];
        }
        const double score = sum / static_cast<double>(partition.clusters[c].size());
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    if (chosen_score) *chosen_score = best_score;
    if (chosen_cluster) *chosen_cluster = static_cast<int>(best);
    const auto& members = partition.clusters[best];
    return members[rng.uniform_index(members.size())];
}

}  // namespace readc
