#pragma once

#include <span>
#include <vector>

#include "readc/env.hpp"
#include "readc/rng.hpp"

namespace readc {

// Result of agglomerative clustering. Clusters are ordered by their smallest
// member index; members are sorted ascending.
struct ClusterPartition {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<StateVector> centroids;
    // Ward merge costs in acceptance order; nondecreasing.
    std::vector<double> merge_heights;

    std::size_t cluster_of(std::size_t point) const;
};

// Bottom-up Ward agglomeration: repeatedly merges the pair minimizing the
// variance increase (n_i*n_j)/(n_i+n_j) * ||c_i - c_j||^2, stopping once the
// cheapest merge exceeds the cutoff. Ties break to the lowest slot pair.
ClusterPartition ward_cluster(std::span<const StateVector> points, double cutoff);

// Bisection on the cutoff until the partition has target_count clusters (or
// the nearest attainable count when tied merge heights skip it).
ClusterPartition ward_cluster_count(std::span<const StateVector> points,
                                    std::size_t target_count);

// Highest mean-uncertainty cluster (ties to the lowest cluster index), then a
// uniform member of it. Returns the point index.
std::size_t region_select(const ClusterPartition& partition,
                          std::span<const double> per_state_uncertainty, Rng& rng,
                          double* chosen_score = nullptr, int* chosen_cluster = nullptr);

}  // namespace readc
