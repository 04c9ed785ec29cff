#pragma once

#include <cstdint>
#include <vector>

#include "mlpr/instance.hpp"

namespace mlpr {

/// m feasible tours with their objectives and 1-based ascending-objective
/// rankings (ties broken by sample index).
struct SampleBatch {
    std::vector<std::vector<int>> tours;
    Vector objectives;
    std::vector<int> rankings;
    int m = 0;
};

/// Instrumentation for the SOP sampler's work-bound check.
struct SopWorkStats {
    std::uint64_t successor_visits = 0;
    std::uint64_t placements = 0;
};

/// Paper default: m = 100 n samples.
inline int default_sample_count(int n) { return 100 * n; }

/// Objective of a tour: consecutive edge costs plus the closing edge.
/// Throws if order is not a city-1-first permutation.
double tour_cost(const Instance& instance, const std::vector<int>& order);

/// m uniform random permutations fixing city 1 first. TSP/ATSP only.
/// Deterministic per (instance, m, seed) at any thread count: samples are
/// generated in fixed chunks with RNG streams derived from (seed, chunk).
SampleBatch sample_tours(const Instance& instance, int m, std::uint64_t seed);

/// Precedence-respecting sampler: each tour grows by drawing uniformly from
/// the candidate set of cities whose predecessors have all been placed,
/// releasing successors as their remaining-precedence count hits zero.
SampleBatch sample_sop_tours(const Instance& instance, int m, std::uint64_t seed,
                             SopWorkStats* stats = nullptr);

/// The rank-1 sample.
Tour best_sample(const SampleBatch& batch);

} // namespace mlpr
