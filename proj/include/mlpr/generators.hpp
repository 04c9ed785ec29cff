#pragma once

#include <cstdint>

#include "mlpr/instance.hpp"

namespace mlpr {

enum class CostRounding { NearestInteger, Exact };

/// Random symmetric Euclidean instance: n integer coordinate pairs drawn
/// uniformly from [0, coord_max]^2, costs rounded to the nearest integer by
/// default (library convention for 2D-Euclidean data). Deterministic per seed.
Instance generate_random_euclidean(int n, int coord_max, std::uint64_t seed,
                                   CostRounding rounding = CostRounding::NearestInteger);

/// Clustered variant: cities are drawn around `clusters` uniformly placed
/// centers with Gaussian spread coord_max/20. Used by the characteristics
/// experiment axis as a cost structure distinct from uniform points.
Instance generate_clustered_euclidean(int n, int coord_max, int clusters, std::uint64_t seed,
                                      CostRounding rounding = CostRounding::NearestInteger);

/// Symmetric instance with uniform integer costs in [1, cost_max].
Instance generate_random_matrix(int n, int cost_max, std::uint64_t seed);

/// Asymmetric instance with independent uniform integer costs in [1, cost_max].
Instance generate_random_atsp(int n, int cost_max, std::uint64_t seed);

/// SOP instance: asymmetric uniform integer costs plus `precedence_count`
/// random acyclic precedence pairs among cities 2..n (the start city is never
/// constrained). Entries (b, a) for a precedence (a, b) are mirrored from
/// (a, b) so the instance round-trips through the SOP file encoding.
Instance generate_random_sop(int n, int cost_max, int precedence_count, std::uint64_t seed);

} // namespace mlpr
