#pragma once

#include <cstdint>
#include <stdexcept>

#include "mlpr/instance.hpp"

namespace mlpr {

class CapExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveReport {
    Tour tour;
    bool optimal = false; // proved, as opposed to best-so-far / heuristic
    std::uint64_t nodes_expanded = 0;
    double wall_seconds = 0.0;
};

struct SolveOptions {
    /// Deterministic search budget; 0 means unlimited. Preferred for
    /// experiments so reruns are bit-identical.
    std::uint64_t node_limit = 0;
    /// Wall-clock budget in seconds; 0 means none. Nondeterministic: only for
    /// interactive use.
    double time_limit_seconds = 0.0;
    /// Subset-DP city cap (memory is O(2^n n)).
    int held_karp_cap = 18;
    /// Warm-start effort for the branch-and-bound upper bound.
    int restarts = 8;
    std::uint64_t seed = 1;
};

/// Exact subset DP in O(2^n n^2). Works for TSP/ATSP and honors a mask
/// (removed edges are unusable). Throws CapExceededError above the cap and
/// InfeasibleError when the masked instance has no tour.
SolveReport solve_held_karp(const Instance& instance, const EdgeMask* mask = nullptr,
                            const SolveOptions& options = {});

/// Depth-first branch-and-bound over partial paths from city 1. Lower bound:
/// path cost plus half the sum of each unvisited city's two cheapest usable
/// incident edges for symmetric instances (plus the two path endpoints'
/// cheapest usable edges into the unvisited set), or the cheapest usable
/// outgoing edges for directed ones. Precedence-aware, so it extends the SOP
/// exact range too. On budget exhaustion returns best-so-far with
/// optimal=false. warm_start, when given, must be feasible and seeds the
/// upper bound.
SolveReport solve_bnb(const Instance& instance, const EdgeMask* mask = nullptr,
                      const SolveOptions& options = {}, const Tour* warm_start = nullptr);

/// Exact SOP oracle: subset DP where a state is admissible only when every
/// placed city has all its predecessors placed.
SolveReport solve_sop_exact(const Instance& instance, const SolveOptions& options = {});

/// First-improvement 2-opt to local optimality, using only kept edges when a
/// mask is given. For directed instances segment reversal is costed exactly;
/// for SOP only precedence-preserving reversals are applied. Never worsens.
Tour improve_2opt(const Instance& instance, const Tour& tour, const EdgeMask* mask = nullptr);

/// True iff order is a city-1-first permutation, every traversed edge is kept
/// (when a mask is given), and every precedence pair is respected.
bool validate_tour(const Instance& instance, const Tour& tour, const EdgeMask* mask = nullptr);

/// Best of `restarts` 2-opt descents from randomized starts (random
/// permutations when unmasked; mask-valid perturbations of warm otherwise).
/// Deterministic per seed. A mask requires a warm tour.
Tour multistart_2opt(const Instance& instance, const EdgeMask* mask, const Tour* warm_start,
                     int restarts, std::uint64_t seed);

} // namespace mlpr
