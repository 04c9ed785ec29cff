#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlpr/instance.hpp"
#include "mlpr/svm.hpp"

namespace mlpr {

enum class ReductionMethod { Mlpr, Cbm, Cmsa };

const char* reduction_method_name(ReductionMethod method);

struct ReductionResult {
    EdgeMask mask;
    std::vector<std::pair<int, int>> guard_edges; // best-sample tour edges, force-kept
    Tour guard_tour;                              // feasibility witness
    double remaining_fraction = 0.0;              // kept / universe, percent
    ReductionMethod method = ReductionMethod::Mlpr;
    std::uint64_t sample_seed = 0;
    int m = 0;
};

struct ReduceOptions {
    /// Number of best samples whose edges are force-kept. The paper's guard
    /// uses the single best sample.
    int guard_top_k = 1;
};

/// Alg. 1 steps 3-5 on an unseen instance: sample m tours, build the
/// unlabeled feature table, predict, keep the positive edges, then force-keep
/// the guard edges so the reduced instance stays feasible.
ReductionResult reduce_mlpr(const Instance& instance, const SvmModel& model, int m,
                            std::uint64_t seed, const ReduceOptions& options = {});

/// Correlation baseline: keep edges whose raw correlation measure is <= 0
/// (never-sampled edges count as 0 and are kept), plus the guard.
ReductionResult reduce_cbm(const Instance& instance, int m, std::uint64_t seed,
                           const ReduceOptions& options = {});

/// First-iteration CMSA baseline: construct `samples` tours (default n)
/// choosing the next city with probability proportional to 1/(1+cost), and
/// keep exactly the union of constructed edges. Costs at or below -1 are
/// rejected. SOP constructions draw from the precedence-ready candidates.
ReductionResult reduce_cmsa(const Instance& instance, std::uint64_t seed, int samples = -1,
                            const ReduceOptions& options = {});

} // namespace mlpr
