#include "mlpr/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>

#include "mlpr/parallel.hpp"
#include "mlpr/rng.hpp"

namespace mlpr {

namespace {

void assign_rankings(SampleBatch& batch) {
    std::vector<int> by_objective(batch.m);
    std::iota(by_objective.begin(), by_objective.end(), 0);
    std::stable_sort(by_objective.begin(), by_objective.end(), [&](int a, int b) {
        return batch.objectives[a] < batch.objectives[b];
    });
    batch.rankings.resize(batch.m);
    for (int pos = 0; pos < batch.m; ++pos) batch.rankings[by_objective[pos]] = pos + 1;
}

double cost_unchecked(const Instance& instance, const std::vector<int>& order) {
    const int n = instance.n();
    double total = 0.0;
    for (int p = 0; p + 1 < n; ++p) total += instance.cost(order[p], order[p + 1]);
    return total + instance.cost(order[n - 1], order[0]);
}

} // namespace

double tour_cost(const Instance& instance, const std::vector<int>& order) {
    require_permutation(instance, order);
    return cost_unchecked(instance, order);
}

SampleBatch sample_tours(const Instance& instance, int m, std::uint64_t seed) {
    if (instance.kind() == ProblemKind::Sop)
        throw std::invalid_argument("sample_tours: use sample_sop_tours for SOP instances");
    if (m < 1) throw std::invalid_argument("sample_tours: need m >= 1");

    const int n = instance.n();
    SampleBatch batch;
    batch.m = m;
    batch.tours.assign(m, {});
    batch.objectives.resize(m);

    parallel_chunks(m, [&](int chunk, int begin, int end) {
        Rng rng(mix_seed(seed, 0x53616d70, static_cast<std::uint64_t>(chunk)));
        std::vector<int> order(n);
        for (int k = begin; k < end; ++k) {
            std::iota(order.begin(), order.end(), 0);
            // Unbiased in-place shuffle over positions 2..n (city 1 stays first).
            for (int i = 1; i + 1 < n; ++i) {
                const int j = i + static_cast<int>(rng.below(n - i));
                std::swap(order[i], order[j]);
            }
            batch.objectives[k] = cost_unchecked(instance, order);
            batch.tours[k] = order;
        }
    });

    assign_rankings(batch);
    return batch;
}

SampleBatch sample_sop_tours(const Instance& instance, int m, std::uint64_t seed,
                             SopWorkStats* stats) {
    if (instance.kind() != ProblemKind::Sop)
        throw std::invalid_argument("sample_sop_tours: instance is not a SOP");
    if (m < 1) throw std::invalid_argument("sample_sop_tours: need m >= 1");

    const int n = instance.n();
    // Remaining-precedence counts and successor lists, built once from the
    // precedence set. Cities with no predecessors are released by the start
    // city itself, so the candidate set can begin as {city 1} and the loop
    // stays uniform.
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> successors(n);
    for (const auto& [a, b] : instance.precedence()) {
        successors[a].push_back(b);
        ++indegree[b];
    }
    for (int v = 1; v < n; ++v)
        if (indegree[v] == 0) {
            successors[0].push_back(v);
            indegree[v] = 1;
        }

    SampleBatch batch;
    batch.m = m;
    batch.tours.assign(m, {});
    batch.objectives.resize(m);

    std::atomic<std::uint64_t> total_visits{0};
    std::atomic<std::uint64_t> total_placements{0};
    std::atomic<bool> infeasible{false};

    parallel_chunks(m, [&](int chunk, int begin, int end) {
        Rng rng(mix_seed(seed, 0x536f7053, static_cast<std::uint64_t>(chunk)));
        std::vector<int> remaining(n);
        std::vector<int> candidates;
        std::uint64_t visits = 0, placements = 0;
        for (int k = begin; k < end; ++k) {
            remaining.assign(indegree.begin(), indegree.end());
            candidates.assign(1, 0);
            auto& order = batch.tours[k];
            order.clear();
            order.reserve(n);
            for (int step = 0; step < n; ++step) {
                if (candidates.empty()) {
                    infeasible.store(true);
                    return;
                }
                const std::size_t pick = rng.below(candidates.size());
                const int v = candidates[pick];
                candidates[pick] = candidates.back();
                candidates.pop_back();
                order.push_back(v);
                ++placements;
                for (int w : successors[v]) {
                    ++visits;
                    if (--remaining[w] == 0) candidates.push_back(w);
                }
            }
            batch.objectives[k] = cost_unchecked(instance, order);
        }
        total_visits.fetch_add(visits);
        total_placements.fetch_add(placements);
    });

    if (infeasible.load())
        throw std::invalid_argument(
            "sample_sop_tours: precedence relation is infeasible (candidate set emptied)");
    if (stats) {
        stats->successor_visits = total_visits.load();
        stats->placements = total_placements.load();
    }
    assign_rankings(batch);
    return batch;
}

Tour best_sample(const SampleBatch& batch) {
    if (batch.m < 1) throw std::invalid_argument("best_sample: empty batch");
    for (int k = 0; k < batch.m; ++k)
        if (batch.rankings[k] == 1) return Tour{batch.tours[k], batch.objectives[k]};
    throw std::logic_error("best_sample: no rank-1 sample"); // unreachable
}

} // namespace mlpr
