#include "mlpr/instance.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mlpr {

namespace {

// Kahn toposort; throws if the relation is cyclic.
void check_acyclic(int n, const std::vector<PrecedencePair>& precedence) {
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> succ(n);
    for (const auto& [a, b] : precedence) {
        succ[a].push_back(b);
        ++indegree[b];
    }
    std::vector<int> ready;
    for (int v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push_back(v);
    int placed = 0;
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        ++placed;
        for (int w : succ[v])
            if (--indegree[w] == 0) ready.push_back(w);
    }
    if (placed != n) throw std::invalid_argument("precedence relation is cyclic");
}

} // namespace

Instance::Instance(int n, Matrix costs, ProblemKind kind,
                   std::vector<PrecedencePair> precedence, std::string name)
    : n_(n), costs_(std::move(costs)), kind_(kind),
      precedence_(std::move(precedence)), name_(std::move(name)) {
    if (n_ < 3) throw std::invalid_argument("instance needs at least 3 cities");
    if (costs_.rows() != n_ || costs_.cols() != n_)
        throw std::invalid_argument("cost matrix must be n x n");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (i != j && !std::isfinite(costs_(i, j)))
                throw std::invalid_argument("edge costs must be finite");
    if (kind_ == ProblemKind::SymmetricTsp) {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (costs_(i, j) != costs_(j, i))
                    throw std::invalid_argument("symmetric instance has asymmetric costs");
    }
    if (kind_ != ProblemKind::Sop && !precedence_.empty())
        throw std::invalid_argument("precedence pairs are only valid for SOP instances");
    for (const auto& [a, b] : precedence_) {
        if (a < 0 || a >= n_ || b < 0 || b >= n_ || a == b)
            throw std::invalid_argument("precedence pair out of range");
        if (b == 0)
            throw std::invalid_argument("precedence may not constrain the start city to be preceded");
    }
    check_acyclic(n_, precedence_);

    edge_pairs_.reserve(static_cast<std::size_t>(edge_count()));
    if (directed()) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (i != j) edge_pairs_.emplace_back(i, j);
    } else {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) edge_pairs_.emplace_back(i, j);
    }
}

double Instance::removal_penalty() const {
    double total = 0.0;
    for (const auto& [i, j] : edge_pairs_) total += std::abs(costs_(i, j));
    return total + 1.0;
}

EdgeMask EdgeMask::all_kept(const Instance& instance) {
    return EdgeMask{instance.n(), instance.directed(),
                    std::vector<std::uint8_t>(instance.edge_count(), 1)};
}

EdgeMask EdgeMask::none_kept(const Instance& instance) {
    return EdgeMask{instance.n(), instance.directed(),
                    std::vector<std::uint8_t>(instance.edge_count(), 0)};
}

std::size_t EdgeMask::kept_count() const {
    return static_cast<std::size_t>(
        std::accumulate(kept.begin(), kept.end(), std::size_t{0}));
}

bool EdgeMask::matches(const Instance& instance) const {
    return n == instance.n() && directed == instance.directed() &&
           kept.size() == static_cast<std::size_t>(instance.edge_count());
}

void require_permutation(const Instance& instance, const std::vector<int>& order) {
    const int n = instance.n();
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("tour length does not match city count");
    if (order[0] != 0) throw std::invalid_argument("tours must start at city 1");
    std::vector<std::uint8_t> seen(n, 0);
    for (int city : order) {
        if (city < 0 || city >= n || seen[city])
            throw std::invalid_argument("tour is not a permutation of the cities");
        seen[city] = 1;
    }
}

} // namespace mlpr
