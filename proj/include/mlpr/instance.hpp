#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mlpr/types.hpp"

namespace mlpr {

enum class ProblemKind { SymmetricTsp, AsymmetricTsp, Sop };

/// Ordered precedence pair: first must be visited before second.
/// Cities are 0-based internally; city 0 is the fixed tour start.
using PrecedencePair = std::pair<int, int>;

/// A TSP / ATSP / SOP instance on a complete graph. Immutable after
/// construction and safe to share across threads.
///
/// The edge universe is canonical: undirected edges keyed by (i < j) for
/// symmetric instances, ordered pairs (i, j), i != j otherwise. The diagonal
/// of the cost matrix is never read.
class Instance {
public:
    Instance(int n, Matrix costs, ProblemKind kind,
             std::vector<PrecedencePair> precedence = {}, std::string name = "");

    int n() const { return n_; }
    ProblemKind kind() const { return kind_; }
    bool symmetric() const { return kind_ == ProblemKind::SymmetricTsp; }
    bool directed() const { return kind_ != ProblemKind::SymmetricTsp; }
    const Matrix& costs() const { return costs_; }
    double cost(int i, int j) const { return costs_(i, j); }
    const std::vector<PrecedencePair>& precedence() const { return precedence_; }
    const std::string& name() const { return name_; }

    int edge_count() const { return directed() ? n_ * (n_ - 1) : n_ * (n_ - 1) / 2; }

    /// Canonical edge index of the pair (i, j). For symmetric instances both
    /// orientations map to the i < j key.
    int edge_index(int i, int j) const {
        if (directed()) return i * (n_ - 1) + j - (j > i ? 1 : 0);
        if (i > j) std::swap(i, j);
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    /// Edge endpoints in canonical order, one entry per edge index.
    const std::vector<std::pair<int, int>>& edge_pairs() const { return edge_pairs_; }

    /// Sum of |cost| over the edge universe, plus one: strictly dominates any
    /// tour that avoids penalized edges.
    double removal_penalty() const;

private:
    int n_;
    Matrix costs_;
    ProblemKind kind_;
    std::vector<PrecedencePair> precedence_;
    std::string name_;
    std::vector<std::pair<int, int>> edge_pairs_;
};

/// Kept-edge mask over an instance's canonical edge universe.
struct EdgeMask {
    int n = 0;
    bool directed = false;
    std::vector<std::uint8_t> kept;

    static EdgeMask all_kept(const Instance& instance);
    static EdgeMask none_kept(const Instance& instance);

    std::size_t size() const { return kept.size(); }
    std::size_t kept_count() const;
    bool matches(const Instance& instance) const;
};

/// A tour: permutation of all cities beginning at city 0, plus its cost
/// (closing edge included).
struct Tour {
    std::vector<int> order;
    double cost = 0.0;
};

/// Throws std::invalid_argument unless order is a permutation of 0..n-1
/// starting at city 0.
void require_permutation(const Instance& instance, const std::vector<int>& order);

} // namespace mlpr
