#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlpr/instance.hpp"
#include "mlpr/sampling.hpp"

namespace mlpr {

/// Per-edge feature rows (f1..f6) in canonical edge order, with optional
/// +/-1 labels when an optimal tour was supplied.
struct EdgeFeatureTable {
    std::vector<std::pair<int, int>> edges;
    FeatureMatrix features;
    std::optional<Eigen::VectorXi> labels;
    std::string instance_name;

    Eigen::Index rows() const { return features.rows(); }
};

/// Streaming accumulator state for the two statistical measures: per-edge
/// ranking score f_r, presence mean, presence-weighted objective deviation
/// sum s1, the finalized correlation f_c, and the global objective stats.
struct MeasureAccumulator {
    Vector f_r;
    Vector presence; // mean presence x-bar per edge
    Vector s1;
    Vector f_c;
    double y_mean = 0.0;
    double y_diff = 0.0; // sum of (y - y_mean); kept literal for the identities
    double y_var = 0.0;  // sum of squared deviations
};

/// Graph features f1..f4 per edge. f1/f3 compare the edge cost against the
/// min/mean of its row, f2/f4 against its column, each normalized by the
/// row/column max-min spread. Self-loops are excluded from every statistic;
/// a zero spread yields feature 0. Returned matrix has 4 columns.
Eigen::Matrix<double, Eigen::Dynamic, 4> graph_features(const Instance& instance);

/// One pass over each tour's n edges accumulates f_r += 1/rank,
/// presence += 1/m and s1 += (y - y_mean); f_c then follows from the
/// simplified Pearson form. Degenerate edges (presence 0 or 1, or constant
/// objectives) get f_c = 0, which also covers the m = 1 ranking-only case.
/// Symmetric instances accumulate both traversal directions into the
/// undirected key. Deterministic at any thread count.
MeasureAccumulator statistical_measures(const Instance& instance, const SampleBatch& batch);

/// f5 = f_r / max f_r (all zero when max is 0); f6 = f_c / min f_c where the
/// min is the most negative value (all zero when min f_c >= 0).
std::pair<Vector, Vector> normalize_measures(const Vector& f_r, const Vector& f_c);

/// +1 for edges traversed by the optimal tour, -1 elsewhere. Throws on an
/// infeasible tour.
Eigen::VectorXi label_edges(const Instance& instance, const Tour& optimal);

/// Composes graph features, statistical measures and (optionally) labels.
EdgeFeatureTable build_feature_table(const Instance& instance, const SampleBatch& batch,
                                     const Tour* optimal = nullptr);

/// CSV dump with header "i,j,f1,f2,f3,f4,f5,f6,label" (1-based endpoints;
/// label column empty when absent).
std::string feature_table_csv(const EdgeFeatureTable& table);

} // namespace mlpr
