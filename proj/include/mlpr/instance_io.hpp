#pragma once

#include <stdexcept>
#include <string>

#include "mlpr/generators.hpp"
#include "mlpr/instance.hpp"

namespace mlpr {

/// Parse failure with the offending line number baked into what().
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Parses a TSPLIB-style instance (.tsp/.atsp/.sop subset): explicit full
/// matrix, explicit lower-diagonal, or 2D-Euclidean node coordinates. SOP
/// entries equal to -1 become precedence pairs (column city precedes row
/// city); their stored cost is the transposed entry when that is valid,
/// otherwise a large sentinel.
Instance parse_tsplib(const std::string& text,
                      CostRounding rounding = CostRounding::NearestInteger);

/// Writes an instance as TSPLIB text (explicit full matrix). For SOP the
/// reversed entry of each precedence pair is encoded as -1.
std::string write_tsplib(const Instance& instance);

enum class ReducedFormat { SparseEdgeList, PenalizedFullMatrix };

/// Serializes a reduced instance. Sparse mode lists kept edges only;
/// penalized mode emits a full TSPLIB matrix where removed edges carry
/// (sum of |costs| over the edge universe) + 1.
std::string write_reduced(const Instance& instance, const EdgeMask& mask, ReducedFormat mode);

struct SparseReduced {
    Instance instance;
    EdgeMask mask;
};

/// Reads the sparse-edge-list format back. Edges absent from the file keep
/// the removal-penalty sentinel cost and are cleared in the mask. Directed
/// files come back as asymmetric instances (the sparse format carries no
/// precedence data).
SparseReduced parse_sparse_reduced(const std::string& text);

/// LP-format text of the Miller-Tucker-Zemlin model restricted to kept
/// edges: binary x_i_j per kept ordered pair, assignment rows per city,
/// ordering rows u_i - u_j + n x_i_j <= n-1 for kept pairs with i, j >= 2,
/// and u_i - u_j <= -1 per SOP precedence pair. Names are 1-based.
std::string write_mtz_lp(const Instance& instance, const EdgeMask& mask);

} // namespace mlpr
