#include "mlpr/instance_io.hpp"

#include "mlpr/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace mlpr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct NumberStream {
    const std::vector<std::pair<int, std::string>>& lines; // (line number, content)
    std::size_t pos = 0;
    std::istringstream current;
    int current_line = 0;

    explicit NumberStream(const std::vector<std::pair<int, std::string>>& l) : lines(l) {}

    bool next(double& out) {
        for (;;) {
            if (current >> out) return true;
            if (pos >= lines.size()) return false;
            current_line = lines[pos].first;
            current = std::istringstream(lines[pos].second);
            ++pos;
        }
    }

    double require(const char* what) {
        double v;
        if (!next(v)) throw ParseError(current_line, std::string("expected ") + what);
        return v;
    }
};

struct HeaderField {
    std::string key, value;
    int line;
};

} // namespace

Instance parse_tsplib(const std::string& text, CostRounding rounding) {
    std::vector<std::pair<int, std::string>> raw;
    {
        std::istringstream in(text);
        std::string line;
        int num = 0;
        while (std::getline(in, line)) raw.emplace_back(++num, trim(line));
    }

    std::string name = "unnamed", type = "TSP", weight_type, weight_format;
    int n = 0, dimension_line = 0;
    std::vector<std::pair<int, std::string>> section_data;
    std::string section; // NODE_COORD_SECTION or EDGE_WEIGHT_SECTION
    int section_line = 0;

    for (const auto& [num, line] : raw) {
        if (line.empty()) continue;
        if (line == "EOF") break;
        if (line == "NODE_COORD_SECTION" || line == "EDGE_WEIGHT_SECTION") {
            if (!section.empty())
                throw ParseError(num, "multiple data sections are not supported");
            section = line;
            section_line = num;
            continue;
        }
        if (!section.empty()) {
            section_data.emplace_back(num, line);
            continue;
        }
        const auto colon = line.find(':');
        std::string key = trim(colon == std::string::npos ? line : line.substr(0, colon));
        std::string value = colon == std::string::npos ? "" : trim(line.substr(colon + 1));
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (key == "NAME") name = value;
        else if (key == "TYPE") type = value;
        else if (key == "DIMENSION") {
            try {
                n = std::stoi(value);
            } catch (const std::exception&) {
                throw ParseError(num, "malformed DIMENSION value '" + value + "'");
            }
            dimension_line = num;
        } else if (key == "EDGE_WEIGHT_TYPE") weight_type = value;
        else if (key == "EDGE_WEIGHT_FORMAT") weight_format = value;
        else if (key == "COMMENT" || key == "DISPLAY_DATA_TYPE" || key == "NODE_COORD_TYPE") {
            // informational, ignored
        } else {
            throw ParseError(num, "unrecognized header keyword '" + key + "'");
        }
    }

    if (n < 3)
        throw ParseError(dimension_line, "DIMENSION must declare at least 3 cities");
    if (section.empty()) throw ParseError(static_cast<int>(raw.size()), "missing data section");

    ProblemKind kind = ProblemKind::SymmetricTsp;
    if (type == "ATSP") kind = ProblemKind::AsymmetricTsp;
    else if (type == "SOP") kind = ProblemKind::Sop;
    else if (type != "TSP" && !type.empty())
        throw ParseError(section_line, "unsupported TYPE '" + type + "'");

    NumberStream nums(section_data);
    Matrix costs = Matrix::Zero(n, n);

    if (section == "NODE_COORD_SECTION") {
        if (weight_type != "EUC_2D")
            throw ParseError(section_line,
                             "unsupported EDGE_WEIGHT_TYPE '" + weight_type +
                                 "' for coordinates (only EUC_2D)");
        std::vector<std::pair<double, double>> pts(n);
        std::vector<std::uint8_t> seen(n, 0);
        for (int r = 0; r < n; ++r) {
            const int id = static_cast<int>(nums.require("node id"));
            if (id < 1 || id > n) throw ParseError(nums.current_line, "node id out of range");
            if (seen[id - 1]) throw ParseError(nums.current_line, "duplicate node id");
            seen[id - 1] = 1;
            pts[id - 1].first = nums.require("x coordinate");
            pts[id - 1].second = nums.require("y coordinate");
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double d = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
                if (rounding == CostRounding::NearestInteger) d = std::nearbyint(d);
                costs(i, j) = costs(j, i) = d;
            }
        return Instance(n, std::move(costs), kind, {}, name);
    }

    // EDGE_WEIGHT_SECTION
    if (!weight_type.empty() && weight_type != "EXPLICIT")
        throw ParseError(section_line, "unsupported EDGE_WEIGHT_TYPE '" + weight_type + "'");

    if (weight_format == "LOWER_DIAG_ROW") {
        if (kind != ProblemKind::SymmetricTsp)
            throw ParseError(section_line, "LOWER_DIAG_ROW requires a symmetric instance");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v = nums.require("matrix entry");
                if (i != j) costs(i, j) = costs(j, i) = v;
            }
        double extra;
        if (nums.next(extra)) throw ParseError(nums.current_line, "matrix has extra entries");
        return Instance(n, std::move(costs), kind, {}, name);
    }

    if (!weight_format.empty() && weight_format != "FULL_MATRIX")
        throw ParseError(section_line, "unsupported EDGE_WEIGHT_FORMAT '" + weight_format + "'");

    std::vector<double> values;
    double v;
    while (nums.next(v)) values.push_back(v);
    // SOP files conventionally repeat the dimension as the first entry.
    if (kind == ProblemKind::Sop &&
        values.size() == static_cast<std::size_t>(n) * n + 1 && values.front() == n)
        values.erase(values.begin());
    if (values.size() != static_cast<std::size_t>(n) * n)
        throw ParseError(nums.current_line,
                         "matrix is not square: expected " + std::to_string(n * n) +
                             " entries, found " + std::to_string(values.size()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) costs(i, j) = values[static_cast<std::size_t>(i) * n + j];
    costs.diagonal().setZero();

    std::vector<PrecedencePair> precedence;
    if (kind == ProblemKind::Sop) {
        double magnitude = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && costs(i, j) != -1.0) magnitude += std::abs(costs(i, j));
        const double sentinel = magnitude + 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j || costs(i, j) != -1.0) continue;
                precedence.emplace_back(j, i); // column city precedes row city
                costs(i, j) = costs(j, i) != -1.0 ? costs(j, i) : sentinel;
            }
        if (!precedence.empty() &&
            std::any_of(precedence.begin(), precedence.end(),
                        [](const PrecedencePair& p) { return p.second == 0; }))
            throw ParseError(section_line, "precedence constrains the start city to be preceded");
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (kind == ProblemKind::SymmetricTsp && costs(i, j) != costs(j, i))
                    throw ParseError(section_line, "symmetric instance has asymmetric entries");
    }

    try {
        return Instance(n, std::move(costs), kind, std::move(precedence), name);
    } catch (const std::invalid_argument& e) {
        throw ParseError(section_line, e.what());
    }
}

std::string write_tsplib(const Instance& instance) {
    std::ostringstream out;
    const char* type = instance.kind() == ProblemKind::SymmetricTsp   ? "TSP"
                       : instance.kind() == ProblemKind::AsymmetricTsp ? "ATSP"
                                                                       : "SOP";
    out << "NAME: " << instance.name() << "\n"
        << "TYPE: " << type << "\n"
        << "DIMENSION: " << instance.n() << "\n"
        << "EDGE_WEIGHT_TYPE: EXPLICIT\n"
        << "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
        << "EDGE_WEIGHT_SECTION\n";
    const int n = instance.n();
    Matrix costs = instance.costs();
    for (const auto& [a, b] : instance.precedence()) costs(b, a) = -1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j) out << ' ';
            out << format_number(i == j ? 0.0 : costs(i, j));
        }
        out << "\n";
    }
    out << "EOF\n";
    return out.str();
}

std::string write_reduced(const Instance& instance, const EdgeMask& mask, ReducedFormat mode) {
    if (!mask.matches(instance))
        throw std::invalid_argument("write_reduced: mask does not match instance");
    std::ostringstream out;
    if (mode == ReducedFormat::SparseEdgeList) {
        out << "n " << instance.n() << " directed " << (instance.directed() ? 1 : 0)
            << " edges " << mask.kept_count() << "\n";
        const auto& pairs = instance.edge_pairs();
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            if (!mask.kept[e]) continue;
            out << (pairs[e].first + 1) << ' ' << (pairs[e].second + 1) << ' '
                << format_number(instance.cost(pairs[e].first, pairs[e].second)) << "\n";
        }
        return out.str();
    }

    const double penalty = instance.removal_penalty();
    Matrix costs = instance.costs();
    const auto& pairs = instance.edge_pairs();
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (mask.kept[e]) continue;
        costs(pairs[e].first, pairs[e].second) = penalty;
        if (!instance.directed()) costs(pairs[e].second, pairs[e].first) = penalty;
    }
    Instance penalized(instance.n(), std::move(costs), instance.kind(), instance.precedence(),
                       instance.name() + "-reduced");
    return write_tsplib(penalized);
}

SparseReduced parse_sparse_reduced(const std::string& text) {
    std::istringstream in(text);
    std::string tag_n, tag_dir, tag_edges;
    int n = 0, directed = 0;
    long long k = 0;
    if (!(in >> tag_n >> n >> tag_dir >> directed >> tag_edges >> k) || tag_n != "n" ||
        tag_dir != "directed" || tag_edges != "edges")
        throw ParseError(1, "malformed sparse header (want: n <n> directed <0|1> edges <k>)");
    if (n < 3) throw ParseError(1, "sparse header declares fewer than 3 cities");

    struct Entry {
        int i, j;
        double cost;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(k));
    double magnitude = 0.0;
    for (long long e = 0; e < k; ++e) {
        Entry entry{};
        if (!(in >> entry.i >> entry.j >> entry.cost))
            throw ParseError(static_cast<int>(e) + 2, "expected 'i j cost' edge line");
        if (entry.i < 1 || entry.i > n || entry.j < 1 || entry.j > n || entry.i == entry.j)
            throw ParseError(static_cast<int>(e) + 2, "edge endpoints out of range");
        --entry.i;
        --entry.j;
        magnitude += std::abs(entry.cost);
        entries.push_back(entry);
    }

    const double sentinel = magnitude + 1.0;
    Matrix costs = Matrix::Constant(n, n, sentinel);
    costs.diagonal().setZero();
    const ProblemKind kind = directed ? ProblemKind::AsymmetricTsp : ProblemKind::SymmetricTsp;
    Instance shape(n, Matrix::Zero(n, n), kind, {}, "sparse");
    EdgeMask mask = EdgeMask::none_kept(shape);
    for (const auto& entry : entries) {
        costs(entry.i, entry.j) = entry.cost;
        if (!directed) costs(entry.j, entry.i) = entry.cost;
        mask.kept[shape.edge_index(entry.i, entry.j)] = 1;
    }
    return SparseReduced{Instance(n, std::move(costs), kind, {}, "sparse"), std::move(mask)};
}

std::string write_mtz_lp(const Instance& instance, const EdgeMask& mask) {
    if (!mask.matches(instance))
        throw std::invalid_argument("write_mtz_lp: mask does not match instance");
    const int n = instance.n();

    // Ordered pairs with a variable: both orientations of kept undirected edges.
    std::vector<std::pair<int, int>> vars;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && mask.kept[instance.edge_index(i, j)]) vars.emplace_back(i, j);

    auto var_name = [](int i, int j) {
        return "x_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    };

    std::ostringstream out;
    out << "\\ MTZ model for " << instance.name() << "\n";
    out << "Minimize\n obj:";
    bool first = true;
    for (const auto& [i, j] : vars) {
        const double c = instance.cost(i, j);
        if (first) {
            out << ' ' << format_number(c);
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ") << format_number(std::abs(c));
        }
        out << ' ' << var_name(i, j);
    }
    out << "\nSubject To\n";
    for (int i = 0; i < n; ++i) {
        std::ostringstream row;
        bool any = false;
        for (int j = 0; j < n; ++j)
            if (i != j && mask.kept[instance.edge_index(i, j)]) {
                row << (any ? " + " : "") << var_name(i, j);
                any = true;
            }
        if (!any)
            throw std::invalid_argument("write_mtz_lp: mask leaves city " + std::to_string(i + 1) +
                                        " with no outgoing edges");
        out << " out_" << (i + 1) << ": " << row.str() << " = 1\n";
    }
    for (int j = 0; j < n; ++j) {
        std::ostringstream row;
        bool any = false;
        for (int i = 0; i < n; ++i)
            if (i != j && mask.kept[instance.edge_index(i, j)]) {
                row << (any ? " + " : "") << var_name(i, j);
                any = true;
            }
        if (!any)
            throw std::invalid_argument("write_mtz_lp: mask leaves city " + std::to_string(j + 1) +
                                        " with no incoming edges");
        out << " in_" << (j + 1) << ": " << row.str() << " = 1\n";
    }
    for (const auto& [i, j] : vars) {
        if (i == 0 || j == 0) continue;
        out << " mtz_" << (i + 1) << "_" << (j + 1) << ": u_" << (i + 1) << " - u_" << (j + 1)
            << " + " << n << ' ' << var_name(i, j) << " <= " << (n - 1) << "\n";
    }
    for (const auto& [a, b] : instance.precedence()) {
        if (a == 0) continue; // the start city is first by construction
        out << " prec_" << (a + 1) << "_" << (b + 1) << ": u_" << (a + 1) << " - u_" << (b + 1)
            << " <= -1\n";
    }
    out << "Bounds\n";
    for (int i = 1; i < n; ++i) out << " u_" << (i + 1) << " >= 0\n";
    out << "Binaries\n ";
    for (std::size_t v = 0; v < vars.size(); ++v) {
        out << var_name(vars[v].first, vars[v].second);
        if (v + 1 == vars.size()) out << "\n";
        else out << (v % 8 == 7 ? "\n " : " ");
    }
    out << "End\n";
    return out.str();
}

} // namespace mlpr
