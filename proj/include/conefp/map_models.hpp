#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "conefp/cone_metrics.hpp"
#include "conefp/digraph.hpp"
#include "conefp/errors.hpp"
#include "conefp/matrix.hpp"
#include "conefp/positive_vector.hpp"

namespace conefp {

// ---------------------------------------------------------------------------
// Model kinds
// ---------------------------------------------------------------------------

/// Linear map x -> A x with a nonnegative square matrix. Zero rows are
/// rejected so the open orthant maps into itself.
class MatrixMap {
public:
    explicit MatrixMap(Matrix a) : a_(std::move(a)) {
        if (!a_.square() || a_.rows < 1) throw ValidationError("MatrixMap: matrix must be square");
        for (int i = 0; i < a_.rows; ++i) {
            double row_sum = 0.0;
            for (int j = 0; j < a_.cols; ++j) {
                const double e = a_(i, j);
                if (!std::isfinite(e) || e < 0.0)
                    throw ValidationError("MatrixMap: entries must be finite and >= 0");
                row_sum += e;
            }
            if (row_sum == 0.0)
                throw ValidationError("MatrixMap: row " + std::to_string(i + 1) + " is zero");
        }
    }

    static MatrixMap from_rows(const std::vector<std::vector<double>>& rows) {
        const int n = static_cast<int>(rows.size());
        Matrix a(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
                throw ValidationError("MatrixMap: ragged rows");
            for (int j = 0; j < n; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return MatrixMap(std::move(a));
    }

    int dim() const { return a_.rows; }
    const Matrix& matrix() const { return a_; }

    std::vector<double> eval_raw(const std::vector<double>& x) const { return matvec(a_, x); }

    Digraph digraph() const {
        Digraph g(dim());
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                if (a_(i, j) > 0.0) g.add_arc(i, j);
        return g;
    }

private:
    Matrix a_;
};

/// Degree-1 homogeneous map associated with a nonnegative tensor of order m:
/// f(x)_i = (sum_e A_e * x_{e_2} * ... * x_{e_m})^(1/(m-1)).
/// Entries are a sorted coordinate list; duplicates are summed at load.
class TensorMap {
public:
    struct Entry {
        std::vector<int> index;  // 0-based, size == order, first index is the coordinate
        double value;
    };

    TensorMap(int order, int dim, std::vector<Entry> entries)
        : order_(order), dim_(dim), entries_(std::move(entries)) {
        if (order_ < 2) throw ValidationError("TensorMap: order must be >= 2");
        if (dim_ < 1) throw ValidationError("TensorMap: dimension must be >= 1");
        for (const auto& e : entries_) {
            if (static_cast<int>(e.index.size()) != order_)
                throw ValidationError("TensorMap: index tuple length must equal the order");
            for (int ix : e.index)
                if (ix < 0 || ix >= dim_) throw ValidationError("TensorMap: index out of range");
            if (!std::isfinite(e.value) || e.value <= 0.0)
                throw ValidationError("TensorMap: coefficients must be finite and > 0");
        }
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.index < b.index; });
        std::vector<Entry> merged;
        for (auto& e : entries_) {
            if (!merged.empty() && merged.back().index == e.index)
                merged.back().value += e.value;
            else
                merged.push_back(std::move(e));
        }
        entries_ = std::move(merged);

        coord_begin_.assign(static_cast<std::size_t>(dim_) + 1, 0);
        for (const auto& e : entries_) ++coord_begin_[static_cast<std::size_t>(e.index[0]) + 1];
        for (int i = 0; i < dim_; ++i)
            coord_begin_[static_cast<std::size_t>(i) + 1] += coord_begin_[static_cast<std::size_t>(i)];
        for (int i = 0; i < dim_; ++i)
            if (coord_begin_[static_cast<std::size_t>(i)] == coord_begin_[static_cast<std::size_t>(i) + 1])
                throw ValidationError("TensorMap: coordinate " + std::to_string(i + 1) +
                                      " has no entries and would be identically zero");
    }

    int order() const { return order_; }
    int dim() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }

    std::vector<double> eval_raw(const std::vector<double>& x) const {
        const double root = 1.0 / (order_ - 1);
        std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (std::size_t k = coord_begin_[static_cast<std::size_t>(i)];
                 k < coord_begin_[static_cast<std::size_t>(i) + 1]; ++k) {
                const Entry& e = entries_[k];
                double term = e.value;
                for (int t = 1; t < order_; ++t) term *= x[static_cast<std::size_t>(e.index[static_cast<std::size_t>(t)])];
                s += term;
            }
            y[static_cast<std::size_t>(i)] = std::pow(s, root);
        }
        return y;
    }

    Digraph digraph() const {
        Digraph g(dim_);
        for (const auto& e : entries_)
            for (int t = 1; t < order_; ++t) g.add_arc(e.index[0], e.index[static_cast<std::size_t>(t)]);
        return g;
    }

    Matrix jacobian(const std::vector<double>& x) const {
        // d/dx_j of S_i^(1/(m-1)) with S_i the multilinear sum.
        const double root = 1.0 / (order_ - 1);
        Matrix jac(dim_, dim_);
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            std::vector<double> ds(static_cast<std::size_t>(dim_), 0.0);
            for (std::size_t k = coord_begin_[static_cast<std::size_t>(i)];
                 k < coord_begin_[static_cast<std::size_t>(i) + 1]; ++k) {
                const Entry& e = entries_[k];
                double term = e.value;
                for (int t = 1; t < order_; ++t) term *= x[static_cast<std::size_t>(e.index[static_cast<std::size_t>(t)])];
                s += term;
                for (int t = 1; t < order_; ++t) {
                    const int j = e.index[static_cast<std::size_t>(t)];
                    ds[static_cast<std::size_t>(j)] += term / x[static_cast<std::size_t>(j)];
                }
            }
            const double outer = root * std::pow(s, root - 1.0);
            for (int j = 0; j < dim_; ++j) jac(i, j) = outer * ds[static_cast<std::size_t>(j)];
        }
        return jac;
    }

private:
    int order_;
    int dim_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> coord_begin_;  // entries grouped by first index
};

/// Expression node for the map DSL. Leaves are monomials c * prod x_j^a_j
/// with c > 0, a >= 0 and sum(a) = 1, so every tree is degree-1 homogeneous
/// by construction.
class Expr {
public:
    enum class Kind { Monomial, Sum, Max, Min };

    static Expr monomial(double coeff, std::vector<double> exponents) {
        if (!std::isfinite(coeff) || coeff <= 0.0)
            throw ValidationError("Expr: monomial coefficient must be finite and > 0");
        double total = 0.0;
        for (double a : exponents) {
            if (!std::isfinite(a) || a < 0.0)
                throw ValidationError("Expr: monomial exponents must be finite and >= 0");
            total += a;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ValidationError("Expr: monomial exponents must sum to 1");
        Expr e;
        e.kind_ = Kind::Monomial;
        e.coeff_ = coeff;
        e.exponents_ = std::move(exponents);
        return e;
    }

    static Expr sum(std::vector<Expr> children) { return combine(Kind::Sum, std::move(children)); }
    static Expr max(std::vector<Expr> children) { return combine(Kind::Max, std::move(children)); }
    static Expr min(std::vector<Expr> children) { return combine(Kind::Min, std::move(children)); }

    Kind kind() const { return kind_; }
    double coeff() const { return coeff_; }
    const std::vector<double>& exponents() const { return exponents_; }
    const std::vector<Expr>& children() const { return children_; }

    int max_variable() const {
        if (kind_ == Kind::Monomial) {
            for (int j = static_cast<int>(exponents_.size()) - 1; j >= 0; --j)
                if (exponents_[static_cast<std::size_t>(j)] > 0.0) return j;
            return -1;
        }
        int m = -1;
        for (const auto& c : children_) m = std::max(m, c.max_variable());
        return m;
    }

    bool contains(Kind k) const {
        if (kind_ == k) return true;
        for (const auto& c : children_)
            if (c.contains(k)) return true;
        return false;
    }

    double eval(const std::vector<double>& x) const {
        switch (kind_) {
            case Kind::Monomial: {
                double v = coeff_;
                for (std::size_t j = 0; j < exponents_.size(); ++j) {
                    const double a = exponents_[j];
                    if (a == 0.0) continue;
                    v *= (a == 1.0) ? x[j] : std::pow(x[j], a);
                }
                return v;
            }
            case Kind::Sum: {
                double v = 0.0;
                for (const auto& c : children_) v += c.eval(x);
                return v;
            }
            case Kind::Max: {
                double v = children_.front().eval(x);
                for (std::size_t i = 1; i < children_.size(); ++i) v = std::max(v, children_[i].eval(x));
                return v;
            }
            case Kind::Min: {
                double v = children_.front().eval(x);
                for (std::size_t i = 1; i < children_.size(); ++i) v = std::min(v, children_[i].eval(x));
                return v;
            }
        }
        return 0.0;
    }

    /// Value and gradient together. Max/Min follow the strictly active
    /// branch; an exact tie is a nondifferentiable point and is an error.
    double eval_grad(const std::vector<double>& x, std::vector<double>& grad) const {
        switch (kind_) {
            case Kind::Monomial: {
                const double v = eval(x);
                grad.assign(x.size(), 0.0);
                for (std::size_t j = 0; j < exponents_.size(); ++j) {
                    const double a = exponents_[j];
                    if (a > 0.0) grad[j] = a * v / x[j];
                }
                return v;
            }
            case Kind::Sum: {
                grad.assign(x.size(), 0.0);
                std::vector<double> child_grad;
                double v = 0.0;
                for (const auto& c : children_) {
                    v += c.eval_grad(x, child_grad);
                    for (std::size_t j = 0; j < x.size(); ++j) grad[j] += child_grad[j];
                }
                return v;
            }
            case Kind::Max:
            case Kind::Min: {
                int best = 0;
                double best_v = children_.front().eval(x);
                bool tie = false;
                for (std::size_t i = 1; i < children_.size(); ++i) {
                    const double v = children_[i].eval(x);
                    const bool better = (kind_ == Kind::Max) ? v > best_v : v < best_v;
                    if (better) {
                        best = static_cast<int>(i);
                        best_v = v;
                        tie = false;
                    } else if (v == best_v) {
                        tie = true;
                    }
                }
                if (tie)
                    throw NondifferentiablePoint(
                        "Expr: tied branches at a max/min node; no derivative at this point");
                return children_[static_cast<std::size_t>(best)].eval_grad(x, grad);
            }
        }
        return 0.0;
    }

    /// Variables reached by the arc-limit semantics: monomials contribute
    /// their support, sum/max take unions, min takes the intersection.
    std::vector<int> limit_support(int dim) const {
        std::vector<char> mask = limit_mask(dim);
        std::vector<int> out;
        for (int j = 0; j < dim; ++j)
            if (mask[static_cast<std::size_t>(j)]) out.push_back(j);
        return out;
    }

private:
    static Expr combine(Kind k, std::vector<Expr> children) {
        if (children.empty()) throw ValidationError("Expr: node must have at least one child");
        Expr e;
        e.kind_ = k;
        e.children_ = std::move(children);
        return e;
    }

    std::vector<char> limit_mask(int dim) const {
        std::vector<char> mask(static_cast<std::size_t>(dim), 0);
        switch (kind_) {
            case Kind::Monomial:
                for (std::size_t j = 0; j < exponents_.size() && j < mask.size(); ++j)
                    if (exponents_[j] > 0.0) mask[j] = 1;
                break;
            case Kind::Sum:
            case Kind::Max:
                for (const auto& c : children_) {
                    const auto child = c.limit_mask(dim);
                    for (std::size_t j = 0; j < mask.size(); ++j) mask[j] |= child[j];
                }
                break;
            case Kind::Min: {
                mask.assign(static_cast<std::size_t>(dim), 1);
                for (const auto& c : children_) {
                    const auto child = c.limit_mask(dim);
                    for (std::size_t j = 0; j < mask.size(); ++j) mask[j] &= child[j];
                }
                break;
            }
        }
        return mask;
    }

    Kind kind_ = Kind::Monomial;
    double coeff_ = 1.0;
    std::vector<double> exponents_;
    std::vector<Expr> children_;
};

/// Order-preserving homogeneous map given by one expression tree per
/// coordinate.
class ExprMap {
public:
    ExprMap(int dim, std::vector<Expr> coords) : dim_(dim), coords_(std::move(coords)) {
        if (dim_ < 1) throw ValidationError("ExprMap: dimension must be >= 1");
        if (static_cast<int>(coords_.size()) != dim_)
            throw ValidationError("ExprMap: need one expression per coordinate");
        for (const auto& c : coords_)
            if (c.max_variable() >= dim_)
                throw ValidationError("ExprMap: expression references a variable out of range");
        has_min_ = has_max_ = has_sum_ = false;
        for (const auto& c : coords_) {
            has_min_ = has_min_ || c.contains(Expr::Kind::Min);
            has_max_ = has_max_ || c.contains(Expr::Kind::Max);
            has_sum_ = has_sum_ || c.contains(Expr::Kind::Sum);
        }
    }

    int dim() const { return dim_; }
    const std::vector<Expr>& coords() const { return coords_; }
    bool has_min() const { return has_min_; }
    bool has_max() const { return has_max_; }
    bool has_sum() const { return has_sum_; }
    bool smooth() const { return !has_min_ && !has_max_; }

    std::vector<double> eval_raw(const std::vector<double>& x) const {
        std::vector<double> y(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) y[static_cast<std::size_t>(i)] = coords_[static_cast<std::size_t>(i)].eval(x);
        return y;
    }

    Digraph digraph() const {
        Digraph g(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j : coords_[static_cast<std::size_t>(i)].limit_support(dim_)) g.add_arc(i, j);
        return g;
    }

    Matrix jacobian(const std::vector<double>& x) const {
        Matrix jac(dim_, dim_);
        std::vector<double> grad;
        for (int i = 0; i < dim_; ++i) {
            coords_[static_cast<std::size_t>(i)].eval_grad(x, grad);
            for (int j = 0; j < dim_; ++j) jac(i, j) = grad[static_cast<std::size_t>(j)];
        }
        return jac;
    }

private:
    int dim_;
    std::vector<Expr> coords_;
    bool has_min_, has_max_, has_sum_;
};

/// Two bundled 2-d maps of the form exp . T . log whose orbits have known
/// closed forms. Their inner arctan terms are not expressible in the DSL,
/// so evaluation and derivatives are hard coded.
enum class BuiltinTag { Example1, Example2 };

class BuiltinMap {
public:
    explicit BuiltinMap(BuiltinTag tag) : tag_(tag) {}

    static std::optional<BuiltinTag> parse_tag(const std::string& name) {
        if (name == "example1") return BuiltinTag::Example1;
        if (name == "example2") return BuiltinTag::Example2;
        return std::nullopt;
    }

    static std::string tag_name(BuiltinTag tag) {
        return tag == BuiltinTag::Example1 ? "example1" : "example2";
    }

    BuiltinTag tag() const { return tag_; }
    int dim() const { return 2; }

    std::vector<double> eval_raw(const std::vector<double>& x) const {
        if (x.size() != 2) throw DimensionMismatch("BuiltinMap: expected dimension 2");
        if (x[0] <= 0.0 || x[1] <= 0.0)
            throw EvaluationError("BuiltinMap: not defined on the boundary of the orthant");
        const double y1 = std::log(x[0]);
        const double y2 = std::log(x[1]);
        double t1, t2;
        if (tag_ == BuiltinTag::Example1) {
            const double h = 0.5 * (y1 + y2);
            const double a = std::atan(0.5 * (y2 - y1));
            t1 = h - a;
            t2 = h + a;
        } else {
            const double a = std::atan(y2 - y1);
            t1 = std::max(y1, y2 - a);
            t2 = std::max(y2, y1 + a);
        }
        return {std::exp(t1), std::exp(t2)};
    }

    Digraph digraph() const {
        // Hard coded: both maps blow up in every coordinate direction.
        Digraph g(2);
        g.add_arc(0, 0);
        g.add_arc(0, 1);
        g.add_arc(1, 0);
        g.add_arc(1, 1);
        return g;
    }

    Matrix jacobian(const std::vector<double>& x) const {
        if (x.size() != 2) throw DimensionMismatch("BuiltinMap: expected dimension 2");
        const double y1 = std::log(x[0]);
        const double y2 = std::log(x[1]);
        Matrix t_prime(2, 2);
        if (tag_ == BuiltinTag::Example1) {
            const double u = 0.5 * (y2 - y1);
            const double w = 0.5 / (1.0 + u * u);
            t_prime(0, 0) = 0.5 + w;
            t_prime(0, 1) = 0.5 - w;
            t_prime(1, 0) = 0.5 - w;
            t_prime(1, 1) = 0.5 + w;
        } else {
            const double d = y2 - y1;
            if (d == 0.0)
                throw NondifferentiablePoint("BuiltinMap: tied max branches on the diagonal");
            const double w = 1.0 / (1.0 + d * d);
            if (d > 0.0) {
                t_prime(0, 0) = w;
                t_prime(0, 1) = 1.0 - w;
                t_prime(1, 0) = 0.0;
                t_prime(1, 1) = 1.0;
            } else {
                t_prime(0, 0) = 1.0;
                t_prime(0, 1) = 0.0;
                t_prime(1, 0) = 1.0 - w;
                t_prime(1, 1) = w;
            }
        }
        const auto fx = eval_raw(x);
        Matrix jac(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) jac(i, j) = fx[static_cast<std::size_t>(i)] * t_prime(i, j) / x[static_cast<std::size_t>(j)];
        return jac;
    }

private:
    BuiltinTag tag_;
};

// ---------------------------------------------------------------------------
// Unified model
// ---------------------------------------------------------------------------

enum class MapKind { Matrix, Tensor, Expr, Builtin };

/// Value-semantic wrapper over the representable map kinds. Immutable after
/// construction; eval and jacobian are pure, so concurrent use is fine.
class MapModel {
public:
    MapModel(MatrixMap m) : model_(std::move(m)) {}
    MapModel(TensorMap m) : model_(std::move(m)) {}
    MapModel(ExprMap m) : model_(std::move(m)) {}
    MapModel(BuiltinMap m) : model_(std::move(m)) {}

    MapKind kind() const { return static_cast<MapKind>(model_.index()); }

    std::string kind_name() const {
        switch (kind()) {
            case MapKind::Matrix: return "matrix";
            case MapKind::Tensor: return "tensor";
            case MapKind::Expr: return "expr";
            case MapKind::Builtin: return "builtin";
        }
        return "unknown";
    }

    int dim() const {
        return std::visit([](const auto& m) { return m.dim(); }, model_);
    }

    /// Evaluation on the closed orthant, used by coordinate restrictions.
    /// Builtin maps cannot be evaluated on the boundary and throw there.
    std::vector<double> eval_raw(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != dim())
            throw DimensionMismatch("MapModel::eval: dimension mismatch");
        auto y = std::visit([&](const auto& m) { return m.eval_raw(x); }, model_);
        for (double v : y)
            if (!std::isfinite(v))
                throw EvaluationError("MapModel::eval: non-finite output coordinate");
        return y;
    }

    PositiveVector eval(const PositiveVector& x) const {
        auto y = eval_raw(x.entries());
        for (double v : y)
            if (v <= 0.0)
                throw EvaluationError(
                    "MapModel::eval: nonpositive output on the open orthant; model invariant violated");
        return PositiveVector(std::move(y));
    }

    Digraph digraph() const {
        return std::visit([](const auto& m) { return m.digraph(); }, model_);
    }

    Matrix jacobian(const PositiveVector& x) const {
        if (x.dim() != dim()) throw DimensionMismatch("MapModel::jacobian: dimension mismatch");
        switch (kind()) {
            case MapKind::Matrix: return std::get<MatrixMap>(model_).matrix();
            case MapKind::Tensor: return std::get<TensorMap>(model_).jacobian(x.entries());
            case MapKind::Expr: return std::get<ExprMap>(model_).jacobian(x.entries());
            case MapKind::Builtin: return std::get<BuiltinMap>(model_).jacobian(x.entries());
        }
        throw std::logic_error("MapModel::jacobian: unreachable");
    }

    /// log . f . exp is coordinatewise convex. Min nodes break this, and the
    /// smooth averaging builtin is the classic non-convex specimen.
    bool multiplicatively_convex() const {
        switch (kind()) {
            case MapKind::Matrix:
            case MapKind::Tensor: return true;
            case MapKind::Expr: return !std::get<ExprMap>(model_).has_min();
            case MapKind::Builtin: return std::get<BuiltinMap>(model_).tag() == BuiltinTag::Example2;
        }
        return false;
    }

    bool analytic() const {
        switch (kind()) {
            case MapKind::Matrix:
            case MapKind::Tensor: return true;
            case MapKind::Expr: return std::get<ExprMap>(model_).smooth();
            case MapKind::Builtin: return std::get<BuiltinMap>(model_).tag() == BuiltinTag::Example1;
        }
        return false;
    }

    /// Kinds for which the basic-equals-final existence test is two sided.
    bool supports_existence_iff() const {
        switch (kind()) {
            case MapKind::Matrix:
            case MapKind::Tensor: return true;
            case MapKind::Expr: return !std::get<ExprMap>(model_).has_min();
            case MapKind::Builtin: return false;
        }
        return false;
    }

    /// Closed-form eigenvector when the model carries one (builtins fix the
    /// all-ones direction).
    std::optional<PositiveVector> known_eigenvector() const {
        if (kind() == MapKind::Builtin) return PositiveVector::ones(2);
        return std::nullopt;
    }

    const MatrixMap* as_matrix() const { return std::get_if<MatrixMap>(&model_); }
    const TensorMap* as_tensor() const { return std::get_if<TensorMap>(&model_); }
    const ExprMap* as_expr() const { return std::get_if<ExprMap>(&model_); }
    const BuiltinMap* as_builtin() const { return std::get_if<BuiltinMap>(&model_); }

private:
    std::variant<MatrixMap, TensorMap, ExprMap, BuiltinMap> model_;
};

/// Zero pattern of a nonnegative matrix as a digraph.
inline Digraph pattern_digraph(const Matrix& a) {
    if (!a.square()) throw ValidationError("pattern_digraph: matrix must be square");
    Digraph g(a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j)
            if (a(i, j) > 0.0) g.add_arc(i, j);
    return g;
}

// ---------------------------------------------------------------------------
// Tensor text format
// ---------------------------------------------------------------------------

/// Reads the coordinate-list tensor format: a header line "m n", then one
/// entry per line as "i1 i2 ... im value" with 1-based indices. '#' starts
/// a comment.
inline TensorMap load_tensor_text(std::istream& in) {
    std::string line;
    int line_no = 0;
    int order = 0, dim = 0;
    std::vector<TensorMap::Entry> entries;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string tok; ls >> tok;) tokens.push_back(tok);
        if (tokens.empty()) continue;

        if (!header_seen) {
            if (tokens.size() != 2) throw ParseError("tensor: expected header line \"m n\"", line_no);
            try {
                order = std::stoi(tokens[0]);
                dim = std::stoi(tokens[1]);
            } catch (const std::exception&) {
                throw ParseError("tensor: header must hold two integers", line_no);
            }
            if (order < 2 || dim < 1) throw ParseError("tensor: header requires m >= 2, n >= 1", line_no);
            header_seen = true;
            continue;
        }

        if (tokens.size() != static_cast<std::size_t>(order) + 1)
            throw ParseError("tensor: entry needs " + std::to_string(order) + " indices and a value",
                             line_no, static_cast<int>(tokens.size()));
        TensorMap::Entry entry;
        entry.index.reserve(static_cast<std::size_t>(order));
        try {
            for (int t = 0; t < order; ++t) {
                const int ix = std::stoi(tokens[static_cast<std::size_t>(t)]);
                if (ix < 1 || ix > dim)
                    throw ParseError("tensor: index out of range [1," + std::to_string(dim) + "]",
                                     line_no, t + 1);
                entry.index.push_back(ix - 1);
            }
            entry.value = std::stod(tokens[static_cast<std::size_t>(order)]);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("tensor: malformed entry line", line_no);
        }
        entries.push_back(std::move(entry));
    }
    if (!header_seen) throw ParseError("tensor: missing header line \"m n\"", line_no);
    return TensorMap(order, dim, std::move(entries));
}

}  // namespace conefp
