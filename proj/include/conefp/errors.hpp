#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conefp {

/// Input vectors or matrices have incompatible dimensions.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A value-level invariant failed at construction (nonpositive entry,
/// non-stochastic row, zero row, bad exponent vector, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Text input could not be parsed. `line` is 1-based, 0 when unknown.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& what, int line_ = 0, int column_ = 0)
        : std::runtime_error(what), line(line_), column(column_) {}
};

/// Evaluation produced a value outside the map's codomain (NaN, overflow,
/// or a nonpositive coordinate where a positive one is required).
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested a derivative at a point where the map is not differentiable
/// (tied branches of a max or min node).
struct NondifferentiablePoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The QR eigenvalue iteration failed to converge. Moduli isolated before
/// the failure are preserved.
struct EigenvalueFailure : std::runtime_error {
    std::vector<double> partial_moduli;
    EigenvalueFailure(const std::string& what, std::vector<double> partial)
        : std::runtime_error(what), partial_moduli(std::move(partial)) {}
};

}  // namespace conefp
