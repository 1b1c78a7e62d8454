#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "conefp/cone_metrics.hpp"
#include "conefp/digraph.hpp"
#include "conefp/map_models.hpp"

namespace conefp {

struct CwOptions {
    double bracket_tol = 1e-10;  // stop once upper - lower <= bracket_tol
    int max_iters = 100000;
};

/// Certified bracket for the upper Collatz-Wielandt number of a coordinate
/// restriction. Every iterate yields a valid bracket [min ratio, max ratio]
/// around the number, so `lower`/`upper` are the tightest seen so far.
struct CwResult {
    double value = 0.0;   // best certified upper end of the bracket
    double lower = 0.0;
    double upper = 0.0;
    bool converged = false;
    bool int_preserving = true;  // false when the restriction hits the boundary
    int iterations = 0;
};

/// Upper Collatz-Wielandt number of the projected map P_J f P_J, computed by
/// normalized iteration with ratio bracketing. If the plain power iteration
/// stalls (imprimitive restriction), the loop switches to a damped step,
/// which has the same fixed directions and still produces valid brackets.
///
/// The max ratio bounds the number from above at every interior point. The
/// min ratio is a valid lower bound along the iteration whenever the
/// restriction is strongly connected (always the case for the classes used
/// by classify); for reducible subsets a closed bracket still certifies the
/// value because closure forces an interior eigendirection.
inline CwResult cw_number(const MapModel& map, const std::vector<int>& subset,
                          const CwOptions& opts = {}) {
    const int n = map.dim();
    if (subset.empty()) throw ValidationError("cw_number: subset must be nonempty");
    for (int j : subset)
        if (j < 0 || j >= n) throw ValidationError("cw_number: subset index out of range");

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int j : subset) x[static_cast<std::size_t>(j)] = 1.0;

    CwResult res;
    res.lower = 0.0;
    res.upper = std::numeric_limits<double>::infinity();

    double damping = 1.0;  // 1 = plain power step
    double gap_at_checkpoint = std::numeric_limits<double>::infinity();
    constexpr int kCheckEvery = 64;

    for (int k = 0; k < opts.max_iters; ++k) {
        res.iterations = k + 1;
        auto y_full = map.eval_raw(x);

        double ratio_lo = std::numeric_limits<double>::infinity();
        double ratio_hi = 0.0;
        bool hit_boundary = false;
        for (int j : subset) {
            const double yj = y_full[static_cast<std::size_t>(j)];
            if (yj <= 0.0) hit_boundary = true;
            const double r = yj / x[static_cast<std::size_t>(j)];
            ratio_lo = std::min(ratio_lo, r);
            ratio_hi = std::max(ratio_hi, r);
        }
        res.upper = std::min(res.upper, ratio_hi);
        res.lower = std::max(res.lower, ratio_lo);

        if (hit_boundary) {
            res.int_preserving = false;
            res.lower = 0.0;
            if (ratio_hi == 0.0) {  // restriction is identically zero
                res.value = 0.0;
                res.upper = 0.0;
                res.converged = true;
            } else {
                res.value = res.upper;
                res.converged = false;
            }
            return res;
        }

        if (res.upper - res.lower <= opts.bracket_tol) {
            res.value = res.upper;
            res.converged = true;
            return res;
        }

        // Next iterate, restricted to the subset and sup-normalized there.
        double sup = 0.0;
        std::vector<double> next(static_cast<std::size_t>(n), 0.0);
        for (int j : subset) {
            const double yj = y_full[static_cast<std::size_t>(j)];
            const double step = (damping == 1.0)
                                    ? yj
                                    : damping * yj / ratio_hi +
                                          (1.0 - damping) * x[static_cast<std::size_t>(j)];
            next[static_cast<std::size_t>(j)] = step;
            sup = std::max(sup, step);
        }
        for (int j : subset) next[static_cast<std::size_t>(j)] /= sup;
        x = std::move(next);

        if ((k + 1) % kCheckEvery == 0) {
            const double gap = res.upper - res.lower;
            if (damping == 1.0 && gap > 0.9 * gap_at_checkpoint) damping = 0.5;
            gap_at_checkpoint = gap;
        }
    }
    res.value = res.upper;
    res.converged = false;
    return res;
}

struct MapClass {
    std::vector<int> vertices;   // 0-based, sorted
    bool is_final = false;
    double cw = 0.0;
    bool is_basic = false;
    bool cw_converged = false;
    bool int_preserving = true;
};

struct ClassDecomposition {
    std::vector<MapClass> classes;  // condensation in topological order
    double r_global = 0.0;

    std::vector<int> basic_ids() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i].is_basic) out.push_back(static_cast<int>(i));
        return out;
    }
    std::vector<int> final_ids() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i].is_final) out.push_back(static_cast<int>(i));
        return out;
    }
};

inline constexpr double kBasicClassRtol = 1e-8;

/// Full combinatorial decomposition: classes of the associated digraph with
/// final flags, per-class Collatz-Wielandt numbers on the projected maps,
/// and basic flags relative to r = max over classes.
inline ClassDecomposition classify(const MapModel& map, const CwOptions& opts = {}) {
    const Digraph g = map.digraph();
    ClassDecomposition out;
    for (const auto& comp : strongly_connected_components(g)) {
        MapClass cls;
        cls.vertices = comp;
        cls.is_final = true;
        for (int v : comp)
            for (int w : g.successors(v))
                if (!std::binary_search(comp.begin(), comp.end(), w)) cls.is_final = false;
        const CwResult cw = cw_number(map, comp, opts);
        cls.cw = cw.value;
        cls.cw_converged = cw.converged;
        cls.int_preserving = cw.int_preserving;
        out.classes.push_back(std::move(cls));
    }
    out.r_global = 0.0;
    for (const auto& cls : out.classes) out.r_global = std::max(out.r_global, cls.cw);
    const double scale = std::max(out.r_global, std::numeric_limits<double>::min());
    for (auto& cls : out.classes)
        cls.is_basic = std::abs(cls.cw - out.r_global) <= kBasicClassRtol * scale;
    return out;
}

struct ExistenceResult {
    bool exists = false;
    std::vector<int> basic_classes;  // indices into the decomposition
    std::vector<int> final_classes;
    bool iff_certified = true;  // false: the test is one sided for this model kind
    std::string note;
};

/// Positive eigenvector existence test: the basic classes must be exactly
/// the final ones. For model kinds outside the multiplicatively convex
/// analytic family the verdict is advisory.
inline ExistenceResult has_positive_eigenvector(const MapModel& map, const CwOptions& opts = {}) {
    const ClassDecomposition dec = classify(map, opts);
    ExistenceResult res;
    res.basic_classes = dec.basic_ids();
    res.final_classes = dec.final_ids();
    res.exists = res.basic_classes == res.final_classes;
    res.iff_certified = map.supports_existence_iff();
    if (!res.iff_certified)
        res.note = "model kind is outside the multiplicatively convex analytic family; "
                   "the basic-equals-final criterion is sufficient only";
    return res;
}

/// Self-loop test on the associated digraph. For analytic multiplicatively
/// convex maps this characterizes the type K order-preserving property; for
/// other kinds it is advisory.
inline bool is_type_k(const MapModel& map) { return map.digraph().has_all_self_loops(); }

struct PeriodResult {
    int period = 1;
    std::vector<int> nonrecurrent_vertices;  // 0-based; lie on no cycle
    bool all_recurrent() const { return nonrecurrent_vertices.empty(); }
};

/// Smallest verified p such that every recurrent vertex of the associated
/// digraph has a closed walk of length exactly p.
inline PeriodResult period(const MapModel& map) {
    const DigraphPeriod dp = digraph_period(map.digraph());
    return {dp.period, dp.nonrecurrent};
}

}  // namespace conefp
