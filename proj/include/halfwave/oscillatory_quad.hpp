#pragma once

// Adaptive quadrature of e^{i lambda phase(v)} amplitude(v) over a box in
// 1..4 dimensions.  Nested 1D Gauss-Kronrod panels; the innermost axis is
// the one with the fastest sampled phase variation, and every axis is
// pre-split so that no initial panel spans more than half an oscillation
// period.  Panels subdivide worst-error-first; results are deterministic for
// a fixed panel set (pairwise tree reduction in position order).

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>

#include "halfwave/detail/panel.hpp"

namespace halfwave {

struct Interval {
    double lo = 0.0, hi = 1.0;
    double width() const { return hi - lo; }
};

struct Integrand {
    int dim = 1;
    std::function<std::complex<double>(std::span<const double>)> amplitude;
    std::function<double(std::span<const double>)> phase;
    double lambda = 1.0;
    std::array<Interval, 4> box{};
};

struct QuadResult {
    std::complex<double> value{0.0, 0.0};
    double err_estimate = 0.0;
    long long evaluations = 0;
    bool converged = true;
    bool has_nan = false;
};

struct QuadOptions {
    long long eval_budget = 100'000'000; // hard cap per integrate() call
    int max_panels = 200'000;            // per 1D sweep
    int presplit_cap = 1 << 14;
    double inner_tol_factor = 0.25; // inner tolerance share per nesting level
};

namespace detail {

struct NestedCtx {
    const Integrand* ig;
    const QuadOptions* opt;
    std::array<int, 4> axis_order{};   // [0] = outermost
    std::array<int, 4> presplit{};
    long long budget = 0;
    bool nan = false;
    bool converged = true;
    double inner_err = 0.0; // accumulated worst-case inner tolerance
};

inline std::complex<double> nested_integrate(NestedCtx& ctx, int level,
                                             std::array<double, 4>& pt,
                                             double tol) {
    const Integrand& ig = *ctx.ig;
    const int axis = ctx.axis_order[level];
    const Interval iv = ig.box[axis];
    const bool innermost = (level == ig.dim - 1);

    auto f = [&](double v) -> std::complex<double> {
        pt[axis] = v;
        if (innermost) {
            std::span<const double> s(pt.data(), ig.dim);
            const std::complex<double> a = ig.amplitude(s);
            const double ph = ig.lambda * ig.phase(s);
            return a * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        const double inner_tol = tol * ctx.opt->inner_tol_factor /
                                 std::max(iv.width(), 1e-300);
        return nested_integrate(ctx, level + 1, pt, inner_tol);
    };
    auto res = detail::adaptive_gk<std::complex<double>>(
        f, iv.lo, iv.hi, tol, ctx.presplit[axis], ctx.opt->max_panels,
        &ctx.budget);
    ctx.nan = ctx.nan || res.nan;
    ctx.converged = ctx.converged && res.converged && ctx.budget > 0;
    if (level == 0) ctx.inner_err = res.err;
    return res.value;
}

} // namespace detail

inline QuadResult integrate(const Integrand& ig, double tol,
                            const QuadOptions& opt = {},
                            int presplit_scale = 1) {
    if (ig.dim < 1 || ig.dim > 4)
        throw std::invalid_argument("integrate: dim must be 1..4");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be > 0");

    detail::NestedCtx ctx;
    ctx.ig = &ig;
    ctx.opt = &opt;
    ctx.budget = opt.eval_budget;

    // Rank axes by sampled |dphase| at the box center: fastest innermost.
    std::array<double, 4> center{};
    for (int d = 0; d < ig.dim; ++d)
        center[d] = 0.5 * (ig.box[d].lo + ig.box[d].hi);
    std::array<double, 4> speed{};
    std::array<double, 4> pt = center;
    for (int d = 0; d < ig.dim; ++d) {
        auto along = [&](double v) {
            pt = center;
            pt[d] = v;
            return ig.lambda * ig.phase(std::span<const double>(pt.data(), ig.dim));
        };
        const int n = detail::oscillation_splits(along, ig.box[d].lo,
                                                 ig.box[d].hi, 33,
                                                 opt.presplit_cap);
        ctx.presplit[d] = std::min(opt.presplit_cap,
                                   std::max(1, n * presplit_scale));
        speed[d] = n;
    }
    for (int d = 0; d < ig.dim; ++d) ctx.axis_order[d] = d;
    std::sort(ctx.axis_order.begin(), ctx.axis_order.begin() + ig.dim,
              [&](int i, int j) { return speed[i] < speed[j]; });

    QuadResult out;
    pt = center;
    out.value = detail::nested_integrate(ctx, 0, pt, tol);
    out.err_estimate = std::max(ctx.inner_err, tol * (ig.dim > 1 ? 1.0 : 0.0));
    out.evaluations = opt.eval_budget - ctx.budget;
    out.converged = ctx.converged && !ctx.nan;
    out.has_nan = ctx.nan;
    return out;
}

/// Self-consistency ratio |I(grid) - I(grid/2)| / |I(grid/2)| where the
/// refined run doubles every initial panel count.
inline double refine_check(const Integrand& ig, double tol,
                           const QuadOptions& opt = {}) {
    QuadResult coarse = integrate(ig, tol, opt, 1);
    QuadResult fine = integrate(ig, tol, opt, 2);
    const double denom = std::abs(fine.value);
    if (denom == 0.0) return std::abs(coarse.value - fine.value);
    return std::abs(coarse.value - fine.value) / denom;
}

// ---------------------------------------------------------------------------
// Batched variant: one shared phase, a vector of amplitudes evaluated in a
// single callback.  Used by kernel grid scans to amortize special-function
// evaluations over many spatial points.

struct VecIntegrand {
    int dim = 1;
    int m = 1; // number of components
    // amplitude(v, out): fill out[0..m)
    std::function<void(std::span<const double>, std::span<std::complex<double>>)>
        amplitude;
    std::function<double(std::span<const double>)> phase;
    double lambda = 1.0;
    std::array<Interval, 4> box{};
    std::array<int, 4> min_splits{1, 1, 1, 1}; // extra caller oscillation hints
};

struct VecQuadResult {
    std::vector<std::complex<double>> value;
    double err_estimate = 0.0;
    long long evaluations = 0;
    bool converged = true;
    bool has_nan = false;
};

namespace detail {

struct VecCtx {
    const VecIntegrand* ig;
    const QuadOptions* opt;
    std::array<int, 4> axis_order{};
    std::array<int, 4> presplit{};
    long long budget = 0;
    bool nan = false;
    bool converged = true;
    double err0 = 0.0;
};

inline cvec vec_nested(VecCtx& ctx, int level, std::array<double, 4>& pt,
                       double tol) {
    const VecIntegrand& ig = *ctx.ig;
    const int axis = ctx.axis_order[level];
    const Interval iv = ig.box[axis];
    const bool innermost = (level == ig.dim - 1);

    auto f = [&](double v) -> cvec {
        pt[axis] = v;
        if (innermost) {
            std::span<const double> s(pt.data(), ig.dim);
            cvec out;
            out.v.resize(ig.m);
            ig.amplitude(s, out.v);
            const double ph = ig.lambda * ig.phase(s);
            const std::complex<double> rot(std::cos(ph), std::sin(ph));
            for (auto& c : out.v) c *= rot;
            return out;
        }
        const double inner_tol =
            tol * ctx.opt->inner_tol_factor / std::max(iv.width(), 1e-300);
        return vec_nested(ctx, level + 1, pt, inner_tol);
    };
    auto res = adaptive_gk<cvec>(f, iv.lo, iv.hi, tol, ctx.presplit[axis],
                                 ctx.opt->max_panels, &ctx.budget);
    ctx.nan = ctx.nan || res.nan;
    ctx.converged = ctx.converged && res.converged && ctx.budget > 0;
    if (level == 0) ctx.err0 = res.err;
    if (res.value.v.empty()) res.value.v.resize(ig.m);
    return std::move(res.value);
}

} // namespace detail

inline VecQuadResult integrate_vec(const VecIntegrand& ig, double tol,
                                   const QuadOptions& opt = {},
                                   int presplit_scale = 1) {
    if (ig.dim < 1 || ig.dim > 4)
        throw std::invalid_argument("integrate_vec: dim must be 1..4");
    detail::VecCtx ctx;
    ctx.ig = &ig;
    ctx.opt = &opt;
    ctx.budget = opt.eval_budget;

    std::array<double, 4> center{};
    for (int d = 0; d < ig.dim; ++d)
        center[d] = 0.5 * (ig.box[d].lo + ig.box[d].hi);
    std::array<double, 4> speed{};
    std::array<double, 4> pt = center;
    for (int d = 0; d < ig.dim; ++d) {
        auto along = [&](double v) {
            pt = center;
            pt[d] = v;
            return ig.lambda * ig.phase(std::span<const double>(pt.data(), ig.dim));
        };
        const int n = detail::oscillation_splits(along, ig.box[d].lo,
                                                 ig.box[d].hi, 33,
                                                 opt.presplit_cap);
        ctx.presplit[d] = std::min(opt.presplit_cap,
                                   std::max(ig.min_splits[d], n) * presplit_scale);
        speed[d] = std::max(ig.min_splits[d], n);
    }
    for (int d = 0; d < ig.dim; ++d) ctx.axis_order[d] = d;
    std::sort(ctx.axis_order.begin(), ctx.axis_order.begin() + ig.dim,
              [&](int i, int j) { return speed[i] < speed[j]; });

    VecQuadResult out;
    pt = center;
    detail::cvec val = detail::vec_nested(ctx, 0, pt, tol);
    out.value = std::move(val.v);
    out.err_estimate = ctx.err0;
    out.evaluations = opt.eval_budget - ctx.budget;
    out.converged = ctx.converged && !ctx.nan;
    out.has_nan = ctx.nan;
    return out;
}

} // namespace halfwave
