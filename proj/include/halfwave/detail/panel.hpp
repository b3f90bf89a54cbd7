#pragma once

// Adaptive 1D Gauss-Kronrod (7-15) panels over a generic value type.
// Panel subdivision is worst-error-first with a deterministic tie-break;
// the final accumulation is a pairwise tree over panels sorted by position,
// so a fixed panel set always reduces in the same order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <queue>
#include <vector>

namespace halfwave::detail {

// QUADPACK dqk15 nodes and weights.
inline constexpr double kGk15Nodes[7] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V> struct value_ops;

template <> struct value_ops<double> {
    static double zero_like(double) { return 0.0; }
    static void axpy(double& y, double w, double x) { y += w * x; }
    static void add(double& y, const double& x) { y += x; }
    static double dist(double a, double b) { return std::fabs(a - b); }
    static double norm(double v) { return std::fabs(v); }
    static void scale(double& v, double s) { v *= s; }
    static bool finite(double v) { return std::isfinite(v); }
};

template <> struct value_ops<std::complex<double>> {
    using V = std::complex<double>;
    static V zero_like(const V&) { return {0.0, 0.0}; }
    static void axpy(V& y, double w, const V& x) { y += w * x; }
    static void add(V& y, const V& x) { y += x; }
    static double dist(const V& a, const V& b) { return std::abs(a - b); }
    static double norm(const V& v) { return std::abs(v); }
    static void scale(V& v, double s) { v *= s; }
    static bool finite(const V& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    }
};

// Runtime-sized batch of complex values; error norms are sup over components.
struct cvec {
    std::vector<std::complex<double>> v;
};

template <> struct value_ops<cvec> {
    static cvec zero_like(const cvec& proto) {
        cvec z;
        z.v.assign(proto.v.size(), {0.0, 0.0});
        return z;
    }
    static void axpy(cvec& y, double w, const cvec& x) {
        if (y.v.size() < x.v.size()) y.v.resize(x.v.size());
        for (std::size_t i = 0; i < x.v.size(); ++i) y.v[i] += w * x.v[i];
    }
    static void add(cvec& y, const cvec& x) {
        if (y.v.size() < x.v.size()) y.v.resize(x.v.size());
        for (std::size_t i = 0; i < x.v.size(); ++i) y.v[i] += x.v[i];
    }
    static double dist(const cvec& a, const cvec& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.v.size(); ++i)
            m = std::max(m, std::abs(a.v[i] - (i < b.v.size() ? b.v[i] : std::complex<double>{})));
        return m;
    }
    static double norm(const cvec& x) {
        double m = 0.0;
        for (const auto& c : x.v) m = std::max(m, std::abs(c));
        return m;
    }
    static void scale(cvec& x, double s) {
        for (auto& c : x.v) c *= s;
    }
    static bool finite(const cvec& x) {
        for (const auto& c : x.v)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }
};

template <class V> struct PanelEval {
    V k15;
    double err;
    bool nan;
};

template <class V, class F>
PanelEval<V> gk15_panel(F&& f, double a, double b, long long& evals) {
    using ops = value_ops<V>;
    const double c = 0.5 * (a + b);
    const double m = 0.5 * (b - a);

    V fc = f(c);
    ++evals;
    V k15 = ops::zero_like(fc);
    V g7 = ops::zero_like(fc);
    ops::axpy(k15, kGk15WeightsK[7], fc);
    ops::axpy(g7, kGk15WeightsG[3], fc);
    bool ok = ops::finite(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = m * kGk15Nodes[j];
        V f1 = f(c - dx);
        V f2 = f(c + dx);
        evals += 2;
        ok = ok && ops::finite(f1) && ops::finite(f2);
        V s = f1;
        ops::add(s, f2);
        ops::axpy(k15, kGk15WeightsK[j], s);
        if (j % 2 == 1) ops::axpy(g7, kGk15WeightsG[(j - 1) / 2], s);
    }
    ops::scale(k15, m);
    ops::scale(g7, m);
    double err = ops::dist(k15, g7);
    return {std::move(k15), err, !ok};
}

template <class V> struct AdaptResult {
    V value{};
    double err = 0.0;
    long long evals = 0;
    bool converged = true;
    bool nan = false;
};

template <class V>
V tree_sum(std::vector<V>& vals, std::size_t lo, std::size_t hi) {
    using ops = value_ops<V>;
    if (hi - lo == 1) return std::move(vals[lo]);
    std::size_t mid = lo + (hi - lo) / 2;
    V a = tree_sum(vals, lo, mid);
    V b = tree_sum(vals, mid, hi);
    ops::add(a, b);
    return a;
}

// abs_tol is an absolute tolerance on the whole interval.  init_splits seeds
// the panel set (used by callers to resolve a known oscillation count before
// adaptivity starts).  budget, when non-null, is a shared evaluation budget
// decremented across nested calls.
template <class V, class F>
AdaptResult<V> adaptive_gk(F&& f, double a, double b, double abs_tol,
                           int init_splits = 1, int max_panels = 20000,
                           long long* budget = nullptr) {
    struct Panel {
        double a, b, err;
        V val;
    };
    AdaptResult<V> out;
    if (!(b > a)) return out;
    init_splits = std::max(1, init_splits);

    auto cmp = [](const Panel& p, const Panel& q) {
        if (p.err != q.err) return p.err < q.err;
        return p.a < q.a;
    };
    std::vector<Panel> heap;
    heap.reserve(static_cast<std::size_t>(init_splits) + 64);

    long long evals = 0;
    auto push_panel = [&](double lo, double hi) {
        auto pe = gk15_panel<V>(f, lo, hi, evals);
        out.nan = out.nan || pe.nan;
        heap.push_back(Panel{lo, hi, pe.err, std::move(pe.k15)});
        std::push_heap(heap.begin(), heap.end(), cmp);
    };

    const double w0 = (b - a) / init_splits;
    for (int i = 0; i < init_splits; ++i)
        push_panel(a + i * w0, (i + 1 == init_splits) ? b : a + (i + 1) * w0);

    const double min_width = (b - a) * 1e-13;
    while (true) {
        double total_err = 0.0;
        for (const auto& p : heap) total_err += p.err;
        if (total_err <= abs_tol || out.nan) break;
        if (static_cast<int>(heap.size()) >= max_panels ||
            (budget && evals >= *budget)) {
            out.converged = false;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Panel worst = std::move(heap.back());
        heap.pop_back();
        if (worst.b - worst.a < min_width) {
            // Cannot usefully subdivide further; keep the panel as is.
            heap.push_back(std::move(worst));
            std::push_heap(heap.begin(), heap.end(), cmp);
            out.converged = false;
            break;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        push_panel(worst.a, mid);
        push_panel(mid, worst.b);
    }

    std::sort(heap.begin(), heap.end(),
              [](const Panel& p, const Panel& q) { return p.a < q.a; });
    double total_err = 0.0;
    std::vector<V> vals;
    vals.reserve(heap.size());
    for (auto& p : heap) {
        total_err += p.err;
        vals.push_back(std::move(p.val));
    }
    out.value = tree_sum(vals, 0, vals.size());
    out.err = total_err;
    out.evals = evals;
    if (budget) *budget -= evals;
    return out;
}

// Total-variation estimate of a sampled scalar function; used to seed panel
// counts for oscillatory integrands (one panel per half period).
template <class F>
int oscillation_splits(F&& phase, double a, double b, int samples = 33,
                       int cap = 1 << 14) {
    double tv = 0.0;
    double prev = phase(a);
    for (int i = 1; i < samples; ++i) {
        double x = a + (b - a) * i / (samples - 1);
        double cur = phase(x);
        tv += std::fabs(cur - prev);
        prev = cur;
    }
    // One panel per half period (pi radians), with margin for uneven sampling.
    double want = tv / 3.141592653589793 + 1.0;
    if (want > cap) return cap;
    return std::max(1, static_cast<int>(want));
}

} // namespace halfwave::detail
