#pragma once

// Reflection-indexed representation of the localized half-wave kernel.
//
// The N-th reflection term, with the sigma and s integrals collapsed to Airy
// factors (exact, not asymptotic), is
//
//   K_N(t,x,y) = int int eta^{4/3} h^{-7/3}
//                psi(eta) psi1(eta sqrt(1+alpha)) psi2(alpha/gamma) chi1(om)
//                Ai(hbar^{-2/3}(x-alpha)) Ai(hbar^{-2/3}(a-alpha))
//                e^{i[(y eta + t eta sqrt(1+alpha))/h - N L(om)]} dalpha deta,
//
// om = hbar^{-2/3} alpha, hbar = h/eta, and sum_N K_N equals the spectral
// kernel exactly (Airy-Poisson).  The full sum is evaluated in one pass with
// the Dirichlet kernel sum_{|N|<=M} e^{-iNL} = sin((M+1/2)L)/sin(L/2), with M
// grown until the value stops moving: at desk scale the tail in N decays like
// a bump Fourier transform, much more slowly than the O(h^inf) of the ideal
// asymptotic regime.
//
// The rescaled phases Psi_{N,a,gamma} (tangential: unit a, transverse: unit
// gamma) carry the remainder term (N/lambda) B(eta lambda A^{3/2}) plus the
// constant -N pi/(2 lambda); with that constant the rescaling identity
// gamma^{3/2} Psi = eta Phi + quantization offset is exact, which the tests
// check against phase_full.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "halfwave/airy.hpp"
#include "halfwave/model.hpp"
#include "halfwave/oscillatory_quad.hpp"
#include "halfwave/spectral_green.hpp"

namespace halfwave {

enum class Regime { tangential, transverse };

struct PhaseSpec {
    int N = 0;
    ModelParams params;
    double lambda = 1.0;  // c^{3/2}/h with c the rescale base
    double c = 0.25;      // rescale base: a (tangential) or gamma (transverse)
    Regime regime = Regime::tangential;

    static PhaseSpec make(int N, const ModelParams& p) {
        p.validate();
        PhaseSpec s;
        s.N = N;
        s.params = p;
        s.regime = (p.a >= p.gamma / 4.0) ? Regime::tangential
                                          : Regime::transverse;
        s.c = (s.regime == Regime::tangential) ? p.a : p.gamma;
        s.lambda = std::pow(s.c, 1.5) / p.h;
        if (s.lambda < 1.0)
            throw std::domain_error(
                "PhaseSpec: lambda_gamma < 1, rescaled parametrix invalid");
        return s;
    }

    // time-rescale factor: t = sqrt(c) * mu * T
    double mu() const {
        return regime == Regime::tangential ? std::sqrt(1.0 + c) : 1.0;
    }
    double t_of(double T) const { return std::sqrt(c) * mu() * T; }
    double x_of(double X) const { return c * X; }
    double y_of(double T, double Y) const {
        return std::pow(c, 1.5) * Y - t_of(T) * std::sqrt(1.0 + c);
    }
    double T_of(double t) const { return t / (std::sqrt(c) * mu()); }
};

// ---------------------------------------------------------------------------
// Phases

/// Phi_{N,a} = y + sigma^3/3 + sigma(x-alpha) + s^3/3 + s(a-alpha)
///             - N hbar L(hbar^{-2/3} alpha) + t sqrt(1+alpha),  hbar = h/eta.
inline double phase_full(int N, const ModelParams& p, double t, double x,
                         double y, double sigma, double s, double alpha,
                         double eta) {
    if (!(alpha > 0.0))
        throw std::domain_error("phase_full: alpha must be positive");
    const double hb = p.h / eta;
    const double om = alpha / std::pow(hb, 2.0 / 3.0);
    return y + sigma * sigma * sigma / 3.0 + sigma * (x - alpha) +
           s * s * s / 3.0 + s * (p.a - alpha) - N * hb * phase_l(om) +
           t * std::sqrt(1.0 + alpha);
}

struct PhaseFullGrad {
    double d_sigma, d_s, d_alpha, d_eta;
};

inline PhaseFullGrad phase_full_grad(int N, const ModelParams& p, double t,
                                     double x, double y, double sigma,
                                     double s, double alpha, double eta) {
    (void)y;
    if (!(alpha > 0.0))
        throw std::domain_error("phase_full_grad: alpha must be positive");
    const double hb = p.h / eta;
    const double hb23 = std::pow(hb, 2.0 / 3.0);
    const double om = alpha / hb23;
    const double lp = phase_l_prime(om);
    PhaseFullGrad g;
    g.d_sigma = sigma * sigma + x - alpha;
    g.d_s = s * s + p.a - alpha;
    g.d_alpha = t / (2.0 * std::sqrt(1.0 + alpha)) - sigma - s -
                N * hb * lp / hb23;
    // d(hbar L)/d eta = (hbar/eta)((2/3) om L' - L), and Phi carries -N hbar L
    g.d_eta = N * (hb / eta) * (phase_l(om) - (2.0 / 3.0) * om * lp);
    return g;
}

/// Rescaled phase Psi_{N,a,c}(T,X,Y,Sigma,S,A,eta); includes the remainder
/// (N/lambda) B(eta lambda A^{3/2}) and the constant -N pi/(2 lambda).
/// Throws when the remainder branch is invalid (eta lambda A^{3/2} < 1).
inline double phase_rescaled(const PhaseSpec& sp, double T, double X, double Y,
                             double Sigma, double S, double A, double eta) {
    const double z = eta * sp.lambda * A * std::sqrt(A);
    if (!(z >= 1.0))
        throw std::domain_error(
            "phase_rescaled: eta*lambda*A^{3/2} < 1, B branch invalid");
    const double abar = sp.params.a / sp.c;
    const double c = sp.c;
    const double tterm = sp.mu() * T * (A - 1.0) /
                         (std::sqrt(1.0 + c * A) + std::sqrt(1.0 + c));
    const double bracket = Y + Sigma * Sigma * Sigma / 3.0 +
                           Sigma * (X - A) + S * S * S / 3.0 +
                           S * (abar - A) + tterm -
                           4.0 / 3.0 * sp.N * A * std::sqrt(A);
    return eta * bracket + sp.N / sp.lambda * b_remainder(z, 0) -
           sp.N * detail::kPi / (2.0 * sp.lambda);
}

struct PhaseRescaledGrad {
    double d_Sigma, d_S, d_A, d_eta;
};

inline PhaseRescaledGrad phase_rescaled_grad(const PhaseSpec& sp, double T,
                                             double X, double Y, double Sigma,
                                             double S, double A, double eta) {
    const double z = eta * sp.lambda * A * std::sqrt(A);
    if (!(z >= 1.0))
        throw std::domain_error(
            "phase_rescaled_grad: eta*lambda*A^{3/2} < 1, B branch invalid");
    const double abar = sp.params.a / sp.c;
    const double c = sp.c;
    const double sA = std::sqrt(A);
    const double bp = b_remainder(z, 1);
    PhaseRescaledGrad g;
    g.d_Sigma = eta * (Sigma * Sigma + X - A);
    g.d_S = eta * (S * S + abar - A);
    g.d_A = eta * (-Sigma - S + sp.mu() * T / (2.0 * std::sqrt(1.0 + c * A)) -
                   2.0 * sp.N * sA + 1.5 * sp.N * sA * bp);
    const double tterm = sp.mu() * T * (A - 1.0) /
                         (std::sqrt(1.0 + c * A) + std::sqrt(1.0 + c));
    const double bracket = Y + Sigma * Sigma * Sigma / 3.0 + Sigma * (X - A) +
                           S * S * S / 3.0 + S * (abar - A) + tterm -
                           4.0 / 3.0 * sp.N * A * sA;
    g.d_eta = bracket + sp.N * A * sA * bp;
    return g;
}

// ---------------------------------------------------------------------------
// Critical-point algebra

struct CriticalPoint {
    double A_c = 0.0;
    enum class Derivation { closed_form, newton } derivation =
        Derivation::newton;
    double K = 0.0, w = 0.0;
    double K_inf = 0.0;
    double residual = 0.0; // |sqrt(A_c) - K sqrt((1+a)/(1+a A_c)) + w|
};

inline double k_infinity(double K, double a) {
    return K * std::sqrt(2.0 * (1.0 + a) /
                         (1.0 + std::sqrt(1.0 + 4.0 * K * K * a * (1.0 + a))));
}

/// Solves sqrt(A) = K sqrt((1+a)/(1+aA)) - w (safeguarded Newton in
/// Z = sqrt(A), monotone on the real line).
inline CriticalPoint critical_a(double K, double w, double a) {
    if (std::fabs(K - 1.0) > 0.5 + 1e-12 || std::fabs(w) > 3.0 + 1e-12 ||
        a < 0.0 || a > 0.25 + 1e-12)
        throw std::invalid_argument("critical_a: outside validity region");
    CriticalPoint cp;
    cp.K = K;
    cp.w = w;
    cp.K_inf = k_infinity(K, a);
    auto f = [&](double Z) {
        return Z + w - K * std::sqrt((1.0 + a) / (1.0 + a * Z * Z));
    };
    if (a == 0.0) {
        cp.A_c = (K - w) * (K - w);
        cp.derivation = CriticalPoint::Derivation::closed_form;
        cp.residual = std::fabs(f(K - w));
        return cp;
    }
    if (w == 0.0) {
        cp.A_c = cp.K_inf * cp.K_inf;
        cp.derivation = CriticalPoint::Derivation::closed_form;
        cp.residual = std::fabs(f(cp.K_inf));
        return cp;
    }
    double Z = cp.K_inf - w;
    bool done = false;
    for (int it = 0; it < 50; ++it) {
        const double r = f(Z);
        const double fp = 1.0 + K * std::sqrt(1.0 + a) * a * Z /
                                   std::pow(1.0 + a * Z * Z, 1.5);
        const double step = r / fp;
        Z -= step;
        if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(Z))) {
            done = true;
            break;
        }
    }
    cp.residual = std::fabs(f(Z));
    if (!done && cp.residual > 1e-12)
        throw std::runtime_error("critical_a: Newton did not converge");
    cp.A_c = Z * Z;
    cp.derivation = CriticalPoint::Derivation::newton;
    return cp;
}

// ---------------------------------------------------------------------------
// Window, counting, caustics, cusp

/// Reflections worth keeping at time t: |N| <= c0 |t| / sqrt(gamma) + slack.
inline std::pair<int, int> n_window(double t, double gamma, int slack = 2,
                                    double c0 = 3.0) {
    if (slack < 0) throw std::invalid_argument("n_window: slack >= 0");
    const int m =
        static_cast<int>(std::floor(c0 * std::fabs(t) / std::sqrt(gamma))) +
        slack;
    return {-m, m};
}

/// Bound on the number of simultaneously significant reflections.
inline double n_active_bound(double t, double gamma, double h,
                             double c_o1 = 8.0) {
    const double g3h2 = gamma * gamma * gamma / (h * h);
    return c_o1 + std::fabs(t) / (std::sqrt(gamma) * g3h2);
}

/// Swallowtail times t_N = 4 N sqrt(a) sqrt(1+a).
inline double caustic_time(double a, int N) {
    return 4.0 * N * std::sqrt(a) * std::sqrt(1.0 + a);
}

/// Leading-order cusp locus M2 = +- sqrt(2)/(3 sqrt(3) K) M1^{3/2};
/// no real branch for M1 < 0.
inline std::optional<std::pair<double, double>> cusp_locus(double M1, double K,
                                                           double a) {
    (void)a; // enters only at O(M1, a)
    if (M1 < 0.0) return std::nullopt;
    const double m2 = std::sqrt(2.0) / (3.0 * std::sqrt(3.0) * K) *
                      M1 * std::sqrt(M1);
    return std::make_pair(m2, -m2);
}

/// Root in xi2 of the reduced second derivative -4(z F - 2 xi2^2 (F + z F'))
/// at a = 0, z = M1/2 - xi2^2; the degenerate critical point the cusp locus
/// predicts at xi2 = sqrt(M1/6)(1 + O(M1)).
inline double cusp_d2_root(double M1, double K, int N) {
    if (!(M1 > 0.0)) throw std::domain_error("cusp_d2_root: M1 must be > 0");
    const double cN = 1.0 - 1.0 / (static_cast<double>(N) * N);
    auto F0 = [&](double z) {
        return 1.0 / (K + std::sqrt(K * K + z * cN));
    };
    auto F0p = [&](double z) {
        const double R = std::sqrt(K * K + z * cN);
        return -cN / (2.0 * R * (K + R) * (K + R));
    };
    auto g = [&](double xi2) {
        const double z = 0.5 * M1 - xi2 * xi2;
        const double Ft = F0(z) + z * F0p(z);
        return z * F0(z) - 2.0 * xi2 * xi2 * Ft;
    };
    double lo = 0.0, hi = std::sqrt(0.5 * M1);
    double glo = g(lo), ghi = g(hi);
    if (glo * ghi > 0.0)
        throw std::runtime_error("cusp_d2_root: no sign change");
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (glo * gm <= 0.0) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Reflection terms (collapsed form) and the summed kernel

struct ParametrixOptions {
    double tol_scale = 1e-9; // abs quad tolerance = tol_scale * sqrt(g)/h^2
    double window_rel_tol = 1e-4; // plateau test, relative to the grid sup
    int m_cap = 320;
    int max_panels = 400'000;
    int presplit_scale = 1;
    long long eval_budget = 100'000'000;
};

namespace detail {

inline double dirichlet_kernel(int M, double L) {
    double r = std::remainder(L, 2.0 * kPi);
    const double am = M + 0.5;
    if (std::fabs(r) < 1e-5) {
        const double r2 = r * r;
        return (2.0 * M + 1.0) * (1.0 - r2 * (am * am - 0.25) / 6.0);
    }
    return std::sin(am * r) / std::sin(0.5 * r);
}

struct PmxBand {
    double alpha_lo, alpha_hi;
    bool empty;
    double dL_alpha, dL_eta; // phase-accumulation ranges for presplits
};

inline PmxBand pmx_band(const ModelParams& p) {
    PmxBand b;
    b.alpha_lo = p.cutoffs.psi2_lo * p.gamma;
    b.alpha_hi = p.cutoffs.psi2_hi * p.gamma;
    const double eta_c = 0.5 * (p.cutoffs.eta_lo + p.cutoffs.eta_hi);
    auto om = [&](double alpha, double eta) {
        return alpha * std::pow(eta / p.h, 2.0 / 3.0);
    };
    // chi1 support requires om >= 1
    b.empty = om(b.alpha_hi, p.cutoffs.eta_hi) <= 1.0;
    if (b.empty) {
        b.dL_alpha = b.dL_eta = 0.0;
        return b;
    }
    b.dL_alpha = phase_l(om(b.alpha_hi, eta_c)) - phase_l(om(b.alpha_lo, eta_c));
    const double alpha_c = 0.5 * (b.alpha_lo + b.alpha_hi);
    b.dL_eta = std::fabs(phase_l(om(alpha_c, p.cutoffs.eta_hi)) -
                         phase_l(om(alpha_c, p.cutoffs.eta_lo)));
    return b;
}

inline double pmx_weight(const ModelParams& p, double alpha, double eta,
                         double& om_out) {
    const double hb23 = std::pow(p.h / eta, 2.0 / 3.0);
    om_out = alpha / hb23;
    const double w = p.cutoffs.psi(eta) *
                     p.cutoffs.psi1(eta * std::sqrt(1.0 + alpha)) *
                     p.cutoffs.psi2(alpha / p.gamma) * p.cutoffs.chi1(om_out);
    return w;
}

} // namespace detail

struct ParametrixGridResult {
    std::vector<std::complex<double>> g; // [ix * ny + iy]
    int m_used = 0;
    bool window_converged = true;
    bool quad_converged = true;
    long long evaluations = 0;
};

namespace detail {

inline ParametrixGridResult parametrix_grid_capped(
    const ModelParams& p, Sign sign, double t, std::span<const double> xs,
    std::span<const double> ys, int m_cap, const ParametrixOptions& opt) {
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());
    ParametrixGridResult out;
    out.g.assign(static_cast<std::size_t>(nx) * ny, {0.0, 0.0});

    const auto band = detail::pmx_band(p);
    if (band.empty) return out;

    const double ts = sign == Sign::plus ? t : -t;
    // Fold the window-center y phase into the shared phase: near the wave
    // front it cancels most of the t phase, and the residual per-component
    // factors only see the offsets from the center.
    double yc = 0.0;
    for (double y : ys) yc += y;
    yc /= std::max<std::size_t>(ys.size(), 1);
    double ymax = 0.0;
    for (double y : ys) ymax = std::max(ymax, std::fabs(y - yc));

    // Window ladder: start from the lemma window, grow by 1.6x.
    std::vector<int> levels;
    {
        int m0 = std::max(4, n_window(t, p.gamma, p.window_slack, p.window_c0)
                                 .second);
        int m = std::min(m0, std::max(4, m_cap * 2 / 3));
        while (m < m_cap) {
            levels.push_back(m);
            m = std::max(m + 4, static_cast<int>(m * 1.6));
        }
        levels.push_back(m_cap);
    }
    const int nlev = static_cast<int>(levels.size());

    VecIntegrand ig;
    ig.dim = 2;
    ig.m = nlev * nx * ny;
    ig.lambda = 1.0;
    ig.box[0] = {band.alpha_lo, band.alpha_hi};
    ig.box[1] = {p.cutoffs.eta_lo, p.cutoffs.eta_hi};
    ig.phase = [&, ts, yc](std::span<const double> v) {
        return (yc + ts * std::sqrt(1.0 + v[0])) * v[1] / p.h;
    };
    const int mtop = levels.back();
    ig.min_splits[0] = static_cast<int>(mtop * std::fabs(band.dL_alpha) /
                                        detail::kPi) + 2;
    ig.min_splits[1] = static_cast<int>((ymax * (p.cutoffs.eta_hi -
                                                 p.cutoffs.eta_lo) / p.h +
                                         mtop * band.dL_eta) /
                                        detail::kPi) + 2;

    std::vector<double> aix(nx);
    std::vector<std::complex<double>> ey(ny);
    std::vector<double> dir(nlev);
    ig.amplitude = [&](std::span<const double> v,
                       std::span<std::complex<double>> outv) {
        const double alpha = v[0], eta = v[1];
        double om;
        const double w = detail::pmx_weight(p, alpha, eta, om);
        if (w == 0.0) {
            std::fill(outv.begin(), outv.end(), std::complex<double>{});
            return;
        }
        const double hb23i = std::pow(eta / p.h, 2.0 / 3.0);
        const double base =
            std::pow(eta, 4.0 / 3.0) / std::pow(p.h, 7.0 / 3.0) * w *
            ai(hb23i * (p.a - alpha));
        const double L = phase_l(om);
        for (int l = 0; l < nlev; ++l)
            dir[l] = detail::dirichlet_kernel(levels[l], L);
        for (int i = 0; i < nx; ++i) aix[i] = ai(hb23i * (xs[i] - alpha));
        for (int j = 0; j < ny; ++j) {
            const double ph = (ys[j] - yc) * eta / p.h;
            ey[j] = {std::cos(ph), std::sin(ph)};
        }
        for (int l = 0; l < nlev; ++l)
            for (int i = 0; i < nx; ++i) {
                const double c = base * dir[l] * aix[i];
                for (int j = 0; j < ny; ++j)
                    outv[(static_cast<std::size_t>(l) * nx + i) * ny + j] =
                        c * ey[j];
            }
    };

    QuadOptions qopt;
    qopt.eval_budget = opt.eval_budget;
    qopt.max_panels = opt.max_panels;
    const double tol = opt.tol_scale * std::sqrt(p.gamma) / (p.h * p.h);
    auto res = integrate_vec(ig, tol, qopt, opt.presplit_scale);
    out.quad_converged = res.converged;
    out.evaluations = res.evaluations;

    // pick the last level; check the plateau against the previous one
    double scale = 0.0;
    for (int i = 0; i < nx * ny; ++i)
        scale = std::max(scale,
                         std::abs(res.value[static_cast<std::size_t>(nlev - 1) *
                                                nx * ny + i]));
    double drift = 0.0;
    for (int i = 0; i < nx * ny; ++i) {
        const auto last =
            res.value[static_cast<std::size_t>(nlev - 1) * nx * ny + i];
        const auto prev =
            res.value[static_cast<std::size_t>(nlev - 2) * nx * ny + i];
        drift = std::max(drift, std::abs(last - prev));
        out.g[i] = last;
    }
    out.m_used = levels.back();
    // Per-level values come from one shared panel set, so their differences
    // are far more accurate than the absolute tolerance; no floor needed.
    out.window_converged = drift <= std::max(opt.window_rel_tol * scale, 1e-300);
    return out;
}

} // namespace detail

/// Full reflection sum on a grid of (x, y) at fixed t, via the Dirichlet
/// kernel sum over |N| <= M.  M grows geometrically until the values plateau;
/// a small cap is tried first and escalated only when the window has not
/// converged (cost grows like M^2).
inline ParametrixGridResult parametrix_grid(const AiryTable& tab,
                                            const ModelParams& p, Sign sign,
                                            double t,
                                            std::span<const double> xs,
                                            std::span<const double> ys,
                                            const ParametrixOptions& opt = {}) {
    (void)tab;
    p.validate(false);
    const int m0 =
        n_window(t, p.gamma, p.window_slack, p.window_c0).second;
    int cap = std::min(opt.m_cap, std::max(2 * m0 + 8, 48));
    long long evals = 0;
    for (;;) {
        auto r = detail::parametrix_grid_capped(p, sign, t, xs, ys, cap, opt);
        evals += r.evaluations;
        r.evaluations = evals;
        if (r.window_converged || cap >= opt.m_cap) return r;
        cap = std::min(opt.m_cap, 2 * cap);
    }
}

/// Full reflection sum at a single point.
inline std::complex<double> green_parametrix(const AiryTable& tab,
                                             const ModelParams& p, Sign sign,
                                             double t, double x, double y,
                                             const ParametrixOptions& opt = {}) {
    const double xs[1] = {x};
    const double ys[1] = {y};
    auto r = parametrix_grid(tab, p, sign, t, xs, ys, opt);
    return r.g[0];
}

/// Single reflection term K_N on a grid of (x, y) at fixed t.
inline std::vector<std::complex<double>> wave_term_grid(
    const AiryTable& tab, const ModelParams& p, Sign sign, int N, double t,
    std::span<const double> xs, std::span<const double> ys,
    const ParametrixOptions& opt = {}) {
    (void)tab;
    p.validate(false);
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());
    const auto band = detail::pmx_band(p);
    if (band.empty)
        return std::vector<std::complex<double>>(
            static_cast<std::size_t>(nx) * ny, {0.0, 0.0});

    const double ts = sign == Sign::plus ? t : -t;
    double ymax = 0.0;
    for (double y : ys) ymax = std::max(ymax, std::fabs(y));

    VecIntegrand ig;
    ig.dim = 2;
    ig.m = nx * ny;
    ig.lambda = 1.0;
    ig.box[0] = {band.alpha_lo, band.alpha_hi};
    ig.box[1] = {p.cutoffs.eta_lo, p.cutoffs.eta_hi};
    ig.phase = [&, ts, N](std::span<const double> v) {
        const double om = v[0] * std::pow(v[1] / p.h, 2.0 / 3.0);
        return ts * v[1] * std::sqrt(1.0 + v[0]) / p.h - N * phase_l(om);
    };
    ig.min_splits[1] = static_cast<int>(
        ymax * (p.cutoffs.eta_hi - p.cutoffs.eta_lo) / (p.h * detail::kPi)) + 2;

    std::vector<double> aix(nx);
    ig.amplitude = [&](std::span<const double> v,
                       std::span<std::complex<double>> outv) {
        const double alpha = v[0], eta = v[1];
        double om;
        const double w = detail::pmx_weight(p, alpha, eta, om);
        if (w == 0.0) {
            std::fill(outv.begin(), outv.end(), std::complex<double>{});
            return;
        }
        const double hb23i = std::pow(eta / p.h, 2.0 / 3.0);
        const double base =
            std::pow(eta, 4.0 / 3.0) / std::pow(p.h, 7.0 / 3.0) * w *
            ai(hb23i * (p.a - alpha));
        for (int i = 0; i < nx; ++i) aix[i] = ai(hb23i * (xs[i] - alpha));
        for (int j = 0; j < ny; ++j) {
            const double ph = ys[j] * eta / p.h;
            const std::complex<double> ey{std::cos(ph), std::sin(ph)};
            for (int i = 0; i < nx; ++i)
                outv[static_cast<std::size_t>(i) * ny + j] = base * aix[i] * ey;
        }
    };

    QuadOptions qopt;
    qopt.eval_budget = opt.eval_budget;
    qopt.max_panels = opt.max_panels;
    const double tol = opt.tol_scale * std::sqrt(p.gamma) / (p.h * p.h);
    auto res = integrate_vec(ig, tol, qopt, opt.presplit_scale);
    return std::move(res.value);
}

/// Single reflection term at a point (collapsed 2D form).
inline std::complex<double> wave_term_collapsed(const AiryTable& tab,
                                                const ModelParams& p, Sign sign,
                                                int N, double t, double x,
                                                double y,
                                                const ParametrixOptions& opt = {}) {
    const double xs[1] = {x};
    const double ys[1] = {y};
    return wave_term_grid(tab, p, sign, N, t, xs, ys, opt)[0];
}

// ---------------------------------------------------------------------------
// Direct (rescaled) wave terms

struct NonConvergenceError : std::runtime_error {
    std::complex<double> partial;
    double lambda;
    int N;
    NonConvergenceError(const std::string& msg, std::complex<double> part,
                        double lam, int n)
        : std::runtime_error(msg), partial(part), lambda(lam), N(n) {}
};

struct WaveTermOptions {
    double tol = 1e-8; // absolute on the rescaled integral (pre-prefactor)
    double s_window = 3.0;   // |S|, |Sigma| window per the construction
    double s_ramp = 1.0;     // smooth ramp width at the window edge
    long long eval_budget = 100'000'000;
    int max_panels = 100'000;
};

namespace detail {

inline double window_cut(double v, double wmax, double ramp) {
    const double av = std::fabs(v);
    if (av <= wmax - ramp) return 1.0;
    if (av >= wmax) return 0.0;
    return 1.0 - cutoff::smooth_step((av - (wmax - ramp)) / ramp);
}

// regime A-window: psi3 on [9/10, 6] tangential; psi2 support transverse
inline double a_cut(const PhaseSpec& sp, double A) {
    const double frac = sp.params.a / sp.params.gamma;
    if (sp.regime == Regime::tangential) {
        double w = 1.0;
        if (A < 1.0) w *= cutoff::smooth_step((A - 0.9) / 0.1);
        if (A > 5.0) w *= 1.0 - cutoff::smooth_step((A - 5.0) / 1.0);
        return w * sp.params.cutoffs.psi2(frac * A);
    }
    return sp.params.cutoffs.psi2(A);
}

} // namespace detail

/// Direct oscillatory-integral evaluation of the rescaled wave term
/// W_N(T, X, Y) over (S, Sigma, A, eta) with |S|, |Sigma| <= s_window.
inline std::complex<double> wave_term(const AiryTable& tab,
                                      const PhaseSpec& sp, double T, double X,
                                      double Y,
                                      const WaveTermOptions& opt = {}) {
    (void)tab;
    const ModelParams& p = sp.params;
    const double c = sp.c;
    const double lam = sp.lambda;

    Integrand ig;
    ig.dim = 4;
    ig.lambda = lam;
    // v = (S, Sigma, A, eta); the A box is the intersection of the regime
    // window with the psi2 support (the amplitude vanishes outside).
    const double frac = p.gamma / p.a;
    const double A_lo = sp.regime == Regime::tangential
                            ? std::max(0.9, p.cutoffs.psi2_lo * frac)
                            : p.cutoffs.psi2_lo;
    const double A_hi = sp.regime == Regime::tangential
                            ? std::min(6.0, p.cutoffs.psi2_hi * frac)
                            : p.cutoffs.psi2_hi;
    if (!(A_hi > A_lo))
        throw std::domain_error("wave_term: empty A support");
    ig.box[0] = {-opt.s_window, opt.s_window};
    ig.box[1] = {-opt.s_window, opt.s_window};
    ig.box[2] = {A_lo, A_hi};
    ig.box[3] = {p.cutoffs.eta_lo, p.cutoffs.eta_hi};

    ig.phase = [&, T, X, Y](std::span<const double> v) {
        const double S = v[0], Sg = v[1], A = v[2], eta = v[3];
        // below the chi1 support (z < 1) the amplitude vanishes; clamp A so
        // the remainder branch stays defined there
        const double Asafe =
            std::max(A, std::pow(1.0 / (eta * lam), 2.0 / 3.0));
        return phase_rescaled(sp, T, X, Y, Sg, S, Asafe, eta);
    };
    ig.amplitude = [&](std::span<const double> v) -> std::complex<double> {
        const double S = v[0], Sg = v[1], A = v[2], eta = v[3];
        const double om = std::pow(eta * lam, 2.0 / 3.0) * A;
        double w = p.cutoffs.psi(eta) *
                   p.cutoffs.psi1(eta * std::sqrt(1.0 + c * A)) *
                   p.cutoffs.chi1(om) * detail::a_cut(sp, A) *
                   detail::window_cut(S, opt.s_window, opt.s_ramp) *
                   detail::window_cut(Sg, opt.s_window, opt.s_ramp);
        if (w == 0.0) return {0.0, 0.0};
        return w * eta * eta;
    };

    QuadOptions qopt;
    qopt.eval_budget = opt.eval_budget;
    qopt.max_panels = opt.max_panels;
    auto res = integrate(ig, opt.tol, qopt);
    const double pref = c * c / (4.0 * detail::kPi * detail::kPi *
                                 p.h * p.h * p.h);
    if (!res.converged)
        throw NonConvergenceError("wave_term: quadrature did not converge",
                                  pref * res.value, lam, sp.N);
    return pref * res.value;
}

/// Cross-validation form: the Sigma integral collapsed to an Airy factor,
/// the S integral kept direct with a wide smooth window.
inline std::complex<double> wave_term_sdirect(const AiryTable& tab,
                                              const PhaseSpec& sp, double T,
                                              double X, double Y,
                                              const WaveTermOptions& opt = {}) {
    (void)tab;
    const ModelParams& p = sp.params;
    const double c = sp.c;
    const double lam = sp.lambda;

    Integrand ig;
    ig.dim = 3;
    ig.lambda = lam;
    // v = (S, A, eta)
    const double frac = p.gamma / p.a;
    const double A_lo = sp.regime == Regime::tangential
                            ? std::max(0.9, p.cutoffs.psi2_lo * frac)
                            : p.cutoffs.psi2_lo;
    const double A_hi = sp.regime == Regime::tangential
                            ? std::min(6.0, p.cutoffs.psi2_hi * frac)
                            : p.cutoffs.psi2_hi;
    if (!(A_hi > A_lo))
        throw std::domain_error("wave_term_sdirect: empty A support");
    ig.box[0] = {-opt.s_window, opt.s_window};
    ig.box[1] = {A_lo, A_hi};
    ig.box[2] = {p.cutoffs.eta_lo, p.cutoffs.eta_hi};

    // Sigma enters only through Sigma^3/3 + Sigma(X - A), which vanishes at
    // Sigma = 0; the Airy amplitude factor below supplies that integral.
    ig.phase = [&, T, X, Y](std::span<const double> v) {
        const double S = v[0], A = v[1], eta = v[2];
        const double Asafe =
            std::max(A, std::pow(1.0 / (eta * lam), 2.0 / 3.0));
        return phase_rescaled(sp, T, X, Y, 0.0, S, Asafe, eta);
    };
    ig.amplitude = [&](std::span<const double> v) -> std::complex<double> {
        const double S = v[0], A = v[1], eta = v[2];
        const double om = std::pow(eta * lam, 2.0 / 3.0) * A;
        double w = p.cutoffs.psi(eta) *
                   p.cutoffs.psi1(eta * std::sqrt(1.0 + c * A)) *
                   p.cutoffs.chi1(om) * detail::a_cut(sp, A) *
                   detail::window_cut(S, opt.s_window, opt.s_ramp);
        if (w == 0.0) return {0.0, 0.0};
        const double el13 = std::cbrt(eta * lam);
        const double airy = 2.0 * detail::kPi / el13 *
                            ai(el13 * el13 * (X - A));
        return w * eta * eta * airy;
    };

    QuadOptions qopt;
    qopt.eval_budget = opt.eval_budget;
    qopt.max_panels = opt.max_panels;
    auto res = integrate(ig, opt.tol, qopt);
    const double pref = c * c / (4.0 * detail::kPi * detail::kPi *
                                 p.h * p.h * p.h);
    if (!res.converged)
        throw NonConvergenceError("wave_term_sdirect: quadrature did not converge",
                                  pref * res.value, lam, sp.N);
    return pref * res.value;
}

} // namespace halfwave
