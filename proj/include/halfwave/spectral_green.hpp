#pragma once

// Gallery-eigenmode basis of the Friedlander operator and the spectrally
// localized half-wave Green function
//
//   G^{pm}_{h,gamma}(t,x,y) = (1/h) sum_k int e^{pm i t sqrt(lambda_k(eta/h))}
//        e^{i y eta/h} psi(eta) psi1(h sqrt(lambda_k)) psi2(hbar^{2/3} omega_k
//        / gamma) e_k(x, eta/h) e_k(a, eta/h) d eta,   hbar = h/eta.
//
// This k-sum is the oracle path: every term is a smooth compactly supported
// 1D eta-integral handled by adaptive panels.  A dense-in-y fast path samples
// the eta-integrand once and FFTs the linear e^{i y eta/h} factor, which is
// what the sup scans use.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "halfwave/airy.hpp"
#include "halfwave/detail/fft.hpp"
#include "halfwave/detail/panel.hpp"
#include "halfwave/model.hpp"

namespace halfwave {

/// lambda_k(theta) = theta^2 + omega_k |theta|^{4/3}
inline double eigenvalue(const AiryTable& tab, int k, double theta) {
    if (theta == 0.0)
        throw std::domain_error("eigenvalue: theta must be nonzero");
    const double at = std::fabs(theta);
    return at * at + tab.zero(k) * std::pow(at, 4.0 / 3.0);
}

/// e_k(x, theta) = sqrt(2 pi) |theta|^{1/3} / sqrt(L'(omega_k))
///                 Ai(|theta|^{2/3} x - omega_k), Dirichlet on x = 0.
inline double eigenmode(const AiryTable& tab, int k, double theta, double x) {
    if (x < 0.0) throw std::domain_error("eigenmode: x must be >= 0");
    if (theta == 0.0)
        throw std::domain_error("eigenmode: theta must be nonzero");
    const double at = std::fabs(theta);
    const double t13 = std::cbrt(at);
    return std::sqrt(2.0 * detail::kPi) * t13 / std::sqrt(tab.lp(k)) *
           ai(t13 * t13 * x - tab.zero(k));
}

struct GreenOptions {
    double tol = 1e-9;        // absolute eta-integral tolerance per k-term
    int max_panels = 200'000;
    int presplit_scale = 1;   // doubled by refinement checks
};

namespace detail {

// psi2 band in omega at given eta: omega in gamma/hbar^{2/3} * [lo, hi].
inline double psi2_omega_hi(const ModelParams& p, double eta) {
    return p.cutoffs.psi2_hi * p.gamma * std::pow(eta / p.h, 2.0 / 3.0);
}

} // namespace detail

/// Largest k whose psi2 weight can be nonzero anywhere on the eta support,
/// plus the guard margin.  Terms beyond the unguarded index are identically
/// zero; the guard indices document that.
inline int k_band_max(const AiryTable& tab, const ModelParams& p) {
    const double om_hi = detail::psi2_omega_hi(p, p.cutoffs.eta_hi);
    int k = 0;
    while (k < tab.k_max && tab.zero(k + 1) <= om_hi) ++k;
    return std::min(tab.k_max, k + p.kmax_margin);
}

/// Required table depth for the parameters (with guard margin).
inline int k_required(const ModelParams& p) {
    const double om_hi = detail::psi2_omega_hi(p, p.cutoffs.eta_hi);
    // count zeros below om_hi via the phase function: L(omega_k) = 2 pi k
    const int k = static_cast<int>(std::floor(phase_l(om_hi) / (2.0 * detail::kPi)));
    return k + p.kmax_margin + 1;
}

namespace detail {

template <class PerEta>
std::complex<double> eta_integral(const ModelParams& p, double osc_hint,
                                  const GreenOptions& opt, PerEta&& f) {
    const double lo = p.cutoffs.eta_lo, hi = p.cutoffs.eta_hi;
    int splits = std::max(4, static_cast<int>(osc_hint / kPi) + 1);
    splits = std::min(splits, 1 << 14) * opt.presplit_scale;
    auto res = adaptive_gk<std::complex<double>>(f, lo, hi, opt.tol, splits,
                                                 opt.max_panels);
    return res.value;
}

} // namespace detail

/// One eigenmode's eta-integral of the Green kernel.
inline std::complex<double> green_spectral_term(const AiryTable& tab,
                                                const ModelParams& p, Sign sign,
                                                int k, double t, double x,
                                                double y,
                                                const GreenOptions& opt = {}) {
    const double omk = tab.zero(k);
    const double sgn = sign == Sign::plus ? 1.0 : -1.0;
    const double osc = (std::fabs(t) * 1.6 + std::fabs(y)) *
                       (p.cutoffs.eta_hi - p.cutoffs.eta_lo) / p.h;
    auto f = [&](double eta) -> std::complex<double> {
        const double lam = eigenvalue(tab, k, eta / p.h);
        const double hb23 = std::pow(p.h / eta, 2.0 / 3.0);
        const double w = p.cutoffs.psi(eta) *
                         p.cutoffs.psi1(p.h * std::sqrt(lam)) *
                         p.cutoffs.psi2(hb23 * omk / p.gamma);
        if (w == 0.0) return {0.0, 0.0};
        const double amp = w * eigenmode(tab, k, eta / p.h, x) *
                           eigenmode(tab, k, eta / p.h, p.a);
        const double ph = sgn * t * std::sqrt(lam) + y * eta / p.h;
        return amp * std::complex<double>(std::cos(ph), std::sin(ph));
    };
    return detail::eta_integral(p, osc, opt, f) / p.h;
}

/// Spectrally localized Green function at one point.
inline std::complex<double> green_spectral(const AiryTable& tab,
                                           const ModelParams& p, Sign sign,
                                           double t, double x, double y,
                                           const GreenOptions& opt = {}) {
    if (x < 0.0) throw std::domain_error("green_spectral: x must be >= 0");
    p.validate(false);
    std::complex<double> sum{0.0, 0.0};
    const int kmax = k_band_max(tab, p);
    for (int k = 1; k <= kmax; ++k)
        sum += green_spectral_term(tab, p, sign, k, t, x, y, opt);
    return sum;
}

/// Source at time s and transverse position b: the kernel depends on the
/// differences only.
inline std::complex<double> green_spectral(const AiryTable& tab,
                                           const ModelParams& p, Sign sign,
                                           double t, double x, double y,
                                           double b, double s,
                                           const GreenOptions& opt = {}) {
    return green_spectral(tab, p, sign, t - s, x, y - b, opt);
}

/// Sum over the dyadic gamma ladder (gamma_max down to the band floor).
inline std::complex<double> green_full(const AiryTable& tab, double h,
                                       Sign sign, double t, double x, double y,
                                       double a, const GreenOptions& opt = {},
                                       double gamma_max = 0.25) {
    std::complex<double> sum{0.0, 0.0};
    const double floor = std::pow(h, 2.0 / 3.0) / 4.0;
    for (double g = gamma_max; g >= floor; g *= 0.5) {
        ModelParams p;
        p.h = h;
        p.gamma = g;
        p.a = a;
        sum += green_spectral(tab, p, sign, t, x, y, opt);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Dense y-line evaluation.  For fixed (t, x) the kernel is
//   G(y) = (1/h) int F(eta) e^{i y eta / h} d eta
// with F smooth and compactly supported in [eta_lo, eta_hi]; midpoint samples
// of F converge superalgebraically and the y-dependence is an FFT.

struct YLine {
    double y0 = 0.0; // first sample
    double dy = 0.0;
    std::vector<std::complex<double>> g;

    double sup_abs(double* argmax = nullptr) const {
        double m = -1.0;
        std::size_t best = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = std::abs(g[i]);
            if (v > m) {
                m = v;
                best = i;
            }
        }
        if (argmax) *argmax = y0 + dy * static_cast<double>(best);
        return std::max(m, 0.0);
    }
};

struct LineOptions {
    int eta_samples = 1024; // power of two
    int oversample = 4;
};

namespace detail {

// F: eta -> complex; returns G on a y-grid centered at ycenter covering at
// least [ycenter - yhalf, ycenter + yhalf].
template <class F>
YLine oscillatory_yline(F&& f, double eta_lo, double eta_hi, double h,
                        double ycenter, double yhalf, const LineOptions& opt) {
    const double span = eta_hi - eta_lo;
    // Unaliased y-period of the sampled transform is 2 pi h M / span.
    std::size_t m = next_pow2(static_cast<std::size_t>(opt.eta_samples));
    while (2.0 * kPi * h * static_cast<double>(m) / span < 2.2 * yhalf)
        m <<= 1;
    const std::size_t mfft =
        next_pow2(m * static_cast<std::size_t>(std::max(1, opt.oversample)));
    const double deta = span / static_cast<double>(m);

    std::vector<std::complex<double>> buf(mfft, {0.0, 0.0});
    for (std::size_t j = 0; j < m; ++j) {
        const double eta = eta_lo + (static_cast<double>(j) + 0.5) * deta;
        const std::complex<double> fe = f(eta);
        // fold the phase at the window center into the sample
        const double ph = ycenter * eta / h;
        buf[j] = fe * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    fft_inplace(buf, true); // sum_j buf_j e^{+2 pi i j m / M}

    YLine line;
    line.dy = 2.0 * kPi * h / (deta * static_cast<double>(mfft));
    const std::size_t half = mfft / 2;
    line.g.resize(mfft);
    // Arrange output as y = ycenter + (i - half) dy via FFT index wraparound.
    for (std::size_t i = 0; i < mfft; ++i) {
        const long long off = static_cast<long long>(i) -
                              static_cast<long long>(half);
        const std::size_t src = static_cast<std::size_t>(
            (off + static_cast<long long>(mfft)) % static_cast<long long>(mfft));
        const double u = static_cast<double>(off) * line.dy;
        const double ph0 = u * (eta_lo + 0.5 * deta) / h;
        line.g[i] = buf[src] * std::complex<double>(std::cos(ph0), std::sin(ph0)) *
                    (deta / h);
    }
    line.y0 = ycenter - static_cast<double>(half) * line.dy;
    return line;
}

} // namespace detail

/// G(t, x, .) sampled densely on a y-window (FFT fast path; same integrand
/// as green_spectral).
inline YLine green_spectral_yline(const AiryTable& tab, const ModelParams& p,
                                  Sign sign, double t, double x,
                                  double ycenter, double yhalf,
                                  const LineOptions& lopt = {}) {
    const int kmax = k_band_max(tab, p);
    const double sgn = sign == Sign::plus ? 1.0 : -1.0;
    // oscillation of the nonlinear phase part across the eta window
    double nl_range = 0.0;
    const double eta_c = 0.5 * (p.cutoffs.eta_lo + p.cutoffs.eta_hi);
    for (int k = 1; k <= kmax; ++k) {
        const double w1 = std::sqrt(eigenvalue(tab, k, p.cutoffs.eta_lo / p.h));
        const double w2 = std::sqrt(eigenvalue(tab, k, p.cutoffs.eta_hi / p.h));
        const double wc = std::sqrt(eigenvalue(tab, k, eta_c / p.h));
        // second difference bounds the non-linear phase variation
        nl_range = std::max(nl_range, std::fabs(t) * std::fabs(w1 + w2 - 2.0 * wc));
    }
    LineOptions opt = lopt;
    int need = static_cast<int>(8.0 * nl_range / (2.0 * detail::kPi)) + 64;
    opt.eta_samples = static_cast<int>(detail::next_pow2(
        static_cast<std::size_t>(std::max(opt.eta_samples, need))));

    auto f = [&](double eta) -> std::complex<double> {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 1; k <= kmax; ++k) {
            const double omk = tab.zero(k);
            const double lam = eigenvalue(tab, k, eta / p.h);
            const double hb23 = std::pow(p.h / eta, 2.0 / 3.0);
            const double w = p.cutoffs.psi(eta) *
                             p.cutoffs.psi1(p.h * std::sqrt(lam)) *
                             p.cutoffs.psi2(hb23 * omk / p.gamma);
            if (w == 0.0) continue;
            const double amp = w * eigenmode(tab, k, eta / p.h, x) *
                               eigenmode(tab, k, eta / p.h, p.a);
            const double ph = sgn * t * std::sqrt(lam);
            acc += amp * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        return acc;
    };
    return detail::oscillatory_yline(f, p.cutoffs.eta_lo, p.cutoffs.eta_hi, p.h,
                                     ycenter, yhalf, opt);
}

} // namespace halfwave
