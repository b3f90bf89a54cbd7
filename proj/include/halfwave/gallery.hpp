#pragma once

// Whispering-gallery modes u_k, their reduced 1D waves w_k, the convolution
// kernel Gamma_{x,omega_k}, and the k-uniform Strichartz ratio.

#include <cmath>
#include <complex>
#include <vector>

#include "halfwave/airy.hpp"
#include "halfwave/detail/panel.hpp"
#include "halfwave/model.hpp"
#include "halfwave/spectral_green.hpp"

namespace halfwave {

struct GalleryOptions {
    double tol = 1e-10;     // eta-quad absolute tolerance
    int max_panels = 100'000;
    CutoffSpec cutoffs{};
};

namespace detail {

template <class Amp>
std::complex<double> gallery_eta_quad(const GalleryOptions& opt, double osc,
                                      Amp&& f) {
    const double lo = opt.cutoffs.eta_lo, hi = opt.cutoffs.eta_hi;
    const int splits = std::min(1 << 14,
                                std::max(4, static_cast<int>(osc / kPi) + 1));
    auto res = adaptive_gk<std::complex<double>>(f, lo, hi, opt.tol, splits,
                                                 opt.max_panels);
    return res.value;
}

} // namespace detail

/// Gallery mode u_{k,pm}(t,x,y) =
///   (1/h) int e^{pm i t sqrt(lambda_k(eta/h))} e^{i y eta/h} psi(eta)
///         e_k(x, eta/h) d eta.
inline std::complex<double> gallery_eval(const AiryTable& tab, int k, double h,
                                         Sign sign, double t, double x,
                                         double y,
                                         const GalleryOptions& opt = {}) {
    if (x < 0.0) throw std::domain_error("gallery_eval: x must be >= 0");
    const double sgn = sign == Sign::plus ? 1.0 : -1.0;
    const double osc = (1.6 * std::fabs(t) + std::fabs(y)) *
                       (opt.cutoffs.eta_hi - opt.cutoffs.eta_lo) / h;
    auto f = [&](double eta) -> std::complex<double> {
        const double w = opt.cutoffs.psi(eta);
        if (w == 0.0) return {};
        const double lam = eigenvalue(tab, k, eta / h);
        const double amp = w * eigenmode(tab, k, eta / h, x);
        const double ph = sgn * t * std::sqrt(lam) + y * eta / h;
        return amp * std::complex<double>(std::cos(ph), std::sin(ph));
    };
    return detail::gallery_eta_quad(opt, osc, f) / h;
}

/// Reduced wave w_k(t,y) = (1/h) int e^{(it/h) sqrt(eta^2 + omega_k eta^{4/3}
/// h^{2/3})} psi(eta) e^{i y eta/h} d eta  (gallery mode without the
/// transverse profile).
inline std::complex<double> reduced_wave(const AiryTable& tab, int k, double h,
                                         double t, double y,
                                         const GalleryOptions& opt = {}) {
    const double osc = (1.6 * std::fabs(t) + std::fabs(y)) *
                       (opt.cutoffs.eta_hi - opt.cutoffs.eta_lo) / h;
    auto f = [&](double eta) -> std::complex<double> {
        const double w = opt.cutoffs.psi(eta);
        if (w == 0.0) return {};
        const double ph = t * std::sqrt(eigenvalue(tab, k, eta / h)) +
                          y * eta / h;
        return w * std::complex<double>(std::cos(ph), std::sin(ph));
    };
    return detail::gallery_eta_quad(opt, osc, f) / h;
}

/// Dense-in-y gallery mode samples at fixed (t, x) (FFT fast path).
inline YLine gallery_yline(const AiryTable& tab, int k, double h, Sign sign,
                           double t, double x, double ycenter, double yhalf,
                           const GalleryOptions& opt = {},
                           const LineOptions& lopt = {}) {
    const double sgn = sign == Sign::plus ? 1.0 : -1.0;
    LineOptions lo = lopt;
    {
        const double w1 = std::sqrt(eigenvalue(tab, k, opt.cutoffs.eta_lo / h));
        const double w2 = std::sqrt(eigenvalue(tab, k, opt.cutoffs.eta_hi / h));
        const double wc = std::sqrt(eigenvalue(
            tab, k, 0.5 * (opt.cutoffs.eta_lo + opt.cutoffs.eta_hi) / h));
        const double nl = std::fabs(t) * std::fabs(w1 + w2 - 2.0 * wc);
        const int need = static_cast<int>(8.0 * nl / (2.0 * detail::kPi)) + 64;
        lo.eta_samples = static_cast<int>(detail::next_pow2(
            static_cast<std::size_t>(std::max(lo.eta_samples, need))));
    }
    auto f = [&](double eta) -> std::complex<double> {
        const double w = opt.cutoffs.psi(eta);
        if (w == 0.0) return {};
        const double amp = w * eigenmode(tab, k, eta / h, x);
        const double ph = sgn * t * std::sqrt(eigenvalue(tab, k, eta / h));
        return amp * std::complex<double>(std::cos(ph), std::sin(ph));
    };
    return detail::oscillatory_yline(f, opt.cutoffs.eta_lo, opt.cutoffs.eta_hi,
                                     h, ycenter, yhalf, lo);
}

/// Dense-in-y reduced wave w_k(t, .) (same fast path, no transverse profile).
inline YLine reduced_wave_yline(const AiryTable& tab, int k, double h,
                                double t, double ycenter, double yhalf,
                                const GalleryOptions& opt = {},
                                const LineOptions& lopt = {}) {
    LineOptions lo = lopt;
    {
        const double w1 = std::sqrt(eigenvalue(tab, k, opt.cutoffs.eta_lo / h));
        const double w2 = std::sqrt(eigenvalue(tab, k, opt.cutoffs.eta_hi / h));
        const double wc = std::sqrt(eigenvalue(
            tab, k, 0.5 * (opt.cutoffs.eta_lo + opt.cutoffs.eta_hi) / h));
        const double nl = std::fabs(t) * std::fabs(w1 + w2 - 2.0 * wc);
        const int need = static_cast<int>(8.0 * nl / (2.0 * detail::kPi)) + 64;
        lo.eta_samples = static_cast<int>(detail::next_pow2(
            static_cast<std::size_t>(std::max(lo.eta_samples, need))));
    }
    auto f = [&](double eta) -> std::complex<double> {
        const double w = opt.cutoffs.psi(eta);
        if (w == 0.0) return {};
        const double ph = t * std::sqrt(eigenvalue(tab, k, eta / h));
        return w * std::complex<double>(std::cos(ph), std::sin(ph));
    };
    return detail::oscillatory_yline(f, opt.cutoffs.eta_lo, opt.cutoffs.eta_hi,
                                     h, ycenter, yhalf, lo);
}

/// Group velocity of the mode at eta (for centering y-windows): t-stationary
/// y is y = -t v_k(eta).
inline double gallery_group_velocity(const AiryTable& tab, int k, double h,
                                     double eta) {
    const double de = 1e-4;
    const double a = std::sqrt(eigenvalue(tab, k, (eta - de) / h));
    const double b = std::sqrt(eigenvalue(tab, k, (eta + de) / h));
    return h * (b - a) / (2.0 * de);
}

/// Convolution kernel Gamma_{x,omega_k}(y).
inline std::complex<double> gamma_kernel(const AiryTable& tab, int k, double h,
                                         double x, double y,
                                         const GalleryOptions& opt = {}) {
    const double omk = tab.zero(k);
    const double osc = std::fabs(y) *
                       (opt.cutoffs.eta_hi - opt.cutoffs.eta_lo) / h;
    auto f = [&](double eta) -> std::complex<double> {
        const double w = opt.cutoffs.psi(eta);
        if (w == 0.0) return {};
        const double th = eta / h;
        const double amp =
            w * std::cbrt(th) * ai(std::cbrt(th * th) * x - omk);
        const double ph = y * eta / h;
        return amp * std::complex<double>(std::cos(ph), std::sin(ph));
    };
    return detail::gallery_eta_quad(opt, osc, f) /
           (h * std::sqrt(tab.lp(k)));
}

/// L^1_y norm of Gamma_{x,omega_k} over the stationary-set window
/// |y| <= max(4 x h^{1/3} sqrt(omega_k), 8h).
inline double gamma_kernel_l1(const AiryTable& tab, int k, double h, double x,
                              const GalleryOptions& opt = {}) {
    if (x < 0.0) throw std::domain_error("gamma_kernel_l1: x must be >= 0");
    const double omk = tab.zero(k);
    const double window = std::max(4.0 * x * std::pow(h, 1.0 / 3.0) *
                                       std::sqrt(omk),
                                   8.0 * h);
    auto f = [&](double y) { return std::abs(gamma_kernel(tab, k, h, x, y, opt)); };
    auto res = detail::adaptive_gk<double>(
        f, -window, window, 1e-6 / std::pow(h, 1.0 / 3.0),
        std::max(16, static_cast<int>(window / h) / 2), opt.max_panels);
    return res.value;
}

/// ||u_k(t,.)||_{L^2} over x >= 0 and a centered y-window wide enough to
/// capture the packet.
inline double gallery_l2_norm(const AiryTable& tab, int k, double h, double t,
                              const GalleryOptions& opt = {}) {
    const double omk = tab.zero(k);
    const double x_hi = (omk + 8.0) * std::pow(h / opt.cutoffs.eta_lo, 2.0 / 3.0);
    const double vg = gallery_group_velocity(tab, k, h, 1.0);
    const double v1 = gallery_group_velocity(tab, k, h, opt.cutoffs.eta_lo);
    const double v2 = gallery_group_velocity(tab, k, h, opt.cutoffs.eta_hi);
    const double yc = -t * vg;
    const double yhalf = std::fabs(t) * (std::fabs(v2 - v1) + 0.1) + 60.0 * h;

    auto fx = [&](double x) {
        auto line = gallery_yline(tab, k, h, Sign::plus, t, x, yc, yhalf, opt);
        // trapezoid of |u|^2 over the window
        double acc = 0.0;
        const std::size_t n = line.g.size();
        const double lo = yc - yhalf, hi = yc + yhalf;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = line.y0 + line.dy * static_cast<double>(i);
            if (y < lo || y > hi) continue;
            acc += std::norm(line.g[i]) * line.dy;
        }
        return acc;
    };
    auto res = detail::adaptive_gk<double>(fx, 0.0, x_hi, 1e-8 / h, 24,
                                           opt.max_panels);
    return std::sqrt(res.value);
}

/// sup_y |u_k(t, x, y)| maximized over an x-grid (dense in y via FFT).
inline double gallery_sup(const AiryTable& tab, int k, double h, double t,
                          int nx = 24, const GalleryOptions& opt = {}) {
    const double omk = tab.zero(k);
    const double x_hi = (omk + 4.0) * std::pow(h / opt.cutoffs.eta_lo, 2.0 / 3.0);
    const double vg = gallery_group_velocity(tab, k, h, 1.0);
    const double v1 = gallery_group_velocity(tab, k, h, opt.cutoffs.eta_lo);
    const double v2 = gallery_group_velocity(tab, k, h, opt.cutoffs.eta_hi);
    const double yc = -t * vg;
    const double yhalf = std::fabs(t) * (std::fabs(v2 - v1) + 0.1) + 40.0 * h;
    double best = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double x = x_hi * (static_cast<double>(i) + 0.5) /
                         static_cast<double>(nx);
        auto line = gallery_yline(tab, k, h, Sign::plus, t, x, yc, yhalf, opt);
        best = std::max(best, line.sup_abs());
    }
    return best;
}

struct GalleryStrichartz {
    double ratio;        // ||u_k||_{L^q L^inf} h^{beta} / ||u_k(0)||_{L^2}
    double norm_lqlinf;
    double norm_l2_0;
    int n_time = 0;
};

/// Discretized ||u_k||_{L^4_t L^inf_{x,y}} h^{3/4} / ||u_k(0,.)||_{L^2} on a
/// log time grid over (h, 1].
inline GalleryStrichartz gallery_strichartz(const AiryTable& tab, int k,
                                            double h, double q = 4.0,
                                            int n_time = 48,
                                            const GalleryOptions& opt = {}) {
    if (q < 2.0) throw std::invalid_argument("gallery_strichartz: q >= 2");
    GalleryStrichartz out;
    out.n_time = n_time;
    std::vector<double> ts(n_time), sups(n_time);
    for (int i = 0; i < n_time; ++i)
        ts[i] = h * std::pow(1.0 / h, (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(n_time));
    for (int i = 0; i < n_time; ++i) sups[i] = gallery_sup(tab, k, h, ts[i],
                                                           24, opt);
    double acc = 0.0;
    for (int i = 0; i + 1 < n_time; ++i) {
        const double dt = ts[i + 1] - ts[i];
        acc += 0.5 * (std::pow(sups[i], q) + std::pow(sups[i + 1], q)) * dt;
    }
    out.norm_lqlinf = std::pow(acc, 1.0 / q);
    out.norm_l2_0 = gallery_l2_norm(tab, k, h, 0.0, opt);
    const double beta = 2.0 * 0.5 - 1.0 / q; // d(1/2 - 1/r) - 1/q at r = inf
    out.ratio = out.norm_lqlinf * std::pow(h, beta) / out.norm_l2_0;
    return out;
}

} // namespace halfwave
