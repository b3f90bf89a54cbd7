#pragma once

// Concrete smooth cutoffs.  Supports are what the kernel formulas rely on;
// the profiles inside are a fixed choice:
//   psi   exp-bump on (3/4, 5/4), peak value 1 at u = 1
//   psi1  identical to psi (spectral localization)
//   phi   1 on [0,1], C-inf ramp down on [1, 5/4]
//   psi2  phi(xi) - phi(2 xi), support [1/2, 5/4], telescoping dyadically
//   chi1  C-inf step, 0 on (-inf,1], 1 on [2,inf)

#include <cmath>
#include <functional>

namespace halfwave {

namespace cutoff {

inline double exp_bump(double v) {
    const double v2 = v * v;
    if (v2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - v2));
}

inline double psi(double u) { return exp_bump(4.0 * (u - 1.0)); }

inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

inline double phi(double xi) {
    if (xi <= 1.0) return 1.0;
    return 1.0 - smooth_step((xi - 1.0) / 0.25);
}

inline double psi2(double xi) { return phi(xi) - phi(2.0 * xi); }

inline double chi1(double om) { return smooth_step(om - 1.0); }

} // namespace cutoff

struct CutoffSpec {
    std::function<double(double)> psi = [](double u) { return cutoff::psi(u); };
    std::function<double(double)> psi1 = [](double u) { return cutoff::psi(u); };
    std::function<double(double)> psi2 = [](double x) { return cutoff::psi2(x); };
    std::function<double(double)> chi1 = [](double w) { return cutoff::chi1(w); };
    // support of psi in eta
    double eta_lo = 0.75;
    double eta_hi = 1.25;
    // support of psi2
    double psi2_lo = 0.5;
    double psi2_hi = 1.25;
};

} // namespace halfwave
