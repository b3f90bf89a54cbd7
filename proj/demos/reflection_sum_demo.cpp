// Evaluates the localized kernel both ways at a handful of space-time points
// and prints the reflection-sum window that was needed for agreement.

#include <cstdio>

#include "halfwave/parametrix.hpp"
#include "halfwave/spectral_green.hpp"

int main() {
    using namespace halfwave;
    ModelParams p;
    p.h = 0.05;
    p.gamma = 0.25;
    p.a = 0.25;
    AiryTable tab = build_airy_table(k_required(p));

    std::printf("h=%.3f gamma=%.3f a=%.3f lambda_gamma=%.2f\n", p.h, p.gamma,
                p.a, p.lambda_gamma());
    for (double t : {0.0, 0.4, 0.9}) {
        const double x = 0.8 * p.gamma;
        const double y = -t * std::sqrt(1.0 + p.gamma) +
                         0.5 * std::pow(p.gamma, 1.5);
        const auto gs = green_spectral(tab, p, Sign::plus, t, x, y);
        const double xs[1] = {x};
        const double ys[1] = {y};
        auto par = parametrix_grid(tab, p, Sign::plus, t, xs, ys);
        std::printf(
            "t=%.2f  spectral % .6e%+.6ei  reflections % .6e%+.6ei  "
            "(|N|<=%d, rel diff %.1e)\n",
            t, gs.real(), gs.imag(), par.g[0].real(), par.g[0].imag(),
            par.m_used, std::abs(par.g[0] - gs) / std::abs(gs));
    }
    return 0;
}
