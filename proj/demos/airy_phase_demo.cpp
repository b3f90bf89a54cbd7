// Prints the first Airy zeros with their normalization constants and a small
// table of the phase function L, its derivative, and the remainder B.

#include <cstdio>

#include "halfwave/airy.hpp"

int main() {
    using namespace halfwave;
    AiryTable tab = build_airy_table(10);
    std::printf("k   omega_k              L'(omega_k)          L(omega_k)/2pi\n");
    for (int k = 1; k <= 10; ++k)
        std::printf("%-3d %-20.15f %-20.15f %.12f\n", k, tab.zero(k), tab.lp(k),
                    phase_l(tab.zero(k)) / (2.0 * detail::kPi));
    std::printf("\nomega    L(omega)        L'(omega)      B(omega^{3/2})*omega^{3/2}\n");
    for (double om : {1.0, 2.0, 4.0, 9.0, 16.0, 25.0}) {
        const double u = om * std::sqrt(om);
        std::printf("%-8.2f %-15.9f %-14.9f %.9f\n", om, phase_l(om),
                    phase_l_prime(om), b_remainder(u, 0) * u);
    }
    return 0;
}
