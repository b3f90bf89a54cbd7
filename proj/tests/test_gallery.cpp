#include <catch2/catch_amalgamated.hpp>

#include "halfwave/gallery.hpp"

using namespace halfwave;
using Catch::Approx;

namespace {

const AiryTable& table() {
    static AiryTable t = build_airy_table(25);
    return t;
}

constexpr double kH = 0.05;

double psi_l2() {
    auto r = detail::adaptive_gk<double>(
        [](double e) {
            const double v = cutoff::psi(e);
            return v * v;
        },
        0.75, 1.25, 1e-13, 8);
    return r.value;
}

double psi_l1() {
    auto r = detail::adaptive_gk<double>(
        [](double e) { return cutoff::psi(e); }, 0.75, 1.25, 1e-13, 8);
    return r.value;
}

} // namespace

TEST_CASE("gallery modes: Dirichlet trace and time reflection") {
    for (int k : {1, 4, 9}) {
        const auto at0 = gallery_eval(table(), k, kH, Sign::plus, 0.37, 0.0,
                                      -0.41);
        CHECK(std::abs(at0) < 1e-10);
        const auto um = gallery_eval(table(), k, kH, Sign::minus, 0.23,
                                     0.5 * std::pow(kH, 2.0 / 3.0) *
                                         table().zero(k),
                                     -0.2);
        const auto up = gallery_eval(table(), k, kH, Sign::plus, -0.23,
                                     0.5 * std::pow(kH, 2.0 / 3.0) *
                                         table().zero(k),
                                     -0.2);
        CHECK(std::abs(um - up) <= 1e-10 * std::abs(up) + 1e-14);
    }
}

TEST_CASE("initial L2 norm matches the Plancherel value") {
    // || u_k(0,.) ||^2_{L^2} = (2 pi / h) ||psi||^2 for L2-normalized modes
    const double exact = 2.0 * M_PI / kH * psi_l2();
    for (int k : {1, 5, 12}) {
        const double n2 = std::pow(gallery_l2_norm(table(), k, kH, 0.0), 2);
        CHECK(n2 == Approx(exact).epsilon(0.05));
    }
}

TEST_CASE("orthogonality of distinct modes at t = 0 and t = 0.5") {
    // <u_k(0), u_j(0)> over Omega_2 via Parseval in y then quadrature in x
    const double h = kH;
    auto inner = [&](int k, int j, double t) {
        const double om = std::max(table().zero(k), table().zero(j));
        const double x_hi = (om + 10.0) * std::pow(h / 0.75, 2.0 / 3.0);
        auto fx = [&](double x) {
            auto fe = [&](double eta) -> double {
                const double w = cutoff::psi(eta);
                if (w == 0.0) return 0.0;
                // the half-wave factors share t: they cancel in the product
                return w * w * eigenmode(table(), k, eta / h, x) *
                       eigenmode(table(), j, eta / h, x);
            };
            (void)t;
            return detail::adaptive_gk<double>(fe, 0.75, 1.25, 1e-12, 8).value;
        };
        return 2.0 * M_PI / h *
               detail::adaptive_gk<double>(fx, 0.0, x_hi, 1e-10, 48).value;
    };
    for (double t : {0.0, 0.5}) {
        double offdiag = 0.0, diag = 1e300;
        for (int k = 1; k <= 6; ++k)
            for (int j = k; j <= 6; ++j) {
                const double v = inner(k, j, t);
                if (k == j)
                    diag = std::min(diag, std::fabs(v));
                else
                    offdiag = std::max(offdiag, std::fabs(v));
            }
        CHECK(offdiag <= 1e-6 * diag);
    }
}

TEST_CASE("L2 norm is constant in time within 1 percent") {
    const int k = 4;
    const double n0 = gallery_l2_norm(table(), k, kH, 0.0);
    for (double t : {0.3, 0.7}) {
        const double nt = gallery_l2_norm(table(), k, kH, t);
        CHECK(nt == Approx(n0).epsilon(0.01));
    }
}

TEST_CASE("reduced wave: flat regime bound and dispersive decay") {
    const double h = 0.05;
    const double l1 = psi_l1();
    for (int k : {2, 8, 20}) {
        // flat regime: |w_k| <= ||psi||_1 / h exactly; grid sup respects it
        for (double t : {0.25 * std::cbrt(h), std::cbrt(h)}) {
            const double vg = gallery_group_velocity(table(), k, h, 1.0);
            auto line = reduced_wave_yline(table(), k, h, t, -t * vg,
                                           0.1 * t + 40.0 * h);
            CHECK(line.sup_abs() <= 1.01 * l1 / h);
        }
        // dispersive regime: sup_y |w_k| <= C (1/h) sqrt(h/t) /
        // (omega_k^{1/2} h^{1/3}) with C stable in k
        double cmax = 0.0;
        for (int i = 1; i <= 8; ++i) {
            const double t = std::pow(h, 1.0 / 3.0) *
                             std::pow(std::pow(h, -1.0 / 3.0), i / 8.0);
            const double vg = gallery_group_velocity(table(), k, h, 1.0);
            auto line = reduced_wave_yline(table(), k, h, t, -t * vg,
                                           0.2 * t + 40.0 * h);
            const double env = (1.0 / h) * std::sqrt(h / t) /
                               (std::sqrt(table().zero(k)) *
                                std::pow(h, 1.0 / 3.0));
            cmax = std::max(cmax, line.sup_abs() / env);
        }
        CHECK(cmax < 4.0);
        CHECK(cmax > 0.05);
    }
}

TEST_CASE("Gamma kernel: scaled L1 bound, saturation location, tiny-x decay") {
    const double h = 0.05;
    std::vector<double> scaled;
    for (int k : {2, 8, 20}) {
        const double xsat = std::pow(h, 2.0 / 3.0) * table().zero(k);
        double best = 0.0, best_x = 0.0;
        for (int i = 0; i <= 16; ++i) {
            const double x = xsat * (0.1 + 2.4 * i / 16.0);
            const double v = gamma_kernel_l1(table(), k, h, x);
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
        scaled.push_back(best * std::pow(h, 1.0 / 3.0) /
                         std::pow(table().zero(k), 0.25));
        // the bound saturates near x ~ h^{2/3} omega_k
        CHECK(best_x >= 0.5 * xsat);
        CHECK(best_x <= 1.5 * xsat);
    }
    const double lo = *std::min_element(scaled.begin(), scaled.end());
    const double hi = *std::max_element(scaled.begin(), scaled.end());
    CHECK(hi / lo < 3.0);

    // tiny-x regime: scaled by h^{-1/3}/omega_k^2, stable across k
    std::vector<double> tiny;
    for (int k : {3, 6, 12}) {
        const double omk = table().zero(k);
        const double x = 0.5 * std::pow(h, 2.0 / 3.0) / (omk * omk);
        const double v = gamma_kernel_l1(table(), k, h, x);
        tiny.push_back(v * std::pow(h, 1.0 / 3.0) * omk * omk);
    }
    const double tlo = *std::min_element(tiny.begin(), tiny.end());
    const double thi = *std::max_element(tiny.begin(), tiny.end());
    CHECK(thi / tlo < 4.0);
    CHECK(thi < 10.0);
}

TEST_CASE("strichartz chain: Young factorization holds numerically") {
    const double h = 0.05;
    const int k = 6;
    auto gs = gallery_strichartz(table(), k, h, 4.0, 24);
    // sup_x ||Gamma||_{L1} over the x-grid
    const double xsat = std::pow(h, 2.0 / 3.0) * table().zero(k);
    double gsup = 0.0;
    for (int i = 0; i <= 10; ++i)
        gsup = std::max(gsup, gamma_kernel_l1(table(), k, h,
                                              xsat * (0.2 + 2.0 * i / 10.0)));
    // || w_k ||_{L4 L^inf} on the same time grid
    double acc = 0.0;
    std::vector<double> ts(24);
    for (int i = 0; i < 24; ++i)
        ts[i] = h * std::pow(1.0 / h, (i + 0.5) / 24.0);
    std::vector<double> sups(24);
    for (int i = 0; i < 24; ++i) {
        const double vg = gallery_group_velocity(table(), k, h, 1.0);
        auto line = reduced_wave_yline(table(), k, h, ts[i], -ts[i] * vg,
                                       0.2 * ts[i] + 40.0 * h);
        sups[i] = line.sup_abs();
    }
    for (int i = 0; i + 1 < 24; ++i)
        acc += 0.5 * (std::pow(sups[i], 4.0) + std::pow(sups[i + 1], 4.0)) *
               (ts[i + 1] - ts[i]);
    const double wk_l4 = std::pow(acc, 0.25);
    CHECK(gs.norm_lqlinf <= 1.05 * gsup * wk_l4);
}
