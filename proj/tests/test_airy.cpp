#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "halfwave/airy.hpp"

using namespace halfwave;
using Catch::Approx;

namespace {

// Independent oracle: plain-double Maclaurin series, accurate to ~1e-15 for
// |x| <= 2 (no cancellation there).
double ai_maclaurin(double x) {
    const double c1 = 0.35502805388781723926;
    const double c2 = 0.25881940379280679841;
    double f = 1.0, g = x, tf = 1.0, tg = x;
    const double x3 = x * x * x;
    for (int k = 1; k <= 40; ++k) {
        tf *= x3 / (3.0 * k * (3.0 * k - 1.0));
        tg *= x3 / ((3.0 * k + 1.0) * (3.0 * k));
        f += tf;
        g += tg;
    }
    return c1 * f - c2 * g;
}

// Independent oracle: leading asymptotic with two correction terms.
double ai_asymptotic(double x) {
    const double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
    const double u1 = 5.0 / 72.0, u2 = 385.0 / 10368.0;
    return std::exp(-zeta) / (2.0 * std::sqrt(M_PI) * std::pow(x, 0.25)) *
           (1.0 - u1 / zeta + u2 / (zeta * zeta));
}

const AiryTable& table() {
    static AiryTable t = build_airy_table(55);
    return t;
}

} // namespace

TEST_CASE("ai at the origin and against the Maclaurin oracle") {
    CHECK(ai(0.0) == Approx(0.35502805388781723926).margin(1e-14));
    for (double x = -2.0; x <= 2.0; x += 0.125)
        CHECK(ai(x) == Approx(ai_maclaurin(x)).margin(2e-15));
}

TEST_CASE("ai at the first zero and in the decay regime") {
    CHECK(std::fabs(ai(-2.33810741045976704)) < 1e-10);
    CHECK(std::fabs(ai(10.0)) < 1e-9);
    for (double x : {10.0, 14.0, 20.0})
        CHECK(ai(x) == Approx(ai_asymptotic(x)).epsilon(1e-6));
}

TEST_CASE("series and asymptotic branches agree across the switch") {
    // both branches are callable just around the switch point; they must
    // agree to ~1e-12 absolute in the overlap band
    for (double z = 7.9; z <= 8.8; z += 0.05) {
        CHECK(detail::airy_series(z).ai ==
              Approx(detail::airy_asym_pos(z).ai).margin(1e-13));
        CHECK(detail::airy_series(-z).ai ==
              Approx(detail::airy_asym_neg(z).ai).margin(1e-12));
        CHECK(detail::airy_series(-z).aip ==
              Approx(detail::airy_asym_neg(z).aip).margin(1e-11));
        CHECK(detail::airy_series(-z).bi ==
              Approx(detail::airy_asym_neg(z).bi).margin(1e-12));
    }
}

TEST_CASE("a_pm reconstructs Ai(-z) and conjugation") {
    for (double z : {-2.0, 0.0, 1.0, 5.0}) {
        const auto sum = a_pm(+1, z) + a_pm(-1, z);
        const double ref = ai(-z);
        if (std::fabs(ref) > 1e-8)
            CHECK(std::abs(sum - ref) / std::fabs(ref) < 1e-10);
        else
            CHECK(std::abs(sum - ref) < 1e-12);
        CHECK(a_pm(-1, z) == std::conj(a_pm(+1, z)));
    }
}

TEST_CASE("a_pm modulus follows the oscillatory envelope") {
    // |A_+(z)| ~ z^{-1/4} / (2 sqrt(pi)) for z -> +inf
    const double got = std::abs(a_pm(+1, 4.0));
    const double envelope = std::pow(4.0, -0.25) / (2.0 * std::sqrt(M_PI));
    CHECK(got == Approx(envelope).epsilon(0.10));
}

TEST_CASE("airy zeros: value, monotonicity, asymptotic scaling") {
    CHECK(airy_zero(1) == Approx(2.33810741045976704).margin(1e-12));
    CHECK(table().zero(1) > 2.0);
    for (int k = 1; k < 50; ++k) CHECK(table().zero(k + 1) > table().zero(k));
    for (int k = 10; k <= 50; k += 5) {
        const double r = table().zero(k) / std::pow(k, 2.0 / 3.0);
        CHECK(r > 2.0);
        CHECK(r < 2.5);
    }
    CHECK_THROWS_AS(table().zero(0), std::out_of_range);
    CHECK_THROWS_AS(table().zero(56), std::out_of_range);
}

TEST_CASE("phase function L: anchors, quantization, limits") {
    CHECK(phase_l(0.0) == Approx(M_PI / 3.0).margin(1e-12));
    const double lm10 = phase_l(-10.0);
    CHECK(lm10 > 0.0);
    CHECK(lm10 < 0.01);
    CHECK(phase_l(table().zero(5)) == Approx(10.0 * M_PI).margin(1e-8));
    for (int k = 1; k <= 20; ++k)
        CHECK(phase_l(table().zero(k)) ==
              Approx(2.0 * M_PI * k).margin(1e-8));
}

TEST_CASE("L is strictly increasing on [-15, 40]") {
    double prev = phase_l(-15.0);
    for (double om = -14.9; om <= 40.0; om += 0.1) {
        const double cur = phase_l(om);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("L' consistency: table integral, Wronskian form, finite difference") {
    for (int k : {1, 2, 5, 10, 20}) {
        const double omk = table().zero(k);
        const double lp_int = table().lp(k);
        CHECK(lp_int == Approx(phase_l_prime(omk)).epsilon(1e-8));
        const double d = 1e-5;
        const double fd = (phase_l(omk + d) - phase_l(omk - d)) / (2.0 * d);
        CHECK(fd == Approx(lp_int).epsilon(1e-6));
        // closed form at zeros: L'(omega_k) = 2 pi Ai'(-omega_k)^2
        CHECK(lp_int ==
              Approx(2.0 * M_PI * ai_prime(-omk) * ai_prime(-omk))
                  .epsilon(1e-9));
        CHECK(lp_int > 0.0);
    }
}

TEST_CASE("b_remainder: sign, scaling, decay, defining identity") {
    // b1 > 0 and B ~ b1/u: the products u B(u) agree across u
    const double b10 = b_remainder(10.0, 0) * 10.0;
    const double b20 = b_remainder(20.0, 0) * 20.0;
    const double b40 = b_remainder(40.0, 0) * 40.0;
    CHECK(b10 > 0.0);
    CHECK(b20 == Approx(b10).epsilon(0.10));
    CHECK(b40 == Approx(b20).epsilon(0.05));
    CHECK(std::fabs(b_remainder(100.0, 0)) < std::fabs(b_remainder(10.0, 0)));
    CHECK(std::fabs(b_remainder(1000.0, 0)) < std::fabs(b_remainder(100.0, 0)));

    const double om = 9.0;
    const double u = om * std::sqrt(om);
    CHECK(4.0 / 3.0 * u + M_PI / 2.0 - b_remainder(u, 0) ==
          Approx(phase_l(om)).margin(1e-9));

    CHECK_THROWS_AS(b_remainder(0.5, 0), std::domain_error);

    // derivative orders against finite differences of B itself
    for (double uu : {5.0, 12.0, 30.0}) {
        const double d = 1e-4 * uu;
        const double fd1 =
            (b_remainder(uu + d, 0) - b_remainder(uu - d, 0)) / (2.0 * d);
        CHECK(b_remainder(uu, 1) == Approx(fd1).margin(1e-7));
        const double fd2 = (b_remainder(uu + d, 1) - b_remainder(uu - d, 1)) /
                           (2.0 * d);
        CHECK(b_remainder(uu, 2) == Approx(fd2).margin(1e-7));
    }
}

TEST_CASE("table CSV round-trip is bit-identical") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "halfwave_airy_test.csv";
    save_airy_table_csv(table(), path.string());
    AiryTable loaded = load_airy_table_csv(path.string());
    REQUIRE(loaded.k_max == table().k_max);
    for (int k = 1; k <= loaded.k_max; ++k) {
        CHECK(loaded.zero(k) == table().zero(k));
        CHECK(loaded.lp(k) == table().lp(k));
    }
    fs::remove(path);
}

TEST_CASE("every tabulated zero annihilates Ai") {
    for (int k = 1; k <= table().k_max; ++k)
        CHECK(std::fabs(ai(-table().zero(k))) < 1e-12);
}
