#include <catch2/catch_amalgamated.hpp>

#include "halfwave/verify.hpp"

using namespace halfwave;
using Catch::Approx;

namespace {

const AiryTable& table() {
    static AiryTable t = build_airy_table(40);
    return t;
}

} // namespace

TEST_CASE("Airy-Poisson: bump at omega_2 converges with the window") {
    const double c = table().zero(2);
    auto run = [&](int nmax) {
        return airy_poisson_check(table(), test_bump(c, 1.0), c - 1.0, c + 1.0,
                                  nmax);
    };
    auto r8 = run(8), r16 = run(16), r32 = run(32);
    CHECK(r32.relative);
    CHECK(r32.error <= 1e-4);
    CHECK(r16.error < r8.error);
    CHECK(r32.error < r16.error);
}

TEST_CASE("Airy-Poisson: bump missing all zeros reports tiny absolute error") {
    const double c = 0.5 * (2.0 + table().zero(1));
    const double w = 0.45 * (table().zero(1) - 2.0);
    auto r = airy_poisson_check(table(), test_bump(c, w), c - w, c + w, 16);
    CHECK_FALSE(r.relative);
    CHECK(r.error <= 1e-6);
}

TEST_CASE("compare_paths on a small grid, tangential desk parameters") {
    ModelParams p;
    p.h = 0.05;
    p.gamma = 0.25;
    p.a = 0.25;
    GridSpec grid;
    grid.nt = 3;
    grid.nx = 4;
    grid.ny = 4;
    grid.t_hi = 0.8;
    auto rep = compare_paths(table(), p, Sign::plus, grid);
    CHECK(rep.normalized_by_sup);
    CHECK(rep.ratio <= 1e-3);
}

TEST_CASE("compare_paths flags the clipped-window sanity inversion") {
    ModelParams p;
    p.h = 0.05;
    p.gamma = 0.25;
    p.a = 0.25;
    const double t = 1.0, x = 0.2;
    const double y = -t * std::sqrt(1.0 + p.gamma) + 0.01;
    const auto gs = green_spectral(table(), p, Sign::plus, t, x, y);
    const auto k0 = wave_term_collapsed(table(), p, Sign::plus, 0, t, x, y);
    CHECK(std::abs(k0 - gs) / std::abs(gs) > 1e-2);
}

TEST_CASE("sup_scan: t = 0 dominates and refinement is stable") {
    ModelParams p;
    p.h = 0.02;
    p.gamma = 0.25;
    p.a = 0.25;
    std::vector<double> ts = {0.0, 0.2, 0.45, 0.7};
    SupScanOptions so;
    so.nx = 16;
    so.polish = false;
    auto scan = sup_scan(table(), p, Sign::plus, ts, so);
    for (std::size_t i = 1; i < scan.size(); ++i)
        CHECK(scan[0].sup >= scan[i].sup);
    SupScanOptions so2 = so;
    so2.nx = 32;
    auto scan2 = sup_scan(table(), p, Sign::plus, ts, so2);
    for (std::size_t i = 0; i < scan.size(); ++i)
        CHECK(scan2[i].sup == Approx(scan[i].sup).epsilon(0.05));
    // sup bound on the scan
    const double scale = std::sqrt(p.gamma) / (p.h * p.h);
    for (const auto& s : scan) CHECK(s.sup / scale < 10.0);
}

TEST_CASE("cos-propagator sup is even in t") {
    ModelParams p;
    p.h = 0.05;
    p.gamma = 0.25;
    p.a = 0.25;
    // (G^+ + G^-)/2 at (t, y) pairs against (-t, -y): |cos kernel| is even
    const double t = 0.4, x = 0.2, y = -0.44;
    const auto cp = 0.5 * (green_spectral(table(), p, Sign::plus, t, x, y) +
                           green_spectral(table(), p, Sign::minus, t, x, y));
    const auto cm = 0.5 * (green_spectral(table(), p, Sign::plus, -t, x, -y) +
                           green_spectral(table(), p, Sign::minus, -t, x, -y));
    CHECK(std::abs(std::abs(cp) - std::abs(cm)) <= 1e-9 * std::abs(cp));
}

TEST_CASE("decay_fit recovers a synthetic power law") {
    std::vector<SupPoint> pts;
    for (int i = 0; i < 24; ++i) {
        const double t = 0.05 * std::pow(20.0, i / 23.0);
        pts.push_back({t, 3.7 * std::pow(t, -0.5), 0.0, 0.0});
    }
    auto rep = decay_fit(pts, 0.05, 1.0, -0.5, "synt");
    CHECK(rep.fitted_slope == Approx(-0.5).margin(1e-10));
    CHECK(rep.slope_ci < 1e-9);
    CHECK(rep.max_ratio == Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(decay_fit(pts, 0.05, 0.051, -0.5, "narrow"),
                    InsufficientRangeError);
}

TEST_CASE("strichartz_norm endpoints") {
    std::vector<SupPoint> pts;
    for (int i = 0; i < 16; ++i) {
        const double t = 0.1 + 0.05 * i;
        pts.push_back({t, 2.0, 0.0, 0.0});
    }
    ModelParams p;
    p.h = 0.1;
    p.gamma = 0.25;
    p.a = 0.25;
    auto s4 = strichartz_norm(pts, p, 4.0);
    // constant sup: norm = sup * window^{1/q}
    CHECK(s4.norm_value == Approx(2.0 * std::pow(0.75, 0.25)).epsilon(1e-12));
    CHECK(s4.normalized == Approx(s4.norm_value * std::pow(0.1, 0.75)));
    auto sinf = strichartz_norm(pts, p,
                                std::numeric_limits<double>::infinity());
    CHECK(sinf.norm_value == 2.0);
    // monotone in window length
    std::vector<SupPoint> longer = pts;
    longer.push_back({0.9, 2.0, 0.0, 0.0});
    CHECK(strichartz_norm(longer, p, 4.0).norm_value > s4.norm_value);
}

TEST_CASE("local maxima finder") {
    std::vector<SupPoint> pts;
    for (int i = 0; i < 40; ++i) {
        const double t = 0.1 * i;
        pts.push_back({t, std::exp(-0.1 * t) *
                              (1.0 + 0.5 * std::exp(-4.0 * (t - 2.0) * (t - 2.0))),
                       0.0, 0.0});
    }
    auto peaks = local_maxima(pts);
    REQUIRE_FALSE(peaks.empty());
    bool near2 = false;
    for (auto i : peaks)
        if (std::fabs(pts[i].t - 2.0) <= 0.1) near2 = true;
    CHECK(near2);
}

TEST_CASE("envelope_report validates the regime before running") {
    ModelParams p;
    p.h = 0.005;
    p.gamma = 0.25;
    p.a = 0.25; // lambda = 25
    EnvelopeGrid g;
    g.N = 1;
    CHECK_THROWS_AS(envelope_report(PropId::eq1ffG, table(), p, g),
                    RegimeError);
    ModelParams q = p;
    q.a = 0.02; // transverse
    CHECK_THROWS_AS(envelope_report(PropId::decW0a, table(), q, g),
                    RegimeError);
}

TEST_CASE("envelope_report: tangential N=0 short-time ratio is order one") {
    ModelParams p;
    p.h = 0.02;
    p.gamma = 0.25;
    p.a = 0.25;
    EnvelopeGrid g;
    g.N = 0;
    g.nT = 5;
    g.nX = 4;
    g.nY = 5;
    auto rep = envelope_report(PropId::decW0a, table(), p, g);
    CHECK(rep.max_ratio > 0.001);
    CHECK(rep.max_ratio < 10.0);
}

TEST_CASE("active reflection count stays near its bound window") {
    ModelParams p;
    p.h = 0.05;
    p.gamma = 0.25;
    p.a = 0.25;
    auto ac = count_active_reflections(table(), p, Sign::plus, 0.3, 1e-3, 6,
                                       12);
    CHECK(ac.count >= 1);
    CHECK(ac.max_term > 0.0);
}
