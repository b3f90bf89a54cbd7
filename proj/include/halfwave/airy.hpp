#pragma once

// Real-line Airy machinery: Ai and its derivative, the rotated solutions
// A+/A-, Airy zeros, the phase-accumulation function L and the asymptotic
// remainder B.  Everything is built on one primitive, airy_pair(), returning
// (Ai, Bi, Ai', Bi') at a real argument:
//
//   |x| <= 8.25   power series summed in double-double (cancellation on the
//                 oscillatory side grows like exp((2/3)|x|^{3/2}))
//   x  >  8.25    exponential asymptotic expansions
//   x  < -8.25    trigonometric asymptotic expansions
//
// A+/A- on the real line reduce to A_pm(z) = (Ai(-z) -+ i Bi(-z)) / 2, and
// L(omega) = pi + 2 arg A+(omega) unwrapped by the leading asymptotics, so no
// complex-argument Airy evaluation is ever required.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfwave/detail/dd.hpp"
#include "halfwave/detail/panel.hpp"

namespace halfwave {

namespace detail {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kSqrtPi = 1.77245385090551602729816748334114518;
// Ai(0) and -Ai'(0) to double-double precision.
inline constexpr dd kC1{0.3550280538878172, 2.05233632436212e-17};
inline constexpr dd kC2{0.2588194037928068, -2.522243111610832e-17};
inline constexpr dd kSqrt3{1.7320508075688772, 1.0035084221806903e-16};
inline constexpr double kSeriesSwitch = 8.25;

struct AiryPair {
    double ai, bi, aip, bip;
};

// Power series of the standard pair f, g and their derivatives, summed in
// double-double.  Valid for any real x, used for |x| <= kSeriesSwitch.
inline AiryPair airy_series(double x) {
    const dd xd{x};
    const dd x2 = xd * xd;
    const dd x3 = x2 * xd;

    dd f{1.0}, g = xd, fp = x2 / 2.0, gp{1.0};
    dd tf{1.0}, tg = xd, tp = x2 / 2.0, tq{1.0};
    for (int k = 1; k < 160; ++k) {
        tf = tf * x3 / static_cast<double>(3 * k * (3 * k - 1));
        tg = tg * x3 / static_cast<double>((3 * k + 1) * (3 * k));
        if (k >= 2)
            tp = tp * x3 / static_cast<double>((3 * k - 1) * (3 * k - 3));
        tq = tq * x3 / static_cast<double>((3 * k) * (3 * k - 2));
        f = f + tf;
        g = g + tg;
        if (k >= 2) fp = fp + tp;
        gp = gp + tq;
        const double m = std::max(std::max(abs_val(tf), abs_val(tg)),
                                  std::max(abs_val(tp), abs_val(tq)));
        if (m < 1e-35 * (1.0 + abs_val(f) + abs_val(g))) break;
    }

    AiryPair out;
    out.ai = (kC1 * f - kC2 * g).value();
    out.bi = (kSqrt3 * (kC1 * f + kC2 * g)).value();
    out.aip = (kC1 * fp - kC2 * gp).value();
    out.bip = (kSqrt3 * (kC1 * fp + kC2 * gp)).value();
    return out;
}

// Asymptotic sums S_u = sum u_k t^k and S_v = sum v_k t^k truncated at the
// smallest term, with t = sigma/zeta.
inline void airy_asym_sums(double zeta, double sigma, double& su, double& sv) {
    su = 1.0;
    sv = 1.0;
    double uk = 1.0;
    double pw = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 80; ++k) {
        uk *= static_cast<double>((6 * k - 5)) * (6 * k - 3) * (6 * k - 1) /
              (216.0 * k * (2 * k - 1));
        pw *= sigma / zeta;
        const double tu = uk * pw;
        if (std::fabs(tu) >= prev) break;
        prev = std::fabs(tu);
        su += tu;
        sv += tu * (6 * k + 1) / (1.0 - 6 * k);
        if (std::fabs(tu) < 1e-18) break;
    }
}

// Even/odd-split sums for the oscillatory side:
//   P  = sum (-1)^k u_{2k}   zeta^{-2k},   Q  = sum (-1)^k u_{2k+1} zeta^{-2k-1}
// and the v-analogues.
inline void airy_osc_sums(double zeta, double& p, double& q, double& pp,
                          double& qp) {
    p = 1.0;
    pp = 1.0;
    q = 0.0;
    qp = 0.0;
    double uk = 1.0;
    double pw = 1.0;
    double prev = 1.0;
    for (int j = 1; j < 80; ++j) {
        uk *= static_cast<double>((6 * j - 5)) * (6 * j - 3) * (6 * j - 1) /
              (216.0 * j * (2 * j - 1));
        pw /= zeta;
        const double tu = uk * pw;
        const double tv = tu * (6 * j + 1) / (1.0 - 6 * j);
        if (std::fabs(tu) >= prev) break;
        prev = std::fabs(tu);
        const double sign = (j % 4 >= 2) ? -1.0 : 1.0; // (-1)^{floor(j/2)}
        if (j % 2 == 0) {
            p += sign * tu;
            pp += sign * tv;
        } else {
            q += sign * tu;
            qp += sign * tv;
        }
        if (std::fabs(tu) < 1e-18) break;
    }
}

inline AiryPair airy_asym_pos(double x) {
    const double sx = std::sqrt(x);
    const double zeta = 2.0 / 3.0 * x * sx;
    const double x14 = std::sqrt(sx);
    double su_m, sv_m, su_p, sv_p;
    airy_asym_sums(zeta, -1.0, su_m, sv_m); // alternating: Ai
    airy_asym_sums(zeta, 1.0, su_p, sv_p);  // same-sign: Bi
    const double em = std::exp(-zeta);
    const double ep = std::exp(zeta); // may overflow for x > ~103; callers
                                      // that need ratios use airy_log_bi.
    AiryPair out;
    out.ai = 0.5 * em * su_m / (kSqrtPi * x14);
    out.aip = -0.5 * x14 * em * sv_m / kSqrtPi;
    out.bi = ep * su_p / (kSqrtPi * x14);
    out.bip = x14 * ep * sv_p / kSqrtPi;
    return out;
}

inline AiryPair airy_asym_neg(double mx) { // evaluates at x = -mx, mx > 0
    const double sx = std::sqrt(mx);
    const double zeta = 2.0 / 3.0 * mx * sx;
    const double x14 = std::sqrt(sx);
    double p, q, pp, qp;
    airy_osc_sums(zeta, p, q, pp, qp);
    const double th = zeta - 0.25 * kPi;
    const double c = std::cos(th), s = std::sin(th);
    AiryPair out;
    out.ai = (c * p + s * q) / (kSqrtPi * x14);
    out.bi = (-s * p + c * q) / (kSqrtPi * x14);
    out.aip = (s * pp - c * qp) * x14 / kSqrtPi;
    out.bip = (c * pp + s * qp) * x14 / kSqrtPi;
    return out;
}

inline AiryPair airy_pair(double x) {
    if (x > kSeriesSwitch) return airy_asym_pos(x);
    if (x < -kSeriesSwitch) return airy_asym_neg(-x);
    return airy_series(x);
}

} // namespace detail

/// Standard Airy function Ai on the real line.
inline double ai(double x) { return detail::airy_pair(x).ai; }

/// Derivative Ai'.
inline double ai_prime(double x) { return detail::airy_pair(x).aip; }

/// Rotated solutions A_pm(z) = e^{-+ i pi/3} Ai(e^{-+ i pi/3} z) evaluated on
/// the real line, where they reduce to (Ai(-z) -+ i Bi(-z)) / 2.
/// sign > 0 selects A_+, sign < 0 selects A_-.
inline std::complex<double> a_pm(int sign, double z) {
    if (!std::isfinite(z)) throw std::domain_error("a_pm: non-finite argument");
    const auto p = detail::airy_pair(-z);
    const double s = sign >= 0 ? 1.0 : -1.0;
    return {0.5 * p.ai, -0.5 * s * p.bi};
}

/// d/dz A_pm(z) = (-Ai'(-z) +- i Bi'(-z)) / 2.
inline std::complex<double> a_pm_prime(int sign, double z) {
    const auto p = detail::airy_pair(-z);
    const double s = sign >= 0 ? 1.0 : -1.0;
    return {-0.5 * p.aip, 0.5 * s * p.bip};
}

/// Phase-accumulation function L(omega) = pi + i log(A_-/A_+), real-valued,
/// strictly increasing, with L(0) = pi/3, L -> 0 at -infinity and
/// L(omega_k) = 2 pi k at the Airy zeros.  The principal value is unwrapped
/// with the leading asymptotic (4/3) omega^{3/2} + pi/2, which is within pi
/// of L for omega >= 1.5.
inline double phase_l(double omega) {
    if (!std::isfinite(omega))
        throw std::domain_error("phase_l: non-finite argument");
    if (omega < -detail::kSeriesSwitch) {
        // L = 2 atan(Ai(-omega)/Bi(-omega)); evaluate the ratio in log space
        // to survive the Bi overflow range.
        const double w = -omega;
        const double sx = std::sqrt(w);
        const double zeta = 2.0 / 3.0 * w * sx;
        double su_m, sv_m, su_p, sv_p;
        detail::airy_asym_sums(zeta, -1.0, su_m, sv_m);
        detail::airy_asym_sums(zeta, 1.0, su_p, sv_p);
        const double ratio = 0.5 * std::exp(-2.0 * zeta) * su_m / su_p;
        return 2.0 * std::atan(ratio);
    }
    const auto p = detail::airy_pair(-omega);
    double lam = std::fmod(detail::kPi + 2.0 * std::atan2(-p.bi, p.ai),
                           2.0 * detail::kPi);
    if (lam < 0.0) lam += 2.0 * detail::kPi;
    if (omega <= 1.5) return lam;
    const double u = omega * std::sqrt(omega);
    const double est = 4.0 / 3.0 * u + 0.5 * detail::kPi - 5.0 / (24.0 * u);
    const double m = std::round((est - lam) / (2.0 * detail::kPi));
    return lam + 2.0 * detail::kPi * m;
}

/// L'(omega) = (2/pi) / (Ai^2 + Bi^2)(-omega)  (via the Wronskian).
inline double phase_l_prime(double omega) {
    const auto p = detail::airy_pair(-omega);
    return (2.0 / detail::kPi) / (p.ai * p.ai + p.bi * p.bi);
}

/// L''(omega) = 2 L'(omega) (Ai Ai' + Bi Bi')(-omega) / (Ai^2 + Bi^2)(-omega).
inline double phase_l_second(double omega) {
    const auto p = detail::airy_pair(-omega);
    const double m2 = p.ai * p.ai + p.bi * p.bi;
    const double lp = (2.0 / detail::kPi) / m2;
    return 2.0 * lp * (p.ai * p.aip + p.bi * p.bip) / m2;
}

/// Remainder B in L(omega) = (4/3) omega^{3/2} + pi/2 - B(omega^{3/2}),
/// computed from the defining identity; order 1 and 2 return B' and B''
/// through the derivatives of L.  Requires u >= 1.
inline double b_remainder(double u, int order = 0) {
    if (!(u >= 1.0))
        throw std::domain_error("b_remainder: u must be >= 1");
    const double omega = std::cbrt(u * u);
    switch (order) {
        case 0:
            return 4.0 / 3.0 * u + 0.5 * detail::kPi - phase_l(omega);
        case 1:
            return 4.0 / 3.0 -
                   2.0 / 3.0 * phase_l_prime(omega) / std::cbrt(u);
        case 2: {
            const double u13 = std::cbrt(u);
            return -4.0 / 9.0 * phase_l_second(omega) / (u13 * u13) +
                   2.0 / 9.0 * phase_l_prime(omega) / (u * u13);
        }
        default:
            throw std::invalid_argument("b_remainder: order must be 0, 1 or 2");
    }
}

/// k-th zero of Ai(-.): returns omega_k with Ai(-omega_k) = 0 to ~1e-14.
inline double airy_zero(int k) {
    if (k < 1) throw std::out_of_range("airy_zero: k must be >= 1");
    // McMahon-type expansion seeds the bracket.
    const double t = 3.0 * detail::kPi * (4 * k - 1) / 8.0;
    const double t2 = t * t;
    double est = std::cbrt(t2) *
                 (1.0 + 5.0 / (48.0 * t2) - 5.0 / (36.0 * t2 * t2) +
                  77125.0 / (82944.0 * t2 * t2 * t2));
    double lo = (k == 1) ? 2.0 : est - 0.2;
    double hi = (k == 1) ? 3.0 : est + 0.2;
    double flo = ai(-lo), fhi = ai(-hi);
    for (int widen = 0; widen < 40 && flo * fhi > 0.0; ++widen) {
        lo -= 0.1;
        hi += 0.1;
        flo = ai(-lo);
        fhi = ai(-hi);
    }
    if (flo * fhi > 0.0)
        throw std::runtime_error("airy_zero: failed to bracket zero");
    for (int i = 0; i < 20; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = ai(-mid);
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    double w = 0.5 * (lo + hi);
    for (int i = 0; i < 30; ++i) {
        const double f = ai(-w);
        const double fp = -ai_prime(-w);
        const double step = f / fp;
        w -= step;
        if (std::fabs(step) < 1e-15 * w) break;
    }
    return w;
}

/// Precomputed zeros omega_k and normalization constants
/// L'(omega_k) = 2 pi int_0^inf Ai^2(x - omega_k) dx for k = 1..k_max.
struct AiryTable {
    int k_max = 0;
    std::vector<double> zeros;   // zeros[k-1] = omega_k
    std::vector<double> l_prime; // l_prime[k-1] = L'(omega_k)

    double zero(int k) const {
        if (k < 1 || k > k_max)
            throw std::out_of_range("AiryTable: k out of range");
        return zeros[static_cast<std::size_t>(k) - 1];
    }
    double lp(int k) const {
        if (k < 1 || k > k_max)
            throw std::out_of_range("AiryTable: k out of range");
        return l_prime[static_cast<std::size_t>(k) - 1];
    }
};

namespace detail {

// 2 pi int_0^{omega+40} Ai^2(x - omega) dx, the tail beyond omega+40 being
// below 1e-30 (Ai^2 decays like exp(-(4/3) x^{3/2})).
inline double l_prime_integral(double omega, double tol = 1e-11) {
    const double hi = omega + 40.0;
    const double periods = 2.0 / 3.0 * std::pow(std::max(omega, 1.0), 1.5) / kPi;
    const int splits = std::max(8, static_cast<int>(2.0 * periods) + 2);
    auto f = [omega](double x) {
        const double v = ai(x - omega);
        return v * v;
    };
    auto res = adaptive_gk<double>(f, 0.0, hi, tol, splits);
    return 2.0 * kPi * res.value;
}

} // namespace detail

inline AiryTable build_airy_table(int k_max) {
    if (k_max < 1) throw std::invalid_argument("build_airy_table: k_max >= 1");
    AiryTable t;
    t.k_max = k_max;
    t.zeros.resize(k_max);
    t.l_prime.resize(k_max);
    for (int k = 1; k <= k_max; ++k) {
        t.zeros[k - 1] = airy_zero(k);
        t.l_prime[k - 1] = detail::l_prime_integral(t.zeros[k - 1]);
    }
    if (!(t.zeros[0] > 2.0))
        throw std::runtime_error("build_airy_table: omega_1 <= 2");
    for (int k = 1; k < k_max; ++k)
        if (!(t.zeros[k] > t.zeros[k - 1]))
            throw std::runtime_error("build_airy_table: zeros not increasing");
    return t;
}

inline void save_airy_table_csv(const AiryTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "k,omega_k,l_prime_k\n";
    char buf[96];
    for (int k = 1; k <= t.k_max; ++k) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, t.zeros[k - 1],
                      t.l_prime[k - 1]);
        out << buf;
    }
}

inline AiryTable load_airy_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty airy table " + path);
    AiryTable t;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
            !std::getline(ss, c))
            throw std::runtime_error("malformed airy table row: " + line);
        t.zeros.push_back(std::stod(b));
        t.l_prime.push_back(std::stod(c));
    }
    t.k_max = static_cast<int>(t.zeros.size());
    for (int k = 1; k < t.k_max; ++k)
        if (!(t.zeros[k] > t.zeros[k - 1]))
            throw std::runtime_error("loaded airy table zeros not increasing");
    return t;
}

} // namespace halfwave
