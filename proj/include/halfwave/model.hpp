#pragma once

// Model parameters of one frequency-localized propagator and the sampled
// kernel container.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfwave/cutoffs.hpp"

#include <json.hpp>

namespace halfwave {

enum class Sign { plus, minus };

inline const char* to_string(Sign s) { return s == Sign::plus ? "+" : "-"; }

struct ModelParams {
    double h = 0.05;    // semiclassical scale, in (0, 1]
    double gamma = 0.25; // tangency-band width, h^{2/3}-ish .. 1/4
    double a = 0.25;    // source distance to the boundary, in (0, 2 gamma]
    CutoffSpec cutoffs{};
    int kmax_margin = 2;     // guard indices past the psi2 band
    double window_c0 = 3.0;  // reflection window constant
    int window_slack = 2;
    double active_c = 8.0;   // additive constant in the active-count bound

    double lambda_gamma() const { return gamma * std::sqrt(gamma) / h; }

    // Band is empty when even the first Airy zero sits above the psi2 support
    // for every eta: omega_1 hbar^{2/3} > psi2_hi * gamma at eta_hi.
    void validate(bool tangency_band = true) const {
        if (!(h > 0.0) || !(h <= 1.0))
            throw std::invalid_argument("ModelParams: h must be in (0,1]");
        if (!(gamma > 0.0) || gamma > 0.25 + 1e-12)
            throw std::invalid_argument("ModelParams: gamma must be in (0, 1/4]");
        if (!(a > 0.0))
            throw std::invalid_argument("ModelParams: a must be positive");
        if (tangency_band && a > 2.0 * gamma + 1e-12)
            throw std::invalid_argument("ModelParams: a must be <= 2 gamma");
    }
};

enum class Provenance { spectral, parametrix };

inline const char* to_string(Provenance p) {
    return p == Provenance::spectral ? "spectral" : "parametrix";
}

struct KernelField {
    std::vector<double> t, x, y; // grid axes; values indexed [it][ix][iy]
    std::vector<std::complex<double>> values;
    Provenance provenance = Provenance::spectral;
    ModelParams params;

    std::size_t index(std::size_t it, std::size_t ix, std::size_t iy) const {
        return (it * x.size() + ix) * y.size() + iy;
    }
    std::complex<double>& at(std::size_t it, std::size_t ix, std::size_t iy) {
        return values[index(it, ix, iy)];
    }
    const std::complex<double>& at(std::size_t it, std::size_t ix,
                                   std::size_t iy) const {
        return values[index(it, ix, iy)];
    }

    double sup_abs() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

// CSV body is byte-stable across runs; the optional header_comment line is
// the only place a timestamp may appear.
inline void save_kernel_csv(const KernelField& f, const std::string& path,
                            const std::string& header_comment = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "t,x,y,re,im,provenance\n";
    char buf[160];
    for (std::size_t it = 0; it < f.t.size(); ++it)
        for (std::size_t ix = 0; ix < f.x.size(); ++ix)
            for (std::size_t iy = 0; iy < f.y.size(); ++iy) {
                const auto v = f.at(it, ix, iy);
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                              f.t[it], f.x[ix], f.y[iy], v.real(), v.imag(),
                              to_string(f.provenance));
                out << buf;
            }
}

inline nlohmann::ordered_json params_json(const ModelParams& p) {
    return nlohmann::ordered_json{
        {"h", p.h}, {"gamma", p.gamma}, {"a", p.a},
        {"lambda_gamma", p.lambda_gamma()}};
}

inline void save_kernel_sidecar(const KernelField& f, const std::string& path,
                                double fitted_sup_constant) {
    nlohmann::ordered_json j;
    j["params"] = params_json(f.params);
    j["provenance"] = to_string(f.provenance);
    j["grid"] = {{"nt", f.t.size()}, {"nx", f.x.size()}, {"ny", f.y.size()}};
    j["sup_abs"] = f.sup_abs();
    j["fitted_sup_constant"] = fitted_sup_constant;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

} // namespace halfwave
