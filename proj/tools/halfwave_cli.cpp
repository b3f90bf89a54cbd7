// Batch front door: runs the scans and emits CSV/JSON artifacts.
//
// Exit codes: 0 all pass-flags true, 1 a check failed, 2 usage/config error,
// 3 numerical non-convergence (diagnostic JSON on stderr).

#include <chrono>
#include <complex>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "halfwave/airy.hpp"
#include "halfwave/gallery.hpp"
#include "halfwave/model.hpp"
#include "halfwave/parallel.hpp"
#include "halfwave/parametrix.hpp"
#include "halfwave/spectral_green.hpp"
#include "halfwave/verify.hpp"

using namespace halfwave;
using nlohmann::ordered_json;

namespace {

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const std::string& path, const std::string& note) {
        out.open(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        if (!note.empty()) out << "# " << note << "\n";
    }
    void row(const std::string& s) { out << s << "\n"; }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

AiryTable table_for(const ModelParams& p, int floor_k = 8) {
    return build_airy_table(std::max(k_required(p), floor_k));
}

int nonconvergence_exit(const std::string& what, ordered_json diag) {
    diag["error"] = "non-convergence";
    diag["where"] = what;
    std::cerr << diag.dump(2) << "\n";
    return 3;
}

// ---------------------------------------------------------------------------

int cmd_airy_table(int kmax, double, const std::string& out_csv) {
    AiryTable t = build_airy_table(kmax);
    save_airy_table_csv(t, out_csv);
    std::printf("wrote %s (k_max=%d, omega_1=%.17g)\n", out_csv.c_str(), kmax,
                t.zero(1));
    return 0;
}

int cmd_poisson(int center_k, double width, int nmax, int kmax,
                const std::string& out_json) {
    AiryTable tab = build_airy_table(std::max(kmax, center_k + 2));
    const double c = tab.zero(center_k);
    auto pc = airy_poisson_check(tab, test_bump(c, width), c - width, c + width,
                                 nmax);
    const bool pass = pc.error <= 1e-4;
    ordered_json j;
    j["center_k"] = center_k;
    j["center_omega"] = c;
    j["width"] = width;
    j["n_max"] = nmax;
    j["rel_error"] = pc.relative ? pc.error : 0.0;
    j["abs_error"] = pc.relative ? pc.error * pc.rhs_abs : pc.error;
    j["relative"] = pc.relative;
    j["pass"] = pass;
    if (!out_json.empty()) write_json(j, out_json);
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_green_eval(const ModelParams& p, const std::string& prov, Sign sign,
                   const GridSpec& grid, const std::string& out_csv,
                   const std::string& sidecar) {
    AiryTable tab = table_for(p);
    KernelField f;
    f.params = p;
    f.provenance =
        prov == "parametrix" ? Provenance::parametrix : Provenance::spectral;
    f.t.resize(grid.nt);
    f.x.resize(grid.nx);
    f.y.resize(grid.ny);
    for (int i = 0; i < grid.nt; ++i)
        f.t[i] = grid.t_lo + (grid.t_hi - grid.t_lo) *
                                 (grid.nt == 1 ? 0.0
                                               : static_cast<double>(i) /
                                                     (grid.nt - 1));
    for (int i = 0; i < grid.nx; ++i)
        f.x[i] = 2.0 * p.gamma * (static_cast<double>(i) + 0.5) / grid.nx;
    const double yw = grid.y_halfwidth_scaled * std::pow(p.gamma, 1.5);
    for (int j = 0; j < grid.ny; ++j)
        f.y[j] = -yw + 2.0 * yw * (static_cast<double>(j) + 0.5) / grid.ny;
    f.values.assign(f.t.size() * f.x.size() * f.y.size(), {});

    bool conv = true;
    parallel_for(f.t.size(), [&](std::size_t it) {
        const double t = f.t[it];
        std::vector<double> ys(f.y.size());
        for (std::size_t j = 0; j < ys.size(); ++j)
            ys[j] = -t * std::sqrt(1.0 + p.gamma) + f.y[j];
        if (f.provenance == Provenance::parametrix) {
            auto r = parametrix_grid(tab, p, sign, t, f.x, ys);
            if (!(r.window_converged && r.quad_converged)) conv = false;
            for (std::size_t i = 0; i < f.x.size(); ++i)
                for (std::size_t j = 0; j < ys.size(); ++j)
                    f.at(it, i, j) = r.g[i * ys.size() + j];
        } else {
            for (std::size_t i = 0; i < f.x.size(); ++i)
                for (std::size_t j = 0; j < ys.size(); ++j)
                    f.at(it, i, j) =
                        green_spectral(tab, p, sign, t, f.x[i], ys[j]);
        }
    });

    const double c_fit = f.sup_abs() * p.h * p.h / std::sqrt(p.gamma);
    save_kernel_csv(f, out_csv, "halfwave green-eval " + timestamp());
    if (!sidecar.empty()) save_kernel_sidecar(f, sidecar, c_fit);
    std::printf("wrote %s  sup=%.6e  sup*h^2/sqrt(gamma)=%.4f\n",
                out_csv.c_str(), f.sup_abs(), c_fit);
    if (!conv)
        return nonconvergence_exit("green-eval parametrix",
                                   {{"h", p.h}, {"gamma", p.gamma}});
    return 0;
}

int cmd_compare(const ModelParams& p, const GridSpec& grid, double tol,
                const std::string& out_json) {
    AiryTable tab = table_for(p);
    auto rep = compare_paths(tab, p, Sign::plus, grid);
    const bool pass = rep.ratio <= tol;
    ordered_json j;
    j["params"] = params_json(p);
    j["grid"] = {{"nt", grid.nt}, {"nx", grid.nx}, {"ny", grid.ny}};
    j["max_abs_diff"] = rep.max_abs_diff;
    j["sup_spec"] = rep.sup_spec;
    j["ratio"] = rep.ratio;
    j["normalized_by"] = rep.normalized_by_sup ? "sup_spec" : "kernel_scale";
    j["n_window_used"] = rep.m_used;
    j["tolerance"] = tol;
    j["pass"] = pass;
    if (!out_json.empty()) write_json(j, out_json);
    std::cout << j.dump(2) << "\n";
    if (!rep.converged)
        return nonconvergence_exit("compare-paths", j);
    return pass ? 0 : 1;
}

struct LawSpec {
    std::string name;
    double t_lo, t_hi, expected, tol;
    bool partial_sum; // scan sum over |N|<=2 instead of the spectral kernel
};

int cmd_dispersion(const ModelParams& p, const std::string& law, int nt,
                   int nx, const std::string& out_json,
                   const std::string& out_csv) {
    AiryTable tab = table_for(p);
    LawSpec ls;
    const double sg = std::sqrt(p.gamma);
    if (law == "tpp1") {
        ls = {"tpp1", p.h / p.gamma, sg, -0.5, 0.07, false};
    } else if (law == "tpp9") {
        ls = {"tpp9", sg, 9.0 * sg, -1.0 / 3.0, 0.10, true};
    } else if (law == "tpg9") {
        const double lam = p.lambda_gamma();
        ls = {"tpg9", 9.0 * sg, std::min(1.0, sg * lam * lam), -0.5, 0.10,
              false};
    } else {
        std::cerr << "unknown law " << law << "\n";
        return 2;
    }
    if (!(ls.t_hi > ls.t_lo)) {
        std::cerr << "empty scan window for law " << law << "\n";
        return 2;
    }
    std::vector<double> ts(nt);
    for (int i = 0; i < nt; ++i)
        ts[i] = ls.t_lo * std::pow(ls.t_hi / ls.t_lo,
                                   (static_cast<double>(i) + 0.5) / nt);
    std::vector<SupPoint> scan;
    if (ls.partial_sum) {
        scan = sup_scan_partial(tab, p, Sign::plus, ts, 2, nx, 2 * nx);
    } else {
        SupScanOptions so;
        so.nx = nx;
        scan = sup_scan(tab, p, Sign::plus, ts, so);
    }
    DecayReport rep;
    try {
        rep = decay_fit(scan, ls.t_lo, ls.t_hi, ls.expected, ls.name);
    } catch (const InsufficientRangeError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    rep.params = p;
    rep.pass = std::fabs(rep.fitted_slope - rep.expected_slope) <= ls.tol;
    if (!out_csv.empty()) {
        CsvWriter w(out_csv, "halfwave dispersion-scan " + timestamp());
        w.row("t,sup,x_at,y_at");
        for (const auto& s : scan)
            w.row(fmt(s.t) + "," + fmt(s.sup) + "," + fmt(s.x_at) + "," +
                  fmt(s.y_at));
    }
    ordered_json j = report_json(rep);
    j["law"] = law;
    j["slope_tolerance"] = ls.tol;
    if (!out_json.empty()) write_json(j, out_json);
    std::cout << j.dump(2) << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_envelope(const ModelParams& p, const std::string& prop, int N,
                 bool stability, const std::string& out_json) {
    PropId id = prop_from_string(prop);
    EnvelopeGrid grid;
    grid.N = N;
    AiryTable tab = table_for(p);
    DecayReport rep;
    try {
        rep = envelope_report(id, tab, p, grid);
    } catch (const RegimeError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    ordered_json j = report_json(rep);
    bool pass = rep.pass;
    if (stability) {
        ModelParams p2 = p;
        p2.h = p.h / 2.0;
        AiryTable tab2 = table_for(p2);
        auto rep_h = envelope_report(id, tab2, p2, grid);
        EnvelopeGrid g2 = grid;
        g2.nT = std::max(2, grid.nT / 2);
        g2.nX = std::max(2, grid.nX / 2);
        g2.nY = std::max(3, grid.nY / 2);
        auto rep_g = envelope_report(id, tab, p, g2);
        const double drift_h = rep_h.max_ratio / rep.max_ratio;
        const double drift_g = rep_g.max_ratio / rep.max_ratio;
        auto within = [](double r) { return r > 0.5 && r < 2.0; };
        pass = pass && within(drift_h) && within(drift_g);
        j["h_drift"] = drift_h;
        j["grid_drift"] = drift_g;
        j["pass"] = pass;
    }
    if (!out_json.empty()) write_json(j, out_json);
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_caustic(const ModelParams& p, double t_max, int nt,
                const std::string& out_json, const std::string& out_csv) {
    AiryTable tab = table_for(p);
    std::vector<double> ts(nt);
    const double t0 = 0.06;
    for (int i = 0; i < nt; ++i)
        ts[i] = t0 + (t_max - t0) * static_cast<double>(i) / (nt - 1);
    const double cell = (t_max - t0) / (nt - 1);
    SupScanOptions so;
    so.nx = 24;
    auto scan = sup_scan(tab, p, Sign::plus, ts, so);
    auto peaks = local_maxima(scan, 1e-3);

    ordered_json j;
    j["params"] = params_json(p);
    j["cell"] = cell;
    bool all_pass = true;
    ordered_json found = ordered_json::array();
    for (int N = 1; N <= 2; ++N) {
        const double tn = caustic_time(p.a, N);
        if (tn > t_max) break;
        double best = 1e300;
        for (auto idx : peaks)
            best = std::min(best, std::fabs(scan[idx].t - tn));
        const bool pass = best <= cell + 1e-12;
        all_pass = all_pass && pass;
        found.push_back({{"N", N},
                         {"t_caustic", tn},
                         {"nearest_peak_offset", best},
                         {"pass", pass}});
    }
    j["caustics"] = found;
    j["pass"] = all_pass;
    if (!out_csv.empty()) {
        CsvWriter w(out_csv, "halfwave caustic-scan " + timestamp());
        w.row("t,sup,x_at,y_at");
        for (const auto& s : scan)
            w.row(fmt(s.t) + "," + fmt(s.sup) + "," + fmt(s.x_at) + "," +
                  fmt(s.y_at));
    }
    if (!out_json.empty()) write_json(j, out_json);
    std::cout << j.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

int cmd_strichartz(const ModelParams& p, double q, double t_lo, double t_hi,
                   int nt, const std::string& out_json) {
    AiryTable tab = table_for(p);
    std::vector<double> ts(nt);
    for (int i = 0; i < nt; ++i)
        ts[i] = t_lo * std::pow(t_hi / t_lo, (static_cast<double>(i) + 0.5) / nt);
    SupScanOptions so;
    so.nx = 24;
    auto scan = sup_scan(tab, p, Sign::plus, ts, so);
    auto sn = strichartz_norm(scan, p, q);
    ordered_json j;
    j["params"] = params_json(p);
    j["q"] = q;
    j["window"] = {t_lo, t_hi};
    j["norm_value"] = sn.norm_value;
    j["normalized"] = sn.normalized;
    if (!out_json.empty()) write_json(j, out_json);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_gallery(double h, int kmax, double q, const std::string& out_csv) {
    AiryTable tab = build_airy_table(kmax + 2);
    struct Row {
        int k;
        double ratio, gamma_sup, wk_const;
    };
    std::vector<Row> rows(kmax);
    parallel_for(static_cast<std::size_t>(kmax), [&](std::size_t idx) {
        const int k = static_cast<int>(idx) + 1;
        auto gs = gallery_strichartz(tab, k, h, q);
        // sup over an x-grid of the scaled Gamma L1 norm
        const double xsat = std::pow(h, 2.0 / 3.0) * tab.zero(k);
        double gsup = 0.0;
        for (int i = 0; i <= 12; ++i) {
            const double x = xsat * (0.2 + 2.3 * i / 12.0);
            gsup = std::max(gsup, gamma_kernel_l1(tab, k, h, x));
        }
        gsup *= std::pow(h, 1.0 / 3.0) / std::pow(tab.zero(k), 0.25);
        // w_k decay constant over t in (h^{1/3}, 1)
        double wc = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double t = std::pow(h, 1.0 / 3.0) *
                             std::pow(1.0 / std::pow(h, 1.0 / 3.0),
                                      (i + 0.5) / 12.0);
            const double vg = gallery_group_velocity(tab, k, h, 1.0);
            auto line = reduced_wave_yline(tab, k, h, t, -t * vg,
                                           0.2 * t + 40.0 * h);
            const double env = (1.0 / h) * std::sqrt(h / t) /
                               (std::sqrt(tab.zero(k)) * std::pow(h, 1.0 / 3.0));
            wc = std::max(wc, line.sup_abs() / env);
        }
        rows[idx] = {k, gs.ratio, gsup, wc};
    });
    double rmin = 1e300, rmax = 0.0;
    for (const auto& r : rows) {
        rmin = std::min(rmin, r.ratio);
        rmax = std::max(rmax, r.ratio);
    }
    const bool pass = rmax / rmin <= 3.0;
    if (!out_csv.empty()) {
        CsvWriter w(out_csv, "halfwave gallery-scan " + timestamp());
        w.row("k,h,strichartz_ratio,gamma_l1_sup,wk_decay_constant");
        for (const auto& r : rows)
            w.row(std::to_string(r.k) + "," + fmt(h) + "," + fmt(r.ratio) +
                  "," + fmt(r.gamma_sup) + "," + fmt(r.wk_const));
    }
    std::printf("gallery: k<=%d ratio range [%.4f, %.4f] max/min=%.3f pass=%d\n",
                kmax, rmin, rmax, rmax / rmin, static_cast<int>(pass));
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"halfwave: frequency-localized half-wave kernels on the "
                 "model convex domain"};
    app.set_config("--config", "", "config file (INI/TOML; flags override)");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: cores)");
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "print resolved config and exit");

    ModelParams p;
    auto add_params = [&](CLI::App* c) {
        c->add_option("--h", p.h, "semiclassical scale");
        c->add_option("--gamma", p.gamma, "tangency band width");
        c->add_option("--a", p.a, "source distance to the boundary");
    };

    // airy-table
    auto* c_tab = app.add_subcommand("airy-table", "zeros + L' table to CSV");
    int kmax = 50;
    double root_tol = 1e-12;
    std::string out = "table.csv";
    c_tab->add_option("--kmax", kmax);
    c_tab->add_option("--tol", root_tol);
    c_tab->add_option("--out", out);

    // poisson-check
    auto* c_poi = app.add_subcommand("poisson-check", "Airy-Poisson identity");
    int center_k = 2, nmax = 32, poi_kmax = 25;
    double width = 1.0;
    std::string poi_out;
    c_poi->add_option("--center", center_k, "index k of the centering zero");
    c_poi->add_option("--width", width);
    c_poi->add_option("--nmax", nmax);
    c_poi->add_option("--kmax", poi_kmax);
    c_poi->add_option("--out", poi_out);

    // green-eval
    auto* c_ge = app.add_subcommand("green-eval", "kernel field to CSV");
    add_params(c_ge);
    GridSpec grid;
    std::string prov = "spectral", sign_s = "+";
    std::string ge_out = "kernel.csv", ge_side;
    c_ge->add_option("--provenance", prov)->check(
        CLI::IsMember({"spectral", "parametrix"}));
    c_ge->add_option("--sign", sign_s)->check(CLI::IsMember({"+", "-"}));
    c_ge->add_option("--nt", grid.nt);
    c_ge->add_option("--nx", grid.nx);
    c_ge->add_option("--ny", grid.ny);
    c_ge->add_option("--t0", grid.t_lo);
    c_ge->add_option("--t1", grid.t_hi);
    c_ge->add_option("--out", ge_out);
    c_ge->add_option("--sidecar", ge_side);

    // compare-paths
    auto* c_cp = app.add_subcommand("compare-paths",
                                    "spectral vs parametrix agreement");
    add_params(c_cp);
    GridSpec cp_grid;
    double cp_tol = 1e-3;
    std::string cp_out;
    c_cp->add_option("--nt", cp_grid.nt);
    c_cp->add_option("--nx", cp_grid.nx);
    c_cp->add_option("--ny", cp_grid.ny);
    c_cp->add_option("--t1", cp_grid.t_hi);
    c_cp->add_option("--tol", cp_tol);
    c_cp->add_option("--out", cp_out);

    // dispersion-scan
    auto* c_ds = app.add_subcommand("dispersion-scan", "decay-slope fits");
    add_params(c_ds);
    std::string law = "tpp1", ds_out, ds_csv;
    int ds_nt = 12, ds_nx = 24;
    c_ds->add_option("--law", law)->check(
        CLI::IsMember({"tpp1", "tpp9", "tpg9"}));
    c_ds->add_option("--nt", ds_nt);
    c_ds->add_option("--nx", ds_nx);
    c_ds->add_option("--out", ds_out);
    c_ds->add_option("--csv", ds_csv);

    // envelope-report
    auto* c_env = app.add_subcommand("envelope-report",
                                     "dispersive envelope ratios");
    add_params(c_env);
    std::string prop = "eq:2hh", env_out;
    int env_N = 1;
    bool env_stab = false;
    c_env->add_option("--prop", prop);
    c_env->add_option("--N", env_N);
    c_env->add_flag("--stability", env_stab, "also run h/2 and grid/2");
    c_env->add_option("--out", env_out);

    // caustic-scan
    auto* c_ca = app.add_subcommand("caustic-scan", "sup|G| peaks vs 4N sqrt(a(1+a))");
    add_params(c_ca);
    double ca_tmax = 5.4;
    int ca_nt = 44;
    std::string ca_out, ca_csv;
    c_ca->add_option("--tmax", ca_tmax);
    c_ca->add_option("--nt", ca_nt);
    c_ca->add_option("--out", ca_out);
    c_ca->add_option("--csv", ca_csv);

    // strichartz-scan
    auto* c_st = app.add_subcommand("strichartz-scan", "L^q_t L^inf norms");
    add_params(c_st);
    double st_q = 4.0, st_tlo = 0.0, st_thi = 0.0;
    int st_nt = 32;
    std::string st_out;
    c_st->add_option("--q", st_q);
    c_st->add_option("--tmin", st_tlo);
    c_st->add_option("--tmax", st_thi);
    c_st->add_option("--nt", st_nt);
    c_st->add_option("--out", st_out);

    // gallery-scan
    auto* c_ga = app.add_subcommand("gallery-scan",
                                    "k-uniform gallery Strichartz constants");
    double ga_h = 0.05, ga_q = 4.0;
    int ga_kmax = 20;
    std::string ga_out = "gallery.csv";
    c_ga->add_option("--h", ga_h);
    c_ga->add_option("--kmax", ga_kmax);
    c_ga->add_option("--q", ga_q);
    c_ga->add_option("--out", ga_out);

    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (dump_config) {
        std::cout << app.config_to_str(true, true);
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 2;
    }
    set_default_threads(threads);

    try {
        if (c_tab->parsed()) return cmd_airy_table(kmax, root_tol, out);
        if (c_poi->parsed())
            return cmd_poisson(center_k, width, nmax, poi_kmax, poi_out);
        p.validate(false);
        if (c_ge->parsed())
            return cmd_green_eval(p, prov,
                                  sign_s == "+" ? Sign::plus : Sign::minus,
                                  grid, ge_out, ge_side);
        if (c_cp->parsed()) return cmd_compare(p, cp_grid, cp_tol, cp_out);
        if (c_ds->parsed())
            return cmd_dispersion(p, law, ds_nt, ds_nx, ds_out, ds_csv);
        if (c_env->parsed())
            return cmd_envelope(p, prop, env_N, env_stab, env_out);
        if (c_ca->parsed())
            return cmd_caustic(p, ca_tmax, ca_nt, ca_out, ca_csv);
        if (c_st->parsed()) {
            if (st_tlo <= 0.0) st_tlo = p.h / p.gamma;
            if (st_thi <= 0.0) st_thi = std::sqrt(p.gamma);
            return cmd_strichartz(p, st_q, st_tlo, st_thi, st_nt, st_out);
        }
        if (c_ga->parsed()) return cmd_gallery(ga_h, ga_kmax, ga_q, ga_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergenceError& e) {
        return nonconvergence_exit(e.what(),
                                   {{"lambda", e.lambda}, {"N", e.N}});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
