// Batch front-end: figure data, point-wise moment evaluation, Monte-Carlo
// campaigns. Talks to the library exclusively through the C API.

#include "parax.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct CliFailure {
    int code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& msg) {
    throw CliFailure{code, msg};
}

// ---- config file: flat "section.key = value" lines ----------------------

struct Config {
    std::map<std::string, std::string> kv;

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            die(2, "cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            size_t hash = line.find_first_of("#;");
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            auto notspace = [](int c) { return !std::isspace(c); };
            line.erase(line.begin(),
                       std::find_if(line.begin(), line.end(), notspace));
            line.erase(std::find_if(line.rbegin(), line.rend(), notspace)
                           .base(),
                       line.end());
            if (line.empty())
                continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                die(2, "config line " + std::to_string(lineno) +
                           " is not key = value");
            std::string key = line.substr(0, eq);
            std::string val = line.substr(eq + 1);
            key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(),
                      key.end());
            val.erase(val.begin(),
                      std::find_if(val.begin(), val.end(), notspace));
            kv[key] = val;
        }
    }

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    std::string get(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        if (it == kv.end())
            return dflt;
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size())
                throw std::invalid_argument(k);
            return v;
        } catch (const std::exception&) {
            die(2, "config key " + k + " is not a number: " + it->second);
        }
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        auto notspace = [](int c) { return !std::isspace(c); };
        tok.erase(tok.begin(),
                  std::find_if(tok.begin(), tok.end(), notspace));
        tok.erase(std::find_if(tok.rbegin(), tok.rend(), notspace).base(),
                  tok.end());
        if (!tok.empty())
            out.push_back(tok);
    }
    return out;
}

std::array<double, 2> parse_point(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 2)
        die(2, "expected a point as x,y: " + s);
    try {
        return {std::stod(parts[0]), std::stod(parts[1])};
    } catch (const std::exception&) {
        die(2, "bad point coordinates: " + s);
    }
}

// ---- status handling -----------------------------------------------------

struct RunState {
    bool allow_loose = false;
    bool loose_hit = false;
};

void check(px_status st, RunState& rs) {
    if (st == PX_OK)
        return;
    if (st == PX_NO_CONVERGE && rs.allow_loose) {
        rs.loose_hit = true;
        return;
    }
    int code = st == PX_INVALID ? 2 : st == PX_NO_CONVERGE ? 3 : 1;
    die(code, px_last_error());
}

// ---- model construction --------------------------------------------------

struct ModelDeleter {
    void operator()(px_model* m) const { px_model_free(m); }
};
using ModelPtr = std::unique_ptr<px_model, ModelDeleter>;

struct ModelSpec {
    double k0 = 1.0;
    double r0 = 1.0;
    double c0 = 1.0;
    double lc = 1.0;
    std::string kind = "gaussian";
    std::vector<double> radius, value;

    static ModelSpec from(const Config& cfg) {
        ModelSpec ms;
        ms.k0 = cfg.num("beam.k0", ms.k0);
        ms.r0 = cfg.num("beam.r0", ms.r0);
        ms.c0 = cfg.num("covariance.c0", ms.c0);
        ms.lc = cfg.num("covariance.lc", ms.lc);
        ms.kind = cfg.get("covariance.kind", ms.kind);
        if (ms.kind == "tabulated") {
            std::string path = cfg.get("covariance.table", "");
            if (path.empty())
                die(2, "covariance.kind = tabulated needs covariance.table");
            std::ifstream in(path);
            if (!in)
                die(2, "cannot open covariance table: " + path);
            std::string line;
            if (!std::getline(in, line))
                die(2, "covariance table is empty");
            // header line required
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                auto cols = split(line, ',');
                if (cols.size() != 2)
                    die(2, "covariance table row needs two columns");
                try {
                    ms.radius.push_back(std::stod(cols[0]));
                    ms.value.push_back(std::stod(cols[1]));
                } catch (const std::exception&) {
                    die(2, "bad covariance table row: " + line);
                }
            }
        } else if (ms.kind != "gaussian") {
            die(2, "unknown covariance.kind: " + ms.kind);
        }
        return ms;
    }

    ModelPtr create(RunState& rs, double c0_scale = 1.0,
                    double r0_scale = 1.0) const {
        px_model* m = nullptr;
        if (kind == "gaussian") {
            check(px_model_create_gaussian(k0, r0 * r0_scale, c0 * c0_scale,
                                           lc, &m),
                  rs);
        } else {
            check(px_model_create_tabulated(k0, r0 * r0_scale, c0 * c0_scale,
                                            lc, radius.data(), value.data(),
                                            radius.size(), &m),
                  rs);
        }
        return ModelPtr(m);
    }
};

// ---- artifacts -----------------------------------------------------------

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json make_manifest(const std::string& command, const json& resolved,
                   uint64_t seed) {
    return json{{"command", command},
                {"config", resolved},
                {"version", px_version()},
                {"timestamp", timestamp()},
                {"seed", seed}};
}

void write_text(const std::string& dir, const std::string& name,
                const std::string& content) {
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        die(1, "cannot write " + path);
    out << content;
}

void write_json(const std::string& dir, const std::string& name,
                const json& j) {
    write_text(dir, name, j.dump(2) + "\n");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---- shared options ------------------------------------------------------

struct Common {
    std::string out = ".";
    std::string config_path;
    uint64_t seed = 20240801;
    int threads = 1;
    RunState rs;
    Config cfg;
    ModelSpec model;

    void finish_setup() {
        if (!config_path.empty())
            cfg.load(config_path);
        model = ModelSpec::from(cfg);
        if (cfg.has("quad.rel_tol") || cfg.has("quad.abs_tol") ||
            cfg.has("quad.max_level")) {
            check(px_quad_defaults(cfg.num("quad.rel_tol", 1e-8),
                                   cfg.num("quad.abs_tol", 1e-12),
                                   (int)cfg.num("quad.max_level", 12)),
                  rs);
        }
    }

    json model_json() const {
        json j{{"beam.k0", model.k0},
               {"beam.r0", model.r0},
               {"covariance.kind", model.kind},
               {"covariance.c0", model.c0},
               {"covariance.lc", model.lc}};
        return j;
    }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--config", c.config_path, "key-value config file");
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--threads", c.threads, "worker threads (speed only)");
    sub->add_flag("--allow-loose", c.rs.allow_loose,
                  "tolerate unconverged quadratures");
    sub->add_option("--k0", c.model.k0, "wavenumber")->excludes("--config");
    sub->add_option("--r0", c.model.r0, "beam radius")->excludes("--config");
}

// ---- fig1 ----------------------------------------------------------------

int cmd_fig1(Common& c, double zt_max, int steps,
             const std::string& ratios_str, const std::string& profile) {
    if (profile != "gaussian")
        die(2, "only the gaussian profile is supported here");
    if (steps < 1 || zt_max <= 0.0)
        die(2, "fig1 needs steps >= 1 and ztilde-max > 0");
    std::vector<double> ratios;
    for (const auto& tok : split(ratios_str, ',')) {
        try {
            ratios.push_back(std::stod(tok));
        } catch (const std::exception&) {
            die(2, "bad zc ratio: " + tok);
        }
        if (ratios.back() <= 0.0)
            die(2, "zc ratios must be positive");
    }
    if (ratios.empty())
        die(2, "no zc ratios given");

    std::string csv = "z_over_zsca,zc_ratio,S\n";
    for (double ratio : ratios)
        for (int i = 1; i <= steps; ++i) {
            double zt = zt_max * i / steps;
            double s = 0.0;
            check(px_scint_index_normalized(zt, ratio, &s), c.rs);
            csv += fmt(zt) + "," + fmt(ratio) + "," + fmt(s) + "\n";
        }
    write_text(c.out, "fig1.csv", csv);

    std::string gp =
        "# scintillation index vs. propagation distance; see fig1.csv and\n"
        "# manifest.json in this directory\n"
        "set datafile separator \",\"\n"
        "set xlabel \"z / Z_{sca}\"\n"
        "set ylabel \"S\"\n"
        "set key left top\n"
        "plot \\\n";
    for (size_t i = 0; i < ratios.size(); ++i) {
        gp += "  \"< awk -F, 'NR>1 && $2==" + fmt(ratios[i]) +
              "' fig1.csv\" using 1:3 with lines title \"Z_c/Z_{sca} = " +
              fmt(ratios[i]) + "\"";
        gp += (i + 1 < ratios.size()) ? ", \\\n" : "\n";
    }
    write_text(c.out, "fig1.gp", gp);

    json resolved = c.model_json();
    resolved["fig1.ztilde_max"] = zt_max;
    resolved["fig1.steps"] = steps;
    resolved["fig1.zc_ratios"] = ratios;
    resolved["fig1.profile"] = profile;
    write_json(c.out, "manifest.json", make_manifest("fig1", resolved, c.seed));
    return 0;
}

// ---- fig2 ----------------------------------------------------------------

int cmd_fig2(Common& c, double rs_min, double rs_max, double xis_min,
             double xis_max, int n) {
    if (n < 1 || rs_min <= 0.0 || xis_min <= 0.0 || rs_max < rs_min ||
        xis_max < xis_min)
        die(2, "bad fig2 grid parameters");
    auto linspace = [n](double a, double b) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i)
            v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
        return v;
    };
    std::vector<double> rbar = linspace(rs_min, rs_max);
    std::vector<double> xbar = linspace(xis_min, xis_max);
    std::vector<double> cv((size_t)n * n);
    check(px_fig2_contours(rbar.data(), rbar.size(), xbar.data(), xbar.size(),
                           cv.data()),
          c.rs);

    std::string csv = "r_s_bar,xi_s_bar,cv\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            csv += fmt(rbar[i]) + "," + fmt(xbar[j]) + "," +
                   fmt(cv[(size_t)i * n + j]) + "\n";
    write_text(c.out, "fig2.csv", csv);

    write_text(c.out, "fig2.gp",
               "# CV contours over normalized smoothing widths\n"
               "set datafile separator \",\"\n"
               "set xlabel \"r_s / rho_z\"\n"
               "set ylabel \"xi_s rho_z\"\n"
               "set view map\n"
               "set dgrid3d " + std::to_string(n) + "," + std::to_string(n) +
                   "\n"
                   "set contour base\n"
                   "set cntrparam levels discrete 0.5,1,2,4\n"
                   "splot \"fig2.csv\" using 1:2:3 with lines notitle\n");

    json resolved{{"fig2.rs_min", rs_min}, {"fig2.rs_max", rs_max},
                  {"fig2.xis_min", xis_min}, {"fig2.xis_max", xis_max},
                  {"fig2.n", n}};
    write_json(c.out, "manifest.json", make_manifest("fig2", resolved, c.seed));
    return 0;
}

// ---- moments eval --------------------------------------------------------

int cmd_moments(Common& c, const std::string& quantity, double z,
                const std::string& point, const std::string& xs,
                const std::string& ys, const std::string& x2s,
                const std::string& y2s, const std::string& xis) {
    ModelPtr m = c.model.create(c.rs);
    auto r = parse_point(point);
    double val[2] = {0.0, 0.0};
    double err = 0.0;
    std::string method = "quadrature";
    if (quantity == "mu1") {
        check(px_mu1_limit(m.get(), z, r[0], r[1], val), c.rs);
        method = "closed_form";
    } else if (quantity == "mu2") {
        auto x = parse_point(xs), y = parse_point(ys);
        check(px_mu2_limit(m.get(), z, r[0], r[1], x[0], x[1], y[0], y[1],
                           val, &err),
              c.rs);
    } else if (quantity == "mu4") {
        auto x1 = parse_point(xs), y1 = parse_point(ys);
        auto x2 = parse_point(x2s), y2 = parse_point(y2s);
        check(px_mu4_limit(m.get(), z, r[0], r[1], x1.data(), x2.data(),
                           y1.data(), y2.data(), val, &err),
              c.rs);
    } else if (quantity == "coherence") {
        auto q = parse_point(xs);
        check(px_mutual_coherence(m.get(), z, r[0], r[1], q[0], q[1], val,
                                  &err),
              c.rs);
    } else if (quantity == "wigner") {
        auto xi = parse_point(xis);
        check(px_mean_wigner(m.get(), z, r[0], r[1], xi[0], xi[1], val, &err),
              c.rs);
    } else {
        die(2, "unknown quantity: " + quantity);
    }

    json resolved = c.model_json();
    resolved["moments.quantity"] = quantity;
    resolved["moments.z"] = z;
    resolved["moments.point"] = point;
    json out{{"value_re", val[0]},
             {"value_im", val[1]},
             {"err", err},
             {"method", method},
             {"converged", !c.rs.loose_hit},
             {"manifest", make_manifest("moments", resolved, c.seed)}};
    write_json(c.out, "moments.json", out);
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

// ---- wigner --------------------------------------------------------------

int cmd_wigner(Common& c, double z, const std::string& rstr,
               const std::string& xistr, double rs_width, double xis_width) {
    ModelPtr m = c.model.create(c.rs);
    auto r = parse_point(rstr);
    auto xi = parse_point(xistr);
    double xi_ref = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);

    px_wigner* w = nullptr;
    check(px_wigner_create(m.get(), rs_width, xis_width, z, xi_ref, &w), c.rs);
    std::unique_ptr<px_wigner, decltype(&px_wigner_free)> wp(w,
                                                             &px_wigner_free);
    double mean = 0.0, second = 0.0, var = 0.0;
    double mean_err = 0.0, second_err = 0.0, var_err = 0.0;
    check(px_wigner_mean(w, r[0], r[1], xi[0], xi[1], &mean, &mean_err), c.rs);
    check(px_wigner_second_moment(w, r[0], r[1], xi[0], xi[1], &second,
                                  &second_err),
          c.rs);
    check(px_wigner_variance(w, r[0], r[1], xi[0], xi[1], &var, &var_err),
          c.rs);
    double cv = mean > 0.0 ? std::sqrt(std::max(var, 0.0)) / mean : 0.0;

    json resolved = c.model_json();
    resolved["wigner.z"] = z;
    resolved["wigner.r"] = rstr;
    resolved["wigner.xi"] = xistr;
    resolved["wigner.rs"] = rs_width;
    resolved["wigner.xis"] = xis_width;
    json out{{"mean", mean},
             {"second_moment", second},
             {"variance", var},
             {"cv", cv},
             {"err", mean_err + second_err},
             {"converged", !c.rs.loose_hit},
             {"manifest", make_manifest("wigner", resolved, c.seed)}};
    write_json(c.out, "wigner.json", out);
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

// ---- mc ------------------------------------------------------------------

struct ProbesPtr : std::unique_ptr<px_probes, void (*)(px_probes*)> {
    ProbesPtr() : unique_ptr(nullptr, &px_probes_free) {
        px_probes* p = nullptr;
        px_probes_create(&p);
        reset(p);
    }
};

struct McSetup {
    double epsilon, z, dz;
    int grid_n;
    double grid_h;
    int realizations;
    uint64_t seed;
    int workers;
    bool edge_mask;
    std::array<double, 2> center{0.0, 0.0};
    std::vector<std::array<double, 2>> means, intensities;
    std::vector<std::array<double, 4>> pairs;
    std::vector<std::array<double, 8>> quads;
    std::vector<std::array<double, 6>> wigners; // rs, xis, r, xi
    std::vector<int> checkpoints;
};

McSetup mc_setup_from(const Common& c) {
    const Config& cfg = c.cfg;
    McSetup s;
    s.epsilon = cfg.num("sim.epsilon", 1.0);
    s.z = cfg.num("sim.z", 1.0);
    s.dz = cfg.num("sim.dz", 0.05);
    s.grid_n = (int)cfg.num("grid.n", 256);
    s.grid_h = cfg.num("grid.h", 0.1);
    s.realizations = (int)cfg.num("sim.realizations", 100);
    s.seed = (uint64_t)cfg.num("sim.seed", (double)c.seed);
    s.workers = (int)cfg.num("sim.workers", (double)c.threads);
    s.edge_mask = cfg.num("sim.edge_mask", 0.0) != 0.0;
    if (cfg.has("probes.center"))
        s.center = parse_point(cfg.get("probes.center", "0,0"));
    for (const auto& tok : split(cfg.get("probes.mean", ""), ';'))
        s.means.push_back(parse_point(tok));
    for (const auto& tok : split(cfg.get("probes.intensity", ""), ';'))
        s.intensities.push_back(parse_point(tok));
    for (const auto& tok : split(cfg.get("probes.pair", ""), ';')) {
        auto pts = split(tok, ':');
        if (pts.size() != 2)
            die(2, "pair probe needs two :-separated points");
        auto a = parse_point(pts[0]), b = parse_point(pts[1]);
        s.pairs.push_back({a[0], a[1], b[0], b[1]});
    }
    for (const auto& tok : split(cfg.get("probes.quad", ""), ';')) {
        auto pts = split(tok, ':');
        if (pts.size() != 4)
            die(2, "quad probe needs four :-separated points");
        std::array<double, 8> q;
        for (int i = 0; i < 4; ++i) {
            auto p = parse_point(pts[i]);
            q[2 * i] = p[0];
            q[2 * i + 1] = p[1];
        }
        s.quads.push_back(q);
    }
    for (const auto& tok : split(cfg.get("probes.wigner", ""), ';')) {
        auto v = split(tok, ',');
        if (v.size() != 6)
            die(2, "wigner probe needs rs,xis,rx,ry,xix,xiy");
        std::array<double, 6> w;
        for (int i = 0; i < 6; ++i)
            w[i] = std::stod(v[i]);
        s.wigners.push_back(w);
    }
    for (const auto& tok : split(cfg.get("probes.checkpoints", ""), ','))
        s.checkpoints.push_back(std::stoi(tok));
    if (s.means.empty() && s.intensities.empty() && s.pairs.empty() &&
        s.quads.empty() && s.wigners.empty())
        s.intensities.push_back({0.0, 0.0});
    return s;
}

void fill_probes(const McSetup& s, px_probes* p, RunState& rs) {
    check(px_probes_set_center(p, s.center[0], s.center[1]), rs);
    for (auto& m : s.means)
        check(px_probes_add_mean(p, m[0], m[1], nullptr), rs);
    for (auto& pr : s.pairs) {
        double a[2] = {pr[0], pr[1]}, b[2] = {pr[2], pr[3]};
        check(px_probes_add_pair(p, a, b, nullptr), rs);
    }
    for (auto& q : s.quads) {
        double x1[2] = {q[0], q[1]}, x2[2] = {q[2], q[3]};
        double y1[2] = {q[4], q[5]}, y2[2] = {q[6], q[7]};
        check(px_probes_add_quad(p, x1, x2, y1, y2, nullptr), rs);
    }
    for (auto& i : s.intensities)
        check(px_probes_add_intensity(p, i[0], i[1], nullptr), rs);
    for (auto& w : s.wigners)
        check(px_probes_add_wigner(p, w[0], w[1], w[2], w[3], w[4], w[5],
                                   nullptr),
              rs);
    for (int ck : s.checkpoints)
        check(px_probes_add_checkpoint(p, ck, nullptr), rs);
}

json mc_setup_json(const McSetup& s) {
    return json{{"sim.epsilon", s.epsilon},
                {"sim.z", s.z},
                {"sim.dz", s.dz},
                {"grid.n", s.grid_n},
                {"grid.h", s.grid_h},
                {"sim.realizations", s.realizations},
                {"sim.seed", s.seed},
                {"sim.workers", s.workers},
                {"sim.edge_mask", s.edge_mask}};
}

int cmd_mc(Common& c, const std::string& out_name) {
    McSetup s = mc_setup_from(c);
    ModelPtr model = c.model.create(c.rs);
    px_sim* simraw = nullptr;
    check(px_sim_create(model.get(), s.epsilon, s.z, s.dz, s.grid_n, s.grid_h,
                        s.realizations, s.seed, s.workers, s.edge_mask ? 1 : 0,
                        &simraw),
          c.rs);
    std::unique_ptr<px_sim, void (*)(px_sim*)> sim(simraw, &px_sim_free);
    ProbesPtr probes;
    fill_probes(s, probes.get(), c.rs);

    px_stats* straw = nullptr;
    check(px_run_ensemble(sim.get(), probes.get(), &straw), c.rs);
    std::unique_ptr<px_stats, void (*)(px_stats*)> stats(straw,
                                                         &px_stats_free);

    // scaled model for exact pre-limit predictions, unscaled for the limits
    ModelPtr simmodel = c.model.create(c.rs, s.epsilon, 1.0 / s.epsilon);

    auto slot_est = [&](size_t slot) {
        double v[2] = {0, 0};
        double se = 0.0;
        check(px_stats_mean(stats.get(), slot, v), c.rs);
        check(px_stats_se(stats.get(), slot, &se), c.rs);
        return json{{"re", v[0]}, {"im", v[1]}, {"se", se}};
    };

    json out;
    out["count"] = s.realizations;
    json jm = json::array();
    for (size_t i = 0; i < s.means.size(); ++i) {
        size_t slot;
        check(px_probes_mean_slot(probes.get(), i, &slot), c.rs);
        json e{{"point", {s.means[i][0], s.means[i][1]}},
               {"estimate", slot_est(slot)}};
        double pred[2] = {0, 0};
        check(px_mean_field(simmodel.get(), s.z / s.epsilon,
                            s.means[i][0] / s.epsilon,
                            s.means[i][1] / s.epsilon, pred),
              c.rs);
        e["prediction"] = {{"re", pred[0]}, {"im", pred[1]}};
        jm.push_back(e);
    }
    out["mean"] = jm;

    json jp = json::array();
    for (size_t i = 0; i < s.pairs.size(); ++i) {
        size_t slot;
        check(px_probes_pair_slot(probes.get(), i, &slot), c.rs);
        json e{{"points", s.pairs[i]}, {"estimate", slot_est(slot)}};
        double pred[2] = {0, 0};
        double err = 0.0;
        check(px_mu2_limit(model.get(), s.z, s.center[0], s.center[1],
                           s.pairs[i][0], s.pairs[i][1], s.pairs[i][2],
                           s.pairs[i][3], pred, &err),
              c.rs);
        e["prediction"] = {{"re", pred[0]}, {"im", pred[1]}, {"err", err}};
        jp.push_back(e);
    }
    out["pair"] = jp;

    json jq = json::array();
    for (size_t i = 0; i < s.quads.size(); ++i) {
        size_t slot;
        check(px_probes_quad_slot(probes.get(), i, &slot), c.rs);
        json e{{"points", s.quads[i]}, {"estimate", slot_est(slot)}};
        double pred[2] = {0, 0};
        double err = 0.0;
        const auto& q = s.quads[i];
        double x1[2] = {q[0], q[1]}, x2[2] = {q[2], q[3]};
        double y1[2] = {q[4], q[5]}, y2[2] = {q[6], q[7]};
        check(px_mu4_limit(model.get(), s.z, s.center[0], s.center[1], x1, x2,
                           y1, y2, pred, &err),
              c.rs);
        e["prediction"] = {{"re", pred[0]}, {"im", pred[1]}, {"err", err}};
        jq.push_back(e);
    }
    out["quad"] = jq;

    json ji = json::array();
    for (size_t i = 0; i < s.intensities.size(); ++i) {
        size_t s2, s4;
        check(px_probes_intensity2_slot(probes.get(), i, &s2), c.rs);
        check(px_probes_intensity4_slot(probes.get(), i, &s4), c.rs);
        json e{{"point", {s.intensities[i][0], s.intensities[i][1]}},
               {"intensity", slot_est(s2)},
               {"intensity_sq", slot_est(s4)}};
        double sv = 0.0, sse = 0.0;
        check(px_estimate_scint(stats.get(), probes.get(), i, &sv, &sse),
              c.rs);
        e["scint_index"] = {{"value", sv}, {"se", sse}};
        double pred = 0.0;
        check(px_scint_index(model.get(), s.z, s.intensities[i][0],
                             s.intensities[i][1], &pred),
              c.rs);
        e["scint_index_prediction"] = pred;
        ji.push_back(e);
    }
    out["intensity"] = ji;

    json jw = json::array();
    for (size_t i = 0; i < s.wigners.size(); ++i) {
        size_t slot;
        check(px_probes_wigner_slot(probes.get(), i, &slot), c.rs);
        jw.push_back(json{{"probe", s.wigners[i]}, {"estimate", slot_est(slot)}});
    }
    out["wigner"] = jw;

    size_t dslot;
    check(px_probes_drift_slot(probes.get(), &dslot), c.rs);
    if (s.realizations > 0) {
        double drift[2] = {0, 0};
        check(px_stats_mean(stats.get(), dslot, drift), c.rs);
        out["mean_norm_drift"] = drift[0];
    }

    json resolved = c.model_json();
    resolved.update(mc_setup_json(s));
    out["manifest"] = make_manifest("mc", resolved, s.seed);
    write_json(c.out, out_name, out);
    return 0;
}

// ---- gsr-check -----------------------------------------------------------

int cmd_gsr(Common& c, const std::string& x1s, const std::string& x2s,
            const std::string& y1s, const std::string& y2s) {
    McSetup s = mc_setup_from(c);
    auto x1 = parse_point(x1s), x2 = parse_point(x2s);
    auto y1 = parse_point(y1s), y2 = parse_point(y2s);

    ModelPtr model = c.model.create(c.rs);
    px_sim* simraw = nullptr;
    check(px_sim_create(model.get(), s.epsilon, s.z, s.dz, s.grid_n, s.grid_h,
                        s.realizations, s.seed, s.workers, s.edge_mask ? 1 : 0,
                        &simraw),
          c.rs);
    std::unique_ptr<px_sim, void (*)(px_sim*)> sim(simraw, &px_sim_free);

    ProbesPtr probes;
    check(px_probes_set_center(probes.get(), s.center[0], s.center[1]), c.rs);
    size_t slots[9];
    check(px_probes_add_quad(probes.get(), x1.data(), x2.data(), y1.data(),
                             y2.data(), nullptr),
          c.rs);
    check(px_probes_add_pair(probes.get(), x1.data(), y1.data(), nullptr),
          c.rs);
    check(px_probes_add_pair(probes.get(), x2.data(), y2.data(), nullptr),
          c.rs);
    check(px_probes_add_pair(probes.get(), x1.data(), y2.data(), nullptr),
          c.rs);
    check(px_probes_add_pair(probes.get(), x2.data(), y1.data(), nullptr),
          c.rs);
    // means enter as u(x1) u(x2) conj(u(y1)) conj(u(y2)). Mean probes take
    // beam-scale coordinates (mapped as x/epsilon), so the local offsets are
    // pre-multiplied by epsilon to land on the quad probe's lattice points.
    for (auto& p : {x1, x2, y1, y2})
        check(px_probes_add_mean(probes.get(),
                                 s.center[0] + s.epsilon * p[0],
                                 s.center[1] + s.epsilon * p[1], nullptr),
              c.rs);
    check(px_probes_quad_slot(probes.get(), 0, &slots[0]), c.rs);
    for (size_t i = 0; i < 4; ++i)
        check(px_probes_pair_slot(probes.get(), i, &slots[1 + i]), c.rs);
    for (size_t i = 0; i < 4; ++i)
        check(px_probes_mean_slot(probes.get(), i, &slots[5 + i]), c.rs);

    px_stats* straw = nullptr;
    check(px_run_ensemble(sim.get(), probes.get(), &straw), c.rs);
    std::unique_ptr<px_stats, void (*)(px_stats*)> stats(straw,
                                                         &px_stats_free);

    double residual = 0.0, se = 0.0;
    check(px_estimate_gsr(stats.get(), slots, &residual, &se), c.rs);
    double analytic = 0.0;
    check(px_gsr_residual(model.get(), s.z, s.center[0], s.center[1],
                          x1.data(), x2.data(), y1.data(), y2.data(),
                          &analytic),
          c.rs);

    json resolved = c.model_json();
    resolved.update(mc_setup_json(s));
    resolved["gsr.x1"] = x1s;
    resolved["gsr.x2"] = x2s;
    resolved["gsr.y1"] = y1s;
    resolved["gsr.y2"] = y2s;
    json out{{"residual", residual},
             {"se", se},
             {"consistent", residual <= 3.0 * se},
             {"inconclusive", se > residual},
             {"analytic_residual", analytic},
             {"manifest", make_manifest("gsr-check", resolved, s.seed)}};
    write_json(c.out, "gsr.json", out);
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

// ---- validate ------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_validate(Common& c, bool full) {
    std::vector<CheckResult> results;
    auto record = [&](const std::string& name, bool pass,
                      const std::string& detail) {
        results.push_back({name, pass, detail});
        std::printf("%s  %s (%s)\n", pass ? "PASS" : "FAIL", name.c_str(),
                    detail.c_str());
    };

    RunState& rs = c.rs;

    {
        double s1 = 1.0, s2 = 1.0;
        check(px_scint_index_normalized(0.0, 1.0, &s1), rs);
        ModelPtr m = c.model.create(rs);
        check(px_scint_index(m.get(), 0.0, 0.0, 0.0, &s2), rs);
        bool ok = std::abs(s1) < 1e-8 && std::abs(s2) < 1e-8;
        record("zero-distance scintillation", ok,
               "S_norm=" + fmt(s1) + " S_limit=" + fmt(s2));
    }
    {
        double s = 0.0;
        check(px_scint_index_normalized(10.0, 1.0, &s), rs);
        bool ok = std::abs(s - 1.0) < 0.05;
        record("strong-scattering saturation", ok, "S=" + fmt(s));
    }
    {
        bool ok = true;
        uint64_t state = 12345;
        auto rnd = [&state]() {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            return 0.1 + 10.0 * ((state >> 33) * 0x1p-31);
        };
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            double xis = rnd(), rho = rnd();
            double cv = 0.0;
            check(px_cv_strong(-1.0, xis / rho, rho, &cv), rs);
            worst = std::max(worst, std::abs(cv - 1.0));
        }
        ok = worst < 1e-12;
        record("critical-smoothing CV", ok, "max|cv-1|=" + fmt(worst));
    }
    {
        // transport residual at a few points
        ModelPtr m = c.model.create(rs);
        int npts = full ? 10 : 3;
        double worst = 0.0;
        uint64_t state = 777;
        auto rnd = [&state]() {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            return ((state >> 33) * 0x1p-31) - 0.5;
        };
        for (int i = 0; i < npts; ++i) {
            double res = 0.0, scale = 0.0;
            check(px_transport_residual(m.get(), 0.6 + 0.2 * rnd(),
                                        1.2 * rnd(), 1.2 * rnd(), rnd(), rnd(),
                                        &res, &scale),
                  rs);
            if (scale > 0.0)
                worst = std::max(worst, res / scale);
        }
        record("transport-equation residual", worst < 1e-4,
               "max rel residual=" + fmt(worst));
    }
    {
        // kernel invariants at reduced scale
        ModelPtr m = c.model.create(rs);
        double v0[2] = {0, 0}, vp[2] = {0, 0}, vm[2] = {0, 0};
        double err = 0.0;
        check(px_kernel_a(m.get(), 0.0, 0.7, -0.3, 0.4, 0.9, v0, &err), rs);
        bool okz = v0[0] == 0.0 && v0[1] == 0.0;
        check(px_kernel_a(m.get(), 1.0, 0.7, -0.3, 0.4, 0.9, vp, &err), rs);
        check(px_kernel_a(m.get(), 1.0, -0.7, 0.3, -0.4, -0.9, vm, &err), rs);
        double dsym = std::hypot(vp[0] - vm[0], vp[1] - vm[1]);
        bool oksym = dsym < 1e-6 + 10.0 * err;
        record("kernel invariants", okz && oksym,
               "A(0)=" + fmt(std::hypot(v0[0], v0[1])) +
                   " sym diff=" + fmt(dsym));
    }

    // Monte-Carlo checks share one medium
    double eps = full ? 0.05 : 0.25;
    int n_real = full ? 2000 : 80;
    int grid_n = full ? 256 : 128;
    double grid_h = full ? 0.35 : 0.3;
    ModelPtr model = c.model.create(rs);
    {
        px_sim* simraw = nullptr;
        px_status st =
            px_sim_create(model.get(), eps, full ? 2.0 : 1.0, 0.2, grid_n,
                          grid_h, n_real, c.seed, c.threads, 0, &simraw);
        check(st, rs);
        std::unique_ptr<px_sim, void (*)(px_sim*)> sim(simraw, &px_sim_free);
        ProbesPtr probes;
        check(px_probes_add_mean(probes.get(), 0.0, 0.0, nullptr), rs);
        double q[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
        for (double qq : q) {
            double a[2] = {qq / 2, 0.0}, b[2] = {-qq / 2, 0.0};
            check(px_probes_add_pair(probes.get(), a, b, nullptr), rs);
        }
        px_stats* straw = nullptr;
        check(px_run_ensemble(sim.get(), probes.get(), &straw), rs);
        std::unique_ptr<px_stats, void (*)(px_stats*)> stats(straw,
                                                             &px_stats_free);
        // emergent mean-field damping
        size_t slot;
        check(px_probes_mean_slot(probes.get(), 0, &slot), rs);
        double est[2] = {0, 0};
        double se = 0.0;
        check(px_stats_mean(stats.get(), slot, est), rs);
        check(px_stats_se(stats.get(), slot, &se), rs);
        ModelPtr simmodel = c.model.create(rs, eps, 1.0 / eps);
        double pred[2] = {0, 0};
        check(px_mean_field(simmodel.get(), (full ? 2.0 : 1.0) / eps, 0.0,
                            0.0, pred),
              rs);
        double dev = std::hypot(est[0] - pred[0], est[1] - pred[1]);
        bool ok = dev <= 3.0 * se + 1e-12;
        record("mean-field damping (MC)", ok,
               "dev=" + fmt(dev) + " 3se=" + fmt(3.0 * se));

        // mutual coherence at 5 offsets
        double worst = 0.0;
        for (size_t i = 0; i < 5; ++i) {
            size_t ps;
            check(px_probes_pair_slot(probes.get(), i, &ps), rs);
            double pe[2] = {0, 0};
            double pse = 0.0;
            check(px_stats_mean(stats.get(), ps, pe), rs);
            check(px_stats_se(stats.get(), ps, &pse), rs);
            double mv[2] = {0, 0};
            double merr = 0.0;
            check(px_mu2_limit(model.get(), full ? 2.0 : 1.0, 0.0, 0.0,
                               q[i] / 2, 0.0, -q[i] / 2, 0.0, mv, &merr),
                  rs);
            double ref = std::hypot(mv[0], mv[1]);
            double dev2 =
                (std::hypot(pe[0] - mv[0], pe[1] - mv[1]) - 3.0 * pse);
            if (ref > 0.0)
                worst = std::max(worst, dev2 / ref);
        }
        bool ok2 = worst < (full ? 0.10 : 0.25);
        record("mutual coherence (MC)", ok2, "worst rel dev=" + fmt(worst));
    }
    {
        // determinism across worker counts, tiny run
        auto run = [&](int workers) {
            px_sim* simraw = nullptr;
            check(px_sim_create(model.get(), 0.5, 0.5, 0.2, 64, 0.6, 6,
                                c.seed, workers, 0, &simraw),
                  rs);
            std::unique_ptr<px_sim, void (*)(px_sim*)> sim(simraw,
                                                           &px_sim_free);
            ProbesPtr probes;
            check(px_probes_add_intensity(probes.get(), 0.0, 0.0, nullptr),
                  rs);
            px_stats* straw = nullptr;
            check(px_run_ensemble(sim.get(), probes.get(), &straw), rs);
            std::unique_ptr<px_stats, void (*)(px_stats*)> stats(
                straw, &px_stats_free);
            size_t len = 0, cnt = 0;
            check(px_stats_record_len(stats.get(), &len), rs);
            check(px_stats_count(stats.get(), &cnt), rs);
            std::vector<double> all;
            std::vector<double> rec(2 * len);
            for (size_t i = 0; i < cnt; ++i) {
                check(px_stats_record(stats.get(), i, rec.data()), rs);
                all.insert(all.end(), rec.begin(), rec.end());
            }
            return all;
        };
        auto a = run(1);
        auto b = run(4);
        bool same = a == b;

        // unitarity drift from the same tiny run
        px_sim* simraw = nullptr;
        check(px_sim_create(model.get(), 0.5, 0.5, 0.2, 64, 0.6, 4, c.seed,
                            1, 0, &simraw),
              rs);
        std::unique_ptr<px_sim, void (*)(px_sim*)> sim(simraw, &px_sim_free);
        ProbesPtr probes;
        check(px_probes_add_intensity(probes.get(), 0.0, 0.0, nullptr), rs);
        px_stats* straw = nullptr;
        check(px_run_ensemble(sim.get(), probes.get(), &straw), rs);
        std::unique_ptr<px_stats, void (*)(px_stats*)> stats(straw,
                                                             &px_stats_free);
        size_t dslot;
        check(px_probes_drift_slot(probes.get(), &dslot), rs);
        double drift[2] = {0, 0};
        check(px_stats_mean(stats.get(), dslot, drift), rs);
        bool okd = drift[0] < 1e-10;
        record("determinism + unitarity (MC)", same && okd,
               std::string("bit-identical=") + (same ? "yes" : "no") +
                   " drift=" + fmt(drift[0]));
    }

    bool all = true;
    json jr = json::array();
    for (const auto& r : results) {
        all = all && r.pass;
        jr.push_back(
            {{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    json resolved = c.model_json();
    resolved["validate.full"] = full;
    json out{{"pass", all},
             {"checks", jr},
             {"manifest", make_manifest("validate", resolved, c.seed)}};
    write_json(c.out, "validate_report.json", out);
    std::printf("%s\n", all ? "ALL CHECKS PASSED" : "CHECKS FAILED");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"moment and Monte-Carlo toolkit for paraxial beams in "
                 "random media"};
    app.require_subcommand(1);

    Common c;

    auto* fig1 = app.add_subcommand("fig1", "normalized scintillation curves");
    double zt_max = 10.0;
    int fig1_steps = 200;
    std::string ratios = "0.1,1,10", profile = "gaussian";
    fig1->add_option("--ztilde-max", zt_max, "max z/Z_sca");
    fig1->add_option("--steps", fig1_steps, "samples per curve");
    fig1->add_option("--zc-ratios", ratios, "comma list of Z_c/Z_sca");
    fig1->add_option("--profile", profile, "covariance profile");
    add_common(fig1, c);

    auto* fig2 = app.add_subcommand("fig2", "smoothed-Wigner CV table");
    double rs_min = 0.5, rs_max = 2.0, xis_min = 1.0, xis_max = 3.0;
    int fig2_n = 200;
    fig2->add_option("--rs-min", rs_min, "min r_s/rho_z");
    fig2->add_option("--rs-max", rs_max, "max r_s/rho_z");
    fig2->add_option("--xis-min", xis_min, "min xi_s rho_z");
    fig2->add_option("--xis-max", xis_max, "max xi_s rho_z");
    fig2->add_option("--n", fig2_n, "grid points per axis");
    add_common(fig2, c);

    auto* moments = app.add_subcommand("moments", "moment evaluation");
    auto* eval = moments->add_subcommand("eval", "evaluate one quantity");
    std::string quantity = "mu1", point = "0,0", xs = "0,0", ys = "0,0";
    std::string x2s = "0,0", y2s = "0,0", xis = "0,0";
    double mz = 0.0;
    eval->add_option("--quantity", quantity, "mu1|mu2|mu4|wigner|coherence");
    eval->add_option("--z", mz, "propagation distance");
    eval->add_option("--point", point, "center r as x,y");
    eval->add_option("--x", xs, "first local point (mu2/mu4) or offset q");
    eval->add_option("--y", ys, "second local point");
    eval->add_option("--x2", x2s, "third local point (mu4)");
    eval->add_option("--y2", y2s, "fourth local point (mu4)");
    eval->add_option("--xi", xis, "wavevector (wigner)");
    add_common(eval, c);

    auto* wig = app.add_subcommand("wigner", "smoothed Wigner statistics");
    double wz = 1.0, wrs = -1.0, wxis = 1.0;
    std::string wr = "0,0", wxi = "0,0";
    wig->add_option("--z", wz, "propagation distance");
    wig->add_option("--r", wr, "position as x,y");
    wig->add_option("--xi", wxi, "wavevector as x,y");
    wig->add_option("--rs", wrs, "spatial width (-1 = Husimi)");
    wig->add_option("--xis", wxis, "angular width");
    add_common(wig, c);

    auto* mc = app.add_subcommand("mc", "Monte-Carlo ensemble run");
    std::string mc_out = "stats.json";
    mc->add_option("--out-file", mc_out, "output JSON name");
    add_common(mc, c);

    auto* gsr = app.add_subcommand("gsr-check",
                                   "Gaussian summation rule via MC");
    std::string gx1 = "0.3,0", gx2 = "-0.2,0.1", gy1 = "0.1,-0.2",
                gy2 = "-0.3,0.15";
    gsr->add_option("--x1", gx1, "first point");
    gsr->add_option("--x2", gx2, "second point");
    gsr->add_option("--y1", gy1, "third point");
    gsr->add_option("--y2", gy2, "fourth point");
    add_common(gsr, c);

    auto* val = app.add_subcommand("validate", "analytic-vs-MC check suite");
    bool full = false;
    val->add_flag("--full", full, "acceptance-scale parameters");
    add_common(val, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        c.finish_setup();
        int rc = 0;
        if (*fig1)
            rc = cmd_fig1(c, zt_max, fig1_steps, ratios, profile);
        else if (*fig2)
            rc = cmd_fig2(c, rs_min, rs_max, xis_min, xis_max, fig2_n);
        else if (*moments) {
            if (!*eval)
                die(2, "moments needs the eval subcommand");
            rc = cmd_moments(c, quantity, mz, point, xs, ys, x2s, y2s, xis);
        } else if (*wig)
            rc = cmd_wigner(c, wz, wr, wxi, wrs, wxis);
        else if (*mc)
            rc = cmd_mc(c, mc_out);
        else if (*gsr)
            rc = cmd_gsr(c, gx1, gx2, gy1, gy2);
        else if (*val)
            rc = cmd_validate(c, full);
        else
            die(2, "unknown subcommand");
        // exit 0 is reserved for fully converged results
        if (rc == 0 && c.rs.loose_hit)
            rc = 3;
        return rc;
    } catch (const CliFailure& f) {
        std::fprintf(stderr, "error: %s\n", f.message.c_str());
        return f.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
