#include "ensemble.hpp"

#include "../errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace parax {

void SimConfig::validate() const {
    bm.validate();
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw InvalidModel("epsilon must be in (0, 1]");
    if (!(z_target > 0.0))
        throw InvalidModel("z_target must be positive");
    if (!(dz > 0.0))
        throw InvalidModel("dz must be positive");
    grid.validate();
    if (n_realizations < 0)
        throw InvalidModel("n_realizations must be nonnegative");
    if (n_workers < 1)
        throw InvalidModel("n_workers must be at least 1");

    const double lc = bm.cov.lc();
    if (dz > lc / 4.0)
        throw InvalidModel("dz must not exceed lc/4");
    if (dz > bm.k0 * grid.h * grid.h * (grid.n / 16.0))
        throw InvalidModel("dz violates the diffraction sampling bound");

    BeamMedium sm = sim_medium();
    double spread = strong_regime_stats(sm, sim_z()).beam_radius;
    double need = 8.0 * std::max(sm.r0, spread);
    if (grid.extent() < need)
        throw InvalidModel("grid extent below 8x the beam spread estimate");

    // field + screen + FFT scratch per worker, plus the shared tables
    double bytes = (double)grid.n * grid.n *
                   (40.0 * n_workers + 8.0 + 16.0);
    if (bytes > 2.0e9)
        throw InvalidModel("grid too large for the memory budget");
}

BeamMedium SimConfig::sim_medium() const {
    BeamMedium sm = bm;
    sm.r0 = bm.r0 / epsilon;
    sm.cov = bm.cov.scaled(epsilon);
    return sm;
}

int SimConfig::steps() const {
    return (int)std::ceil(sim_z() / dz - 1e-12);
}

void EnsembleStats::merge(const EnsembleStats& other) {
    if (other.count() == 0)
        return;
    if (count() == 0) {
        *this = other;
        return;
    }
    if (record_len != other.record_len)
        throw InvalidModel("cannot merge stats with different record layouts");
    ids.insert(ids.end(), other.ids.begin(), other.ids.end());
    records.insert(records.end(), other.records.begin(), other.records.end());
    std::vector<size_t> perm(ids.size());
    std::iota(perm.begin(), perm.end(), (size_t)0);
    std::sort(perm.begin(), perm.end(),
              [&](size_t a, size_t b) { return ids[a] < ids[b]; });
    std::vector<uint64_t> nid(ids.size());
    std::vector<std::complex<double>> nrec(records.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        nid[i] = ids[perm[i]];
        if (i > 0 && nid[i] == nid[i - 1])
            throw InvalidModel("duplicate realization id in merge");
        std::copy_n(records.begin() + perm[i] * record_len, record_len,
                    nrec.begin() + i * record_len);
    }
    ids = std::move(nid);
    records = std::move(nrec);
}

std::complex<double> EnsembleStats::mean(size_t j) const {
    std::complex<double> s{0.0, 0.0};
    for (size_t i = 0; i < count(); ++i)
        s += record(i)[j];
    return s / (double)count();
}

double EnsembleStats::se(size_t j) const {
    const size_t n = count();
    if (n < 2)
        return std::numeric_limits<double>::infinity();
    std::complex<double> m = mean(j);
    double v = 0.0;
    for (size_t i = 0; i < n; ++i)
        v += std::norm(record(i)[j] - m);
    return std::sqrt(v / ((double)n * (n - 1)));
}

Estimate jackknife(const EnsembleStats& stats,
                   const std::function<double(const std::complex<double>*)>& f) {
    const size_t n = stats.count();
    const size_t len = stats.record_len;
    std::vector<std::complex<double>> sum(len, {0.0, 0.0});
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < len; ++j)
            sum[j] += stats.record(i)[j];

    std::vector<std::complex<double>> m(len);
    if (n == 0)
        return {0.0, std::numeric_limits<double>::infinity()};
    for (size_t j = 0; j < len; ++j)
        m[j] = sum[j] / (double)n;
    double full = f(m.data());
    if (n < 2)
        return {full, std::numeric_limits<double>::infinity()};

    std::vector<double> loo(n);
    double lbar = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < len; ++j)
            m[j] = (sum[j] - stats.record(i)[j]) / (double)(n - 1);
        loo[i] = f(m.data());
        lbar += loo[i];
    }
    lbar /= (double)n;
    double v = 0.0;
    for (double g : loo)
        v += (g - lbar) * (g - lbar);
    return {full, std::sqrt(v * (double)(n - 1) / (double)n)};
}

Estimate estimate_gsr_residual(const EnsembleStats& stats,
                               const GsrIndices& g) {
    auto f = [g](const std::complex<double>* m) {
        std::complex<double> gauss =
            m[g.p11] * m[g.p22] + m[g.p12] * m[g.p21] -
            m[g.m1] * m[g.m2] * std::conj(m[g.m3]) * std::conj(m[g.m4]);
        return std::abs(m[g.quad] - gauss);
    };
    return jackknife(stats, f);
}

Estimate estimate_scint_index(const EnsembleStats& stats,
                              const ProbeSet& probes, size_t i) {
    size_t j2 = probes.i2_index(i), j4 = probes.i4_index(i);
    auto f = [j2, j4](const std::complex<double>* m) {
        double i2 = m[j2].real();
        return m[j4].real() / (i2 * i2) - 1.0;
    };
    return jackknife(stats, f);
}

namespace {

// Windowed Gaussian-framed Fourier sum at a lattice center; kernel is
// precomputed by the caller. win is the half-width in lattice steps.
std::complex<double> framed_sum(const ComplexField& f, int jc, int kc, int win,
                                const std::vector<std::complex<double>>& kern) {
    const int n = f.grid.n;
    if (jc - win < 0 || kc - win < 0 || jc + win >= n || kc + win >= n)
        throw InvalidModel("smoothing window exits the grid");
    std::complex<double> s{0.0, 0.0};
    const int w = 2 * win + 1;
    for (int dj = -win; dj <= win; ++dj) {
        const std::complex<double>* row = f.u.data() + (size_t)(jc - dj) * n;
        const std::complex<double>* kr = kern.data() + (size_t)(dj + win) * w;
        for (int dk = -win; dk <= win; ++dk)
            s += kr[dk + win] * row[kc - dk];
    }
    return s;
}

} // namespace

double smoothed_wigner_sample(const ComplexField& field,
                              const SmoothingParams& sp, Vec2 r, Vec2 xi,
                              double epsilon) {
    sp.validate();
    const double crit = 1.0 / (2.0 * sp.xi_s);
    if (sp.r_s < crit * (1.0 - 1e-9))
        throw InvalidModel(
            "r_s below 1/(2 xi_s) has no positive-kernel representation");
    const double h = field.grid.h;
    const int n = field.grid.n;
    const int win = (int)std::ceil(4.5 / (sp.xi_s * h));
    const int w = 2 * win + 1;

    std::vector<std::complex<double>> kern((size_t)w * w);
    for (int dj = -win; dj <= win; ++dj)
        for (int dk = -win; dk <= win; ++dk) {
            Vec2 rp{dj * h, dk * h};
            double g = std::exp(-sp.xi_s * sp.xi_s * norm2(rp));
            double ph = dot(xi, rp);
            kern[(size_t)(dj + win) * w + (dk + win)] =
                g * std::complex<double>(std::cos(ph), std::sin(ph));
        }

    Vec2 x0 = r / epsilon;
    int jc = (int)std::lround(x0.x / h) + n / 2;
    int kc = (int)std::lround(x0.y / h) + n / 2;
    const double pref = 2.0 * sp.xi_s * sp.xi_s / M_PI * h * h * h * h;

    auto husimi = [&](int j, int k) {
        std::complex<double> s = framed_sum(field, j, k, win, kern);
        return pref * std::norm(s);
    };

    if (sp.r_s <= crit * (1.0 + 1e-9))
        return husimi(jc, kc);

    // extra spatial convolution: Gaussian of variance r_s^2 - 1/(4 xi_s^2)
    // per axis, sampled on a strided sublattice
    const double var = sp.r_s * sp.r_s - crit * crit;
    const double sig = std::sqrt(var);
    const int stride = std::max(1, (int)std::floor(sig / (3.0 * h)));
    const int half = (int)std::ceil(3.0 * sig / (stride * h));
    double wsum = 0.0, acc = 0.0;
    for (int a = -half; a <= half; ++a)
        for (int b = -half; b <= half; ++b) {
            Vec2 x{a * stride * h, b * stride * h};
            double wt = std::exp(-norm2(x) / (2.0 * var));
            wsum += wt;
            acc += wt * husimi(jc - a * stride, kc - b * stride);
        }
    return acc / wsum;
}

namespace {

struct SimProbes {
    std::vector<Vec2> mean_pts, i_pts;
    std::vector<std::pair<Vec2, Vec2>> pairs;
    std::vector<std::array<Vec2, 4>> quads;
};

SimProbes to_sim(const ProbeSet& p, double eps) {
    SimProbes s;
    Vec2 c = p.center / eps;
    for (auto& x : p.mean_points)
        s.mean_pts.push_back(x / eps);
    for (auto& x : p.intensity_points)
        s.i_pts.push_back(x / eps);
    for (auto& pr : p.pair_probes)
        s.pairs.push_back({c + pr.first, c + pr.second});
    for (auto& q : p.quad_probes)
        s.quads.push_back({c + q[0], c + q[1], c + q[2], c + q[3]});
    return s;
}

} // namespace

EnsembleStats run_ensemble(const SimConfig& config, const ProbeSet& probes) {
    config.validate();
    const int nsteps = config.steps();
    for (int c : probes.checkpoints)
        if (c < 0 || c > nsteps)
            throw InvalidModel("checkpoint step index out of range");

    EnsembleStats stats;
    stats.record_len = probes.record_len();
    const int nr = config.n_realizations;
    if (nr == 0)
        return stats;
    stats.ids.resize(nr);
    std::iota(stats.ids.begin(), stats.ids.end(), (uint64_t)0);
    stats.records.assign((size_t)nr * stats.record_len, {0.0, 0.0});

    const BeamMedium sm = config.sim_medium();
    const double dza = config.step_dz();
    const ScreenGenerator sg(sm.cov, config.grid, dza);
    const Propagator prop(config.grid, sm.k0, dza, config.edge_mask);
    const SimProbes sp = to_sim(probes, config.epsilon);

    std::atomic<int> next{0};
    auto worker = [&]() {
        Fft2D fft(config.grid.n);
        ComplexField f;
        std::vector<double> screen;
        for (;;) {
            int rid = next.fetch_add(1);
            if (rid >= nr)
                break;
            std::complex<double>* rec =
                stats.records.data() + (size_t)rid * stats.record_len;

            prop.init_gaussian(f, sm.r0);
            const double norm0 = f.l2_norm2();
            double drift = 0.0;
            for (int s = 0; s <= nsteps; ++s) {
                for (size_t c = 0; c < probes.checkpoints.size(); ++c)
                    if (probes.checkpoints[c] == s)
                        for (size_t i = 0; i < sp.mean_pts.size(); ++i)
                            rec[probes.checkpoint_index(c, i)] =
                                f.at(sp.mean_pts[i]);
                if (s == nsteps)
                    break;
                KeyedRng rng(config.seed, (uint64_t)rid, (uint64_t)s);
                sg.generate(rng, fft, screen);
                prop.step(f, screen, fft);
                drift = std::max(drift,
                                 std::abs(f.l2_norm2() / norm0 - 1.0));
            }

            for (size_t i = 0; i < sp.mean_pts.size(); ++i)
                rec[probes.mean_index(i)] = f.at(sp.mean_pts[i]);
            for (size_t i = 0; i < sp.pairs.size(); ++i)
                rec[probes.pair_index(i)] =
                    f.at(sp.pairs[i].first) * std::conj(f.at(sp.pairs[i].second));
            for (size_t i = 0; i < sp.quads.size(); ++i)
                rec[probes.quad_index(i)] =
                    f.at(sp.quads[i][0]) * f.at(sp.quads[i][1]) *
                    std::conj(f.at(sp.quads[i][2])) *
                    std::conj(f.at(sp.quads[i][3]));
            for (size_t i = 0; i < sp.i_pts.size(); ++i) {
                double i2 = std::norm(f.at(sp.i_pts[i]));
                rec[probes.i2_index(i)] = i2;
                rec[probes.i4_index(i)] = i2 * i2;
            }
            for (size_t i = 0; i < probes.wigner_probes.size(); ++i) {
                const WignerProbe& wp = probes.wigner_probes[i];
                rec[probes.wigner_index(i)] = smoothed_wigner_sample(
                    f, wp.sp, wp.r, wp.xi, config.epsilon);
            }
            rec[probes.drift_index()] = drift;
        }
    };

    if (config.n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < config.n_workers; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return stats;
}

} // namespace parax
