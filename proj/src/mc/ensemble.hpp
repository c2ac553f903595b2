#pragma once

#include "../scintillation.hpp"
#include "../wigner_stats.hpp"
#include "propagator.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace parax {

/// Full ensemble run description. bm holds the unscaled parameters; the
/// scaling r0 -> r0/eps, C -> eps C, z -> z/eps is applied internally, so
/// z_target and all probe coordinates are in the order-one scaled units of
/// the limit formulas.
struct SimConfig {
    BeamMedium bm;
    double epsilon = 1.0;
    double z_target = 1.0;
    double dz = 0.05; // in simulation units
    Grid2D grid;
    int n_realizations = 0;
    uint64_t seed = 0;
    int n_workers = 1;
    bool edge_mask = false;

    void validate() const;
    /// Scaled-unit parameters actually simulated.
    BeamMedium sim_medium() const;
    double sim_z() const { return z_target / epsilon; }
    int steps() const;
    double step_dz() const { return sim_z() / steps(); }
};

struct WignerProbe {
    SmoothingParams sp;
    Vec2 r;  // scaled center
    Vec2 xi;
};

/// Probe coordinates are scaled. Beam-scale positions (mean_points,
/// intensity_points, center, WignerProbe::r) map to simulation coordinates
/// as x/epsilon; pair and quad probes are order-one local offsets around
/// `center` (sim position = center/epsilon + offset), matching the local
/// variables of the limit moments. Positions snap to the nearest lattice
/// point.
struct ProbeSet {
    Vec2 center{0.0, 0.0};
    std::vector<Vec2> mean_points;                     // u(x)
    std::vector<std::pair<Vec2, Vec2>> pair_probes;    // u(x) conj(u(y))
    std::vector<std::array<Vec2, 4>> quad_probes;      // u u conj(u) conj(u)
    std::vector<Vec2> intensity_points;                // |u|^2 and |u|^4
    std::vector<WignerProbe> wigner_probes;
    std::vector<int> checkpoints; // step indices; u(mean_points) recorded

    // flat per-realization record layout (all entries complex)
    size_t mean_index(size_t i) const { return i; }
    size_t pair_index(size_t i) const { return mean_points.size() + i; }
    size_t quad_index(size_t i) const {
        return mean_points.size() + pair_probes.size() + i;
    }
    size_t i2_index(size_t i) const { return quad_index(quad_probes.size()) + i; }
    size_t i4_index(size_t i) const {
        return i2_index(intensity_points.size()) + i;
    }
    size_t wigner_index(size_t i) const {
        return i4_index(intensity_points.size()) + i;
    }
    size_t drift_index() const { return wigner_index(wigner_probes.size()); }
    size_t checkpoint_index(size_t c, size_t i) const {
        return drift_index() + 1 + c * mean_points.size() + i;
    }
    size_t record_len() const {
        return checkpoint_index(checkpoints.size(), 0);
    }
};

/// Per-realization moment records keyed by realization index. Keeping the
/// raw records (a few complex numbers each) makes the merge trivially
/// associative and gives exact jackknife resampling.
struct EnsembleStats {
    size_t record_len = 0;
    std::vector<uint64_t> ids;                  // sorted ascending
    std::vector<std::complex<double>> records;  // ids.size() * record_len

    size_t count() const { return ids.size(); }
    const std::complex<double>* record(size_t i) const {
        return records.data() + i * record_len;
    }

    /// Component-wise; throws on record_len mismatch or duplicate ids.
    void merge(const EnsembleStats& other);

    std::complex<double> mean(size_t j) const;
    /// Standard error of the mean, combining both components.
    double se(size_t j) const;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// Leave-one-out jackknife of a statistic of the record means.
Estimate jackknife(const EnsembleStats& stats,
                   const std::function<double(const std::complex<double>*)>& f);

EnsembleStats run_ensemble(const SimConfig& config, const ProbeSet& probes);

/// Record indices of the moments entering one fourth-moment factorization
/// check: quad probe q = (x1, x2, y1, y2), pair probes p_jk = u(x_j)
/// conj(u(y_k)), mean probes m1..m4 = u(x1), u(x2), u(y1), u(y2).
struct GsrIndices {
    size_t quad;
    size_t p11, p22, p12, p21;
    size_t m1, m2, m3, m4;
};

/// |mu4_hat - (p11 p22 + p12 p21 - m1 m2 conj(m3) conj(m4))| with the
/// standard error propagated by jackknife.
Estimate estimate_gsr_residual(const EnsembleStats& stats, const GsrIndices& g);

/// E[|u|^4]/E[|u|^2]^2 - 1 at intensity probe i, jackknifed.
Estimate estimate_scint_index(const EnsembleStats& stats,
                              const ProbeSet& probes, size_t i);

/// Smoothed Wigner value of one realized field at scaled (r, xi).
/// Husimi configuration r_s = 1/(2 xi_s): windowed discrete Fourier sum
/// (2 xi_s^2/pi)|h^2 sum e^{i xi.r'} e^{-xi_s^2 |r'|^2} u(r/eps - r')|^2.
/// r_s > 1/(2 xi_s): extra Gaussian convolution of the Husimi value over
/// the center. r_s < 1/(2 xi_s) has no positive-kernel representation and
/// is rejected.
double smoothed_wigner_sample(const ComplexField& field,
                              const SmoothingParams& sp, Vec2 r, Vec2 xi,
                              double epsilon);

} // namespace parax
