#pragma once

/// Transported Loewner flow and the restriction martingale, in the half-plane
/// frame (seed x0 = 0, target z* = i).
///
/// For a hull A with uniformizer phi_A (fixing 0 and i) and the radial flow
/// G_t driven at the boundary point p_t, the commutative diagram
/// phi_At . G_t = Ghat_that . phi_A defines the transported uniformizer
/// phi_At of the complement of G_t(A), the image driving point
/// eta_hat = phi_At(p), and the image capacity t_hat with rate D^2, where
/// D = phi_At'(p) (1+p^2)/(1+eta_hat^2) is the boundary derivative in the
/// disc-normalized metric.
///
/// The flow is advanced one driver step at a time with the driver frozen:
/// the step factors through exact frozen-driver slit maps on both sides of
/// the diagram. The image capacity increment is anchored to the invariant
/// level of the image tip (reproducing the D^2 rate rather than imposing
/// it), and the Taylor jet of phi_At at the driving point is refreshed by a
/// least-squares fit of the one-step composite at probe points a few
/// erasure-gap widths above the driver, where the composite is smooth; the
/// fit's top order only absorbs the Taylor tail and is not carried as
/// state, which keeps the refit loop contractive. Everything the update
/// produces is gated by a trailing-window diagram residual against the
/// independently composed flow maps.
///
/// M_t(A) = e^{2 h012 (t_hat - t)} D^{h12} Z_t with
/// log Z_t = (c/6) int_0^t S_s ds, S the Schwarzian of the transported map at
/// the driving point expressed in disc-frame boundary coordinates; the flow
/// fixes i with G_t'(i) = e^t exactly, which is how the target-point factor
/// reduces to e^{2 h012 (t_hat - t)}.

#include <cstdint>
#include <vector>

#include "rsle/driving.hpp"
#include "rsle/estimate.hpp"
#include "rsle/power_series.hpp"
#include "rsle/slit_map.hpp"

namespace rsle {

constexpr int kTransportSeries = 8;
using TransportSeries = Series<kTransportSeries>;

struct TransportConfig {
    double dt = 1e-3;           // driver step
    int jet_order = 3;          // tracked Taylor order of the transported map
    double eps_hit = 2e-3;      // disc-frame |zeta/U - 1| declaring a hull hit
    double recenter_angle = 0.6; // rotate frames when |chi| exceeds this
    bool record_history = false; // keep the full chain for composite_at()
    int residual_window = 3;    // steps spanned by the diagram-residual check
};

struct TransportedState {
    double t = 0.0;
    double t_hat = 0.0;
    double log_Z = 0.0;
    double M = 0.0;
    double D = 0.0;             // disc-normalized boundary derivative
    bool hit = false;
};

/// One path of the transported flow. The driver angle chi plays the role of
/// the disc-frame -xi; the driving point is p = tan(chi/2).
class TransportedFlow {
public:
    TransportedFlow(const SlitHull& hull, double kappa, const TransportConfig& cfg);

    /// Advance by one driver step with angle increment dchi.
    void step(double dchi);

    double t() const { return t_; }
    double t_hat() const { return that_; }
    double log_Z() const { return logZ_; }
    bool hit() const { return hit_; }
    double hit_time() const { return hit_time_; }

    /// phi_At'(driving point) in the disc-normalized boundary metric.
    double boundary_derivative() const;

    /// Schwarzian factor at the driving point, disc-frame boundary coordinate.
    double schwarzian_disc() const;

    double martingale() const;

    /// True when a hull marker is within a few hit-thresholds of the driving
    /// point; the transported map is about to degenerate there and the
    /// residual gate is not meaningful.
    bool near_hull() const;

    /// Smallest half-plane distance from a hull marker to the driving point.
    double hull_distance() const;

    /// True once the trajectory has ever entered the deep-approach regime
    /// (where jet refits are frozen); the residual gate certifies fitted
    /// transport only on trajectories that stayed clear of it.
    bool ever_near_hull() const { return ever_deep_; }

    /// Commutative-diagram gate for the transported coefficients: the jet
    /// from residual_window steps ago is pushed through the window's exact
    /// one-step maps and compared with the current jet on probe points a few
    /// gap widths above the driving point. Longer windows are floored by the
    /// discrete hull's own roughness rather than coefficient error, so the
    /// window is kept short.
    double diagram_residual() const;

    /// Evaluate the transported map at w by composing the recorded flows:
    /// reverse source chain, phi_A, forward image chain. Needs record_history.
    cplx composite_at(cplx w) const;

    /// Worst per-step internal defect seen so far (imaginary residue of the
    /// capacity matching); a cheap health indicator.
    double max_step_defect() const { return max_defect_; }

    const TransportSeries& jet() const { return jet_; }
    double driver_angle() const { return chi_; }
    const NormalizedHullMap& hull_map() const { return phiA_; }

private:
    struct Record {
        bool rotation;
        double p, eta_hat, dt, dt_hat;  // step record
        double q_src, q_img;            // rotation record
        bool frozen_fit = false;        // deep-approach step, jet not refit
    };
    struct Snapshot {
        TransportSeries jet;
        double p;
        std::size_t record_index;  // history position the snapshot was taken at
    };

    void recenter();
    void flow_substep(double p);
    void declare_hit();

    NormalizedHullMap phiA_;
    TransportConfig cfg_;
    double kappa_;
    double c_, h12_, h012_;

    TransportSeries jet_;  // Taylor of phi_At around the driving point
    double chi_ = 0.0;
    double t_ = 0.0, that_ = 0.0, logZ_ = 0.0;
    double prev_schwarzian_ = 0.0;
    bool hit_ = false;
    double hit_time_ = 0.0;
    double frozen_M_ = 0.0;
    double max_defect_ = 0.0;
    bool ever_deep_ = false;
    std::vector<cplx> markers_;  // hull sample points, current half-plane frame
    std::vector<Record> history_;    // full chain when record_history is set
    std::vector<Record> window_;     // trailing residual_window records
    std::vector<Snapshot> snaps_;    // jets matching the window records
};

struct TransportSample {
    double t, t_hat, log_Z, M, D;
    bool hit;
};

/// Evolve the transported state along one driver and sample it at the given
/// times (chi increments are -dxi; equivalent in law).
std::vector<TransportSample> evolve_transported(const SlitHull& hull, double kappa,
                                                const DrivingPath& path,
                                                const TransportConfig& cfg,
                                                const std::vector<double>& t_sample);

struct MartingaleEstimates {
    std::vector<double> t;
    std::vector<Estimate> mean_M;
    std::vector<std::size_t> n_alive;  // paths that have not hit A by each time
    double max_diagram_residual = 0.0;
    double max_step_defect = 0.0;
    std::size_t n_hits = 0;
};

/// Monte Carlo E[M_t(A)] at the report times. Hit paths contribute their
/// stopped value (0 at kappa = 8/3, the pre-hit value otherwise). Residual
/// checks run on every `residual_stride`-th path at each report time.
MartingaleEstimates martingale_flatness(const SlitHull& hull, double kappa,
                                        const TransportConfig& cfg,
                                        const std::vector<double>& t_report,
                                        std::size_t n_samples, uint64_t seed,
                                        unsigned workers = 1,
                                        std::size_t residual_stride = 37);

struct AvoidanceResult {
    Estimate freq;      // fraction of paths avoiding A up to t_max
    double candidate;   // |phi_A'(0)|^{5/8} |phi_A'(i)|^{5/48}
    double t_max;
};

/// Direct avoidance frequency at kappa = 8/3 (markers only, no jets).
AvoidanceResult avoidance_probability(const SlitHull& hull, double kappa,
                                      double t_max, double dt, std::size_t n_samples,
                                      uint64_t seed, unsigned workers = 1);

} // namespace rsle
