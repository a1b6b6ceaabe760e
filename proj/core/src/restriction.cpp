#include "rsle/restriction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rsle/cft_params.hpp"
#include "rsle/radial_step.hpp"
#include "rsle/rng.hpp"

namespace rsle {

namespace {

using Ser = TransportSeries;
constexpr int SN = kTransportSeries;

// F(w) = psi(m(w)/m(p_drive)): the step invariant, vanishing to second order
// at the driving point.
cplx invariant_eval(cplx w, double p_drive) {
    return joukowski_psi(disc_of_half_plane(w) / disc_of_half_plane(p_drive));
}

// the transported map is real-analytic at the driving point, so imaginary
// coefficient content is scheme noise; the low orders are recorded as a
// health metric, the high orders grow like (per-step mismatch)/gap^k by
// construction and are silently discarded
void project_real(Ser& s, double& max_imag, int record_to = 2) {
    for (int k = 0; k <= SN; ++k) {
        if (k <= record_to) max_imag = std::max(max_imag, std::abs(s[k].imag()));
        s[k] = cplx(s[k].real(), 0.0);
    }
}

} // namespace

TransportedFlow::TransportedFlow(const SlitHull& hull, double kappa,
                                 const TransportConfig& cfg)
    : phiA_(hull), cfg_(cfg), kappa_(kappa) {
    if (cfg.jet_order < 3 || cfg.jet_order > SN - 2)
        throw std::invalid_argument("jet_order must be in [3, series order - 2]");
    const SleParameterSet p = sle_parameters(kappa);
    c_ = std::abs(p.c) < 1e-13 ? 0.0 : p.c;  // c(8/3) and c(6) are exact zeros
    h12_ = p.h12;
    h012_ = p.h0half2;

    // start from the full-order jet of phi_A; the per-step update truncates
    // to jet_order from the first step on
    jet_ = phiA_.taylor<SN>(cplx(0.0, 0.0));
    double dummy = 0.0;
    project_real(jet_, dummy);

    const int nm = 17;
    for (int j = 0; j < nm; ++j)
        markers_.push_back(cplx(hull.a, hull.ell * static_cast<double>(j) /
                                             static_cast<double>(nm - 1)));
    prev_schwarzian_ = schwarzian_disc();
}

double TransportedFlow::boundary_derivative() const {
    const double p = std::tan(0.5 * chi_);
    const double eh = jet_[0].real();
    return jet_[1].real() * (1.0 + p * p) / (1.0 + eh * eh);
}

double TransportedFlow::schwarzian_disc() const {
    const double p = std::tan(0.5 * chi_);
    const double a = jet_[1].real();
    const double b = 2.0 * jet_[2].real();
    const double c3 = 6.0 * jet_[3].real();
    const double sh = c3 / a - 1.5 * (b / a) * (b / a);
    const double m = 1.0 + p * p;
    return -0.25 * m * m * sh;
}

double TransportedFlow::martingale() const {
    if (hit_) return std::abs(kappa_ - 8.0 / 3.0) < 1e-12 ? 0.0 : frozen_M_;
    const double D = boundary_derivative();
    return std::exp(2.0 * h012_ * (that_ - t_)) * std::pow(D, h12_) * std::exp(logZ_);
}

void TransportedFlow::declare_hit() {
    frozen_M_ = martingale();
    if (!std::isfinite(frozen_M_)) frozen_M_ = 0.0;
    hit_ = true;
    hit_time_ = t_;
}

void TransportedFlow::recenter() {
    const double q = std::tan(0.5 * chi_);
    const double qh = jet_[0].real();
    // inner deviation R_q^{-1}(u) - q = u (1+q^2) / (1 - q u)
    Ser den;
    den[0] = 1.0;
    den[1] = -q;
    Ser inner;
    inner[1] = 1.0 + q * q;
    inner = inner * series_recip(den);
    Ser comp = series_compose(jet_, inner);
    // R_qh applied to values: (comp - qh)/(1 + qh comp)
    Ser num = comp;
    num[0] -= qh;
    Ser d2 = qh * comp;
    d2[0] += 1.0;
    jet_ = num * series_recip(d2);
    project_real(jet_, max_defect_);
    for (auto& w : markers_) w = rotate_to_origin(w, q);
    chi_ = 0.0;
    const Record rec{true, 0, 0, 0, 0, q, qh};
    window_.push_back(rec);
    if (cfg_.record_history) history_.push_back(rec);
}

void TransportedFlow::flow_substep(double p) {
    const double dt = cfg_.dt;
    const cplx x0 = radial_step_tip_half_plane(p, dt);
    const cplx dx = x0 - p;
    const cplx v0 = jet_.eval(dx);
    const double etah = jet_[0].real();

    // image capacity increment from the invariant level of the image tip
    const bool deep = near_hull();
    const cplx Fv0 = invariant_eval(v0, etah);
    if (!deep)
        max_defect_ = std::max(max_defect_, std::abs(Fv0.imag()) / (4.0 * dt));
    if (!(Fv0.real() > -3.9)) {
        // image tip inside the image slit's own gap: the hulls are touching
        declare_hit();
        return;
    }
    const double dth = std::log1p(0.25 * Fv0.real());
    if (!std::isfinite(dth) || dth <= 0.0) {
        declare_hit();
        return;
    }

    // Deep hull approach: the transported map is pinching and the refit reads
    // a nearly degenerate geometry. The evolution continues (stopping it
    // biases the hit accounting), but the trajectory is flagged: from here on
    // its transport is not certified by the residual gate, and for most such
    // paths the hit completes shortly.
    if (deep) ever_deep_ = true;

    // New jet from a least-squares fit of the one-step composite
    // T(u) = Ghat_inc( phi_At( Ginc^{-1}(p+u) ) ) at probe points a few
    // erasure-gap widths above the driving point, where T is smooth and the
    // one-step maps are exact. The fit carries the within-step motion of the
    // image driving point, the boundary derivative and its curvature, which
    // formal series matching cannot supply (the hat-slit mismatch pollutes
    // order >= 2 by gap^{-k}). Degree 4 is fitted but only orders 0..3 are
    // stored: the top coefficient absorbs the Taylor tail, and storing it
    // would open a refit feedback channel that runs away over long paths.
    const double gap = std::sqrt(std::expm1(dt)) * (1.0 + p * p);
    const double radii[4] = {2.5, 3.5, 5.0, 7.0};
    const cplx dirs[2] = {std::polar(1.0, 1.0471975511965976),
                          std::polar(1.0, 2.0943951023931953)};
    const double u_scale = 4.0 * gap;
    constexpr int NFIT = 5;
    double A[NFIT][NFIT] = {};
    double rhsv[NFIT] = {};
    for (const cplx& dir : dirs) {
        for (double rr : radii) {
            const cplx u = rr * gap * dir;
            const cplx x = radial_step_half_plane_inverse(p + u, p, dt);
            const cplx v = jet_.eval(x - p);
            const cplx T = radial_step_half_plane(v, etah, dth);
            cplx pw[NFIT];
            pw[0] = 1.0;
            for (int k = 1; k < NFIT; ++k) pw[k] = pw[k - 1] * (u / u_scale);
            for (int r = 0; r < NFIT; ++r) {
                for (int c = 0; c < NFIT; ++c)
                    A[r][c] += pw[r].real() * pw[c].real() + pw[r].imag() * pw[c].imag();
                rhsv[r] += pw[r].real() * T.real() + pw[r].imag() * T.imag();
            }
        }
    }
    for (int c = 0; c < NFIT; ++c) {
        int piv = c;
        for (int r = c + 1; r < NFIT; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        for (int k = 0; k < NFIT; ++k) std::swap(A[c][k], A[piv][k]);
        std::swap(rhsv[c], rhsv[piv]);
        if (std::abs(A[c][c]) < 1e-300) {
            declare_hit();  // degenerate geometry
            return;
        }
        for (int r = 0; r < NFIT; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (int k = 0; k < NFIT; ++k) A[r][k] -= f * A[c][k];
            rhsv[r] -= f * rhsv[c];
        }
    }
    Ser nj;
    sc = 1.0;
    for (int k = 0; k < NFIT && k <= cfg_.jet_order; ++k) {
        nj[k] = rhsv[k] / A[k][k] / sc;
        sc *= u_scale;
    }
    if (!(nj[1].real() > 0.0) || !std::isfinite(nj[1].real()) ||
        !std::isfinite(nj[0].real())) {
        declare_hit();
        return;
    }
    jet_ = nj;
    that_ += dth;

    const Record rec{false, p, etah, dt, dth, 0, 0};
    window_.push_back(rec);
    if (cfg_.record_history) history_.push_back(rec);
}

void TransportedFlow::step(double dchi) {
    if (hit_) {
        t_ += cfg_.dt;
        return;
    }
    // snapshot of the pre-step state for the trailing residual window
    snaps_.push_back({jet_, std::tan(0.5 * chi_), window_.size()});

    if (std::abs(chi_ + dchi) > cfg_.recenter_angle) recenter();

    const double p_old = std::tan(0.5 * chi_);
    chi_ += dchi;
    const double p = std::tan(0.5 * chi_);
    jet_ = series_shift(jet_, p - p_old);
    double dummy = 0.0;
    project_real(jet_, dummy);

    // hull-hit check against the new driving point
    const cplx U = disc_of_half_plane(p);
    for (const auto& w : markers_) {
        if (std::abs(disc_of_half_plane(w) / U - 1.0) < cfg_.eps_hit) {
            declare_hit();
            break;
        }
    }
    if (!hit_) flow_substep(p);
    if (!hit_ && (!std::isfinite(jet_[0].real()) || !std::isfinite(jet_[1].real()) ||
                  !(jet_[1].real() > 0.0)))
        declare_hit();  // state degenerated through shifts or re-centering
    if (!hit_) {
        for (auto& w : markers_) w = radial_step_half_plane(w, p, cfg_.dt);
        const double s_new = schwarzian_disc();
        logZ_ += (c_ / 6.0) * 0.5 * (prev_schwarzian_ + s_new) * cfg_.dt;
        prev_schwarzian_ = s_new;
    }
    t_ += cfg_.dt;

    // trim the residual window
    while (snaps_.size() > static_cast<std::size_t>(cfg_.residual_window)) {
        const std::size_t drop = snaps_[1].record_index;
        snaps_.erase(snaps_.begin());
        window_.erase(window_.begin(), window_.begin() + static_cast<long>(drop));
        for (auto& s : snaps_) s.record_index -= drop;
    }
}

cplx TransportedFlow::composite_at(cplx w) const {
    if (!cfg_.record_history)
        throw std::logic_error("composite_at needs record_history");
    cplx z = w;
    for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
        if (it->rotation)
            z = rotate_from_origin(z, it->q_src);
        else
            z = radial_step_half_plane_inverse(z, it->p, it->dt);
    }
    cplx y = phiA_.value(z);
    for (const auto& rec : history_) {
        if (rec.rotation)
            y = rotate_to_origin(y, rec.q_img);
        else
            y = radial_step_half_plane(y, rec.eta_hat, rec.dt_hat);
    }
    return y;
}

double TransportedFlow::hull_distance() const {
    const double p = std::tan(0.5 * chi_);
    double d = std::numeric_limits<double>::infinity();
    for (const auto& w : markers_) d = std::min(d, std::abs(w - p));
    return d;
}

bool TransportedFlow::near_hull() const {
    if (hit_) return true;
    const double p = std::tan(0.5 * chi_);
    // the refit needs the transported map analytic over the probe ball; the
    // probes shrink with the hull distance, but below ~9 gap widths they can
    // no longer clear the erasure zone. Secondary pinch detectors: the
    // boundary derivative collapsing and the jet's own coefficient ratio
    // (markers can miss the closest stretch of the image arc).
    const double gap = std::sqrt(std::expm1(cfg_.dt)) * (1.0 + p * p);
    if (hull_distance() < 6.0 * gap) return true;
    if (boundary_derivative() < 0.35) return true;
    const double c1 = std::abs(jet_[1].real());
    const double c3 = std::abs(jet_[3].real());
    if (c3 > 1e-12 && c1 / c3 < 36.0 * gap * gap) return true;  // radius < 6 gap
    return false;
}

double TransportedFlow::diagram_residual() const {
    if (hit_ || snaps_.empty()) return 0.0;
    const Snapshot& snap = snaps_.front();
    // a window overlapping a deep-approach freeze has deliberately skipped
    // refits; the gate applies to fitted transport only
    for (std::size_t k = snap.record_index; k < window_.size(); ++k)
        if (window_[k].frozen_fit) return 0.0;
    const double p = std::tan(0.5 * chi_);
    const double scale = 0.5 * (1.0 + p * p);
    double worst = 0.0;
    // probes sit a few one-step gap widths (~2 sqrt(dt)) above the driver:
    // close enough for the tracked jet, outside the erasure zone of the
    // window's one-step maps
    const double g = std::sqrt(cfg_.dt);
    const double radii[4] = {3.0 * g, 4.5 * g, 6.0 * g, 8.0 * g};
    const cplx dirs[2] = {std::polar(1.0, 1.0471975511965976),
                          std::polar(1.0, 2.0943951023931953)};
    for (const cplx& dir : dirs) {
        for (double r : radii) {
            const cplx w = p + r * scale * dir;
            // pull back through the window's source steps
            cplx z = w;
            for (std::size_t k = window_.size(); k > snap.record_index; --k) {
                const Record& rec = window_[k - 1];
                if (rec.rotation)
                    z = rotate_from_origin(z, rec.q_src);
                else
                    z = radial_step_half_plane_inverse(z, rec.p, rec.dt);
            }
            // apply the snapshot jet, push through the window's image steps
            cplx y = snap.jet.eval(z - snap.p);
            for (std::size_t k = snap.record_index; k < window_.size(); ++k) {
                const Record& rec = window_[k];
                if (rec.rotation)
                    y = rotate_to_origin(y, rec.q_img);
                else
                    y = radial_step_half_plane(y, rec.eta_hat, rec.dt_hat);
            }
            worst = std::max(worst, std::abs(jet_.eval(w - p) - y));
        }
    }
    return worst;
}

std::vector<TransportSample> evolve_transported(const SlitHull& hull, double kappa,
                                                const DrivingPath& path,
                                                const TransportConfig& cfg,
                                                const std::vector<double>& t_sample) {
    TransportedFlow flow(hull, kappa, cfg);
    std::vector<TransportSample> out;
    std::size_t next = 0;
    auto emit_due = [&](double tnow) {
        while (next < t_sample.size() && t_sample[next] <= tnow + 1e-12) {
            out.push_back({flow.t(), flow.t_hat(), flow.log_Z(), flow.martingale(),
                           flow.hit() ? 0.0 : flow.boundary_derivative(), flow.hit()});
            ++next;
        }
    };
    emit_due(0.0);
    for (std::size_t k = 0; k + 1 < path.t_grid.size(); ++k) {
        flow.step(-(path.xi[k + 1] - path.xi[k]));
        emit_due(path.t_grid[k + 1]);
    }
    return out;
}

MartingaleEstimates martingale_flatness(const SlitHull& hull, double kappa,
                                        const TransportConfig& cfg,
                                        const std::vector<double>& t_report,
                                        std::size_t n_samples, uint64_t seed,
                                        unsigned workers, std::size_t residual_stride) {
    const double t_max = t_report.back();
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(t_max / cfg.dt));
    std::vector<std::size_t> report_step;
    for (double tr : t_report)
        report_step.push_back(static_cast<std::size_t>(std::llround(tr / cfg.dt)));

    std::vector<std::vector<double>> M(t_report.size());
    for (auto& v : M) v.resize(n_samples);
    std::vector<std::vector<uint8_t>> alive(t_report.size());
    for (auto& v : alive) v.resize(n_samples, 0);
    std::vector<double> worst_residual(n_samples, 0.0);
    std::vector<double> worst_defect(n_samples, 0.0);
    std::vector<uint8_t> hits(n_samples, 0);

    parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
        TransportedFlow flow(hull, kappa, cfg);
        CounterRng rng(seed, i);
        const double sd = std::sqrt(kappa * cfg.dt);
        const bool check_residual = (i % residual_stride) == 0;
        std::size_t next = 0;
        for (std::size_t j = 0; j <= n_steps; ++j) {
            while (next < report_step.size() && report_step[next] == j) {
                M[next][i] = flow.martingale();
                alive[next][i] = flow.hit() ? 0 : 1;
                if (check_residual && !flow.hit() && !flow.ever_near_hull() &&
                    !flow.near_hull())
                    worst_residual[i] =
                        std::max(worst_residual[i], flow.diagram_residual());
                ++next;
            }
            if (j == n_steps) break;
            flow.step(sd * rng.next_normal());
        }
        worst_defect[i] = flow.max_step_defect();
        hits[i] = flow.hit() ? 1 : 0;
    });

    MartingaleEstimates out;
    out.t = t_report;
    for (std::size_t j = 0; j < t_report.size(); ++j) {
        out.mean_M.push_back(estimate_from_samples(M[j]));
        std::size_t na = 0;
        for (auto f : alive[j]) na += f;
        out.n_alive.push_back(na);
    }
    for (std::size_t i = 0; i < n_samples; ++i) {
        out.max_diagram_residual = std::max(out.max_diagram_residual, worst_residual[i]);
        out.max_step_defect = std::max(out.max_step_defect, worst_defect[i]);
        out.n_hits += hits[i];
    }
    return out;
}

AvoidanceResult avoidance_probability(const SlitHull& hull, double kappa,
                                      double t_max, double dt, std::size_t n_samples,
                                      uint64_t seed, unsigned workers) {
    if (std::abs(kappa - 8.0 / 3.0) > 1e-12)
        throw std::domain_error("avoidance_probability is defined at kappa = 8/3");
    NormalizedHullMap phiA(hull);
    const double cand = std::pow(std::abs(phiA.d1(cplx(0.0, 0.0))), 5.0 / 8.0) *
                        std::pow(std::abs(phiA.d1(cplx(0.0, 1.0))), 5.0 / 48.0);

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
    const int nm = 9;
    std::vector<double> avoided(n_samples);

    parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
        // disc-frame marker walk; driver U = e^{-i chi}
        std::vector<cplx> mk;
        for (int j = 0; j < nm; ++j)
            mk.push_back(disc_of_half_plane(
                cplx(hull.a, hull.ell * static_cast<double>(j) / (nm - 1))));
        CounterRng rng(seed, i);
        const double sd = std::sqrt(kappa * dt);
        const double eps_hit = 2e-3;
        double chi = 0.0;
        bool hit = false;
        for (std::size_t s = 0; s < n_steps && !hit; ++s) {
            chi += sd * rng.next_normal();
            const cplx U = std::polar(1.0, -chi);
            for (auto& g : mk) {
                if (std::abs(g / U - 1.0) < eps_hit) {
                    hit = true;
                    break;
                }
                g = radial_step_disc(g, U, dt);
            }
        }
        avoided[i] = hit ? 0.0 : 1.0;
    });

    AvoidanceResult out;
    out.freq = estimate_from_samples(avoided);
    out.candidate = cand;
    out.t_max = t_max;
    return out;
}

} // namespace rsle
