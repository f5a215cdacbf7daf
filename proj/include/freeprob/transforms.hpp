#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob {

using cplx = std::complex<double>;
using AnalyticMap = std::function<cplx(cplx)>;

// --- domains ----------------------------------------------------------------

/// Truncated upper cone: {x+iy : y > alpha|x|, |z| > beta}.
struct UpperConeDomain {
    double alpha = 1.0;
    double beta = 1.0;
    bool contains(cplx z) const;
    /// A point of the domain at distance r from the origin (on the imaginary axis).
    cplx sample_point(double r) const;
};

/// Complement of a sector around R+: {|z| > beta} minus {x+iy : x > 0, |y| < alpha x}.
struct SectorComplementDomain {
    double alpha = 1.0;
    double beta = 1.0;
    bool contains(cplx z) const;
    /// A point of the domain at distance r from the origin (on the negative axis).
    cplx sample_point(double r) const;
};

// --- inversion --------------------------------------------------------------

struct InversionConfig {
    double newton_tol = 1e-12;
    int max_iterations = 60;
    int continuation_steps = 16;
    /// |z| at which the asymptotic seed w ~ z is trusted.
    double start_radius = 0.0;  // 0 = auto (derived from the measure's support radius)
};

/// Solve f(w) = target by Newton iteration with numerical derivative, seeded
/// by continuation along the ray from start_radius * target/|target| to target.
cplx invert_analytic(const AnalyticMap& f, cplx target, const InversionConfig& cfg);

// --- transform chain --------------------------------------------------------

/// G_mu(z) = int dmu(t) / (z - t).
cplx cauchy(const Measure& mu, cplx z);

/// Closed-form Cauchy transform of a catalogue law (branch with G ~ 1/z).
/// Exact to machine precision; used where discretization error is too coarse.
AnalyticMap analytic_cauchy(const ParametricLaw& law);

/// G and dG/dz in one pass (both closed-form per density cell).
std::pair<cplx, cplx> cauchy_with_derivative(const Measure& mu, cplx z);

/// F_mu(z) = 1 / G_mu(z).
cplx reciprocal_cauchy(const Measure& mu, cplx z);

/// phi_mu(z) = F^{-1}_mu(z) - z.
cplx voiculescu_phi(const Measure& mu, cplx z, const InversionConfig& cfg = {});

/// V_mu(z) = (1/z)(1 + phi_mu(z)/z); mu on R+.
cplx v_transform(const Measure& mu, cplx z, const InversionConfig& cfg = {});

/// W_mu(z) = 1 / V_mu(z); mu on R+.
cplx w_transform(const Measure& mu, cplx z, const InversionConfig& cfg = {});

/// phiphi_mu(z) = W^{-1}_mu(z) - z; mu on R+.
cplx phiphi(const Measure& mu, cplx z, const InversionConfig& cfg = {});

/// phiphi_mu(z) / (z^2 [G_mu(z) - 1/z]); tends to 1 as |z| -> infinity.
cplx estimate_ratio(const Measure& mu, cplx z, const InversionConfig& cfg = {});

// --- warm-started evaluators ------------------------------------------------

/// Evaluates one measure's transforms with warm-started inversions.  Each
/// instance owns its caches, so distinct instances may run concurrently;
/// results are independent of evaluation history (seeds only, not values).
class TransformEngine {
public:
    explicit TransformEngine(const Measure& mu, InversionConfig cfg = {});
    /// Engine over an arbitrary analytic Cauchy transform (e.g. a closed form).
    TransformEngine(AnalyticMap g, double support_radius, SupportKind kind,
                    InversionConfig cfg = {});

    const InversionConfig& config() const { return cfg_; }

    cplx cauchy(cplx z) const;
    cplx reciprocal_cauchy(cplx z) const;
    cplx phi(cplx z);
    cplx v(cplx z);
    cplx w(cplx z);
    cplx phiphi(cplx z);

    /// (value, d/dz) pairs; derivatives propagate analytically through the
    /// inversion chain (inverse function theorem), so nested Newton solves
    /// need no finite differencing.
    std::pair<cplx, cplx> cauchy_pair(cplx z) const;
    std::pair<cplx, cplx> f_pair(cplx z) const;
    std::pair<cplx, cplx> phi_pair(cplx z);
    std::pair<cplx, cplx> w_pair(cplx z);
    std::pair<cplx, cplx> phiphi_pair(cplx z);

private:
    cplx invert_f(cplx target);        // F^{-1}
    cplx invert_w_param(cplx target);  // m with W(F(m)) = target, i.e. F(m) = W^{-1}(target)
    bool has_measure_ = false;
    Measure mu_;                  // only set for measure-backed engines

    AnalyticMap g_;
    SupportKind kind_;
    InversionConfig cfg_;
    std::vector<std::pair<cplx, cplx>> f_seeds_;  // (target, F^{-1}(target))
    std::vector<std::pair<cplx, cplx>> w_seeds_;  // (target, parameter m)
};

/// Newton + ray continuation for a user-supplied map, keeping solved points
/// as seeds for later targets.
class FunctionInverter {
public:
    FunctionInverter(AnalyticMap f, InversionConfig cfg);
    cplx invert(cplx target);

private:
    AnalyticMap f_;
    InversionConfig cfg_;
    std::vector<std::pair<cplx, cplx>> seeds_;
};

// --- Stieltjes inversion ----------------------------------------------------

struct RecoveryOptions {
    std::vector<double> grid;           // abscissae for the density
    std::vector<double> eps_schedule;   // decreasing, >= 2 entries
    bool atom_scan_at_zero = false;
    SupportKind support_kind = SupportKind::RealLine;
};

/// density(x) = -(1/pi) Im g(x + i eps), Richardson-extrapolated over the
/// eps schedule; optional atom detection at 0; renormalized to mass 1.
Measure stieltjes_recover(const AnalyticMap& g, const RecoveryOptions& opt);

// --- calibration ------------------------------------------------------------

struct CalibrationReport {
    SectorComplementDomain sector;
    UpperConeDomain cone;
    double worst_residual = 0.0;
    int probes = 0;
};

/// Finds (alpha, beta) for which the inversions behind phi / phiphi converge
/// on 32 boundary probes; beta >= 4 * support radius, doubled on failure.
CalibrationReport calibrate_domain(const Measure& mu, const InversionConfig& cfg = {});

}  // namespace freeprob
