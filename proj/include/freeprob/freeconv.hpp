#pragma once

#include <map>
#include <string>

#include "freeprob/measure.hpp"
#include "freeprob/transforms.hpp"

namespace freeprob {

struct ConvolutionConfig {
    InversionConfig inversion;
    int grid_points = 1200;                 // base recovery grid resolution
    std::vector<double> eps_schedule;       // empty = auto (scaled to support)
    double route_tol = 2e-3;
    int probe_points = 8;                   // residual probe count
};

struct ConvolutionResult {
    Measure measure;
    std::map<std::string, double> residuals;
    SectorComplementDomain sector_domain;   // populated for the RD routes
    UpperConeDomain cone_domain;            // populated for boxplus
};

/// Free additive convolution mu1 [+] mu2 on R, computed by the subordination
/// fixed point w -> z + h2(z + h1(w)), h_j = F_j - id; the result's density is
/// recovered by Stieltjes inversion along contours Im z = eps.
/// residuals: "phi_additivity" (probe max of |phi_res - phi1 - phi2|),
/// "fixed_point" (worst fixed-point defect on the recovery contour).
ConvolutionResult boxplus(const Measure& mu1, const Measure& mu2,
                          const ConvolutionConfig& cfg = {});

/// R-diagonal convolution on R+ via the phiphi linearization (Route A):
/// phiphi_res = phiphi_1 + phiphi_2, then W^{-1}, phi, F^{-1}, G, recovery.
/// residuals: "chain" (worst parametrization defect), "phiphi_additivity"
/// (probe max of |phiphi(recovered) - sum| -- closes the loop through
/// Stieltjes inversion, so it is only expected to be small at ~1e-3).
ConvolutionResult boxplus_rd(const Measure& mu1, const Measure& mu2,
                             const ConvolutionConfig& cfg = {});

/// Same operation for an arbitrary list of summands (used by the series
/// diagnostics); radius_bound must bound the support of the result.
ConvolutionResult boxplus_rd_many(const std::vector<const Measure*>& mus,
                                  const ConvolutionConfig& cfg = {});

/// Cross-check route: square-root-symmetrize both laws, boxplus them on R,
/// push the result forward through t -> t^2.
ConvolutionResult boxplus_rd_symmetric_route(const Measure& mu1, const Measure& mu2,
                                             const ConvolutionConfig& cfg = {});

/// Law of a = Re X for R-diagonal X with mu = law of X*X, via the corrected
/// relation phi_{mu_a}(z) = phiphi_mu((2z)^2) / (2z).
Measure real_part_law(const Measure& mu, const ConvolutionConfig& cfg = {});

/// Recover the measure on R+ whose phiphi transform equals s (an analytic map
/// with the symmetry s(conj z) = conj s(z)); radius_bound bounds its support.
/// Exposed for n-ary phiphi sums; pair_s must return (value, derivative).
Measure measure_from_phiphi(const std::function<std::pair<cplx, cplx>(cplx)>& pair_s,
                            double radius_bound, const ConvolutionConfig& cfg,
                            std::map<std::string, double>* residuals = nullptr);

}  // namespace freeprob
