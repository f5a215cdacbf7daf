#pragma once

#include <cstdint>
#include <vector>

#include "freeprob/measure.hpp"
#include "freeprob/transforms.hpp"

namespace freeprob {

/// Coefficients alpha_1 .. alpha_N of the determining series of an
/// R-diagonal element (the only non-vanishing *-cumulants are the
/// alternating even ones, k_{2n}(X, X*, ..., X, X*) = alpha_n).
struct AlphaSeries {
    std::vector<double> coefficients;
    int order() const { return static_cast<int>(coefficients.size()); }
};

struct NonCrossingPartition {
    std::vector<std::vector<int>> blocks;  // 1-based element indices, each block sorted
};

/// All non-crossing partitions of {1..n}; count = Catalan(n).  1 <= n <= 14.
std::vector<NonCrossingPartition> enumerate_nc(int n);

/// Crossing check: no a<b<c<d with {a,c} and {b,d} in different blocks.
bool is_noncrossing(const NonCrossingPartition& p);

/// tau((X*X)^k) from the alpha series, via the generating-function recursion
/// M(z) = 1 + f(z M(z)^2) equivalent to the alternating-partition sum.
/// Requires k <= order (higher cumulants would contribute).
double moments_from_alpha(const AlphaSeries& alpha, int k);

/// Exact integer variant of moments_from_alpha for oracle checks.
std::int64_t moments_from_alpha_exact(const std::vector<std::int64_t>& alpha, int k);

/// Truncated determining series f_X(z) = sum alpha_n z^n.
cplx f_series_eval(const AlphaSeries& alpha, cplx z);

/// Extract alpha_1..alpha_N from phiphi values via the (corrected) relation
/// f_X(z) = z * phiphi_mu(1/z), sampled on a circle |z| = r <= 0.05/radius
/// and resolved by a 32-point DFT.
AlphaSeries alpha_from_phiphi(const Measure& mu, int N, const InversionConfig& cfg = {});
AlphaSeries alpha_from_phiphi(TransformEngine& eng, double support_radius, int N);

/// Free cumulants k_1..k_{2N} of a = Re X: odd cumulants vanish,
/// k_{2n} = alpha_n / 2^(2n-1).
std::vector<double> real_part_cumulants(const AlphaSeries& alpha);

/// k_n from m_1..m_N by Moebius inversion over non-crossing partitions.
std::vector<double> free_cumulants_from_moments(const std::vector<double>& moments);

}  // namespace freeprob
