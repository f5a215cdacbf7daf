#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "freeprob/freeconv.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/threeseries.hpp"

namespace freeprob {

using CMatrix = Eigen::MatrixXcd;

/// Finite-N model of an R-diagonal operator X = U H: U Haar unitary, H >= 0
/// with spectrum drawn from the law of |X|.
struct RDMatrixSpec {
    int size = 0;
    Measure singular_law;  // law of |X| on [0, inf)
    std::uint64_t seed = 0;
};

struct EnsembleReport {
    Measure esd;        // pooled empirical law of Z*Z over the trials
    Measure reference;  // the transform-calculus prediction
    double ks = 0.0;
    double wasserstein = 0.0;
    int trials = 0;
};

/// Deterministic generator for (seed, stream): trials get disjoint streams, so
/// results do not depend on evaluation order or parallel scheduling.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Haar-distributed unitary: QR of an iid standard complex Gaussian matrix
/// with the R factor's diagonal phases divided out (plain QR is not Haar).
CMatrix sample_haar_unitary(int n, std::mt19937_64& rng);

/// X = U (V diag(q) V*): U, V independent Haar, q stratified quantiles of the
/// singular law (inverse-CDF sampling removes O(N^{-1/2}) spectral noise).
CMatrix sample_rdiagonal(const RDMatrixSpec& spec, std::mt19937_64& rng);

/// Empirical measure of the eigenvalues of T*T; tiny negative eigenvalues
/// (roundoff) are clipped at 0.
Measure esd_star_square(const CMatrix& t);

/// Monte Carlo check of the R-diagonal convolution: pooled ESD of
/// (X+Y)*(X+Y) over `trials` independent draws against boxplus_rd(mu1, mu2),
/// mu_i the laws of X*X and Y*Y.  Singular values of X+Y are computed from the
/// reduced equal-in-law form D1 + A D2 B (A, B independent Haar), which cuts
/// the per-trial cost roughly in half.
EnsembleReport verify_boxplus_rd(const Measure& mu1, const Measure& mu2, int n, int trials,
                                 std::uint64_t seed, const ConvolutionConfig& cfg = {});

/// ESD of S_n* S_n, S_n = X_1 + ... + X_n with independent factors sampled
/// from the series terms.
Measure partial_sum_esd(const SeriesSpec& series, int n, int matrix_size, std::uint64_t seed);

}  // namespace freeprob
