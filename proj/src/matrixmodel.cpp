#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include "freeprob/matrixmodel.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <cblas.h>
#include <lapacke.h>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void fill_gaussian(CMatrix& a, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    cplx* p = a.data();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double re = g(rng), im = g(rng);
        p[i] = cplx(re, im);
    }
}

/// sqrt of the stratified quantiles of a law of X*X: the singular spectrum.
std::vector<double> singular_quantiles(const Measure& mu, int n) {
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i)
        d[i] = std::sqrt(std::max(0.0, mu.quantile((i + 0.5) / n)));
    return d;
}

bool is_point_mass(const Measure& mu, double* where) {
    if (!mu.is_degenerate()) return false;
    if (where) *where = mu.atoms[0].location;
    return true;
}

/// Eigenvalues of the Hermitian matrix a (contents destroyed).
std::vector<double> hermitian_eigenvalues(CMatrix& a) {
    int n = static_cast<int>(a.rows());
    std::vector<double> w(n);
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
    if (info != 0) throw Error("hermitian eigensolve failed, info=" + std::to_string(info));
    return w;
}

/// Squared singular values of m via the Gram matrix (rank-k Hermitian update).
std::vector<double> squared_singular_values(const CMatrix& m) {
    int n = static_cast<int>(m.rows());
    CMatrix gram(n, n);
    cblas_zherk(CblasColMajor, CblasUpper, CblasConjTrans, n, n, 1.0, m.data(), n, 0.0,
                gram.data(), n);
    return hermitian_eigenvalues(gram);
}

Measure esd_from_eigenvalues(std::vector<double> w) {
    for (double& x : w) {
        if (x < -1e-10) throw Error("eigenvalue of a Gram matrix below -1e-10");
        if (x < 0.0) x = 0.0;
    }
    return Measure::from_samples(std::move(w), SupportKind::NonNegative);
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix(state);
    state ^= 0x6a09e667f3bcc909ull * (stream + 1);
    std::uint64_t b = splitmix(state);
    return std::mt19937_64(a ^ (b * 0xff51afd7ed558ccdull));
}

CMatrix sample_haar_unitary(int n, std::mt19937_64& rng) {
    if (n < 1) throw ParameterError("matrix size must be >= 1");
    CMatrix a(n, n);
    fill_gaussian(a, rng);
    std::vector<cplx> tau(n);
    int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, n, a.data(), n, tau.data());
    if (info != 0) throw Error("QR factorization failed, info=" + std::to_string(info));
    // R's diagonal phases before the reflectors overwrite everything
    std::vector<cplx> phase(n);
    for (int j = 0; j < n; ++j) {
        cplx r = a(j, j);
        phase[j] = (r == cplx(0.0)) ? cplx(1.0) : r / std::abs(r);
    }
    info = LAPACKE_zungqr(LAPACK_COL_MAJOR, n, n, n, a.data(), n, tau.data());
    if (info != 0) throw Error("Q assembly failed, info=" + std::to_string(info));
    for (int j = 0; j < n; ++j) a.col(j) *= phase[j];
    return a;
}

CMatrix sample_rdiagonal(const RDMatrixSpec& spec, std::mt19937_64& rng) {
    if (spec.size < 2) throw ParameterError("matrix size must be >= 2");
    if (spec.singular_law.support_kind != SupportKind::NonNegative)
        throw SupportError("singular law must live on [0, inf)");
    int n = spec.size;
    double c = 0.0;
    if (is_point_mass(spec.singular_law, &c)) {
        if (c == 0.0) return CMatrix::Zero(n, n);
        return c * sample_haar_unitary(n, rng);  // H = c I exactly
    }
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = spec.singular_law.quantile((i + 0.5) / n);
    CMatrix u = sample_haar_unitary(n, rng);
    CMatrix v = sample_haar_unitary(n, rng);
    CMatrix uv = u * v;
    for (int j = 0; j < n; ++j) uv.col(j) *= q[j];
    return uv * v.adjoint();  // U (V diag(q) V*)
}

Measure esd_star_square(const CMatrix& t) {
    if (t.rows() != t.cols() || t.rows() < 1) throw ParameterError("square matrix required");
    return esd_from_eigenvalues(squared_singular_values(t));
}

EnsembleReport verify_boxplus_rd(const Measure& mu1, const Measure& mu2, int n, int trials,
                                 std::uint64_t seed, const ConvolutionConfig& cfg) {
    if (n < 2) throw ParameterError("matrix size must be >= 2");
    if (trials < 1) throw ParameterError("at least one trial required");
    EnsembleReport rep;
    rep.trials = trials;
    rep.reference = boxplus_rd(mu1, mu2, cfg).measure;

    std::vector<double> d1 = singular_quantiles(mu1, n);
    std::vector<double> d2 = singular_quantiles(mu2, n);
    double c1 = 0.0, c2 = 0.0;
    bool pm1 = is_point_mass(mu1, &c1), pm2 = is_point_mass(mu2, &c2);

    std::vector<double> pool;
    pool.reserve(static_cast<std::size_t>(n) * trials);
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng = make_rng(seed, trial);
        std::vector<double> w;
        if ((pm1 && c1 == 0.0) || (pm2 && c2 == 0.0)) {
            // one summand vanishes: the ESD is the other's quantile spectrum
            const std::vector<double>& d = (pm1 && c1 == 0.0) ? d2 : d1;
            w.resize(n);
            for (int i = 0; i < n; ++i) w[i] = d[i] * d[i];
        } else if (pm1 && pm2) {
            // scalar spectra: Z = s1 + s2 U in law, U a single Haar unitary
            double s1 = std::sqrt(c1), s2 = std::sqrt(c2);
            CMatrix u = sample_haar_unitary(n, rng);
            CMatrix gram = (s1 * s1 + s2 * s2) * CMatrix::Identity(n, n);
            gram += (s1 * s2) * (u + u.adjoint());
            w = hermitian_eigenvalues(gram);
        } else {
            // X + Y has the singular values of D1 + A D2 B (A, B independent
            // Haar); multiplying by B* on the right gives A D2 + D1 B*, which
            // needs no matrix product to assemble
            CMatrix a = sample_haar_unitary(n, rng);
            CMatrix b = sample_haar_unitary(n, rng);
            CMatrix m(n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    m(i, j) = a(i, j) * d2[j] + d1[i] * std::conj(b(j, i));
            w = squared_singular_values(m);
        }
        for (double x : w) pool.push_back(std::max(0.0, x));
    }

    rep.esd = Measure::from_samples(std::move(pool), SupportKind::NonNegative);
    rep.ks = ks_distance(rep.esd, rep.reference);
    rep.wasserstein = wasserstein1(rep.esd, rep.reference);
    return rep;
}

Measure partial_sum_esd(const SeriesSpec& series, int n, int matrix_size, std::uint64_t seed) {
    if (n < 1 || n > series.count()) throw ParameterError("partial-sum index out of range");
    if (matrix_size < 2) throw ParameterError("matrix size must be >= 2");
    int sz = matrix_size;
    CMatrix s = CMatrix::Zero(sz, sz);
    for (int k = 1; k <= n; ++k) {
        // stream per term: S_n grows by one summand as n grows, with the
        // earlier summands unchanged
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(k));
        RDMatrixSpec spec{sz, series.term(k), seed};
        s += sample_rdiagonal(spec, rng);
    }
    return esd_star_square(s);
}

}  // namespace freeprob
