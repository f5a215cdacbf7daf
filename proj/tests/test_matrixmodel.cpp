#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "freeprob/matrixmodel.hpp"

using namespace freeprob;

namespace {

double unitarity_defect(const CMatrix& q) {
    int n = static_cast<int>(q.rows());
    return (q.adjoint() * q - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

// density (1/pi) sqrt(4 - x^2) on [0, 2]: the law of |X| for a circular X
Measure quarter_circle() {
    std::vector<double> grid, dens;
    for (int i = 0; i <= 512; ++i) {
        double x = 2.0 * i / 512;
        grid.push_back(x);
        dens.push_back(std::sqrt(std::max(0.0, 4.0 - x * x)) / M_PI);
    }
    return Measure::from_density(std::move(grid), std::move(dens), SupportKind::NonNegative);
}

}  // namespace

TEST_CASE("haar samples are unitary with phase-fixed QR") {
    for (int n : {2, 7, 64}) {
        auto rng = make_rng(1, n);
        CMatrix q = sample_haar_unitary(n, rng);
        CHECK(unitarity_defect(q) <= 1e-12);
    }
}

TEST_CASE("1x1 haar samples are uniform phases") {
    cplx mean = 0.0;
    for (int i = 0; i < 10000; ++i) {
        auto rng = make_rng(7, i);
        mean += sample_haar_unitary(1, rng)(0, 0);
    }
    CHECK(std::abs(mean) / 10000 <= 0.05);  // CLT: 3/sqrt(10^4), relaxed
}

TEST_CASE("haar traces are centered, also after a fixed left rotation") {
    // E tr Q = 0 and tr Q has unit variance; a fixed unitary L must not shift
    // the mean (left invariance)
    int n = 64, trials = 100;
    CMatrix l = CMatrix::Identity(n, n);
    for (int j = 0; j < n; ++j) l(j, j) = std::polar(1.0, 0.37 * j);
    cplx tr = 0.0, tr_rot = 0.0;
    for (int i = 0; i < trials; ++i) {
        auto rng = make_rng(11, i);
        CMatrix q = sample_haar_unitary(n, rng);
        tr += q.trace();
        tr_rot += (l * q).trace();
    }
    CHECK(std::abs(tr) / trials <= 0.3);  // 3 / sqrt(trials)
    CHECK(std::abs(tr_rot) / trials <= 0.3);
}

TEST_CASE("identical seeds reproduce samples bitwise") {
    auto r1 = make_rng(5);
    auto r2 = make_rng(5);
    CMatrix a = sample_haar_unitary(32, r1);
    CMatrix b = sample_haar_unitary(32, r2);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    auto r3 = make_rng(5, 1);  // different stream
    CMatrix c = sample_haar_unitary(32, r3);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("singular-law point masses give scaled unitaries") {
    auto rng = make_rng(2);
    RDMatrixSpec spec{64, Measure::point_mass(1.0, SupportKind::NonNegative), 2};
    CMatrix t = sample_rdiagonal(spec, rng);
    CHECK((t.adjoint() * t - CMatrix::Identity(64, 64)).cwiseAbs().maxCoeff() <= 1e-12);

    spec.singular_law = Measure::point_mass(0.0, SupportKind::NonNegative);
    CMatrix z = sample_rdiagonal(spec, rng);
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quarter-circle singular law models a circular element") {
    auto rng = make_rng(3);
    RDMatrixSpec spec{1024, quarter_circle(), 3};
    CMatrix t = sample_rdiagonal(spec, rng);
    Measure esd = esd_star_square(t);
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0), 1024);
    CHECK(ks_distance(esd, mp) <= 0.05);
    CHECK(esd.support_min() >= 0.0);
}

TEST_CASE("empirical star-square law of simple matrices") {
    CMatrix id = CMatrix::Identity(16, 16);
    Measure one = esd_star_square(id);
    CHECK(levy_distance(one, Measure::point_mass(1.0, SupportKind::NonNegative)) <= 1e-12);

    Measure zero = esd_star_square(CMatrix::Zero(16, 16));
    CHECK(levy_distance(zero, Measure::point_mass(0.0, SupportKind::NonNegative)) <= 1e-12);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    Measure two = esd_star_square(d);  // eigenvalues of diag(1, 4)
    CHECK(two.cdf(0.5) == doctest::Approx(0.0));
    CHECK(two.cdf(1.5) == doctest::Approx(0.5));
    CHECK(two.cdf(4.5) == doctest::Approx(1.0));
}

TEST_CASE("monte carlo ensembles match the convolution prediction") {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    EnsembleReport r1 = verify_boxplus_rd(d1, d1, 1024, 20, 1);
    CHECK(r1.ks <= 0.05);
    CHECK(r1.esd.support_min() >= 0.0);
    Measure ap4 = materialize(ParametricLaw::arcsine_positive(4.0), 1024);
    CHECK(ks_distance(r1.esd, ap4) <= 0.05);

    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    EnsembleReport r2 = verify_boxplus_rd(mp, mp, 1024, 20, 1);
    CHECK(r2.ks <= 0.05);
    CHECK(ks_distance(r2.esd, dilate(materialize(ParametricLaw::marchenko_pastur(1.0), 1024), 2.0)) <= 0.05);
}

TEST_CASE("adding a zero operator does not move the spectrum") {
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    Measure d0 = Measure::point_mass(0.0, SupportKind::NonNegative);
    EnsembleReport r = verify_boxplus_rd(mp, d0, 512, 2, 4);
    CHECK(r.ks <= 0.05);
    CHECK(ks_distance(r.esd, mp) <= 0.05);
}

TEST_CASE("finite-size error shrinks with the matrix size") {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    double small = 0.0, large = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        small += verify_boxplus_rd(d1, d1, 256, 4, seed).ks;
        large += verify_boxplus_rd(d1, d1, 1024, 4, seed).ks;
    }
    CHECK(large <= small);  // 5-seed average trend
}

TEST_CASE("partial sums of the scaled series stabilize") {
    SeriesSpec geo = SeriesSpec::scaled_haar_geometric(8);
    Measure first = partial_sum_esd(geo, 1, 512, 3);
    // one term: the spectrum is the deterministic quantile spectrum
    CHECK(levy_distance(first, Measure::point_mass(0.25, SupportKind::NonNegative)) <= 1e-12);

    std::vector<double> succ;
    Measure prev = first;
    for (int n = 2; n <= 8; ++n) {
        Measure cur = partial_sum_esd(geo, n, 512, 3);
        succ.push_back(ks_distance(prev, cur));
        prev = cur;
    }
    for (std::size_t i = 0; i + 1 < succ.size(); ++i) CHECK(succ[i + 1] <= succ[i] + 0.01);
    CHECK(succ.back() <= 0.08);
    CHECK(succ[2] <= 0.08);  // below threshold from the fourth increment on

    SeriesSpec zeros = SeriesSpec::explicit_terms(
        {Measure::point_mass(0.0, SupportKind::NonNegative),
         Measure::point_mass(0.0, SupportKind::NonNegative)});
    Measure z = partial_sum_esd(zeros, 2, 64, 1);
    CHECK(levy_distance(z, Measure::point_mass(0.0, SupportKind::NonNegative)) <= 1e-12);
}

TEST_CASE("parameter validation") {
    auto rng = make_rng(1);
    CHECK_THROWS_AS((void)sample_haar_unitary(0, rng), ParameterError);
    RDMatrixSpec bad{1, Measure::point_mass(1.0, SupportKind::NonNegative), 0};
    CHECK_THROWS_AS((void)sample_rdiagonal(bad, rng), ParameterError);
    RDMatrixSpec wrong{8, materialize(ParametricLaw::semicircle(1.0)), 0};
    CHECK_THROWS_AS((void)sample_rdiagonal(wrong, rng), SupportError);
    CHECK_THROWS_AS((void)esd_star_square(CMatrix::Zero(2, 3)), ParameterError);
}
