#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "freeprob/cumulants.hpp"
#include "freeprob/freeconv.hpp"

using namespace freeprob;

namespace {

// branch of phiphi for dirac(1) that is continuous along recovery contours:
// principal sqrt(1 + 4/t) sits on the correct side of the cut (-4, 0) for
// points approached from the upper half-plane and matches phiphi ~ 1 at infinity
std::pair<cplx, cplx> phiphi_dirac1_pair(cplx t) {
    cplx r = std::sqrt(1.0 + 4.0 / t);
    cplx dr = (-4.0 / (t * t)) / (2.0 * r);
    return {0.5 * (t * r - t), 0.5 * (r + t * dr - 1.0)};
}

double nth_moment_error(const Measure& m, unsigned k, double expect) {
    return std::abs(moment(m, k) - expect);
}

}  // namespace

TEST_CASE("free additive convolution of two semicircles is a semicircle") {
    Measure s1 = materialize(ParametricLaw::semicircle(1.0));
    ConvolutionConfig cfg;
    cfg.grid_points = 2400;
    ConvolutionResult r = boxplus(s1, s1, cfg);

    Measure s2 = materialize(ParametricLaw::semicircle(2.0), 1024);
    CHECK(l1_density_distance(r.measure, s2) <= 1e-3);
    CHECK(levy_distance(r.measure, s2) <= 1e-3);

    // variance is additive under the convolution
    CHECK(std::abs(moment(r.measure, 2) - 2.0 * moment(s1, 2)) <= 1e-4);
    CHECK(nth_moment_error(r.measure, 1, 0.0) <= 1e-4);

    CHECK(r.residuals.at("phi_additivity") <= 1e-6);
    CHECK(r.residuals.at("fixed_point") <= 1e-6);
    CHECK(r.cone_domain.beta > 0.0);
}

TEST_CASE("two symmetric bernoulli laws convolve to the arcsine law") {
    Measure be = materialize(ParametricLaw::symmetric_bernoulli());
    ConvolutionResult r = boxplus(be, be);
    Measure arc = materialize(ParametricLaw::arcsine(-2.0, 2.0), 2048);
    CHECK(l1_density_distance(r.measure, arc) <= 1e-3);
    CHECK(r.residuals.at("phi_additivity") <= 1e-6);
}

TEST_CASE("a point mass acts on boxplus by translation") {
    Measure s1 = materialize(ParametricLaw::semicircle(1.0));
    Measure d0 = Measure::point_mass(0.0, SupportKind::RealLine);
    CHECK(levy_distance(boxplus(s1, d0).measure, s1) <= 1e-4);
    CHECK(levy_distance(boxplus(d0, s1).measure, s1) <= 1e-4);

    Measure be = materialize(ParametricLaw::symmetric_bernoulli());
    Measure dh = Measure::point_mass(0.5, SupportKind::RealLine);
    Measure shifted = boxplus(be, dh).measure;
    REQUIRE(shifted.atoms.size() == 2);
    CHECK(shifted.atoms[0].location == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(shifted.atoms[1].location == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("boxplus is commutative and scaling-equivariant") {
    Measure s1 = materialize(ParametricLaw::semicircle(1.0));
    Measure un = materialize(ParametricLaw::uniform(-1.0, 2.0));
    ConvolutionResult ab = boxplus(s1, un);
    ConvolutionResult ba = boxplus(un, s1);
    CHECK(levy_distance(ab.measure, ba.measure) <= 1e-6);

    // mean is additive
    CHECK(std::abs(moment(ab.measure, 1) - moment(s1, 1) - moment(un, 1)) <= 1e-4);

    // dilating both inputs dilates the result
    ConvolutionResult half = boxplus(dilate(s1, 0.5), dilate(un, 0.5));
    CHECK(levy_distance(dilate(ab.measure, 0.5), half.measure) <= 1e-6);
}

TEST_CASE("R-diagonal convolution of two free Haar-type squares is arcsine on [0,4]") {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    ConvolutionResult r = boxplus_rd(d1, d1);
    Measure ap4 = materialize(ParametricLaw::arcsine_positive(4.0), 1024);
    CHECK(l1_density_distance(r.measure, ap4) <= 2e-3);
    CHECK(levy_distance(r.measure, ap4) <= 2e-3);
    CHECK(r.residuals.at("chain") <= 1e-6);
    CHECK(r.residuals.at("phiphi_additivity") <= 2e-3);
    CHECK(r.sector_domain.beta >= 4.0);
}

TEST_CASE("R-diagonal convolution of two Marchenko-Pastur laws doubles the scale") {
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    ConvolutionResult r = boxplus_rd(mp, mp);
    Measure mp2 = dilate(materialize(ParametricLaw::marchenko_pastur(1.0), 1024), 2.0);
    CHECK(levy_distance(r.measure, mp2) <= 2e-3);
    CHECK(r.residuals.at("chain") <= 1e-6);
    CHECK(r.residuals.at("phiphi_additivity") <= 2e-3);
}

TEST_CASE("linearization route agrees with the symmetrization route") {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    Measure u01 = materialize(ParametricLaw::uniform(0.0, 1.0));
    const Measure* pairs[6][2] = {{&d1, &d1},   {&mp, &mp},  {&d1, &mp},
                                  {&u01, &u01}, {&u01, &mp}, {&d1, &u01}};
    for (auto& p : pairs) {
        CAPTURE(moment(*p[0], 1));
        CAPTURE(moment(*p[1], 1));
        ConvolutionResult a = boxplus_rd(*p[0], *p[1]);
        ConvolutionResult b = boxplus_rd_symmetric_route(*p[0], *p[1]);
        CHECK(levy_distance(a.measure, b.measure) <= 2e-3);
        // the mean is additive under the R-diagonal convolution
        CHECK(std::abs(moment(a.measure, 1) - moment(*p[0], 1) - moment(*p[1], 1)) <= 1e-3);
    }
}

TEST_CASE("R-diagonal convolution identity and degenerate cases") {
    Measure d0 = Measure::point_mass(0.0, SupportKind::NonNegative);
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    CHECK(levy_distance(boxplus_rd(mp, d0).measure, mp) <= 1e-12);
    CHECK(levy_distance(boxplus_rd(d0, mp).measure, mp) <= 1e-12);
    CHECK(boxplus_rd(d0, d0).measure.is_degenerate());
    CHECK(levy_distance(boxplus_rd_symmetric_route(mp, d0).measure, mp) <= 1e-12);

    // order of the arguments does not matter
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    CHECK(levy_distance(boxplus_rd(d1, mp).measure, boxplus_rd(mp, d1).measure) <= 1e-6);
}

TEST_CASE("n-ary convolution matches iterated symmetrized convolution") {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    ConvolutionResult r3 = boxplus_rd_many({&d1, &d1, &d1});
    Measure be = materialize(ParametricLaw::symmetric_bernoulli());
    Measure n2 = boxplus(be, be).measure;
    Measure n3 = boxplus(n2, be).measure;
    CHECK(levy_distance(r3.measure, pushforward_square(n3)) <= 2e-3);
}

TEST_CASE("recovery from a closed-form transform sum matches the catalogue law") {
    auto pair_s = [](cplx t) {
        auto [v, d] = phiphi_dirac1_pair(t);
        return std::make_pair(2.0 * v, 2.0 * d);
    };
    ConvolutionConfig cfg;
    std::map<std::string, double> res;
    Measure rec = measure_from_phiphi(pair_s, 4.0, cfg, &res);
    Measure ap4 = materialize(ParametricLaw::arcsine_positive(4.0), 1024);
    CHECK(l1_density_distance(rec, ap4) <= 2e-3);
    CHECK(res.at("chain") <= 1e-6);
}

TEST_CASE("law of the real part: Haar-type case gives arcsine(-1,1)") {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    ConvolutionConfig cfg;
    cfg.grid_points = 2400;  // moment checks need the finer density grid
    Measure a = real_part_law(d1, cfg);
    Measure arc = materialize(ParametricLaw::arcsine(-1.0, 1.0), 1024);
    CHECK(l1_density_distance(a, arc) <= 2e-3);
    CHECK(is_symmetric(a, 1e-6));

    // even free cumulants are alpha_n / 2^(2n-1) with alpha = 1, -1, 2, -5, ...
    std::vector<double> mom;
    for (unsigned k = 1; k <= 4; ++k) mom.push_back(moment(a, k));
    std::vector<double> kum = free_cumulants_from_moments(mom);
    CHECK(std::abs(kum[0]) <= 1e-4);
    CHECK(std::abs(kum[1] - 0.5) <= 1e-4);
    CHECK(std::abs(kum[2]) <= 1e-4);
    CHECK(std::abs(kum[3] + 0.125) <= 1e-4);
}

TEST_CASE("law of the real part: circular case gives a semicircle") {
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    ConvolutionConfig cfg;
    cfg.grid_points = 2400;
    Measure a = real_part_law(mp, cfg);
    Measure sc = materialize(ParametricLaw::semicircle(0.5), 1024);
    CHECK(l1_density_distance(a, sc) <= 2e-3);
    CHECK(is_symmetric(a, 1e-6));

    // alpha = (1, 0, 0, ...): only the second cumulant survives
    std::vector<double> mom;
    for (unsigned k = 1; k <= 4; ++k) mom.push_back(moment(a, k));
    std::vector<double> kum = free_cumulants_from_moments(mom);
    CHECK(std::abs(kum[1] - 0.5) <= 1e-4);
    CHECK(std::abs(kum[3]) <= 1e-4);
}

TEST_CASE("law of the real part of a zero operator is the zero point mass") {
    Measure d0 = Measure::point_mass(0.0, SupportKind::NonNegative);
    Measure a = real_part_law(d0);
    CHECK(a.is_degenerate());
    CHECK(a.atoms[0].location == doctest::Approx(0.0));
}

TEST_CASE("support-kind and parameter errors") {
    Measure s1 = materialize(ParametricLaw::semicircle(1.0));
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    CHECK_THROWS_AS((void)boxplus_rd(s1, mp), SupportError);
    CHECK_THROWS_AS((void)boxplus_rd_symmetric_route(s1, mp), SupportError);
    CHECK_THROWS_AS((void)real_part_law(s1), SupportError);
    CHECK_THROWS_AS((void)boxplus_rd_many({}), ParameterError);
}
