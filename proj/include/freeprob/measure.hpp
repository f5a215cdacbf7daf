#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freeprob/errors.hpp"

namespace freeprob {

enum class SupportKind { RealLine, NonNegative };

struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

/// A compactly supported probability measure on R or R+.
///
/// Three coexisting parts: point masses, a piecewise-linear density on an
/// explicit strictly increasing grid, and (for empirical measures) a list of
/// equally weighted samples. The total mass of all parts is 1.
class Measure {
public:
    SupportKind support_kind = SupportKind::RealLine;
    std::vector<Atom> atoms;        // sorted by location, distinct locations
    std::vector<double> grid;       // strictly increasing, size == density.size()
    std::vector<double> density;    // nonnegative nodal values, linear between nodes
    std::vector<double> samples;    // sorted; carries `sample_mass` split evenly
    double sample_mass = 0.0;

    static Measure point_mass(double location, SupportKind kind);
    static Measure from_atoms(std::vector<Atom> atoms, SupportKind kind);
    static Measure from_density(std::vector<double> grid, std::vector<double> density,
                                SupportKind kind, bool renormalize = true);
    static Measure from_samples(std::vector<double> samples, SupportKind kind);

    /// Throws if any structural invariant is violated (mass != 1 beyond 1e-9,
    /// unsorted grid, negative weights, support-kind violation, ...).
    void validate() const;

    double atom_mass() const;
    double density_mass() const;
    double total_mass() const;

    bool has_density() const { return !grid.empty(); }
    bool is_degenerate() const { return grid.empty() && samples.empty() && atoms.size() == 1; }

    double support_min() const;
    double support_max() const;
    double support_radius() const;  // max |x| over the support

    /// P((-inf, x])
    double cdf(double x) const;
    /// P((-inf, x))
    double cdf_left(double x) const;
    /// Smallest x with cdf(x) >= p.
    double quantile(double p) const;
    /// Density value at x by linear interpolation (0 outside the grid).
    double density_at(double x) const;

    /// All locations where the CDF can attain extrema of differences:
    /// atom locations, grid nodes and sample points.
    std::vector<double> breakpoints() const;
};

// --- catalogue of closed-form test laws ------------------------------------

struct ParametricLaw {
    enum class Tag {
        Dirac,             // dirac(c)
        SymmetricBernoulli,
        Semicircle,        // semicircle(variance)
        MarchenkoPastur,   // marchenko-pastur(shape)
        Arcsine,           // arcsine(a, b)
        ArcsinePositive,   // arcsine-positive(b): density 1/(pi sqrt(x(b-x)))
        Uniform,           // uniform(a, b)
    };
    Tag tag;
    double p1 = 0.0;
    double p2 = 0.0;

    static ParametricLaw dirac(double c) { return {Tag::Dirac, c, 0.0}; }
    static ParametricLaw symmetric_bernoulli() { return {Tag::SymmetricBernoulli, 0, 0}; }
    static ParametricLaw semicircle(double variance) { return {Tag::Semicircle, variance, 0}; }
    static ParametricLaw marchenko_pastur(double shape) { return {Tag::MarchenkoPastur, shape, 0}; }
    static ParametricLaw arcsine(double a, double b) { return {Tag::Arcsine, a, b}; }
    static ParametricLaw arcsine_positive(double b) { return {Tag::ArcsinePositive, b, 0}; }
    static ParametricLaw uniform(double a, double b) { return {Tag::Uniform, a, b}; }
};

Measure materialize(const ParametricLaw& law, int grid_resolution = 512);

// --- functionals ------------------------------------------------------------

/// \int t^k dmu(t); exact on atoms and on the piecewise-linear density.
double moment(const Measure& mu, unsigned k);

/// \int_{[0,1]} t^2 dmu(t); requires a law on R+.
double truncated_second_moment(const Measure& mu);

/// mu((threshold, inf))
double tail_mass(const Measure& mu, double threshold);

/// \int y t / (y + t) dmu(t) for y > 0 and mu on R+.
double harmonic_truncation(const Measure& mu, double y);

// --- pushforwards -----------------------------------------------------------

/// Image of mu under t -> t^2. Real-line input is folded onto R+.
Measure pushforward_square(const Measure& mu);

/// For mu on R+: symmetric measure putting half the mass of each t at +-sqrt(t).
Measure sqrt_symmetrize(const Measure& mu);

/// Image of mu under t -> c t, c > 0.
Measure dilate(const Measure& mu, double c);

// --- metrics ----------------------------------------------------------------

double ks_distance(const Measure& mu1, const Measure& mu2);
double levy_distance(const Measure& mu1, const Measure& mu2);
double wasserstein1(const Measure& mu1, const Measure& mu2);

/// L1 distance between the density parts on a merged grid (atoms compared
/// separately by weight).  Used for density-recovery quality checks.
double l1_density_distance(const Measure& mu1, const Measure& mu2);

bool is_symmetric(const Measure& mu, double tol);

}  // namespace freeprob
