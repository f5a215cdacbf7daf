#include "freeprob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace freeprob {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kPi = 3.14159265358979323846;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

void sort_atoms(std::vector<Atom>& atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
}

// Merge locations closer than an absolute tolerance, summing weights.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms, double tol) {
    sort_atoms(atoms);
    std::vector<Atom> out;
    for (const Atom& a : atoms) {
        if (!out.empty() && std::abs(a.location - out.back().location) <= tol) {
            double w = out.back().weight + a.weight;
            out.back().location =
                (out.back().location * out.back().weight + a.location * a.weight) / w;
            out.back().weight = w;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

}  // namespace

Measure Measure::point_mass(double location, SupportKind kind) {
    Measure m;
    m.support_kind = kind;
    m.atoms = {{location, 1.0}};
    m.validate();
    return m;
}

Measure Measure::from_atoms(std::vector<Atom> atoms, SupportKind kind) {
    Measure m;
    m.support_kind = kind;
    m.atoms = merge_atoms(std::move(atoms), 0.0);
    m.validate();
    return m;
}

Measure Measure::from_density(std::vector<double> grid, std::vector<double> density,
                              SupportKind kind, bool renormalize) {
    Measure m;
    m.support_kind = kind;
    m.grid = std::move(grid);
    m.density = std::move(density);
    if (renormalize) {
        double mass = m.density_mass();
        if (mass <= 0.0) throw ParameterError("density has nonpositive mass");
        for (double& d : m.density) d /= mass;
    }
    m.validate();
    return m;
}

Measure Measure::from_samples(std::vector<double> samples, SupportKind kind) {
    if (samples.empty()) throw ParameterError("empty sample set");
    Measure m;
    m.support_kind = kind;
    m.samples = std::move(samples);
    std::sort(m.samples.begin(), m.samples.end());
    m.sample_mass = 1.0;
    m.validate();
    return m;
}

void Measure::validate() const {
    for (const Atom& a : atoms) {
        if (!(a.weight >= 0.0)) throw ParameterError("negative atom weight");
        if (support_kind == SupportKind::NonNegative && a.location < 0.0)
            throw SupportError("atom at negative location in a measure on R+");
    }
    for (size_t i = 1; i < atoms.size(); ++i)
        if (!(atoms[i].location > atoms[i - 1].location))
            throw ParameterError("duplicate atom locations");
    if (grid.size() != density.size()) throw ParameterError("grid/density size mismatch");
    if (grid.size() == 1) throw ParameterError("density grid needs at least two nodes");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ParameterError("grid not strictly increasing");
    for (double d : density)
        if (!(d >= 0.0)) throw ParameterError("negative density value");
    if (support_kind == SupportKind::NonNegative) {
        if (!grid.empty() && grid.front() < -1e-12)
            throw SupportError("density grid extends below 0 in a measure on R+");
        for (double s : samples)
            if (s < 0.0) throw SupportError("negative sample in a measure on R+");
    }
    if (!samples.empty() && !(sample_mass > 0.0))
        throw ParameterError("samples present but sample_mass == 0");
    if (samples.empty() && sample_mass != 0.0)
        throw ParameterError("sample_mass without samples");
    double mass = total_mass();
    if (std::abs(mass - 1.0) > kMassTol)
        throw ParameterError("total mass " + std::to_string(mass) + " != 1");
}

double Measure::atom_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms) m += a.weight;
    return m;
}

double Measure::density_mass() const {
    double m = 0.0;
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    return m;
}

double Measure::total_mass() const { return atom_mass() + density_mass() + sample_mass; }

double Measure::support_min() const {
    double lo = std::numeric_limits<double>::infinity();
    if (!atoms.empty()) lo = std::min(lo, atoms.front().location);
    if (!grid.empty()) lo = std::min(lo, grid.front());
    if (!samples.empty()) lo = std::min(lo, samples.front());
    if (!std::isfinite(lo)) throw ParameterError("empty measure");
    return lo;
}

double Measure::support_max() const {
    double hi = -std::numeric_limits<double>::infinity();
    if (!atoms.empty()) hi = std::max(hi, atoms.back().location);
    if (!grid.empty()) hi = std::max(hi, grid.back());
    if (!samples.empty()) hi = std::max(hi, samples.back());
    if (!std::isfinite(hi)) throw ParameterError("empty measure");
    return hi;
}

double Measure::support_radius() const {
    return std::max(std::abs(support_min()), std::abs(support_max()));
}

double Measure::cdf(double x) const {
    double c = 0.0;
    for (const Atom& a : atoms) {
        if (a.location <= x) c += a.weight;
        else break;
    }
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        if (x <= grid[i]) break;
        double hi = std::min(x, grid[i + 1]);
        double t = (hi - grid[i]) / (grid[i + 1] - grid[i]);
        double dHi = density[i] + t * (density[i + 1] - density[i]);
        c += 0.5 * (density[i] + dHi) * (hi - grid[i]);
    }
    if (!samples.empty()) {
        auto it = std::upper_bound(samples.begin(), samples.end(), x);
        c += sample_mass * double(it - samples.begin()) / double(samples.size());
    }
    return c;
}

double Measure::cdf_left(double x) const {
    double c = cdf(x);
    for (const Atom& a : atoms)
        if (a.location == x) c -= a.weight;
    if (!samples.empty()) {
        auto range = std::equal_range(samples.begin(), samples.end(), x);
        c -= sample_mass * double(range.second - range.first) / double(samples.size());
    }
    return c;
}

double Measure::quantile(double p) const {
    p = clamp01(p);
    double lo = support_min(), hi = support_max();
    if (cdf(lo) >= p) return lo;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo) + std::abs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= p) hi = mid;
        else lo = mid;
    }
    return hi;
}

double Measure::density_at(double x) const {
    if (grid.empty() || x < grid.front() || x > grid.back()) return 0.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return density.front();
    if (it == grid.end()) return density.back();
    size_t i = size_t(it - grid.begin()) - 1;
    double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return density[i] + t * (density[i + 1] - density[i]);
}

std::vector<double> Measure::breakpoints() const {
    std::vector<double> pts;
    pts.reserve(atoms.size() + grid.size() + samples.size());
    for (const Atom& a : atoms) pts.push_back(a.location);
    pts.insert(pts.end(), grid.begin(), grid.end());
    pts.insert(pts.end(), samples.begin(), samples.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// --- materialize ------------------------------------------------------------

namespace {

// Cosine-clustered grid on [a, b].  Singular endpoints get a power-graded
// boundary layer: with grading exponent 5 the trapezoid rule stays second
// order across integrable 1/sqrt edges.
std::vector<double> edge_grid(double a, double b, int n, bool sing_lo, bool sing_hi) {
    std::vector<double> g;
    g.reserve(size_t(n) + 2 * size_t(n / 3));
    for (int j = 0; j < n; ++j) {
        double theta = kPi * (1.0 - double(j) / double(n - 1));
        g.push_back(0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta));
    }
    g.front() = a;
    g.back() = b;
    auto graded = [](double edge, double limit, int m) {
        std::vector<double> pts;  // strictly between edge and limit, toward edge
        pts.reserve(size_t(m));
        for (int j = 1; j < m; ++j) {
            double t = double(j) / double(m);
            pts.push_back(edge + (limit - edge) * t * t * t * t * t);
        }
        return pts;
    };
    int layer = std::max(48, n / 3);
    if (sing_lo) {
        double cut = a + 0.12 * (b - a);
        auto keep = std::upper_bound(g.begin(), g.end(), cut);
        std::vector<double> pts = graded(a, *keep, layer);
        g.erase(g.begin(), keep);
        g.insert(g.begin(), pts.begin(), pts.end());
    }
    if (sing_hi) {
        double cut = b - 0.12 * (b - a);
        auto keep = std::lower_bound(g.begin(), g.end(), cut);
        --keep;
        std::vector<double> pts = graded(b, *keep, layer);
        g.erase(keep + 1, g.end());
        g.insert(g.end(), pts.rbegin(), pts.rend());
    }
    return g;
}

Measure density_law(double a, double b, int n, bool sing_lo, bool sing_hi,
                    SupportKind kind, const std::function<double(double)>& f) {
    std::vector<double> grid = edge_grid(a, b, n, sing_lo, sing_hi);
    std::vector<double> dens(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) dens[i] = std::max(0.0, f(grid[i]));
    return Measure::from_density(std::move(grid), std::move(dens), kind, true);
}

}  // namespace

Measure materialize(const ParametricLaw& law, int grid_resolution) {
    using Tag = ParametricLaw::Tag;
    if (law.tag != Tag::Dirac && law.tag != Tag::SymmetricBernoulli && grid_resolution < 64)
        throw ParameterError("grid resolution must be >= 64");
    switch (law.tag) {
        case Tag::Dirac:
            return Measure::point_mass(law.p1, law.p1 >= 0.0 ? SupportKind::NonNegative
                                                             : SupportKind::RealLine);
        case Tag::SymmetricBernoulli:
            return Measure::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}, SupportKind::RealLine);
        case Tag::Semicircle: {
            double v = law.p1;
            if (!(v > 0.0)) throw ParameterError("semicircle variance must be > 0");
            double r = 2.0 * std::sqrt(v);
            return density_law(-r, r, grid_resolution, false, false, SupportKind::RealLine,
                               [v, r](double x) {
                                   double s = r * r - x * x;
                                   return s <= 0.0 ? 0.0 : std::sqrt(s) / (2.0 * kPi * v);
                               });
        }
        case Tag::MarchenkoPastur: {
            double lam = law.p1;
            if (!(lam > 0.0)) throw ParameterError("marchenko-pastur shape must be > 0");
            double sq = std::sqrt(lam);
            double a = (1.0 - sq) * (1.0 - sq), b = (1.0 + sq) * (1.0 + sq);
            bool sing_lo = a < 1e-12;
            Measure m = density_law(std::max(a, 0.0), b, grid_resolution, sing_lo, false,
                                    SupportKind::NonNegative, [lam, a, b](double x) {
                                        double s = (b - x) * (x - a);
                                        if (s <= 0.0 || x <= 0.0) return 0.0;
                                        return std::sqrt(s) / (2.0 * kPi * lam * x);
                                    });
            if (lam > 1.0) {
                double w = 1.0 - 1.0 / lam;
                for (double& d : m.density) d *= (1.0 - w);
                m.atoms = {{0.0, w}};
                m.validate();
            }
            return m;
        }
        case Tag::Arcsine: {
            double a = law.p1, b = law.p2;
            if (!(a < b)) throw ParameterError("arcsine requires a < b");
            return density_law(a, b, grid_resolution, true, true, SupportKind::RealLine,
                               [a, b](double x) {
                                   double s = (x - a) * (b - x);
                                   return s <= 0.0 ? 0.0 : 1.0 / (kPi * std::sqrt(s));
                               });
        }
        case Tag::ArcsinePositive: {
            double b = law.p1;
            if (!(b > 0.0)) throw ParameterError("arcsine-positive endpoint must be > 0");
            return density_law(0.0, b, grid_resolution, true, true, SupportKind::NonNegative,
                               [b](double x) {
                                   double s = x * (b - x);
                                   return s <= 0.0 ? 0.0 : 1.0 / (kPi * std::sqrt(s));
                               });
        }
        case Tag::Uniform: {
            double a = law.p1, b = law.p2;
            if (!(a < b)) throw ParameterError("uniform requires a < b");
            return density_law(a, b, grid_resolution, false, false,
                               a >= 0.0 ? SupportKind::NonNegative : SupportKind::RealLine,
                               [a, b](double) { return 1.0 / (b - a); });
        }
    }
    throw ParameterError("unknown law tag");
}

// --- functionals ------------------------------------------------------------

double moment(const Measure& mu, unsigned k) {
    double m = 0.0;
    for (const Atom& a : mu.atoms) m += a.weight * std::pow(a.location, double(k));
    // Exact integral of t^k times the linear density on each cell, expanded
    // about the cell midpoint: avoids the cancellation of x1^(k+1) - x0^(k+1)
    // on the narrow graded edge cells where the density slope is steep.
    for (size_t i = 0; i + 1 < mu.grid.size(); ++i) {
        double x0 = mu.grid[i], x1 = mu.grid[i + 1];
        double d0 = mu.density[i], d1 = mu.density[i + 1];
        double mid = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
        double slope = (d1 - d0) / (x1 - x0);
        double rho_m = 0.5 * (d0 + d1);
        // integral over s in [-h,h] of (rho_m + slope*s) * (mid+s)^k
        double binom = 1.0, cell = 0.0;
        for (unsigned j = 0; j <= k; ++j) {
            double mj = std::pow(mid, double(k - j));
            if (j % 2 == 0)
                cell += binom * mj * rho_m * 2.0 * std::pow(h, double(j + 1)) / (j + 1);
            else
                cell += binom * mj * slope * 2.0 * std::pow(h, double(j + 2)) / (j + 2);
            binom = binom * double(k - j) / double(j + 1);
        }
        m += cell;
    }
    if (!mu.samples.empty()) {
        double s = 0.0;
        for (double t : mu.samples) s += std::pow(t, double(k));
        m += mu.sample_mass * s / double(mu.samples.size());
    }
    return m;
}

double truncated_second_moment(const Measure& mu) {
    if (mu.support_kind != SupportKind::NonNegative)
        throw SupportError("truncated_second_moment requires a measure on R+");
    double m = 0.0;
    for (const Atom& a : mu.atoms)
        if (a.location <= 1.0) m += a.weight * a.location * a.location;
    for (size_t i = 0; i + 1 < mu.grid.size(); ++i) {
        double x0 = mu.grid[i], x1 = mu.grid[i + 1];
        double lo = std::max(x0, 0.0), hi = std::min(x1, 1.0);
        if (hi <= lo) continue;
        double d0 = mu.density[i], d1 = mu.density[i + 1];
        double slope = (d1 - d0) / (x1 - x0);
        double c0 = d0 - slope * x0;
        double p3 = (hi * hi * hi - lo * lo * lo) / 3.0;
        double p4 = (hi * hi * hi * hi - lo * lo * lo * lo) / 4.0;
        m += c0 * p3 + slope * p4;
    }
    if (!mu.samples.empty()) {
        double s = 0.0;
        for (double t : mu.samples)
            if (t <= 1.0) s += t * t;
        m += mu.sample_mass * s / double(mu.samples.size());
    }
    return m;
}

double tail_mass(const Measure& mu, double threshold) {
    return std::max(0.0, 1.0 - mu.cdf(threshold));
}

double harmonic_truncation(const Measure& mu, double y) {
    if (!(y > 0.0)) throw ParameterError("harmonic_truncation requires y > 0");
    if (mu.support_kind != SupportKind::NonNegative)
        throw SupportError("harmonic_truncation requires a measure on R+");
    auto kernel = [y](double t) { return y * t / (y + t); };
    double m = 0.0;
    for (const Atom& a : mu.atoms) m += a.weight * kernel(a.location);
    for (size_t i = 0; i + 1 < mu.grid.size(); ++i) {
        double x0 = mu.grid[i], x1 = mu.grid[i + 1];
        double d0 = mu.density[i], d1 = mu.density[i + 1];
        double h = 0.5 * (x1 - x0);
        double mid = 0.5 * (x0 + x1);
        double acc = 0.0;
        for (int q = 0; q < 8; ++q) {
            double t = mid + h * kGlNode[q];
            double d = d0 + (d1 - d0) * (t - x0) / (x1 - x0);
            acc += kGlWeight[q] * kernel(t) * d;
        }
        m += acc * h;
    }
    if (!mu.samples.empty()) {
        double s = 0.0;
        for (double t : mu.samples) s += kernel(t);
        m += mu.sample_mass * s / double(mu.samples.size());
    }
    return m;
}

// --- pushforwards -----------------------------------------------------------

Measure pushforward_square(const Measure& mu) {
    Measure out;
    out.support_kind = SupportKind::NonNegative;
    std::vector<Atom> atoms;
    for (const Atom& a : mu.atoms) atoms.push_back({a.location * a.location, a.weight});
    double scale = std::max(1.0, mu.support_radius());
    out.atoms = merge_atoms(std::move(atoms), 1e-12 * scale * scale);

    if (mu.has_density()) {
        std::vector<double> nodes;
        for (double x : mu.grid) nodes.push_back(x * x);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end(),
                                [&](double a, double b) {
                                    return std::abs(a - b) <= 1e-14 * scale * scale;
                                }),
                    nodes.end());
        if (!nodes.empty() && nodes.front() <= 0.0) nodes.erase(nodes.begin());
        // resolve the 1/sqrt(x) edge if the folded density is positive near 0
        if (!nodes.empty()) {
            double x1 = nodes.front();
            double f0 = mu.density_at(std::sqrt(x1)) + mu.density_at(-std::sqrt(x1));
            if (f0 > 0.0) {
                std::vector<double> extra;
                for (int j = 1; j < 96; ++j) {
                    double t = double(j) / 96.0;
                    extra.push_back(x1 * t * t * t * t * t);
                }
                nodes.insert(nodes.begin(), extra.begin(), extra.end());
            }
        }
        std::vector<double> dens(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            double s = std::sqrt(nodes[i]);
            double f = mu.density_at(s) + mu.density_at(-s);
            dens[i] = f / (2.0 * s);
        }
        double target = mu.density_mass();
        out.grid = std::move(nodes);
        out.density = std::move(dens);
        double mass = out.density_mass();
        if (mass > 0.0)
            for (double& d : out.density) d *= target / mass;
    }
    for (double t : mu.samples) out.samples.push_back(t * t);
    std::sort(out.samples.begin(), out.samples.end());
    out.sample_mass = mu.sample_mass;
    out.validate();
    return out;
}

Measure sqrt_symmetrize(const Measure& mu) {
    if (mu.support_kind != SupportKind::NonNegative)
        throw SupportError("sqrt_symmetrize requires a measure on R+");
    Measure out;
    out.support_kind = SupportKind::RealLine;
    std::vector<Atom> atoms;
    for (const Atom& a : mu.atoms) {
        if (a.location == 0.0) {
            atoms.push_back({0.0, a.weight});
        } else {
            double s = std::sqrt(a.location);
            atoms.push_back({-s, 0.5 * a.weight});
            atoms.push_back({s, 0.5 * a.weight});
        }
    }
    out.atoms = merge_atoms(std::move(atoms), 0.0);

    if (mu.has_density()) {
        std::vector<double> pos;
        for (double x : mu.grid)
            if (x > 0.0) pos.push_back(std::sqrt(x));
        std::sort(pos.begin(), pos.end());
        std::vector<double> nodes;
        for (auto it = pos.rbegin(); it != pos.rend(); ++it) nodes.push_back(-*it);
        bool zero_node = mu.grid.front() <= 0.0;
        std::vector<size_t> forced_zero;
        if (zero_node) {
            nodes.push_back(0.0);
        } else {
            // support stays away from 0: pin the density to 0 across the gap
            double inner = pos.front() * (1.0 - 1e-9);
            nodes.push_back(-inner);
            forced_zero.push_back(nodes.size() - 1);
            nodes.push_back(inner);
            forced_zero.push_back(nodes.size() - 1);
        }
        nodes.insert(nodes.end(), pos.begin(), pos.end());
        std::vector<double> dens(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            double s = std::abs(nodes[i]);
            dens[i] = s * mu.density_at(s * s);
        }
        for (size_t i : forced_zero) dens[i] = 0.0;
        double target = mu.density_mass();
        out.grid = std::move(nodes);
        out.density = std::move(dens);
        double mass = out.density_mass();
        if (mass > 0.0)
            for (double& d : out.density) d *= target / mass;
    }
    for (double t : mu.samples) {
        double s = std::sqrt(t);
        out.samples.push_back(-s);
        out.samples.push_back(s);
    }
    std::sort(out.samples.begin(), out.samples.end());
    out.sample_mass = mu.sample_mass;
    out.validate();
    return out;
}

Measure dilate(const Measure& mu, double c) {
    if (!(c > 0.0)) throw ParameterError("dilate requires c > 0");
    Measure out = mu;
    for (Atom& a : out.atoms) a.location *= c;
    for (double& x : out.grid) x *= c;
    for (double& d : out.density) d /= c;
    for (double& s : out.samples) s *= c;
    out.validate();
    return out;
}

// --- metrics ----------------------------------------------------------------

namespace {

std::vector<double> merged_candidates(const Measure& a, const Measure& b) {
    std::vector<double> pts = a.breakpoints();
    std::vector<double> pb = b.breakpoints();
    pts.insert(pts.end(), pb.begin(), pb.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> out;
    out.reserve(pts.size() * 2);
    for (size_t i = 0; i < pts.size(); ++i) {
        out.push_back(pts[i]);
        if (i + 1 < pts.size()) out.push_back(0.5 * (pts[i] + pts[i + 1]));
    }
    return out;
}

}  // namespace

double ks_distance(const Measure& mu1, const Measure& mu2) {
    double d = 0.0;
    for (double x : merged_candidates(mu1, mu2)) {
        d = std::max(d, std::abs(mu1.cdf(x) - mu2.cdf(x)));
        d = std::max(d, std::abs(mu1.cdf_left(x) - mu2.cdf_left(x)));
    }
    return d;
}

double wasserstein1(const Measure& mu1, const Measure& mu2) {
    std::vector<double> pts = merged_candidates(mu1, mu2);
    double w = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        // both CDFs are linear strictly between candidate points
        double a0 = mu1.cdf(pts[i]) - mu2.cdf(pts[i]);
        double a1 = mu1.cdf_left(pts[i + 1]) - mu2.cdf_left(pts[i + 1]);
        double h = pts[i + 1] - pts[i];
        if (a0 * a1 >= 0.0) {
            w += 0.5 * (std::abs(a0) + std::abs(a1)) * h;
        } else {
            double t = a0 / (a0 - a1);  // sign change
            w += 0.5 * std::abs(a0) * t * h + 0.5 * std::abs(a1) * (1.0 - t) * h;
        }
    }
    return w;
}

double levy_distance(const Measure& mu1, const Measure& mu2) {
    std::vector<double> pts = merged_candidates(mu1, mu2);
    // L <= eps iff for all x: F(x) <= G(x+eps)+eps and G(x) <= F(x+eps)+eps
    auto fits = [&](double eps) {
        for (double x : pts) {
            if (mu1.cdf(x) > mu2.cdf(x + eps) + eps + 1e-15) return false;
            if (mu2.cdf(x) > mu1.cdf(x + eps) + eps + 1e-15) return false;
        }
        return true;
    };
    double hi = ks_distance(mu1, mu2);
    if (fits(0.0)) return 0.0;
    double lo = 0.0;
    for (int i = 0; i < 60 && hi - lo > 1e-14; ++i) {
        double mid = 0.5 * (lo + hi);
        if (fits(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

double l1_density_distance(const Measure& mu1, const Measure& mu2) {
    std::vector<double> pts = merged_candidates(mu1, mu2);
    double l1 = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        // midpoint rule: exact for the piecewise-linear parts and immune to
        // the nodal jump at a grid boundary
        double mid = 0.5 * (pts[i] + pts[i + 1]);
        l1 += std::abs(mu1.density_at(mid) - mu2.density_at(mid)) * (pts[i + 1] - pts[i]);
    }
    // atoms contribute by weight mismatch
    std::vector<double> locs;
    for (const Atom& a : mu1.atoms) locs.push_back(a.location);
    for (const Atom& a : mu2.atoms) locs.push_back(a.location);
    std::sort(locs.begin(), locs.end());
    locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
    for (double x : locs) {
        double w1 = 0.0, w2 = 0.0;
        for (const Atom& a : mu1.atoms)
            if (a.location == x) w1 = a.weight;
        for (const Atom& a : mu2.atoms)
            if (a.location == x) w2 = a.weight;
        l1 += std::abs(w1 - w2);
    }
    return l1;
}

bool is_symmetric(const Measure& mu, double tol) {
    if (mu.support_kind != SupportKind::RealLine)
        throw SupportError("is_symmetric requires a real-line measure");
    for (double x : mu.breakpoints()) {
        double t = std::abs(x);
        double left_tail = mu.cdf(-t);
        double right_tail = 1.0 - mu.cdf_left(t);
        if (std::abs(left_tail - right_tail) > tol) return false;
    }
    return true;
}

}  // namespace freeprob
