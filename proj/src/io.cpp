#include "freeprob/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

SupportKind support_from_json(const json& j, double lowest) {
    if (j.contains("support")) {
        std::string s = j.at("support").get<std::string>();
        if (s == "real") return SupportKind::RealLine;
        if (s == "nonnegative") return SupportKind::NonNegative;
        throw ParameterError("unknown support kind: " + s);
    }
    return lowest >= 0.0 ? SupportKind::NonNegative : SupportKind::RealLine;
}

ParametricLaw parametric_from_json(const json& j) {
    std::string family = j.at("family").get<std::string>();
    std::vector<double> p = j.value("params", std::vector<double>{});
    auto need = [&](std::size_t n) {
        if (p.size() != n)
            throw ParameterError("family " + family + " takes " + std::to_string(n) +
                                 " parameter(s)");
    };
    if (family == "dirac") { need(1); return ParametricLaw::dirac(p[0]); }
    if (family == "symmetric-bernoulli") { need(0); return ParametricLaw::symmetric_bernoulli(); }
    if (family == "semicircle") { need(1); return ParametricLaw::semicircle(p[0]); }
    if (family == "marchenko-pastur") { need(1); return ParametricLaw::marchenko_pastur(p[0]); }
    if (family == "arcsine") { need(2); return ParametricLaw::arcsine(p[0], p[1]); }
    if (family == "arcsine-positive") { need(1); return ParametricLaw::arcsine_positive(p[0]); }
    if (family == "uniform") { need(2); return ParametricLaw::uniform(p[0], p[1]); }
    throw ParameterError("unknown parametric family: " + family);
}

std::vector<Atom> atoms_from_json(const json& j) {
    std::vector<Atom> atoms;
    for (const json& a : j)
        atoms.push_back({a.at("location").get<double>(), a.at("weight").get<double>()});
    return atoms;
}

json atoms_to_json(const std::vector<Atom>& atoms) {
    json out = json::array();
    for (const Atom& a : atoms) out.push_back({{"location", a.location}, {"weight", a.weight}});
    return out;
}

void csv_row(std::ostream& out, const double* vals, int n) {
    char buf[64];
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", vals[i]);
        out << (i ? "," : "") << buf;
    }
    out << "\n";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converges: return "converges";
        case Verdict::Diverges: return "diverges";
        default: return "inconclusive";
    }
}

}  // namespace

Measure measure_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "dirac") {
        double c = j.at("location").get<double>();
        return Measure::point_mass(c, support_from_json(j, c));
    }
    if (type == "atoms") {
        std::vector<Atom> atoms = atoms_from_json(j.at("atoms"));
        double lo = 0.0;
        for (const Atom& a : atoms) lo = std::min(lo, a.location);
        return Measure::from_atoms(std::move(atoms), support_from_json(j, lo));
    }
    if (type == "density") {
        std::vector<double> grid = j.at("grid").get<std::vector<double>>();
        std::vector<double> dens = j.at("density").get<std::vector<double>>();
        if (grid.empty()) throw ParameterError("density measure needs a nonempty grid");
        double lo = grid.front();
        Measure m = Measure::from_density(std::move(grid), std::move(dens),
                                          support_from_json(j, lo), !j.contains("atoms"));
        if (j.contains("atoms")) {
            m.atoms = atoms_from_json(j.at("atoms"));
            m.validate();
        }
        return m;
    }
    if (type == "samples") {
        std::vector<double> samples = j.at("samples").get<std::vector<double>>();
        if (samples.empty()) throw ParameterError("sample measure needs samples");
        double lo = *std::min_element(samples.begin(), samples.end());
        return Measure::from_samples(std::move(samples), support_from_json(j, lo));
    }
    if (type == "parametric") {
        return materialize(parametric_from_json(j), j.value("resolution", 512));
    }
    throw ParameterError("unknown measure type: " + type);
}

json measure_to_json(const Measure& mu) {
    json j;
    j["support"] = mu.support_kind == SupportKind::NonNegative ? "nonnegative" : "real";
    if (mu.is_degenerate()) {
        j["type"] = "dirac";
        j["location"] = mu.atoms[0].location;
    } else if (mu.has_density()) {
        j["type"] = "density";
        j["grid"] = mu.grid;
        j["density"] = mu.density;
        if (!mu.atoms.empty()) j["atoms"] = atoms_to_json(mu.atoms);
    } else if (!mu.samples.empty()) {
        j["type"] = "samples";
        j["samples"] = mu.samples;
    } else {
        j["type"] = "atoms";
        j["atoms"] = atoms_to_json(mu.atoms);
    }
    return j;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open input file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParameterError("malformed JSON in " + path + ": " + e.what());
    }
}

Measure load_measure(const std::string& path) {
    try {
        return measure_from_json(load_json(path));
    } catch (const json::exception& e) {
        throw ParameterError("bad measure description in " + path + ": " + e.what());
    }
}

SeriesSpec series_spec_from_json(const json& j, int default_horizon) {
    const json& terms = j.at("terms");
    SeriesSpec spec;
    if (terms.is_array()) {
        std::vector<Measure> list;
        for (const json& t : terms) list.push_back(measure_from_json(t));
        spec = SeriesSpec::explicit_terms(std::move(list));
    } else {
        std::string family = terms.at("family").get<std::string>();
        if (family != "scaled-haar") throw ParameterError("unknown series family: " + family);
        int horizon = j.value("horizon", default_horizon);
        std::string scale = terms.at("scale").get<std::string>();
        if (scale == "2^-n")
            spec = SeriesSpec::scaled_haar_geometric(horizon);
        else if (scale == "n^-p")
            spec = SeriesSpec::scaled_haar_power(terms.at("p").get<double>(), horizon);
        else
            throw ParameterError("unknown scale rule: " + scale);
    }
    if (j.contains("tail_atoms")) {
        const json& a = j.at("tail_atoms");
        spec.with_tail_atoms(a.at("location").get<double>(), a.at("weight").get<double>(),
                             a.value("decay", 0.0));
    }
    return spec;
}

json convergence_report_to_json(const ConvergenceReport& rep) {
    json j;
    j["verdict"] = verdict_name(rep.verdict);
    j["series_a"] = rep.series_a;
    j["series_b"] = rep.series_b;
    j["nu_distances"] = rep.nu_distances;
    j["probe_y"] = rep.probe_y;
    j["phiphi_sums"] = rep.phiphi_sums;
    json nus = json::array();
    for (const Measure& m : rep.nu) nus.push_back(measure_to_json(m));
    j["nu"] = nus;
    return j;
}

json ensemble_report_to_json(const EnsembleReport& rep, int histogram_bins) {
    if (histogram_bins < 1) throw ParameterError("need at least one histogram bin");
    json j;
    j["trials"] = rep.trials;
    j["ks"] = rep.ks;
    j["wasserstein"] = rep.wasserstein;
    double lo = std::min(rep.esd.support_min(), rep.reference.support_min());
    double hi = std::max(rep.esd.support_max(), rep.reference.support_max());
    if (hi <= lo) hi = lo + 1.0;
    std::vector<double> edges(histogram_bins + 1), emp(histogram_bins), ref(histogram_bins);
    for (int i = 0; i <= histogram_bins; ++i)
        edges[i] = lo + (hi - lo) * i / histogram_bins;
    for (int i = 0; i < histogram_bins; ++i) {
        emp[i] = rep.esd.cdf(edges[i + 1]) - rep.esd.cdf_left(edges[i]);
        ref[i] = rep.reference.cdf(edges[i + 1]) - rep.reference.cdf_left(edges[i]);
    }
    j["histogram"] = {{"edges", edges}, {"empirical", emp}, {"reference", ref}};
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

void write_measure_csv(std::ostream& out, const Measure& mu, int fill_points) {
    if (fill_points < 2) throw ParameterError("need at least two fill points");
    std::vector<double> xs = mu.breakpoints();
    double lo = mu.support_min(), hi = mu.support_max();
    if (hi <= lo) hi = lo + 1.0;
    for (int i = 0; i < fill_points; ++i)
        xs.push_back(lo + (hi - lo) * i / (fill_points - 1));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    out << "x,cdf,pdf\n";
    for (double x : xs) {
        double row[3] = {x, mu.cdf(x), mu.density_at(x)};
        csv_row(out, row, 3);
    }
}

void write_transform_csv(std::ostream& out,
                         const std::vector<std::pair<cplx, cplx>>& rows) {
    out << "re_z,im_z,re_f,im_f\n";
    for (const auto& [z, f] : rows) {
        double row[4] = {z.real(), z.imag(), f.real(), f.imag()};
        csv_row(out, row, 4);
    }
}

}  // namespace freeprob
