#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "freeprob/freeconv.hpp"
#include "freeprob/matrixmodel.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/threeseries.hpp"

namespace freeprob {

using json = nlohmann::json;

/// Tagged measure description:
///   {"type": "dirac", "location": c}
///   {"type": "atoms", "atoms": [{"location": x, "weight": w}, ...]}
///   {"type": "density", "grid": [...], "density": [...], "atoms": [...]?}
///   {"type": "samples", "samples": [...]}
///   {"type": "parametric", "family": "dirac" | "symmetric-bernoulli" |
///    "semicircle" | "marchenko-pastur" | "arcsine" | "arcsine-positive" |
///    "uniform", "params": [...], "resolution": n?}
/// All forms accept "support": "real" | "nonnegative"; when absent the kind is
/// inferred (nonnegative iff the support lies in [0, inf)).
Measure measure_from_json(const json& j);
json measure_to_json(const Measure& mu);

/// Parse a file; ParameterError on malformed JSON (message carries the
/// parser's line/column) or a missing file (message carries the path).
json load_json(const std::string& path);
Measure load_measure(const std::string& path);

/// Series description: {"terms": {"family": "scaled-haar", "scale": "2^-n" |
/// "n^-p", "p": ...} | [measure objects]}, optional "horizon" and
/// "tail_atoms": {"location", "weight", "decay"}.
SeriesSpec series_spec_from_json(const json& j, int default_horizon);

json convergence_report_to_json(const ConvergenceReport& rep);
json ensemble_report_to_json(const EnsembleReport& rep, int histogram_bins = 64);

/// Deterministic serialization (2-space indent, trailing newline); the same
/// value always produces the same bytes.
void write_json_file(const std::string& path, const json& j);

/// "x,cdf,pdf" rows on the measure's breakpoints plus a uniform fill,
/// fixed %.12g formatting.
void write_measure_csv(std::ostream& out, const Measure& mu, int fill_points = 257);

/// "re_z,im_z,re_f,im_f" rows, fixed %.12g formatting.
void write_transform_csv(std::ostream& out,
                         const std::vector<std::pair<cplx, cplx>>& rows);

}  // namespace freeprob
