#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "collarkit/fields.hpp"

namespace collarkit {

/// Metric files hold the log-conformal factor v as complex orthonormal
/// spherical-harmonic coefficients (Condon-Shortley phase):
///
///   {"lmax": L, "scale": c2, "coefficients": [[l, m, re, im], ...]}
///
/// v = sum c_lm Y_l^m. Reality of v means c_{l,-m} = (-1)^m conj(c_lm); files
/// normally list m >= 0 only, and m < 0 entries must agree with that relation.
/// Entries may also be objects {"l", "m", "re", "im"}.
struct MetricFile {
  int lmax = 0;
  double scale = 1.0;
  Spectrum v;  // real basis, see Spectrum
};

MetricFile parse_metric_json(const std::string& text);
MetricFile read_metric_file(const std::filesystem::path& path);
std::string metric_to_json(const MetricFile& file);

/// Samples the file's v on a grid. Throws DomainError when the file's band
/// limit exceeds the grid's.
ConformalMetric to_metric(const MetricFile& file, GridPtr grid);
/// Spectral coefficients of the metric's v, truncated to its grid.
MetricFile from_metric(const ConformalMetric& metric);

/// Real-basis coefficient for the complex pair (re, im) at (l, m >= 0). See
/// the conversion notes in metric_io.cpp.
void set_complex_coefficient(Spectrum& s, int l, int m, double re, double im);

/// CSV with header theta,phi,value; one row per node in grid order.
void write_field_csv(std::ostream& os, const ScalarField& f);

}  // namespace collarkit
