#include "collarkit/metric_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>

#include "collarkit/errors.hpp"
#include "collarkit/format.hpp"

namespace collarkit {

using nlohmann::json;

namespace {

constexpr double kRealityTolerance = 1e-12;

struct Complex {
  double re = 0.0;
  double im = 0.0;
};

int sign_of_order(int m) { return (m % 2 == 0) ? 1 : -1; }

// Complex Y_l^m (Condon-Shortley) = (-1)^m Pbar_lm e^{i m ph}, with Pbar the
// phase-free normalized Legendre function used by Spectrum. Then
// c Y_l^m + conj(c) (-1)^m Y_l^-m = 2 Re(c Y_l^m), which in the real basis has
// coefficients sqrt(2) (-1)^m re on the cosine and -sqrt(2) (-1)^m im on the
// sine harmonic.
Complex complex_coefficient(const Spectrum& s, int l, int m) {
  if (m == 0) return {s(l, 0), 0.0};
  const double f = sign_of_order(m) / std::numbers::sqrt2;
  return {f * s(l, m), -f * s(l, -m)};
}

Complex read_entry(const json& e, int& l, int& m) {
  if (e.is_array()) {
    if (e.size() != 4) throw ParseError("metric coefficient entries must have 4 elements [l, m, re, im]");
    l = e[0].get<int>();
    m = e[1].get<int>();
    return {e[2].get<double>(), e[3].get<double>()};
  }
  if (e.is_object()) {
    for (const auto& [key, value] : e.items()) {
      if (key != "l" && key != "m" && key != "re" && key != "im") throw ParseError("unknown coefficient key '" + key + "'");
    }
    l = e.at("l").get<int>();
    m = e.at("m").get<int>();
    return {e.at("re").get<double>(), e.value("im", 0.0)};
  }
  throw ParseError("metric coefficient entries must be arrays or objects");
}

}  // namespace

void set_complex_coefficient(Spectrum& s, int l, int m, double re, double im) {
  if (m == 0) {
    s(l, 0) = re;
    return;
  }
  const double f = std::numbers::sqrt2 * sign_of_order(m);
  s(l, m) = f * re;
  s(l, -m) = -f * im;
}

MetricFile parse_metric_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed metric JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("metric file must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "lmax" && key != "scale" && key != "coefficients") throw ParseError("unknown metric key '" + key + "'");
  }

  MetricFile out;
  try {
    out.lmax = doc.at("lmax").get<int>();
    out.scale = doc.value("scale", 1.0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("metric header: ") + e.what());
  }
  if (out.lmax < 0) throw ParseError("lmax must be nonnegative");
  if (!(out.scale > 0.0) || !std::isfinite(out.scale)) throw ParseError("scale must be positive and finite");

  std::map<std::pair<int, int>, Complex> entries;
  try {
    for (const auto& e : doc.value("coefficients", json::array())) {
      int l = 0, m = 0;
      const Complex c = read_entry(e, l, m);
      if (l < 0 || l > out.lmax || std::abs(m) > l) {
        throw ParseError("coefficient (l=" + std::to_string(l) + ", m=" + std::to_string(m) + ") outside lmax " +
                         std::to_string(out.lmax));
      }
      if (!std::isfinite(c.re) || !std::isfinite(c.im)) throw ParseError("non-finite coefficient");
      if (!entries.emplace(std::pair{l, m}, c).second) {
        throw ParseError("duplicate coefficient (l=" + std::to_string(l) + ", m=" + std::to_string(m) + ")");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("metric coefficients: ") + e.what());
  }

  out.v = Spectrum(out.lmax);
  for (const auto& [lm, c] : entries) {
    const auto [l, m] = lm;
    if (m == 0) {
      if (std::abs(c.im) > kRealityTolerance) throw ParseError("m = 0 coefficient must be real for a real v");
      set_complex_coefficient(out.v, l, 0, c.re, 0.0);
    } else if (m > 0) {
      set_complex_coefficient(out.v, l, m, c.re, c.im);
    } else {
      const int s = sign_of_order(m);
      const Complex implied{s * c.re, -s * c.im};
      if (auto it = entries.find({l, -m}); it != entries.end()) {
        if (std::abs(it->second.re - implied.re) > kRealityTolerance ||
            std::abs(it->second.im - implied.im) > kRealityTolerance) {
          throw ParseError("coefficients (l=" + std::to_string(l) + ", m=+-" + std::to_string(-m) +
                           ") violate the reality condition");
        }
      } else {
        set_complex_coefficient(out.v, l, -m, implied.re, implied.im);
      }
    }
  }
  return out;
}

MetricFile read_metric_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open metric file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_metric_json(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string metric_to_json(const MetricFile& file) {
  json coeffs = json::array();
  for (int l = 0; l <= file.v.lmax(); ++l) {
    for (int m = 0; m <= l; ++m) {
      const Complex c = complex_coefficient(file.v, l, m);
      if (c.re == 0.0 && c.im == 0.0) continue;
      coeffs.push_back(json::array({l, m, c.re, c.im}));
    }
  }
  json doc;
  doc["lmax"] = file.lmax;
  doc["scale"] = file.scale;
  doc["coefficients"] = std::move(coeffs);
  return doc.dump(2) + "\n";
}

ConformalMetric to_metric(const MetricFile& file, GridPtr grid) {
  for (int l = grid->lmax() + 1; l <= file.v.lmax(); ++l) {
    for (int m = -l; m <= l; ++m) {
      if (file.v(l, m) != 0.0) {
        throw DomainError("metric file has degree " + std::to_string(l) + " content above grid lmax " +
                          std::to_string(grid->lmax()));
      }
    }
  }
  return {ScalarField::from_spectrum(std::move(grid), file.v), file.scale};
}

MetricFile from_metric(const ConformalMetric& metric) {
  MetricFile out;
  out.lmax = metric.grid().lmax();
  out.scale = metric.scale;
  out.v = metric.v.spectrum();
  return out;
}

void write_field_csv(std::ostream& os, const ScalarField& f) {
  const SphereGrid& g = f.grid();
  os << "theta,phi,value\n";
  for (int i = 0; i < g.nlat(); ++i) {
    for (int j = 0; j < g.nlon(); ++j) {
      os << format_double(g.theta(i)) << ',' << format_double(g.phi(j)) << ',' << format_double(f[g.index(i, j)])
         << '\n';
    }
  }
}

}  // namespace collarkit
