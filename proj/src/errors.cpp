#include "collarkit/errors.hpp"

#include <sstream>

namespace collarkit {

namespace {
template <class... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << args);
  return os.str();
}
}  // namespace

NonZeroMean::NonZeroMean(double mean, double tolerance)
    : Error(cat("forcing has nonzero mean ", mean, " (tolerance ", tolerance, ")")), mean_(mean) {}

CurvaturePositivityLost::CurvaturePositivityLost(double t, std::size_t node, double value)
    : Error(cat("Gauss curvature not positive at t=", t, ", node ", node, ": K=", value)), t_(t), node_(node) {}

NotRepresentable::NotRepresentable(double t, double residual)
    : Error(cat("interpolated metric not representable at t=", t, ": projection residual ", residual)) {}

MassTooLarge::MassTooLarge(double m, double r_o) : Error(cat("mass m=", m, " exceeds r_o/2 = ", 0.5 * r_o)) {}

Inadmissible::Inadmissible(std::string condition, double margin)
    : Error(cat("inadmissible collar parameters: ", condition, " fails (value ", margin, ")")),
      condition_(std::move(condition)),
      margin_(margin) {}

}  // namespace collarkit
