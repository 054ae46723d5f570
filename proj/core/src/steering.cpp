#include "symmetra/steering.hpp"

#include <cmath>

#include "symmetra/errors.hpp"

namespace symmetra {
namespace {

void requireDim(int d) {
  if (d < 2)
    throw InvariantViolation("dichotomic bounds require dimension >= 2");
}

DaggerStatus daggerOf(bool beats, bool exact, bool certified) {
  if (!beats) return DaggerStatus::None;
  return (exact && certified) ? DaggerStatus::Certified
                              : DaggerStatus::Candidate;
}

}  // namespace

std::pair<double, double> steeringThresholds(const RobustnessReport& rep) {
  return {rep.alphaStar, rep.betaStar};
}

double dichotomicIsotropicBound(int d) {
  requireDim(d);
  return 1.0 - std::pow(static_cast<double>(d), -1.0 / (d - 1));
}

double dichotomicWernerBound(int d) {
  requireDim(d);
  const double base = 1.0 - 1.0 / d;
  return (d - 1.0) * (d - 1.0) * (1.0 - std::pow(base, 1.0 / (d - 1)));
}

SteeringReport flagBeatsDichotomic(const RobustnessReport& rep, int d) {
  requireDim(d);
  SteeringReport s;
  std::tie(s.isotropicThreshold, s.wernerThreshold) = steeringThresholds(rep);
  s.dichotomicIso = dichotomicIsotropicBound(d);
  s.dichotomicWer = dichotomicWernerBound(d);
  s.beatsDichotomicIso = s.isotropicThreshold < s.dichotomicIso;
  s.beatsDichotomicWer = s.wernerThreshold < s.dichotomicWer;
  s.daggerIso = daggerOf(s.beatsDichotomicIso,
                         rep.alphaBound == BoundKind::Exact,
                         rep.formulaCertified);
  s.daggerWer = daggerOf(s.beatsDichotomicWer,
                         rep.betaBound == BoundKind::Exact,
                         rep.formulaCertified);
  return s;
}

}  // namespace symmetra
