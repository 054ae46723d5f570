#pragma once

#include <utility>

#include "symmetra/incompat.hpp"

namespace symmetra {

// A heuristic lower bound on a threshold can flag a candidate dagger but can
// never certify one (the true threshold might still beat the dichotomic
// bound the other way).
enum class DaggerStatus { None, Candidate, Certified };

struct SteeringReport {
  double isotropicThreshold = 0.0;
  double wernerThreshold = 0.0;
  double dichotomicIso = 0.0;
  double dichotomicWer = 0.0;
  bool beatsDichotomicIso = false;  // strict: isotropicThreshold < dichotomicIso
  bool beatsDichotomicWer = false;  // strict: wernerThreshold < dichotomicWer
  DaggerStatus daggerIso = DaggerStatus::None;
  DaggerStatus daggerWer = DaggerStatus::None;
};

// Identity on (alphaStar, betaStar): the isotropic-state steering threshold
// is alpha*, the Werner-state threshold is beta*.
std::pair<double, double> steeringThresholds(const RobustnessReport& rep);

// Best visibility reachable with the infinite set of dichotomic
// measurements: 1 - d^{-1/(d-1)} for isotropic states and
// (d-1)^2 [1 - (1-1/d)^{1/(d-1)}] for Werner states.
double dichotomicIsotropicBound(int d);
double dichotomicWernerBound(int d);

// Strict comparison of the report's thresholds against the dichotomic
// bounds; exact certified thresholds earn Certified, heuristic bounds at
// most Candidate.
SteeringReport flagBeatsDichotomic(const RobustnessReport& rep, int d);

}  // namespace symmetra
