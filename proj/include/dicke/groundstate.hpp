#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dicke/model.hpp"

namespace dicke {

// s_a = (cos theta1, 0, sin theta1), s_b = (cos theta2, 0, -sin theta2).
struct AngleState {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double a() const { return 0.5 * (theta1 + theta2); }
  double b() const { return 0.5 * (theta1 - theta2); }
  static AngleState from_ab(double a, double b) { return {a + b, a - b}; }
};

AngleState angle_state_of(const MeanFieldState& state);
// Closed-system spins with the field at its energy-minimizing value.
MeanFieldState closed_system_state(const AngleState& angles, const ModelParams& params);

// Energy per spin of the closed system; kappa is ignored.
double gs_energy(const AngleState& angles, const ModelParams& params);
Eigen::Vector2d gs_gradient(const AngleState& angles, const ModelParams& params);
Eigen::Matrix2d gs_hessian(const AngleState& angles, const ModelParams& params);

inline constexpr double kHessianTol = 1e-12;
inline constexpr double kEnergyTieTol = 1e-12;

bool hessian_positive(const Eigen::Matrix2d& h);

struct GroundBranch {
  PhaseLabel phase = PhaseLabel::PN;
  AngleState angle_state;
  double energy = 0.0;
  bool hessian_stable = false;
  bool exists = false;
  bool principal = true;
  OrderParameters order;
  std::string note;
};

std::vector<GroundBranch> gs_branches(const ModelParams& params);

struct GroundPhase {
  PhaseLabel label = PhaseLabel::Unclassified;
  GroundBranch branch;
};

GroundPhase gs_phase(const ModelParams& params);

struct GroundCriticalCouplings {
  double j_c = 0.0;
  std::optional<double> g_c0, g_c1, g_c2, g_c3;
  std::optional<std::pair<double, double>> tricritical;  // (J, g)
};

GroundCriticalCouplings gs_critical_couplings(const ModelParams& params);

}  // namespace dicke
