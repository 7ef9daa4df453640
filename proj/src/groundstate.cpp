#include "dicke/groundstate.hpp"

#include <algorithm>
#include <cmath>

#include "dicke/steadystate.hpp"

namespace dicke {

AngleState angle_state_of(const MeanFieldState& state) {
  const auto t = angles_of(state);
  return {t[0], t[1]};
}

MeanFieldState closed_system_state(const AngleState& angles, const ModelParams& params) {
  return state_from_angles(angles.theta1, angles.theta2, params.with_kappa(0.0));
}

double gs_energy(const AngleState& s, const ModelParams& p) {
  const double ax = std::cos(s.theta1), az = std::sin(s.theta1);
  const double bx = std::cos(s.theta2), bz = -std::sin(s.theta2);
  const double u = ax + bx;
  const double ising = p.axis == IsingAxis::Transverse ? az * bz : ax * bx;
  return -(p.g * p.g / (4.0 * p.omega)) * u * u + p.j * ising + (p.qubit_freq / 4.0) * (az + bz);
}

Eigen::Vector2d gs_gradient(const AngleState& s, const ModelParams& p) {
  const double c1 = std::cos(s.theta1), s1 = std::sin(s.theta1);
  const double c2 = std::cos(s.theta2), s2 = std::sin(s.theta2);
  const double k = p.g * p.g / (2.0 * p.omega);
  const double u = c1 + c2;
  const double q4 = p.qubit_freq / 4.0;
  Eigen::Vector2d grad(k * u * s1 + q4 * c1, k * u * s2 - q4 * c2);
  if (p.axis == IsingAxis::Transverse) {
    grad(0) += -p.j * c1 * s2;
    grad(1) += -p.j * s1 * c2;
  } else {
    grad(0) += -p.j * s1 * c2;
    grad(1) += -p.j * c1 * s2;
  }
  return grad;
}

Eigen::Matrix2d gs_hessian(const AngleState& s, const ModelParams& p) {
  const double c1 = std::cos(s.theta1), s1 = std::sin(s.theta1);
  const double c2 = std::cos(s.theta2), s2 = std::sin(s.theta2);
  const double k = p.g * p.g / (2.0 * p.omega);
  const double u = c1 + c2;
  const double q4 = p.qubit_freq / 4.0;
  Eigen::Matrix2d h;
  h(0, 0) = k * (u * c1 - s1 * s1) - q4 * s1;
  h(1, 1) = k * (u * c2 - s2 * s2) + q4 * s2;
  h(0, 1) = -k * s1 * s2;
  if (p.axis == IsingAxis::Transverse) {
    h(0, 0) += p.j * s1 * s2;
    h(1, 1) += p.j * s1 * s2;
    h(0, 1) += -p.j * c1 * c2;
  } else {
    h(0, 0) += -p.j * c1 * c2;
    h(1, 1) += -p.j * c1 * c2;
    h(0, 1) += p.j * s1 * s2;
  }
  h(1, 0) = h(0, 1);
  return h;
}

bool hessian_positive(const Eigen::Matrix2d& h) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > kHessianTol;
}

std::vector<GroundBranch> gs_branches(const ModelParams& params) {
  const ModelParams closed = params.with_kappa(0.0);
  std::vector<GroundBranch> out;
  for (const auto& b : candidate_branches(closed)) {
    GroundBranch gb;
    gb.phase = b.phase;
    gb.exists = b.exists;
    gb.principal = b.principal;
    gb.note = b.note;
    if (b.exists) {
      gb.angle_state = angle_state_of(b.state);
      gb.energy = gs_energy(gb.angle_state, closed);
      gb.hessian_stable = hessian_positive(gs_hessian(gb.angle_state, closed));
      gb.order = order_parameters(b.state);
      if (closed.axis == IsingAxis::Longitudinal && b.phase == PhaseLabel::AFS) {
        gb.note = "not a local minimum";
      }
    }
    out.push_back(std::move(gb));
  }
  return out;
}

GroundPhase gs_phase(const ModelParams& params) {
  const auto branches = gs_branches(params);
  auto pick = [&](bool require_minimum) -> const GroundBranch* {
    const GroundBranch* best = nullptr;
    for (const auto& b : branches) {
      if (!b.exists || (require_minimum && !b.hessian_stable)) continue;
      if (!best || b.energy < best->energy - kEnergyTieTol) {
        best = &b;
      } else if (std::abs(b.energy - best->energy) <= kEnergyTieTol &&
                 b.phase == PhaseLabel::AFN && best->phase != PhaseLabel::AFN) {
        best = &b;
      }
    }
    return best;
  };
  GroundPhase out;
  if (const GroundBranch* b = pick(true)) {
    out.label = b->phase;
    out.branch = *b;
  } else if (const GroundBranch* fallback = pick(false)) {
    out.label = fallback->phase;
    out.branch = *fallback;
    out.branch.note = "no strict local minimum; lowest stationary energy";
  }
  return out;
}

GroundCriticalCouplings gs_critical_couplings(const ModelParams& p) {
  GroundCriticalCouplings c;
  const double om = p.omega, q = p.qubit_freq, j = p.j;
  auto root = [](double radicand) -> std::optional<double> {
    if (radicand < 0.0) return std::nullopt;
    return std::sqrt(radicand);
  };
  c.j_c = q / 4.0;
  if (p.axis == IsingAxis::Transverse) {
    c.g_c1 = root(om * (q - 4.0 * j) / 4.0);
    if (j > 0.0) c.g_c2 = root(om * (16.0 * j * j - q * q) / (16.0 * j));
  } else {
    c.g_c0 = root(2.0 * om * j);
    c.g_c1 = root(om * (j + q / 4.0));
    c.g_c2 = root(om * j * (16.0 * j * j + q * q) / (q * q));
    c.g_c3 = root(om * (j + std::cbrt(j * q * q / 16.0)));
    c.tricritical = std::pair{q / 4.0, std::sqrt(om * q / 2.0)};
  }
  return c;
}

}  // namespace dicke
