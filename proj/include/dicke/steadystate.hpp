#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

struct SteadyBranch {
  PhaseLabel phase = PhaseLabel::PN;
  MeanFieldState state;
  int partner_sign = 1;     // selects the x-flipped partner (or the swapped one for AFN)
  int sublattice_sign = 1;  // second selector for the fourfold AFS family
  bool exists = false;
  double residual = 0.0;
  bool principal = true;  // false for inverted, zero-field and spurious-root solutions
  bool refined = false;
  std::string note;
};

// omega g^2 / (omega^2 + kappa^2): the Ising shift induced by eliminating the field.
double cavity_shift(const ModelParams& params);
// J + shift (transverse) or J - shift (longitudinal).
double effective_coupling(const ModelParams& params);

// Steady-state field for a given total x-polarization s_a^x + s_b^x.
double steady_alpha_r(double sum_x, const ModelParams& params);
double steady_alpha_i(double sum_x, const ModelParams& params);

// s_a = (cos t1, 0, sin t1), s_b = (cos t2, 0, -sin t2), field at its steady value.
MeanFieldState state_from_angles(double theta1, double theta2, const ModelParams& params);
std::array<double, 2> angles_of(const MeanFieldState& state);

// Stationarity of the spins with the field already eliminated.
std::array<double, 2> reduced_equations(double theta1, double theta2, const ModelParams& params);
std::array<std::array<double, 2>, 2> reduced_jacobian(double theta1, double theta2,
                                                      const ModelParams& params);

// Every closed-form stationary state, with non-existent families flagged.
std::vector<SteadyBranch> candidate_branches(const ModelParams& params);
std::vector<SteadyBranch> existing_branches(const ModelParams& params);

// Max-norm of the full equations of motion.
double residual(const MeanFieldState& state, const ModelParams& params);

class RefineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRefineTol = 1e-13;
inline constexpr int kRefineMaxIter = 50;

// Newton on the reduced angle system. Returns the input flagged unrefined on divergence;
// throws RefineError when the Newton matrix is singular.
SteadyBranch refine(const SteadyBranch& branch, const ModelParams& params);

std::string describe(const SteadyBranch& branch);
std::string describe(const ModelParams& params);

}  // namespace dicke
