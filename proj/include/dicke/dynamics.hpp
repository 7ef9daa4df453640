#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

// Flat ordering: alpha_r, alpha_i, s_a(x,y,z), s_b(x,y,z).
using StateVector = std::array<double, 8>;

StateVector to_vector(const MeanFieldState& state);
MeanFieldState from_vector(const StateVector& v);

// Time derivative of every component, returned in state layout.
MeanFieldState eom_rhs(const MeanFieldState& state, const ModelParams& params);
StateVector eom_rhs(const StateVector& x, const ModelParams& params);

double max_abs(const MeanFieldState& derivative);

struct StepControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double sample_dt = 1.0;  // spacing of recorded samples
};

struct Trajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time_reached)
      : std::runtime_error(what), time_reached_(time_reached) {}
  double time_reached() const { return time_reached_; }

 private:
  double time_reached_;
};

// Dormand-Prince 5(4) with adaptive steps; samples at multiples of sample_dt and at t_end.
Trajectory integrate(const MeanFieldState& state0, const ModelParams& params, double t_end,
                     const StepControl& control = {});

struct RelaxationResult {
  MeanFieldState final_state;
  bool converged = false;
  double residual = 0.0;
  double elapsed_time = 0.0;
  std::string note;
};

inline constexpr double kDefaultSteadyTol = 1e-8;
inline constexpr double kDefaultRelaxTime = 2000.0;

using SampleObserver = std::function<void(double, const MeanFieldState&)>;

// Stops at the first accepted step whose rhs max-norm falls below steady_tol.
// The observer, when given, receives samples on the sample_dt grid plus the final state.
RelaxationResult relax_to_steady(const MeanFieldState& state0, const ModelParams& params,
                                 double steady_tol = kDefaultSteadyTol,
                                 double t_max = kDefaultRelaxTime, const StepControl& control = {},
                                 const SampleObserver& observer = {});

inline constexpr double kAfnPresetTilt = 1e-4;
inline constexpr double kPsPresetSeed = 0.2;

// AFN branch with both spins tilted by the same small amount along x.
MeanFieldState preset_afn_like(const ModelParams& params, double tilt = kAfnPresetTilt);
// Spin-down normal state with a real field seed.
MeanFieldState preset_ps_like(const ModelParams& params, double seed = kPsPresetSeed);

}  // namespace dicke
