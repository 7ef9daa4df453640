#include "dicke/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "dicke/steadystate.hpp"

namespace dicke {

namespace odeint = boost::numeric::odeint;

StateVector to_vector(const MeanFieldState& s) {
  return {s.alpha_r, s.alpha_i, s.s_a[0], s.s_a[1], s.s_a[2], s.s_b[0], s.s_b[1], s.s_b[2]};
}

MeanFieldState from_vector(const StateVector& v) {
  MeanFieldState s;
  s.alpha_r = v[0];
  s.alpha_i = v[1];
  s.s_a = {v[2], v[3], v[4]};
  s.s_b = {v[5], v[6], v[7]};
  return s;
}

StateVector eom_rhs(const StateVector& x, const ModelParams& p) {
  const double ar = x[0], ai = x[1];
  const double ax = x[2], ay = x[3], az = x[4];
  const double bx = x[5], by = x[6], bz = x[7];

  // Each spin precesses about an effective field in the x-z plane: ds/dt = h x s.
  double hxa, hza, hxb, hzb;
  if (p.axis == IsingAxis::Transverse) {
    hxa = hxb = 4.0 * p.g * ar;
    hza = p.qubit_freq + 4.0 * p.j * bz;
    hzb = p.qubit_freq + 4.0 * p.j * az;
  } else {
    hxa = 4.0 * (p.g * ar + p.j * bx);
    hxb = 4.0 * (p.g * ar + p.j * ax);
    hza = hzb = p.qubit_freq;
  }

  StateVector d;
  d[0] = -p.kappa * ar + p.omega * ai;
  d[1] = -p.omega * ar - p.kappa * ai - 0.5 * p.g * (ax + bx);
  d[2] = -hza * ay;
  d[3] = hza * ax - hxa * az;
  d[4] = hxa * ay;
  d[5] = -hzb * by;
  d[6] = hzb * bx - hxb * bz;
  d[7] = hxb * by;
  return d;
}

MeanFieldState eom_rhs(const MeanFieldState& state, const ModelParams& params) {
  return from_vector(eom_rhs(to_vector(state), params));
}

double max_abs(const MeanFieldState& derivative) {
  double m = 0.0;
  for (double v : to_vector(derivative)) m = std::max(m, std::abs(v));
  return m;
}

namespace {

using Stepper = odeint::runge_kutta_dopri5<StateVector>;

bool finite(const StateVector& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// Adaptive march from t = 0 towards t_end. Samples land exactly on k * sample_dt.
// Returns the time reached; stops early when `done` reports true after an accepted step.
template <class OnSample, class Done>
double march(StateVector& x, const ModelParams& params, double t_end, const StepControl& control,
             OnSample on_sample, Done done) {
  auto system = [&params](const StateVector& s, StateVector& dsdt, double) {
    dsdt = eom_rhs(s, params);
  };
  auto stepper = odeint::make_controlled<Stepper>(control.abs_tol, control.rel_tol);

  double t = 0.0;
  double dt = std::min(1e-2, t_end);
  long sample_index = 1;
  const double sample_dt = control.sample_dt > 0.0 ? control.sample_dt : t_end;
  on_sample(t, x);
  if (done(x)) return t;

  while (t < t_end) {
    const double next_sample = std::min(sample_index * sample_dt, t_end);
    const double target = next_sample;
    const bool clipped = dt >= target - t;
    double h = clipped ? target - t : dt;
    double t_try = t;
    const auto result = stepper.try_step(system, x, t_try, h);
    if (result == odeint::fail) {
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "step size underflow at t=" << t;
        throw IntegrationError(os.str(), t);
      }
      dt = h;
      continue;
    }
    if (!finite(x)) {
      std::ostringstream os;
      os << "non-finite state at t=" << t_try;
      throw IntegrationError(os.str(), t);
    }
    t = clipped ? target : t_try;
    dt = clipped ? std::max(dt, h) : h;
    const bool at_sample = clipped;
    if (at_sample) {
      on_sample(t, x);
      ++sample_index;
    }
    if (done(x)) {
      if (!at_sample) on_sample(t, x);
      return t;
    }
  }
  return t;
}

}  // namespace

Trajectory integrate(const MeanFieldState& state0, const ModelParams& params, double t_end,
                     const StepControl& control) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  Trajectory traj;
  StateVector x = to_vector(state0);
  march(
      x, params, t_end, control,
      [&traj](double t, const StateVector& s) {
        traj.times.push_back(t);
        traj.states.push_back(from_vector(s));
      },
      [](const StateVector&) { return false; });
  return traj;
}

RelaxationResult relax_to_steady(const MeanFieldState& state0, const ModelParams& params,
                                 double steady_tol, double t_max, const StepControl& control,
                                 const SampleObserver& observer) {
  if (!(steady_tol > 0.0)) throw std::invalid_argument("steady_tol must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  StateVector x = to_vector(state0);
  auto settled = [&](const StateVector& s) {
    const StateVector d = eom_rhs(s, params);
    double m = 0.0;
    for (double v : d) m = std::max(m, std::abs(v));
    return m < steady_tol;
  };
  auto sample = [&observer](double t, const StateVector& s) {
    if (observer) observer(t, from_vector(s));
  };

  RelaxationResult out;
  out.elapsed_time = march(x, params, t_max, control, sample, settled);
  out.final_state = from_vector(x);
  out.residual = residual(out.final_state, params);
  out.converged = out.residual < steady_tol;
  if (!out.converged && params.kappa == 0.0) {
    out.note = "kappa = 0: spin precession is undamped, so the flow does not settle";
  } else if (!out.converged) {
    out.note = "steady tolerance not reached before t_max";
  }
  return out;
}

MeanFieldState preset_afn_like(const ModelParams& params, double tilt) {
  for (const auto& b : candidate_branches(params)) {
    if (b.exists && b.principal && b.phase == PhaseLabel::AFN && b.partner_sign == 1) {
      MeanFieldState s = b.state;
      s.s_a[0] += tilt;
      s.s_b[0] += tilt;
      s.s_a = normalized(s.s_a);
      s.s_b = normalized(s.s_b);
      return s;
    }
  }
  throw std::invalid_argument("afn-like preset requires an existing AFN branch (4J > Omega)");
}

MeanFieldState preset_ps_like(const ModelParams&, double seed) {
  MeanFieldState s = MeanFieldState::normal_down();
  s.alpha_r = seed;
  return s;
}

}  // namespace dicke
