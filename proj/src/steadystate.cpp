#include "dicke/steadystate.hpp"

#include <cmath>
#include <sstream>

#include "dicke/dynamics.hpp"

namespace dicke {

namespace {

constexpr double kCouplingGuard = 1e-12;

SteadyBranch make_branch(PhaseLabel phase, const MeanFieldState& state, const ModelParams& params,
                         int partner = 1, int sublattice = 1) {
  SteadyBranch b;
  b.phase = phase;
  b.state = state;
  b.partner_sign = partner;
  b.sublattice_sign = sublattice;
  b.exists = true;
  b.residual = residual(state, params);
  return b;
}

SteadyBranch missing(PhaseLabel phase, std::string why) {
  SteadyBranch b;
  b.phase = phase;
  b.exists = false;
  b.note = std::move(why);
  return b;
}

MeanFieldState uniform_state(double sx, double sz, const ModelParams& params) {
  MeanFieldState s;
  s.s_a = {sx, 0.0, sz};
  s.s_b = {sx, 0.0, sz};
  s.alpha_r = steady_alpha_r(2.0 * sx, params);
  s.alpha_i = steady_alpha_i(2.0 * sx, params);
  return s;
}

MeanFieldState staggered_x_state(double sx, double sz) {
  MeanFieldState s;
  s.s_a = {sx, 0.0, sz};
  s.s_b = {-sx, 0.0, sz};
  return s;
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

// Both roots of the antiferro-superradiant angle system. cos^2 b = (J + d) / G and
// cos a = Omega sin b / (4 d), with d fixed by the second stationarity condition.
void append_canted(std::vector<SteadyBranch>& out, const ModelParams& params) {
  const double shift = cavity_shift(params);
  const double j = params.j;
  const double q = params.qubit_freq;
  const bool transverse = params.axis == IsingAxis::Transverse;

  if (j <= 0.0 || shift <= 0.0) {
    out.push_back(missing(PhaseLabel::AFS, "requires J > 0 and g > 0"));
    return;
  }
  const double radicand = transverse ? 1.0 - shift / j : shift / j - 1.0;
  if (radicand < 0.0) {
    out.push_back(missing(PhaseLabel::AFS, "radicand negative"));
    return;
  }
  // The first root is the one carrying the closed-form stability statement.
  const double root = (q / 4.0) * std::sqrt(radicand);
  const std::array<double, 2> roots = transverse ? std::array{-root, root} : std::array{root, -root};

  bool any = false;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    const double d = roots[r];
    if (std::abs(d) < kCouplingGuard) continue;
    const double cos2b = (j + d) / shift;
    if (cos2b < 0.0 || cos2b > 1.0) continue;
    const double cb = std::sqrt(cos2b);
    const double sb_mag = std::sqrt(1.0 - cos2b);
    for (int sb_sign : {1, -1}) {
      const double sb = sb_sign * sb_mag;
      const double ca = q * sb / (4.0 * d);
      if (std::abs(ca) > 1.0) continue;
      const double sa_mag = std::sqrt(1.0 - ca * ca);
      for (int sa_sign : {1, -1}) {
        const double a = std::atan2(sa_sign * sa_mag, ca);
        const double b = std::atan2(sb, cb);
        const MeanFieldState st = state_from_angles(a + b, a - b, params);
        const double ux = st.s_a[0] + st.s_b[0];
        SteadyBranch br = make_branch(PhaseLabel::AFS, st, params, sign_of(ux), sa_sign);
        br.principal = !transverse || r == 0;
        if (!transverse) br.note = "never stable";
        if (transverse && r == 1) br.note = "secondary root";
        out.push_back(std::move(br));
        any = true;
        if (sa_mag == 0.0) break;
      }
      if (sb_mag == 0.0) break;
    }
  }
  if (!any) out.push_back(missing(PhaseLabel::AFS, "angle solution out of range"));
}

}  // namespace

double cavity_shift(const ModelParams& params) {
  return params.omega * params.g * params.g /
         (params.omega * params.omega + params.kappa * params.kappa);
}

double effective_coupling(const ModelParams& params) {
  return params.axis == IsingAxis::Transverse ? params.j + cavity_shift(params)
                                              : params.j - cavity_shift(params);
}

double steady_alpha_r(double sum_x, const ModelParams& params) {
  const double w = params.omega * params.omega + params.kappa * params.kappa;
  return -params.omega * params.g * sum_x / (2.0 * w);
}

double steady_alpha_i(double sum_x, const ModelParams& params) {
  const double w = params.omega * params.omega + params.kappa * params.kappa;
  return -params.kappa * params.g * sum_x / (2.0 * w);
}

MeanFieldState state_from_angles(double theta1, double theta2, const ModelParams& params) {
  MeanFieldState s;
  s.s_a = {std::cos(theta1), 0.0, std::sin(theta1)};
  s.s_b = {std::cos(theta2), 0.0, -std::sin(theta2)};
  const double sum_x = s.s_a[0] + s.s_b[0];
  s.alpha_r = steady_alpha_r(sum_x, params);
  s.alpha_i = steady_alpha_i(sum_x, params);
  return s;
}

std::array<double, 2> angles_of(const MeanFieldState& state) {
  return {std::atan2(state.s_a[2], state.s_a[0]), std::atan2(-state.s_b[2], state.s_b[0])};
}

std::array<double, 2> reduced_equations(double theta1, double theta2, const ModelParams& params) {
  const double ax = std::cos(theta1), az = std::sin(theta1);
  const double bx = std::cos(theta2), bz = -std::sin(theta2);
  const double shift2 = 2.0 * cavity_shift(params);
  const double q = params.qubit_freq, j = params.j;
  const double u = ax + bx;
  if (params.axis == IsingAxis::Transverse) {
    return {(q + 4.0 * j * bz) * ax + shift2 * u * az, (q + 4.0 * j * az) * bx + shift2 * u * bz};
  }
  return {q * ax + (shift2 * u - 4.0 * j * bx) * az, q * bx + (shift2 * u - 4.0 * j * ax) * bz};
}

std::array<std::array<double, 2>, 2> reduced_jacobian(double theta1, double theta2,
                                                      const ModelParams& params) {
  const double ax = std::cos(theta1), az = std::sin(theta1);
  const double bx = std::cos(theta2), bz = -std::sin(theta2);
  const double s2 = 2.0 * cavity_shift(params);
  const double q = params.qubit_freq, j = params.j;
  const double u = ax + bx;
  // d(ax)/dt1 = -az, d(az)/dt1 = ax, d(bx)/dt2 = bz, d(bz)/dt2 = -bx
  if (params.axis == IsingAxis::Transverse) {
    return {{{-(q + 4.0 * j * bz) * az + s2 * (u * ax - az * az),
              -4.0 * j * bx * ax + s2 * bz * az},
             {4.0 * j * ax * bx - s2 * az * bz,
              (q + 4.0 * j * az) * bz + s2 * (bz * bz - u * bx)}}};
  }
  return {{{-q * az - s2 * az * az + (s2 * u - 4.0 * j * bx) * ax, (s2 - 4.0 * j) * bz * az},
           {(4.0 * j - s2) * az * bz, q * bz + s2 * bz * bz - (s2 * u - 4.0 * j * ax) * bx}}};
}

std::vector<SteadyBranch> candidate_branches(const ModelParams& params) {
  std::vector<SteadyBranch> out;
  const bool transverse = params.axis == IsingAxis::Transverse;
  const double q = params.qubit_freq, j = params.j;

  out.push_back(make_branch(PhaseLabel::PN, MeanFieldState::normal_down(), params));
  {
    MeanFieldState up;
    up.s_a = {0.0, 0.0, 1.0};
    up.s_b = {0.0, 0.0, 1.0};
    SteadyBranch b = make_branch(PhaseLabel::PN, up, params);
    b.principal = false;
    b.note = "inverted normal state";
    out.push_back(std::move(b));
  }

  // Spin-up/spin-down pair: the transverse antiferro-normal state, an unstable extra otherwise.
  for (int sign : {1, -1}) {
    MeanFieldState st;
    st.s_a = {0.0, 0.0, static_cast<double>(sign)};
    st.s_b = {0.0, 0.0, static_cast<double>(-sign)};
    SteadyBranch b = make_branch(transverse ? PhaseLabel::AFN : PhaseLabel::AFS, st, params,
                                 sign, sign);
    if (!transverse) {
      b.principal = false;
      b.note = "z-staggered state";
    }
    out.push_back(std::move(b));
  }

  // x-staggered zero-field state with s^z = -Omega/4J; at 4J = Omega it is the normal state.
  if (j > 0.0 && 4.0 * j > q) {
    const double sz = -q / (4.0 * j);
    const double sx = std::sqrt(1.0 - sz * sz);
    for (int sign : {1, -1}) {
      SteadyBranch b = make_branch(PhaseLabel::AFN, staggered_x_state(sign * sx, sz), params,
                                   sign, 1);
      if (transverse) {
        b.principal = false;
        b.note = "zero-field x-staggered state";
      }
      out.push_back(std::move(b));
    }
  } else if (!transverse) {
    out.push_back(missing(PhaseLabel::AFN, "requires 4J > Omega"));
  }

  const double j_eff = effective_coupling(params);
  if (std::abs(j_eff) < kCouplingGuard) {
    out.push_back(missing(PhaseLabel::PS, "effective coupling vanishes"));
  } else {
    const double sz = (transverse ? -q : q) / (4.0 * j_eff);
    if (std::abs(sz) >= 1.0) {
      out.push_back(missing(PhaseLabel::PS, "|s^z| reaches 1"));
    } else {
      const double sx = std::sqrt(1.0 - sz * sz);
      for (int sign : {1, -1}) {
        out.push_back(make_branch(PhaseLabel::PS, uniform_state(sign * sx, sz, params), params,
                                  sign, 1));
      }
    }
  }

  append_canted(out, params);
  return out;
}

std::vector<SteadyBranch> existing_branches(const ModelParams& params) {
  std::vector<SteadyBranch> out;
  for (auto& b : candidate_branches(params)) {
    if (b.exists) out.push_back(std::move(b));
  }
  return out;
}

double residual(const MeanFieldState& state, const ModelParams& params) {
  return max_abs(eom_rhs(state, params));
}

SteadyBranch refine(const SteadyBranch& branch, const ModelParams& params) {
  SteadyBranch out = branch;
  const double start = residual(branch.state, params);
  if (start < kRefineTol) {
    out.residual = start;
    out.refined = true;
    return out;
  }
  auto [t1, t2] = angles_of(branch.state);
  for (int iter = 0; iter < kRefineMaxIter; ++iter) {
    const auto f = reduced_equations(t1, t2, params);
    const auto m = reduced_jacobian(t1, t2, params);
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double scale = std::abs(m[0][0]) + std::abs(m[0][1]) + std::abs(m[1][0]) +
                         std::abs(m[1][1]);
    if (!(std::abs(det) > 1e-14 * std::max(scale * scale, 1e-300))) {
      throw RefineError("singular Newton matrix while refining " + describe(branch) + " at " +
                        describe(params));
    }
    t1 -= (m[1][1] * f[0] - m[0][1] * f[1]) / det;
    t2 -= (-m[1][0] * f[0] + m[0][0] * f[1]) / det;
    if (!std::isfinite(t1) || !std::isfinite(t2)) break;
    const MeanFieldState st = state_from_angles(t1, t2, params);
    const double r = residual(st, params);
    if (r < kRefineTol) {
      out.state = st;
      out.residual = r;
      out.refined = true;
      return out;
    }
  }
  out.refined = false;
  out.residual = start;
  return out;
}

std::string describe(const SteadyBranch& branch) {
  std::ostringstream os;
  os.precision(12);
  const auto& s = branch.state;
  os << to_string(branch.phase) << "[partner=" << branch.partner_sign
     << ",sublattice=" << branch.sublattice_sign << (branch.principal ? "" : ",extra")
     << ",exists=" << branch.exists << ",residual=" << branch.residual << ",alpha=("
     << s.alpha_r << "," << s.alpha_i << "),s_a=(" << s.s_a[0] << "," << s.s_a[1] << ","
     << s.s_a[2] << "),s_b=(" << s.s_b[0] << "," << s.s_b[1] << "," << s.s_b[2] << ")]";
  return os.str();
}

std::string describe(const ModelParams& params) {
  std::ostringstream os;
  os.precision(12);
  os << to_string(params.axis) << "(omega=" << params.omega << ",Omega=" << params.qubit_freq
     << ",g=" << params.g << ",J=" << params.j << ",kappa=" << params.kappa << ")";
  return os.str();
}

}  // namespace dicke
