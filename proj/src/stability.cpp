#include "dicke/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "dicke/dynamics.hpp"

namespace dicke {

Matrix8 full_jacobian(const MeanFieldState& state, const ModelParams& p) {
  const auto& a = state.s_a;
  const auto& b = state.s_b;
  const double g = p.g, j = p.j, q = p.qubit_freq;
  Matrix8 m = Matrix8::Zero();
  m(0, 0) = -p.kappa;
  m(0, 1) = p.omega;
  m(1, 0) = -p.omega;
  m(1, 1) = -p.kappa;
  m(1, 2) = -g / 2.0;
  m(1, 5) = -g / 2.0;

  // Rows of ds/dt = h x s with h = (hx, 0, hz); columns 2..4 spin A, 5..7 spin B.
  auto spin_rows = [&](int row, int own, int other, const Vec3& s, const Vec3& t) {
    double hx, hz;
    if (p.axis == IsingAxis::Transverse) {
      hx = 4.0 * g * state.alpha_r;
      hz = q + 4.0 * j * t[2];
    } else {
      hx = 4.0 * (g * state.alpha_r + j * t[0]);
      hz = q;
    }
    // d/dt s^x = -hz s^y
    m(row, own + 1) = -hz;
    // d/dt s^y = hz s^x - hx s^z
    m(row + 1, own) = hz;
    m(row + 1, own + 2) = -hx;
    // d/dt s^z = hx s^y
    m(row + 2, own + 1) = hx;
    if (p.axis == IsingAxis::Transverse) {
      m(row, other + 2) = -4.0 * j * s[1];
      m(row + 1, other + 2) = 4.0 * j * s[0];
      m(row + 1, 0) = -4.0 * g * s[2];
      m(row + 2, 0) = 4.0 * g * s[1];
    } else {
      m(row + 1, 0) = -4.0 * g * s[2];
      m(row + 1, other) = -4.0 * j * s[2];
      m(row + 2, 0) = 4.0 * g * s[1];
      m(row + 2, other) = 4.0 * j * s[1];
    }
  };
  spin_rows(2, 2, 5, a, b);
  spin_rows(5, 5, 2, b, a);
  return m;
}

namespace {

Eigen::MatrixXd reduced_matrix(const MeanFieldState& st, const ModelParams& p) {
  const auto& a = st.s_a;
  const auto& b = st.s_b;
  const double g = p.g, j = p.j, q = p.qubit_freq, ar = st.alpha_r;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
  m(0, 0) = -p.kappa;
  m(0, 1) = p.omega;
  m(1, 0) = -p.omega;
  m(1, 1) = -p.kappa;
  m(1, 2) = -g / 2.0;
  m(1, 4) = -g / 2.0;
  m(3, 0) = -4.0 * g * a[2];
  m(5, 0) = -4.0 * g * b[2];
  if (p.axis == IsingAxis::Transverse) {
    const double prec_a = q + 4.0 * j * b[2];
    const double prec_b = q + 4.0 * j * a[2];
    m(2, 3) = -prec_a;
    m(4, 5) = -prec_b;
    m(3, 2) = prec_a + 4.0 * g * ar * a[0] / a[2];
    m(5, 4) = prec_b + 4.0 * g * ar * b[0] / b[2];
    m(3, 4) = -4.0 * j * a[0] * b[0] / b[2];
    m(5, 2) = -4.0 * j * a[0] * b[0] / a[2];
  } else {
    m(2, 3) = -q;
    m(4, 5) = -q;
    m(3, 2) = q + 4.0 * (g * ar + j * b[0]) * a[0] / a[2];
    m(5, 4) = q + 4.0 * (g * ar + j * a[0]) * b[0] / b[2];
    m(3, 4) = -4.0 * j * a[2];
    m(5, 2) = -4.0 * j * b[2];
  }
  return m;
}

Eigen::MatrixXd projected_matrix(const MeanFieldState& st, const ModelParams& p) {
  Matrix8 proj = Matrix8::Identity();
  const Vec3 a = normalized(st.s_a), b = normalized(st.s_b);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      proj(2 + r, 2 + c) -= a[r] * a[c];
      proj(5 + r, 5 + c) -= b[r] * b[c];
    }
  }
  return proj * full_jacobian(st, p) * proj;
}

double matrix_scale(const Eigen::MatrixXd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

StabilityMatrix jacobian(const MeanFieldState& state, const ModelParams& params) {
  if (std::abs(state.s_a[2]) > kReducedThreshold && std::abs(state.s_b[2]) > kReducedThreshold) {
    return {6, reduced_matrix(state, params)};
  }
  return {8, projected_matrix(state, params)};
}

StabilityMatrix jacobian(const SteadyBranch& branch, const ModelParams& params) {
  return jacobian(branch.state, params);
}

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw std::runtime_error("stability matrix has non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, true);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
  const double tol = 1e-8 * matrix_scale(m);
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const Eigen::VectorXcd v = vectors.col(k).normalized();
    if ((mc * v - values(k) * v).norm() <= tol) continue;
    // Near-defective eigenvalues get poor vectors from the Schur back-substitution; the
    // smallest right singular vector of M - lambda I is the best available partner.
    const Eigen::MatrixXcd shifted =
        mc - values(k) * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() > tol) {
      throw std::runtime_error("eigenpair residual check failed");
    }
  }
  std::vector<std::complex<double>> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Marginal: return "marginal";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "not-applicable";
}

Verdict routh_hurwitz_quartic(double a1, double a2, double a3, double a4, double eps) {
  const Quartic q{a1, a2, a3, a4};
  const double conditions[] = {a1, a2, a3, a4, q.delta2(), q.delta3()};
  bool boundary = false;
  for (double c : conditions) {
    if (c < -eps) return Verdict::Unstable;
    if (c <= eps) boundary = true;
  }
  return boundary ? Verdict::Marginal : Verdict::Stable;
}

bool has_defective_marginal_mode(const Eigen::MatrixXd& m) {
  const double scale = matrix_scale(m);
  const double axis_tol = 1e-6 * scale;
  const double cluster_tol = 1e-6 * scale;
  const double null_tol = 1e-6 * scale;

  const Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
  const auto n = values.size();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (used[i] || std::abs(values(i).real()) > axis_tol) continue;
    std::vector<Eigen::Index> cluster{i};
    used[i] = true;
    std::complex<double> centre = values(i);
    for (Eigen::Index k = i + 1; k < n; ++k) {
      if (!used[k] && std::abs(values(k) - values(i)) <= cluster_tol) {
        used[k] = true;
        cluster.push_back(k);
        centre += values(k);
      }
    }
    if (cluster.size() < 2) continue;
    // Rounding splits a Jordan block into a tight cluster; its eigenspace stays short of
    // the cluster size.
    centre /= static_cast<double>(cluster.size());
    const Eigen::MatrixXcd shifted = mc - centre * Eigen::MatrixXcd::Identity(n, n);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    const auto sv = svd.singularValues();
    std::size_t null_dim = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) null_dim += sv(k) <= null_tol;
    if (null_dim < cluster.size()) return true;
  }
  return false;
}

StabilityReport classify_stability(const SteadyBranch& branch, const ModelParams& params,
                                   double eps) {
  StabilityReport r;
  const StabilityMatrix m = jacobian(branch, params);
  r.eigenvalues = spectrum(m);
  r.max_real = r.eigenvalues.front().real();
  if (r.max_real > eps) {
    r.numeric_verdict = Verdict::Unstable;
  } else if (r.max_real >= -eps) {
    r.numeric_verdict = Verdict::Marginal;
  } else {
    r.numeric_verdict = Verdict::Stable;
  }
  if (r.numeric_verdict == Verdict::Marginal) {
    r.defective = has_defective_marginal_mode(m.entries);
  }
  r.analytic_verdict = branch.principal ? analytic_stability(branch.phase, params)
                                        : Verdict::NotApplicable;
  return r;
}

double canting_cubic(double j_eff, const ModelParams& params) {
  const double q = params.qubit_freq;
  return 16.0 * j_eff * j_eff * j_eff - 32.0 * params.j * j_eff * j_eff + params.j * q * q;
}

namespace {

Verdict from_margins(std::initializer_list<double> margins) {
  bool boundary = false;
  for (double m : margins) {
    if (m < 0.0) return Verdict::Unstable;
    if (m == 0.0) boundary = true;
  }
  return boundary ? Verdict::Marginal : Verdict::Stable;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Verdict analytic_stability(PhaseLabel phase, const ModelParams& p) {
  const CriticalCouplings c = critical_couplings(p);
  const double g = p.g, j = p.j;
  if (p.axis == IsingAxis::Transverse) {
    const double cubic = canting_cubic(effective_coupling(p), p);
    switch (phase) {
      case PhaseLabel::PN:
        return from_margins({c.j_c - j, c.g_c1.value_or(0.0) - g});
      case PhaseLabel::AFN:
        return from_margins({j - c.j_c, c.g_c2.value_or(0.0) - g});
      case PhaseLabel::PS:
        return from_margins({c.g_c1 ? g - *c.g_c1 : 1.0, cubic});
      case PhaseLabel::AFS:
        return from_margins({-cubic, c.g_c2 ? g - *c.g_c2 : 1.0});
      default:
        return Verdict::NotApplicable;
    }
  }
  switch (phase) {
    case PhaseLabel::PN:
      return from_margins({c.j_c - j, *c.g_c1 - g});
    case PhaseLabel::AFN:
      return from_margins({j - c.j_c, *c.g_c2 - g});
    case PhaseLabel::PS:
      return from_margins({j < c.j_c ? g - *c.g_c1 : g - *c.g_c3});
    case PhaseLabel::AFS:
      return Verdict::Unstable;
    default:
      return Verdict::NotApplicable;
  }
}

CriticalCouplings critical_couplings(const ModelParams& p) {
  CriticalCouplings c;
  const double w = p.omega * p.omega + p.kappa * p.kappa;
  const double q = p.qubit_freq, j = p.j, om = p.omega;
  auto root = [](double radicand) -> std::optional<double> {
    if (radicand < 0.0) return std::nullopt;
    return std::sqrt(radicand);
  };
  c.j_c = q / 4.0;
  c.g_dicke = std::sqrt(q * w / (4.0 * om));
  if (p.axis == IsingAxis::Transverse) {
    c.g_c1 = root((q - 4.0 * j) * w / (4.0 * om));
    if (j > 0.0) c.g_c2 = root((16.0 * j * j - q * q) * w / (16.0 * om * j));
    if (j > 0.0) {
      const ModelParams pj = p;
      auto f = [&pj](double x) { return canting_cubic(x, pj); };
      const double turn = 4.0 * j / 3.0;
      const double upper = 2.0 * j + q;
      std::vector<double> zeros;
      if (f(turn) < 0.0) {
        zeros.push_back(bisect(f, 0.0, turn));
        zeros.push_back(bisect(f, turn, upper));
      } else if (f(turn) == 0.0) {
        zeros.push_back(turn);
      }
      for (double x : zeros) {
        if (x >= j) c.g_canting.push_back(std::sqrt((x - j) * w / om));
      }
    }
  } else {
    c.g_c1 = root((q + 4.0 * j) * w / (4.0 * om));
    c.g_c2 = root(j * (16.0 * j * j + q * q) * w / (om * q * q));
    c.g_c3 = root((j + std::cbrt(j * q * q / 16.0)) * w / om);
    c.g_tet = root(q * w / (2.0 * om));
  }
  return c;
}

std::optional<BlockDecomposition> block_decomposition(const SteadyBranch& branch,
                                                      const ModelParams& p) {
  if (!branch.exists) return std::nullopt;
  const auto& a = branch.state.s_a;
  const auto& b = branch.state.s_b;
  const double sz = a[2];
  if (std::abs(sz) <= kReducedThreshold || std::abs(a[2] - b[2]) > 1e-12) return std::nullopt;
  const bool uniform = std::abs(a[0] - b[0]) <= 1e-12;
  const bool staggered = p.axis == IsingAxis::Longitudinal && std::abs(a[0] + b[0]) <= 1e-12;
  if (!uniform && !staggered) return std::nullopt;

  const double g = p.g, j = p.j, q = p.qubit_freq, ar = branch.state.alpha_r;
  double prec, chi, cross;
  if (p.axis == IsingAxis::Transverse) {
    prec = q + 4.0 * j * sz;
    chi = prec + 4.0 * g * ar * a[0] / sz;
    cross = -4.0 * j * a[0] * b[0] / sz;
  } else {
    prec = q;
    chi = q + 4.0 * (g * ar + j * b[0]) * a[0] / sz;
    cross = -4.0 * j * sz;
  }
  const double r2 = std::sqrt(2.0);
  BlockDecomposition out;
  out.symmetric << -p.kappa, p.omega, 0.0, 0.0,
                   -p.omega, -p.kappa, -g / r2, 0.0,
                   0.0, 0.0, 0.0, -prec,
                   -4.0 * r2 * g * sz, 0.0, chi + cross, 0.0;
  out.antisymmetric << 0.0, -prec,
                       chi - cross, 0.0;
  const double w = p.omega * p.omega + p.kappa * p.kappa;
  const double xi1 = prec * (chi + cross);
  const double xi2 = 4.0 * prec * p.omega * g * g * sz;
  out.quartic = {2.0 * p.kappa, w + xi1, 2.0 * p.kappa * xi1, xi1 * w + xi2};
  return out;
}

}  // namespace dicke
