#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dicke/model.hpp"
#include "dicke/steadystate.hpp"

namespace dicke {

using Matrix8 = Eigen::Matrix<double, 8, 8>;

// Linearization of eom_rhs in the flat ordering of StateVector.
Matrix8 full_jacobian(const MeanFieldState& state, const ModelParams& params);

// dim 6: (d alpha_r, d alpha_i, d s_a^x, d s_a^y, d s_b^x, d s_b^y) with d s^z eliminated.
// dim 8: full ordering, projected onto the tangent space of both unit spheres.
struct StabilityMatrix {
  int dim = 6;
  Eigen::MatrixXd entries;
};

inline constexpr double kReducedThreshold = 1e-6;
inline constexpr double kStabilityEps = 1e-8;

StabilityMatrix jacobian(const SteadyBranch& branch, const ModelParams& params);
StabilityMatrix jacobian(const MeanFieldState& state, const ModelParams& params);

// Throws std::runtime_error if an eigenpair fails the residual check.
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& m);
inline std::vector<std::complex<double>> spectrum(const StabilityMatrix& m) {
  return spectrum(m.entries);
}

enum class Verdict { Stable, Unstable, Marginal, NotApplicable };
std::string_view to_string(Verdict v);
// Marginal counts as stable for phase classification.
inline bool counts_stable(Verdict v) { return v == Verdict::Stable || v == Verdict::Marginal; }

struct Quartic {
  double a1, a2, a3, a4;
  double delta2() const { return a1 * a2 - a3; }
  double delta3() const { return a1 * a2 * a3 - a3 * a3 - a1 * a1 * a4; }
};

Verdict routh_hurwitz_quartic(double a1, double a2, double a3, double a4,
                              double eps = kStabilityEps);
inline Verdict routh_hurwitz_quartic(const Quartic& q, double eps = kStabilityEps) {
  return routh_hurwitz_quartic(q.a1, q.a2, q.a3, q.a4, eps);
}

// True when some eigenvalue cluster on the imaginary axis lacks a full set of eigenvectors.
bool has_defective_marginal_mode(const Eigen::MatrixXd& m);

struct StabilityReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0.0;
  Verdict numeric_verdict = Verdict::Marginal;
  Verdict analytic_verdict = Verdict::NotApplicable;
  bool defective = false;  // secular growth on the imaginary axis; reported as unstable
};

StabilityReport classify_stability(const SteadyBranch& branch, const ModelParams& params,
                                   double eps = kStabilityEps);

// Closed-form stability inequalities for the four families.
Verdict analytic_stability(PhaseLabel phase, const ModelParams& params);

// 16 Jeff^3 - 32 J Jeff^2 + J Omega^2: positive where the transverse uniform
// superradiant state is stable against canting.
double canting_cubic(double j_eff, const ModelParams& params);

struct CriticalCouplings {
  double j_c = 0.0;
  std::optional<double> g_c1, g_c2, g_c3, g_tet;
  double g_dicke = 0.0;
  std::vector<double> g_canting;  // transverse: zeros of the canting cubic along g
};

CriticalCouplings critical_couplings(const ModelParams& params);

// Block form of the reduced matrix for branches with identical sublattices
// (and the longitudinal antiferro-normal state, which shares the structure).
struct BlockDecomposition {
  Eigen::Matrix4d symmetric;      // field plus in-phase spin motion
  Eigen::Matrix2d antisymmetric;  // out-of-phase spin motion, decoupled from the field
  Quartic quartic;
};

std::optional<BlockDecomposition> block_decomposition(const SteadyBranch& branch,
                                                      const ModelParams& params);

}  // namespace dicke
