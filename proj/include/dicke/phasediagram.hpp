#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

enum class Method { Analytic, Numeric, Both };
std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view text);

struct FamilyOrder {
  PhaseLabel family = PhaseLabel::PN;
  OrderParameters order;
};

struct PhaseCell {
  double j = 0.0;
  double g = 0.0;
  PhaseLabel label = PhaseLabel::Unclassified;
  std::vector<FamilyOrder> stable_branches;  // canonical family order PN, AFN, PS, AFS
  Method method = Method::Analytic;
  std::string diagnostic;
};

// Raised by classify_point when the closed-form and spectral verdicts disagree.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// kappa = 0 replaces the spectral check with the energy Hessian.
PhaseCell classify_point(const ModelParams& params, Method method);

struct GridSpec {
  double j_min = 0.0, j_max = 0.5;
  int j_steps = 200;
  double g_min = 0.0, g_max = 1.5;
  int g_steps = 200;

  // Inclusive linspace; a single step yields the lower end.
  std::vector<double> j_values() const;
  std::vector<double> g_values() const;
};

std::vector<double> linspace(double lo, double hi, int steps);

struct PhaseMap {
  GridSpec grid;
  ModelParams base;
  Method method = Method::Analytic;
  std::vector<PhaseCell> cells;  // j-major: index = j_index * g_steps + g_index
  int mismatch_count = 0;

  const PhaseCell& at(int j_index, int g_index) const {
    return cells[static_cast<std::size_t>(j_index) * grid.g_steps + g_index];
  }
};

// threads <= 0 uses the hardware concurrency.
PhaseMap sweep(const ModelParams& base, const GridSpec& grid, Method method, int threads = 0);

enum class BranchPolicy { FollowAfn, FollowPs, LowestEnergy, UniqueStable };
std::string_view to_string(BranchPolicy p);
std::optional<BranchPolicy> parse_policy(std::string_view text);

struct TracePoint {
  double g = 0.0;
  PhaseLabel label = PhaseLabel::Unclassified;   // phase of the cell
  PhaseLabel family = PhaseLabel::Unclassified;  // branch followed by the policy
  OrderParameters order;
  bool discontinuity = false;
};

struct Transition {
  double g = 0.0;
  PhaseLabel from = PhaseLabel::Unclassified;
  PhaseLabel to = PhaseLabel::Unclassified;
  bool discontinuous = false;
};

struct TraceCurve {
  double fixed_j = 0.0;
  BranchPolicy policy = BranchPolicy::UniqueStable;
  std::vector<TracePoint> points;
  std::vector<Transition> transitions;  // located by bisection to ~1e-12 in g
  int mismatch_count = 0;
};

// Throws std::invalid_argument for lowest-energy with kappa > 0.
TraceCurve trace(const ModelParams& base, double fixed_j, const std::vector<double>& g_values,
                 BranchPolicy policy, Method method = Method::Analytic);

// Longitudinal only; throws std::invalid_argument for the transverse axis.
std::pair<double, double> tetracritical_point(const ModelParams& base);

}  // namespace dicke
