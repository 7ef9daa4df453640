#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dicke {

enum class IsingAxis { Transverse, Longitudinal };

std::string_view to_string(IsingAxis axis);
std::optional<IsingAxis> parse_axis(std::string_view text);

// All rates in the same frequency unit; the CLI normalizes to omega = 1.
struct ModelParams {
  double omega = 1.0;
  double qubit_freq = 1.0;
  double g = 0.0;
  double j = 0.0;
  double kappa = 0.0;
  IsingAxis axis = IsingAxis::Transverse;

  ModelParams with_couplings(double j_new, double g_new) const {
    ModelParams p = *this;
    p.j = j_new;
    p.g = g_new;
    return p;
  }
  ModelParams with_kappa(double kappa_new) const {
    ModelParams p = *this;
    p.kappa = kappa_new;
    return p;
  }
};

// Throws std::invalid_argument naming the offending field.
ModelParams validate(const ModelParams& params);

using Vec3 = std::array<double, 3>;

inline constexpr double kUnitSpinTol = 1e-9;

struct MeanFieldState {
  double alpha_r = 0.0;
  double alpha_i = 0.0;
  Vec3 s_a{0.0, 0.0, -1.0};
  Vec3 s_b{0.0, 0.0, -1.0};

  static MeanFieldState normal_down() { return {}; }
};

double norm(const Vec3& v);
Vec3 normalized(const Vec3& v);
// Largest deviation of either sublattice spin length from one.
double spin_norm_error(const MeanFieldState& state);
bool has_unit_spins(const MeanFieldState& state, double tol = kUnitSpinTol);

struct OrderParameters {
  double m_af_x = 0.0;
  double m_af_z = 0.0;
  double m_dk_x = 0.0;  // magnitude, so degenerate partners coincide
  double n = 0.0;
};

OrderParameters order_parameters(const MeanFieldState& state);

enum class PhaseLabel { PN, AFN, PS, AFS, Bistable, Unclassified };

std::string_view to_string(PhaseLabel label);
std::optional<PhaseLabel> parse_phase(std::string_view text);

}  // namespace dicke
