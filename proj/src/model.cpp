#include "dicke/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicke {

std::string_view to_string(IsingAxis axis) {
  return axis == IsingAxis::Transverse ? "transverse" : "longitudinal";
}

std::optional<IsingAxis> parse_axis(std::string_view text) {
  if (text == "transverse") return IsingAxis::Transverse;
  if (text == "longitudinal") return IsingAxis::Longitudinal;
  return std::nullopt;
}

ModelParams validate(const ModelParams& params) {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  };
  require(std::isfinite(params.omega) && params.omega > 0.0, "omega must be positive");
  require(std::isfinite(params.qubit_freq) && params.qubit_freq > 0.0,
          "qubit_freq must be positive");
  require(std::isfinite(params.g) && params.g >= 0.0, "g must be non-negative");
  require(std::isfinite(params.j) && params.j >= 0.0, "j must be non-negative");
  require(std::isfinite(params.kappa) && params.kappa >= 0.0, "kappa must be non-negative");
  return params;
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 normalized(const Vec3& v) {
  const double r = norm(v);
  return {v[0] / r, v[1] / r, v[2] / r};
}

double spin_norm_error(const MeanFieldState& state) {
  return std::max(std::abs(norm(state.s_a) - 1.0), std::abs(norm(state.s_b) - 1.0));
}

bool has_unit_spins(const MeanFieldState& state, double tol) {
  return spin_norm_error(state) <= tol;
}

OrderParameters order_parameters(const MeanFieldState& state) {
  OrderParameters op;
  op.m_af_x = std::abs(state.s_a[0] - state.s_b[0]) / 2.0;
  op.m_af_z = std::abs(state.s_a[2] - state.s_b[2]) / 2.0;
  op.m_dk_x = std::abs(state.s_a[0] + state.s_b[0]) / 2.0;
  op.n = state.alpha_r * state.alpha_r + state.alpha_i * state.alpha_i;
  return op;
}

std::string_view to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::PN: return "PN";
    case PhaseLabel::AFN: return "AFN";
    case PhaseLabel::PS: return "PS";
    case PhaseLabel::AFS: return "AFS";
    case PhaseLabel::Bistable: return "Bistable";
    case PhaseLabel::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::optional<PhaseLabel> parse_phase(std::string_view text) {
  for (auto label : {PhaseLabel::PN, PhaseLabel::AFN, PhaseLabel::PS, PhaseLabel::AFS,
                     PhaseLabel::Bistable, PhaseLabel::Unclassified}) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

}  // namespace dicke
