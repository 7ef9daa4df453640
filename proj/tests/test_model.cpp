#include <doctest.h>

#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "dicke/model.hpp"

using namespace dicke;

namespace {

std::string rejection(const ModelParams& p) {
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("validate accepts physical parameters unchanged") {
  ModelParams p{1.0, 1.0, 0.5, 0.3, 0.5, IsingAxis::Transverse};
  const ModelParams q = validate(p);
  CHECK(q.omega == 1.0);
  CHECK(q.g == 0.5);
  CHECK(q.j == 0.3);
  CHECK(q.kappa == 0.5);
}

TEST_CASE("validate names the offending field") {
  ModelParams p{1.0, 1.0, 0.5, 0.3, 0.5, IsingAxis::Transverse};
  auto bad = p;
  bad.omega = 0.0;
  CHECK(rejection(bad) == "omega must be positive");
  bad = p;
  bad.kappa = -0.1;
  CHECK(rejection(bad) == "kappa must be non-negative");
  bad = p;
  bad.qubit_freq = -1.0;
  CHECK(rejection(bad) == "qubit_freq must be positive");
  bad = p;
  bad.g = -0.2;
  CHECK(rejection(bad) == "g must be non-negative");
  bad = p;
  bad.j = -0.01;
  CHECK(rejection(bad) == "j must be non-negative");
  bad = p;
  bad.omega = std::numeric_limits<double>::quiet_NaN();
  CHECK(rejection(bad) == "omega must be positive");
  CHECK(rejection(p.with_kappa(0.0)).empty());
}

TEST_CASE("axis and phase names round-trip") {
  for (auto axis : {IsingAxis::Transverse, IsingAxis::Longitudinal})
    CHECK(parse_axis(to_string(axis)) == axis);
  CHECK_FALSE(parse_axis("diagonal").has_value());
  for (auto label : {PhaseLabel::PN, PhaseLabel::AFN, PhaseLabel::PS, PhaseLabel::AFS,
                     PhaseLabel::Bistable, PhaseLabel::Unclassified})
    CHECK(parse_phase(to_string(label)) == label);
  CHECK_FALSE(parse_phase("XX").has_value());
}

TEST_CASE("normal state has unit spins and no order") {
  const auto s = MeanFieldState::normal_down();
  CHECK(has_unit_spins(s));
  const auto op = order_parameters(s);
  CHECK(op.n == 0.0);
  CHECK(op.m_af_x == 0.0);
  CHECK(op.m_af_z == 0.0);
  CHECK(op.m_dk_x == 0.0);
  MeanFieldState off = s;
  off.s_a = {0.0, 0.0, -1.0 - 2e-9};
  CHECK_FALSE(has_unit_spins(off));
}

TEST_CASE("order parameters are invariant under sublattice exchange and partner flip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    MeanFieldState s;
    s.alpha_r = u(rng);
    s.alpha_i = u(rng);
    s.s_a = normalized({u(rng), u(rng), u(rng)});
    s.s_b = normalized({u(rng), u(rng), u(rng)});
    const auto op = order_parameters(s);

    MeanFieldState swapped = s;
    std::swap(swapped.s_a, swapped.s_b);
    const auto sw = order_parameters(swapped);
    CHECK(sw.m_af_x == doctest::Approx(op.m_af_x).epsilon(1e-15));
    CHECK(sw.m_af_z == doctest::Approx(op.m_af_z).epsilon(1e-15));
    CHECK(sw.n == op.n);

    MeanFieldState partner = s;
    partner.alpha_r = -s.alpha_r;
    partner.alpha_i = -s.alpha_i;
    partner.s_a[0] = -s.s_a[0];
    partner.s_b[0] = -s.s_b[0];
    const auto pt = order_parameters(partner);
    CHECK(pt.m_af_x == op.m_af_x);
    CHECK(pt.m_af_z == op.m_af_z);
    CHECK(pt.m_dk_x == op.m_dk_x);
    CHECK(pt.n == op.n);
  }
}

TEST_CASE("parameter helpers copy") {
  ModelParams p;
  const auto q = p.with_couplings(0.2, 0.7).with_kappa(0.3);
  CHECK(q.j == 0.2);
  CHECK(q.g == 0.7);
  CHECK(q.kappa == 0.3);
  CHECK(p.j == 0.0);
}
