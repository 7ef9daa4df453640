#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dicke/dynamics.hpp"
#include "dicke/groundstate.hpp"
#include "dicke/stability.hpp"
#include "dicke/steadystate.hpp"

using namespace dicke;

namespace {

using cplx = std::complex<double>;

ModelParams make(IsingAxis axis, double j, double g, double kappa) {
  ModelParams p;
  p.axis = axis;
  p.j = j;
  p.g = g;
  p.kappa = kappa;
  return p;
}

std::vector<SteadyBranch> of_phase(const ModelParams& p, PhaseLabel phase) {
  std::vector<SteadyBranch> out;
  for (auto& b : existing_branches(p)) {
    if (b.phase == phase && b.principal) out.push_back(b);
  }
  return out;
}

// Largest distance after greedy nearest pairing of two equally sized spectra.
double spectral_distance(std::vector<cplx> x, std::vector<cplx> y) {
  if (x.size() != y.size()) return 1e300;
  double worst = 0.0;
  for (const auto& v : x) {
    auto it = std::min_element(y.begin(), y.end(),
                               [&](cplx a, cplx b) { return std::abs(a - v) < std::abs(b - v); });
    worst = std::max(worst, std::abs(*it - v));
    y.erase(it);
  }
  return worst;
}

std::vector<cplx> eig(const Eigen::MatrixXd& m) {
  const Eigen::VectorXcd v = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
  return {v.data(), v.data() + v.size()};
}

std::vector<cplx> quartic_roots(const Quartic& q) {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  c(0, 0) = -q.a1;
  c(0, 1) = -q.a2;
  c(0, 2) = -q.a3;
  c(0, 3) = -q.a4;
  c(1, 0) = c(2, 1) = c(3, 2) = 1.0;
  return eig(c);
}

bool numeric_stable(const SteadyBranch& b, const ModelParams& p) {
  const auto r = classify_stability(b, p);
  return counts_stable(r.numeric_verdict) && !r.defective;
}

// Distance in g from the nearest closed-form boundary at this J.
double boundary_distance(const ModelParams& p) {
  const auto c = critical_couplings(p);
  std::vector<double> lines{0.0};
  for (const auto& v : {c.g_c1, c.g_c2, c.g_c3}) {
    if (v) lines.push_back(*v);
  }
  for (double v : c.g_canting) lines.push_back(v);
  // canted-branch radicand vanishes where the cavity shift equals J
  const double w = p.omega * p.omega + p.kappa * p.kappa;
  lines.push_back(std::sqrt(p.j * w / p.omega));
  double d = 1e300;
  for (double v : lines) d = std::min(d, std::abs(p.g - v));
  return d;
}

}  // namespace

TEST_CASE("Routh-Hurwitz examples") {
  const Quartic q{1.0, 2.65, 1.4, 0.75};
  CHECK(q.delta2() == doctest::Approx(1.25));
  CHECK(q.delta3() == doctest::Approx(1.0));
  CHECK(routh_hurwitz_quartic(q) == Verdict::Stable);
  CHECK(routh_hurwitz_quartic(1.0, 2.65, 1.4, -0.21) == Verdict::Unstable);
  CHECK(routh_hurwitz_quartic(1.0, 1.0, 1.0, 0.0) == Verdict::Marginal);
  CHECK(routh_hurwitz_quartic(1.0, 1.0, 1.0, 5e-9) == Verdict::Marginal);
  CHECK(routh_hurwitz_quartic(1.0, 1.0, 1.0, 5e-9, 1e-9) != Verdict::Marginal);
}

TEST_CASE("Routh-Hurwitz agrees with companion spectra") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 4.0);
  int compared = 0, stable = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Quartic q{u(rng), u(rng), u(rng), u(rng)};
    const auto roots = quartic_roots(q);
    double max_re = -1e300;
    for (auto r : roots) max_re = std::max(max_re, r.real());
    const Verdict v = routh_hurwitz_quartic(q);
    if (v == Verdict::Marginal || std::abs(max_re) < 1e-6) continue;
    ++compared;
    if (v == Verdict::Stable) ++stable;
    CHECK((v == Verdict::Stable) == (max_re < 0.0));
  }
  CHECK(compared > 9900);
  CHECK(stable > 500);
}

TEST_CASE("normal-state quartic on the longitudinal axis") {
  const auto p = make(IsingAxis::Longitudinal, 0.1, 0.5, 0.5);
  const auto pn = of_phase(p, PhaseLabel::PN).front();
  const auto block = block_decomposition(pn, p);
  REQUIRE(block.has_value());
  CHECK(block->quartic.a1 == doctest::Approx(1.0));
  CHECK(block->quartic.a2 == doctest::Approx(2.65));
  CHECK(block->quartic.a3 == doctest::Approx(1.4));
  CHECK(block->quartic.a4 == doctest::Approx(0.75));
  // out-of-phase pair at +-i sqrt(Omega (chi + 4 J s^z)) with chi = Omega, s^z = -1
  const auto anti = eig(block->antisymmetric);
  for (auto l : anti) {
    CHECK(std::abs(l.real()) < 1e-14);
    CHECK(std::abs(l.imag()) == doctest::Approx(std::sqrt(0.6)));
  }
  const auto hot = p.with_couplings(0.1, 0.7);
  const auto pn7 = of_phase(hot, PhaseLabel::PN).front();
  CHECK(block_decomposition(pn7, hot)->quartic.a4 == doctest::Approx(-0.21));
  CHECK(routh_hurwitz_quartic(block_decomposition(pn7, hot)->quartic) == Verdict::Unstable);
}

TEST_CASE("transverse normal-state matrix entries") {
  const auto p = make(IsingAxis::Transverse, 0.1, 0.3, 0.5);
  const auto m = jacobian(of_phase(p, PhaseLabel::PN).front(), p);
  REQUIRE(m.dim == 6);
  const double prec = 1.0 - 0.4;
  CHECK(m.entries(2, 3) == doctest::Approx(-prec));
  CHECK(m.entries(3, 2) == doctest::Approx(prec));
  CHECK(m.entries(4, 5) == doctest::Approx(-prec));
  CHECK(m.entries(5, 4) == doctest::Approx(prec));
  CHECK(m.entries(3, 0) == doctest::Approx(4.0 * 0.3));
  CHECK(m.entries(1, 2) == doctest::Approx(-0.15));
  CHECK(m.entries(0, 0) == -0.5);
  CHECK(m.entries(1, 0) == -1.0);
}

TEST_CASE("spectrum of the field block and ordering") {
  Eigen::MatrixXd m(2, 2);
  m << -0.5, 1.0, -1.0, -0.5;
  const auto s = spectrum(m);
  REQUIRE(s.size() == 2);
  CHECK(s[0].real() == doctest::Approx(-0.5));
  CHECK(s[0].imag() == doctest::Approx(1.0));
  CHECK(s[1].imag() == doctest::Approx(-1.0));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << -2.0, 3.0, 0.5;
  const auto sd = spectrum(d);
  CHECK(sd[0].real() == 3.0);
  CHECK(sd[1].real() == 0.5);
  CHECK(sd[2].real() == -2.0);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(spectrum(bad), std::runtime_error);
}

TEST_CASE("reduced matrices match finite differences at every branch") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uj(0.0, 0.6), ug(0.0, 1.5), uk(0.0, 1.0);
  const double h = 1e-6;
  const int rows[6] = {0, 1, 2, 3, 5, 6};
  int checked = 0;
  auto run = [&](const ModelParams& p, const SteadyBranch& b) {
    const auto m = jacobian(b, p);
    if (m.dim != 6) return;
    ++checked;
    const double sign_a = b.state.s_a[2] < 0 ? -1.0 : 1.0;
    const double sign_b = b.state.s_b[2] < 0 ? -1.0 : 1.0;
    const std::array<double, 6> y0{b.state.alpha_r, b.state.alpha_i, b.state.s_a[0],
                                   b.state.s_a[1], b.state.s_b[0], b.state.s_b[1]};
    auto lift = [&](const std::array<double, 6>& y) {
      MeanFieldState s;
      s.alpha_r = y[0];
      s.alpha_i = y[1];
      s.s_a = {y[2], y[3], sign_a * std::sqrt(1.0 - y[2] * y[2] - y[3] * y[3])};
      s.s_b = {y[4], y[5], sign_b * std::sqrt(1.0 - y[4] * y[4] - y[5] * y[5])};
      return to_vector(s);
    };
    for (int c = 0; c < 6; ++c) {
      auto yp = y0, ym = y0;
      yp[c] += h;
      ym[c] -= h;
      const auto fp = eom_rhs(lift(yp), p), fm = eom_rhs(lift(ym), p);
      for (int r = 0; r < 6; ++r) {
        const double fd = (fp[rows[r]] - fm[rows[r]]) / (2.0 * h);
        const double exact = m.entries(r, c);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
      }
    }
  };
  const auto lon = make(IsingAxis::Longitudinal, 0.3, 1.0, 0.5);
  for (const auto& b : of_phase(lon, PhaseLabel::PS)) run(lon, b);
  CHECK(checked == 2);
  for (auto axis : {IsingAxis::Transverse, IsingAxis::Longitudinal}) {
    for (int trial = 0; trial < 300; ++trial) {
      const auto p = make(axis, uj(rng), ug(rng), uk(rng));
      for (const auto& b : existing_branches(p)) {
        if (std::abs(b.state.s_a[2]) < 1e-3 || std::abs(b.state.s_b[2]) < 1e-3) continue;
        run(p, b);
      }
    }
  }
  CHECK(checked > 2000);
}

TEST_CASE("tangent projection is used when a spin lies in the equator") {
  const auto p = make(IsingAxis::Transverse, 0.3, 0.5, 0.5);
  MeanFieldState s;
  s.s_a = {1.0, 0.0, 0.0};
  s.s_b = {0.0, 0.0, -1.0};
  const auto m = jacobian(s, p);
  REQUIRE(m.dim == 8);
  // rows and columns along each spin direction are annihilated
  CHECK(m.entries.row(2).norm() < 1e-15);
  CHECK(m.entries.col(2).norm() < 1e-15);
  CHECK(m.entries.row(7).norm() < 1e-15);
  CHECK(m.entries.col(7).norm() < 1e-15);
  const Matrix8 full = full_jacobian(s, p);
  CHECK(m.entries(0, 1) == full(0, 1));
}

TEST_CASE("classification examples") {
  const auto lon = make(IsingAxis::Longitudinal, 0.3, 0.9, 0.5);
  for (const auto& b : of_phase(lon, PhaseLabel::AFN)) {
    const auto r = classify_stability(b, lon);
    CHECK(counts_stable(r.numeric_verdict));
    CHECK_FALSE(r.defective);
    CHECK(r.analytic_verdict == Verdict::Stable);
  }
  const auto lon1 = make(IsingAxis::Longitudinal, 0.3, 1.0, 0.5);
  const auto afs = of_phase(lon1, PhaseLabel::AFS);
  REQUIRE_FALSE(afs.empty());
  for (const auto& b : afs) {
    const auto r = classify_stability(b, lon1);
    CHECK(r.numeric_verdict == Verdict::Unstable);
    CHECK(r.analytic_verdict == Verdict::Unstable);
  }
  const auto tr = make(IsingAxis::Transverse, 0.3, 0.4, 0.5);
  for (const auto& b : of_phase(tr, PhaseLabel::AFN)) {
    const auto r = classify_stability(b, tr);
    CHECK(r.numeric_verdict == Verdict::Unstable);
    CHECK(r.analytic_verdict == Verdict::Unstable);
    CHECK(r.max_real > 1e-3);
  }
  for (const auto& b : existing_branches(tr)) {
    if (!b.principal) CHECK(classify_stability(b, tr).analytic_verdict == Verdict::NotApplicable);
  }
}

TEST_CASE("closed-form verdict examples") {
  const auto ps = make(IsingAxis::Transverse, 0.3, 0.6, 0.5);
  CHECK(effective_coupling(ps) == doctest::Approx(0.588));
  CHECK(canting_cubic(0.588, ps) == doctest::Approx(0.233607).epsilon(1e-5));
  CHECK(analytic_stability(PhaseLabel::PS, ps) == Verdict::Stable);
  const auto afs = make(IsingAxis::Transverse, 0.3, 0.45, 0.5);
  CHECK(canting_cubic(effective_coupling(afs), afs) < 0.0);
  CHECK(analytic_stability(PhaseLabel::AFS, afs) == Verdict::Stable);
  CHECK(analytic_stability(PhaseLabel::PS, afs) == Verdict::Unstable);
  CHECK(analytic_stability(PhaseLabel::PS, make(IsingAxis::Longitudinal, 0.3, 0.8, 0.5)) ==
        Verdict::Unstable);
  CHECK(analytic_stability(PhaseLabel::AFS, make(IsingAxis::Longitudinal, 0.3, 1.0, 0.5)) ==
        Verdict::Unstable);
  CHECK(analytic_stability(PhaseLabel::Bistable, afs) == Verdict::NotApplicable);
  // exactly on the line
  const auto on = make(IsingAxis::Longitudinal, 0.1, std::sqrt(1.4 * 1.25 / 4.0), 0.5);
  CHECK(analytic_stability(PhaseLabel::PN, on) != Verdict::Unstable);
}

TEST_CASE("critical couplings") {
  const auto c = critical_couplings(make(IsingAxis::Longitudinal, 0.3, 0.0, 0.5));
  CHECK(c.j_c == 0.25);
  REQUIRE(c.g_c2);
  CHECK(*c.g_c2 == doctest::Approx(0.9565563234854496).epsilon(1e-12));
  CHECK(*c.g_c2 >= 0.956);
  CHECK(*c.g_c2 <= 0.958);
  CHECK(*c.g_c3 == doctest::Approx(0.8408809683121423).epsilon(1e-12));
  CHECK(*c.g_c1 == doctest::Approx(0.82915619758885).epsilon(1e-12));
  CHECK(*c.g_tet == doctest::Approx(0.7905694150420949).epsilon(1e-12));
  CHECK(c.g_dicke == doctest::Approx(0.5590169943749475).epsilon(1e-12));
  CHECK(c.g_canting.empty());

  const auto c0 = critical_couplings(make(IsingAxis::Longitudinal, 0.3, 0.0, 0.0));
  CHECK(*c0.g_c1 == doctest::Approx(std::sqrt(0.55)).epsilon(1e-12));
  CHECK(c0.g_dicke == 0.5);

  const auto t1 = critical_couplings(make(IsingAxis::Transverse, 0.1, 0.0, 0.5));
  CHECK(*t1.g_c1 == doctest::Approx(0.4330127018922193).epsilon(1e-12));
  CHECK_FALSE(t1.g_c2.has_value());
  CHECK_FALSE(t1.g_c3.has_value());
  CHECK_FALSE(t1.g_tet.has_value());

  const auto t3 = critical_couplings(make(IsingAxis::Transverse, 0.3, 0.0, 0.5));
  CHECK(*t3.g_c2 == doctest::Approx(0.338501600193165).epsilon(1e-12));
  CHECK_FALSE(t3.g_c1.has_value());
  REQUIRE(t3.g_canting.size() == 1);
  CHECK(t3.g_canting[0] == doctest::Approx(0.5412104080670537).epsilon(1e-10));
}

TEST_CASE("canting cubic has a re-entrant window just below J_c") {
  const auto p = make(IsingAxis::Transverse, 0.2381, 0.0, 0.5);
  const auto c = critical_couplings(p);
  REQUIRE(c.g_canting.size() == 2);
  const double mid = 0.5 * (c.g_canting[0] + c.g_canting[1]);
  const auto inside = p.with_couplings(p.j, mid);
  CHECK(analytic_stability(PhaseLabel::AFS, inside) == Verdict::Stable);
  CHECK(analytic_stability(PhaseLabel::PS, inside) == Verdict::Unstable);
  for (const auto& b : of_phase(inside, PhaseLabel::AFS)) CHECK(numeric_stable(b, inside));
  for (const auto& b : of_phase(inside, PhaseLabel::PS)) CHECK_FALSE(numeric_stable(b, inside));
  for (double x : c.g_canting) {
    const double j_eff = p.j + x * x / 1.25;
    CHECK(std::abs(canting_cubic(j_eff, p)) < 1e-12);
  }
}

TEST_CASE("longitudinal curves meet at J_c") {
  for (double kappa : {0.0, 0.2, 0.5, 1.0, 2.0}) {
    const auto c = critical_couplings(make(IsingAxis::Longitudinal, 0.25, 0.0, kappa));
    CHECK(std::abs(*c.g_c1 - *c.g_tet) < 1e-12);
    CHECK(std::abs(*c.g_c2 - *c.g_tet) < 1e-12);
    CHECK(std::abs(*c.g_c3 - *c.g_tet) < 1e-12);
  }
}

TEST_CASE("undamped limits coincide with the ground-state values") {
  for (double j = 0.0; j <= 0.6; j += 0.025) {
    for (auto axis : {IsingAxis::Transverse, IsingAxis::Longitudinal}) {
      const auto p = make(axis, j, 0.5, 0.0);
      const auto d = critical_couplings(p);
      const auto g = gs_critical_couplings(p);
      CHECK(d.j_c == g.j_c);
      CHECK(d.g_c1.has_value() == g.g_c1.has_value());
      CHECK(d.g_c2.has_value() == g.g_c2.has_value());
      if (d.g_c1 && g.g_c1) CHECK(std::abs(*d.g_c1 - *g.g_c1) < 1e-12);
      if (d.g_c2 && g.g_c2) CHECK(std::abs(*d.g_c2 - *g.g_c2) < 1e-12);
      if (d.g_c3 && g.g_c3) CHECK(std::abs(*d.g_c3 - *g.g_c3) < 1e-12);
      // small damping approaches the same values
      const auto near = critical_couplings(p.with_kappa(1e-6));
      if (near.g_c1 && g.g_c1) CHECK(std::abs(*near.g_c1 - *g.g_c1) < 1e-9);
    }
  }
}

TEST_CASE("spectra cross the imaginary axis on the closed-form lines") {
  struct Line {
    IsingAxis axis;
    double j;
    double kappa;
    PhaseLabel phase;
    double g;
  };
  std::vector<Line> lines;
  for (double kappa : {0.2, 0.5, 1.0}) {
    for (double j : {0.05, 0.1, 0.2}) {
      const auto c = critical_couplings(make(IsingAxis::Longitudinal, j, 0.0, kappa));
      lines.push_back({IsingAxis::Longitudinal, j, kappa, PhaseLabel::PN, *c.g_c1});
      const auto t = critical_couplings(make(IsingAxis::Transverse, j, 0.0, kappa));
      lines.push_back({IsingAxis::Transverse, j, kappa, PhaseLabel::PN, *t.g_c1});
    }
    for (double j : {0.3, 0.4, 0.5}) {
      const auto c = critical_couplings(make(IsingAxis::Longitudinal, j, 0.0, kappa));
      lines.push_back({IsingAxis::Longitudinal, j, kappa, PhaseLabel::AFN, *c.g_c2});
      lines.push_back({IsingAxis::Longitudinal, j, kappa, PhaseLabel::PS, *c.g_c3});
      const auto t = critical_couplings(make(IsingAxis::Transverse, j, 0.0, kappa));
      lines.push_back({IsingAxis::Transverse, j, kappa, PhaseLabel::AFN, *t.g_c2});
      for (double gc : t.g_canting)
        lines.push_back({IsingAxis::Transverse, j, kappa, PhaseLabel::PS, gc});
    }
  }
  CHECK(lines.size() > 40);
  for (const auto& line : lines) {
    CAPTURE(to_string(line.axis));
    CAPTURE(line.j);
    CAPTURE(line.kappa);
    CAPTURE(to_string(line.phase));
    const auto p = make(line.axis, line.j, line.g, line.kappa);
    const auto branches = of_phase(p, line.phase);
    REQUIRE_FALSE(branches.empty());
    for (const auto& b : branches) {
      const auto eigen = spectrum(jacobian(b, p));
      double smallest = 1e300;
      for (auto l : eigen) smallest = std::min(smallest, std::abs(l));
      CHECK(smallest < 1e-6);
    }
  }
}

TEST_CASE("closed forms and spectra agree away from the lines") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uj(0.0, 0.6), ug(0.0, 1.5);
  const double kappas[3] = {0.2, 0.5, 1.0};
  int samples = 0, compared = 0, disagreements = 0;
  while (samples < 1000) {
    const auto axis = (samples % 2 == 0) ? IsingAxis::Longitudinal : IsingAxis::Transverse;
    const auto p = make(axis, uj(rng), ug(rng), kappas[samples % 3]);
    if (std::abs(p.j - 0.25) < 1e-3 || boundary_distance(p) < 1e-3) continue;
    ++samples;
    for (const auto& b : existing_branches(p)) {
      if (!b.principal) continue;
      const auto r = classify_stability(b, p);
      if (r.analytic_verdict == Verdict::NotApplicable) continue;
      ++compared;
      const bool numeric = counts_stable(r.numeric_verdict) && !r.defective;
      if (numeric != counts_stable(r.analytic_verdict)) {
        ++disagreements;
        MESSAGE(describe(b) << " at " << describe(p) << " max_real=" << r.max_real);
      }
    }
  }
  CHECK(compared > 2000);
  CHECK(disagreements == 0);
}

TEST_CASE("block decomposition reproduces the full reduced spectrum") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uj(0.0, 0.6), ug(0.0, 1.5), uk(0.05, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto axis = trial % 2 ? IsingAxis::Transverse : IsingAxis::Longitudinal;
    const auto p = make(axis, uj(rng), ug(rng), uk(rng));
    for (const auto& b : existing_branches(p)) {
      const auto block = block_decomposition(b, p);
      if (!block) continue;
      ++checked;
      const auto full = spectrum(jacobian(b, p));
      auto joined = eig(block->symmetric);
      for (auto l : eig(block->antisymmetric)) joined.push_back(l);
      CHECK(spectral_distance(full, joined) < 1e-8);
      CHECK(spectral_distance(eig(block->symmetric), quartic_roots(block->quartic)) < 1e-7);
    }
  }
  CHECK(checked > 400);
}

TEST_CASE("defective imaginary-axis modes") {
  Eigen::MatrixXd jordan(2, 2);
  jordan << 0.0, 1.0, 0.0, 0.0;
  CHECK(has_defective_marginal_mode(jordan));
  Eigen::MatrixXd rotation(2, 2);
  rotation << 0.0, 1.0, -1.0, 0.0;
  CHECK_FALSE(has_defective_marginal_mode(rotation));
  CHECK_FALSE(has_defective_marginal_mode(Eigen::MatrixXd::Zero(3, 3)));

  // zero-field x-staggered state: neutral spectrum but secular growth
  const auto p = make(IsingAxis::Transverse, 0.4, 0.5, 0.5);
  bool seen = false;
  for (const auto& b : existing_branches(p)) {
    if (b.note != "zero-field x-staggered state") continue;
    seen = true;
    const auto r = classify_stability(b, p);
    if (r.numeric_verdict == Verdict::Marginal) CHECK(r.defective);
    CHECK_FALSE(numeric_stable(b, p));
  }
  CHECK(seen);
}
