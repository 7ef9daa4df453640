#include "dicke/phasediagram.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "dicke/groundstate.hpp"
#include "dicke/stability.hpp"
#include "dicke/steadystate.hpp"

namespace dicke {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Analytic: return "analytic";
    case Method::Numeric: return "numeric";
    case Method::Both: return "both";
  }
  return "both";
}

std::optional<Method> parse_method(std::string_view text) {
  for (auto m : {Method::Analytic, Method::Numeric, Method::Both}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string_view to_string(BranchPolicy p) {
  switch (p) {
    case BranchPolicy::FollowAfn: return "follow-afn";
    case BranchPolicy::FollowPs: return "follow-ps";
    case BranchPolicy::LowestEnergy: return "lowest-energy";
    case BranchPolicy::UniqueStable: return "unique-stable";
  }
  return "unique-stable";
}

std::optional<BranchPolicy> parse_policy(std::string_view text) {
  for (auto p : {BranchPolicy::FollowAfn, BranchPolicy::FollowPs, BranchPolicy::LowestEnergy,
                 BranchPolicy::UniqueStable}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

namespace {

struct Assessment {
  std::vector<FamilyOrder> stable;
  std::string detail;

  void add(PhaseLabel family, const OrderParameters& order) {
    for (const auto& f : stable) {
      if (f.family == family) return;
    }
    stable.push_back({family, order});
  }
  void finish() {
    std::sort(stable.begin(), stable.end(),
              [](const auto& x, const auto& y) { return x.family < y.family; });
  }
  bool same_families(const Assessment& other) const {
    if (stable.size() != other.stable.size()) return false;
    for (std::size_t k = 0; k < stable.size(); ++k) {
      if (stable[k].family != other.stable[k].family) return false;
    }
    return true;
  }
};

Assessment assess_analytic(const ModelParams& params,
                           const std::vector<SteadyBranch>& branches) {
  Assessment a;
  std::ostringstream os;
  for (const auto& b : branches) {
    if (!b.principal) continue;
    const Verdict v = analytic_stability(b.phase, params);
    os << "  analytic " << describe(b) << " -> " << to_string(v) << "\n";
    if (counts_stable(v)) a.add(b.phase, order_parameters(b.state));
  }
  a.detail = os.str();
  a.finish();
  return a;
}

Assessment assess_numeric(const ModelParams& params, const std::vector<SteadyBranch>& branches) {
  Assessment a;
  std::ostringstream os;
  os.precision(6);
  // Without damping reaching the spins the linear spectrum is neutral; use energy minima.
  if (params.kappa == 0.0 || params.g == 0.0) {
    for (const auto& gb : gs_branches(params)) {
      if (!gb.exists) continue;
      os << "  hessian " << to_string(gb.phase) << " E=" << gb.energy
         << " minimum=" << gb.hessian_stable << "\n";
      if (gb.hessian_stable) a.add(gb.phase, gb.order);
    }
  } else {
    for (const auto& b : branches) {
      const StabilityReport r = classify_stability(b, params);
      const bool stable = counts_stable(r.numeric_verdict) && !r.defective;
      os << "  numeric " << describe(b) << " -> " << to_string(r.numeric_verdict)
         << (r.defective ? " (defective)" : "") << " max_re=" << r.max_real << "\n";
      if (stable) a.add(b.phase, order_parameters(b.state));
    }
  }
  a.detail = os.str();
  a.finish();
  return a;
}

PhaseLabel label_of(const std::vector<FamilyOrder>& stable) {
  if (stable.empty()) return PhaseLabel::Unclassified;
  if (stable.size() == 1) return stable.front().family;
  return PhaseLabel::Bistable;
}

}  // namespace

PhaseCell classify_point(const ModelParams& params, Method method) {
  validate(params);
  PhaseCell cell;
  cell.j = params.j;
  cell.g = params.g;
  cell.method = method;
  const auto branches = existing_branches(params);

  if (method == Method::Analytic) {
    cell.stable_branches = assess_analytic(params, branches).stable;
  } else if (method == Method::Numeric) {
    cell.stable_branches = assess_numeric(params, branches).stable;
  } else {
    const Assessment an = assess_analytic(params, branches);
    const Assessment nu = assess_numeric(params, branches);
    if (!an.same_families(nu)) {
      std::ostringstream os;
      os << "analytic and numeric classifications disagree at " << describe(params) << "\n"
         << an.detail << nu.detail;
      throw ConsistencyError(os.str());
    }
    cell.stable_branches = nu.stable;
  }
  cell.label = label_of(cell.stable_branches);
  return cell;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> v;
  if (steps <= 0) return v;
  v.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    v.push_back(lo);
    return v;
  }
  for (int k = 0; k < steps; ++k) {
    v.push_back(k == steps - 1 ? hi : lo + (hi - lo) * k / (steps - 1));
  }
  return v;
}

std::vector<double> GridSpec::j_values() const { return linspace(j_min, j_max, j_steps); }
std::vector<double> GridSpec::g_values() const { return linspace(g_min, g_max, g_steps); }

PhaseMap sweep(const ModelParams& base, const GridSpec& grid, Method method, int threads) {
  if (grid.j_steps <= 0 || grid.g_steps <= 0) {
    throw std::invalid_argument("grid step counts must be positive");
  }
  validate(base.with_couplings(std::max(0.0, grid.j_min), std::max(0.0, grid.g_min)));
  if (grid.j_min < 0.0 || grid.g_min < 0.0 || grid.j_max < grid.j_min ||
      grid.g_max < grid.g_min) {
    throw std::invalid_argument("grid ranges must be non-negative and ordered");
  }
  PhaseMap map;
  map.grid = grid;
  map.base = base;
  map.method = method;
  const auto js = grid.j_values();
  const auto gs = grid.g_values();
  const std::size_t total = js.size() * gs.size();
  map.cells.resize(total);
  std::vector<char> mismatched(total, 0);
  std::vector<std::exception_ptr> failures(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < total; k = next++) {
      const double j = js[k / gs.size()];
      const double g = gs[k % gs.size()];
      const ModelParams p = base.with_couplings(j, g);
      try {
        map.cells[k] = classify_point(p, method);
      } catch (const ConsistencyError& e) {
        PhaseCell c;
        c.j = j;
        c.g = g;
        c.method = method;
        c.label = PhaseLabel::Unclassified;
        c.diagnostic = e.what();
        map.cells[k] = std::move(c);
        mismatched[k] = 1;
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };

  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(total, 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (char m : mismatched) map.mismatch_count += m;
  return map;
}

namespace {

constexpr double kJumpFloor = 1e-2;

struct Selection {
  PhaseLabel family = PhaseLabel::Unclassified;
  OrderParameters order;
};

bool contains(const std::vector<FamilyOrder>& stable, PhaseLabel f) {
  return std::any_of(stable.begin(), stable.end(), [f](const auto& s) { return s.family == f; });
}

const OrderParameters& order_of(const std::vector<FamilyOrder>& stable, PhaseLabel f) {
  for (const auto& s : stable) {
    if (s.family == f) return s.order;
  }
  return stable.front().order;
}

Selection select(const std::vector<FamilyOrder>& stable, BranchPolicy policy,
                 std::optional<PhaseLabel> previous) {
  if (stable.empty()) return {};
  auto pick = [&](PhaseLabel f) { return Selection{f, order_of(stable, f)}; };
  // follow-afn emulates an upward sweep and follow-ps a downward one: the named family wins
  // wherever it is stable.
  if (policy == BranchPolicy::FollowAfn && contains(stable, PhaseLabel::AFN)) {
    return pick(PhaseLabel::AFN);
  }
  if (policy == BranchPolicy::FollowPs && contains(stable, PhaseLabel::PS)) {
    return pick(PhaseLabel::PS);
  }
  if (previous && contains(stable, *previous)) {
    if (policy != BranchPolicy::UniqueStable || stable.size() > 1) return pick(*previous);
  }
  return pick(stable.front().family);
}

struct Evaluation {
  PhaseLabel label = PhaseLabel::Unclassified;
  std::vector<FamilyOrder> stable;
  bool mismatch = false;
};

Evaluation evaluate(const ModelParams& p, BranchPolicy policy, Method method) {
  Evaluation e;
  if (policy == BranchPolicy::LowestEnergy) {
    const GroundPhase gp = gs_phase(p);
    e.label = gp.label;
    if (gp.label != PhaseLabel::Unclassified) e.stable.push_back({gp.label, gp.branch.order});
    return e;
  }
  try {
    const PhaseCell c = classify_point(p, method);
    e.label = c.label;
    e.stable = c.stable_branches;
  } catch (const ConsistencyError&) {
    const PhaseCell c = classify_point(p, Method::Analytic);
    e.label = PhaseLabel::Unclassified;
    e.stable = c.stable_branches;
    e.mismatch = true;
  }
  return e;
}

std::array<double, 4> components(const OrderParameters& o) {
  return {o.n, o.m_af_x, o.m_af_z, o.m_dk_x};
}

// A component that leaps by more than ten times its own variation on the neighbouring
// intervals (and by a visible amount) marks a jump rather than a steep continuous change.
bool is_jump(const std::vector<TracePoint>& pts, std::size_t k) {
  const auto prev = components(pts[k - 1].order), cur = components(pts[k].order);
  for (std::size_t c = 0; c < cur.size(); ++c) {
    const double jump = std::abs(cur[c] - prev[c]);
    double local = 0.0;
    if (k >= 2) local = std::max(local, std::abs(prev[c] - components(pts[k - 2].order)[c]));
    if (k + 1 < pts.size()) {
      local = std::max(local, std::abs(components(pts[k + 1].order)[c] - cur[c]));
    }
    if (jump > kJumpFloor && jump > 10.0 * local) return true;
  }
  return false;
}

}  // namespace

TraceCurve trace(const ModelParams& base, double fixed_j, const std::vector<double>& g_values,
                 BranchPolicy policy, Method method) {
  if (policy == BranchPolicy::LowestEnergy && base.kappa != 0.0) {
    throw std::invalid_argument("policy requires kappa=0");
  }
  if (g_values.empty()) throw std::invalid_argument("trace needs at least one g value");
  TraceCurve curve;
  curve.fixed_j = fixed_j;
  curve.policy = policy;

  std::optional<PhaseLabel> previous;
  for (double g : g_values) {
    const ModelParams p = validate(base.with_couplings(fixed_j, g));
    const Evaluation e = evaluate(p, policy, method);
    curve.mismatch_count += e.mismatch;
    const Selection s = select(e.stable, policy, previous);
    TracePoint pt;
    pt.g = g;
    pt.label = e.label;
    pt.family = s.family;
    pt.order = s.order;
    curve.points.push_back(pt);
    if (s.family != PhaseLabel::Unclassified) previous = s.family;
  }

  const auto& pts = curve.points;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (pts[k].family == pts[k - 1].family) continue;
    const bool discontinuous = is_jump(pts, k);
    curve.points[k].discontinuity = discontinuous;

    // Closed forms (or energies at kappa = 0) decide the switching point exactly.
    const Method refine_method = method == Method::Numeric && base.kappa == 0.0
                                     ? Method::Numeric
                                     : Method::Analytic;
    const PhaseLabel from = pts[k - 1].family;
    auto stays = [&](double g) {
      const ModelParams p = base.with_couplings(fixed_j, g);
      const Evaluation e = evaluate(p, policy, refine_method);
      return select(e.stable, policy, from).family == from;
    };
    double lo = pts[k - 1].g, hi = pts[k].g;
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      (stays(mid) ? lo : hi) = mid;
    }
    curve.transitions.push_back({0.5 * (lo + hi), from, pts[k].family, discontinuous});
  }
  return curve;
}

std::pair<double, double> tetracritical_point(const ModelParams& base) {
  if (base.axis != IsingAxis::Longitudinal) {
    throw std::invalid_argument("tetracritical point exists only for the longitudinal axis");
  }
  const double w = base.omega * base.omega + base.kappa * base.kappa;
  const double j = base.qubit_freq / 4.0;
  const double g = std::sqrt(base.qubit_freq * w / (2.0 * base.omega));
  const CriticalCouplings c = critical_couplings(base.with_couplings(j, base.g));
  for (double v : {*c.g_c1, *c.g_c2, *c.g_c3}) {
    if (std::abs(v - g) > 1e-12 * std::max(1.0, g)) {
      throw std::logic_error("critical lines do not meet at the tetracritical point");
    }
  }
  return {j, g};
}

}  // namespace dicke
