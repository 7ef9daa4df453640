#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicke/dynamics.hpp"
#include "dicke/groundstate.hpp"
#include "dicke/model.hpp"
#include "dicke/phasediagram.hpp"
#include "dicke/stability.hpp"
#include "dicke/steadystate.hpp"

namespace dicke::cli {

namespace {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Number, Integer, Text };

struct KeySpec {
  const char* key;
  const char* flag;
  Kind kind;
  const char* help;
};

constexpr KeySpec kKeys[] = {
    {"axis", "--axis", Kind::Text, "transverse | longitudinal"},
    {"omega", "--omega", Kind::Number, "cavity frequency; all rates are divided by it"},
    {"qubit_freq", "--qubit-freq", Kind::Number, "spin transition frequency"},
    {"kappa", "--kappa", Kind::Number, "cavity damping rate"},
    {"j", "--j", Kind::Number, "Ising coupling"},
    {"g", "--g", Kind::Number, "spin-cavity coupling"},
    {"j_min", "--j-min", Kind::Number, "sweep: lower J"},
    {"j_max", "--j-max", Kind::Number, "sweep: upper J"},
    {"j_steps", "--j-steps", Kind::Integer, "sweep: J samples"},
    {"g_min", "--g-min", Kind::Number, "sweep/trace: lower g"},
    {"g_max", "--g-max", Kind::Number, "sweep/trace: upper g"},
    {"g_steps", "--g-steps", Kind::Integer, "sweep/trace: g samples"},
    {"method", "--method", Kind::Text, "analytic | numeric | both"},
    {"policy", "--policy", Kind::Text, "follow-afn | follow-ps | lowest-energy | unique-stable"},
    {"init", "--init", Kind::Text, "afn-like | ps-like | explicit:<8 comma-separated numbers>"},
    {"t_max", "--t-max", Kind::Number, "evolve: integration horizon"},
    {"steady_tol", "--steady-tol", Kind::Number, "evolve: stop when max |rhs| drops below"},
    {"sample_dt", "--sample-dt", Kind::Number, "evolve: trajectory sample spacing"},
    {"out", "--out", Kind::Text, "output file; stdout when absent"},
    {"format", "--format", Kind::Text, "csv | json"},
    {"threads", "--threads", Kind::Integer, "worker threads for sweeps"},
};

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Rounded to 12 significant digits so JSON output matches the CSV precision.
json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt12(v));
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json to_json(const OrderParameters& op) {
  return json{{"n", num(op.n)},
              {"m_af_x", num(op.m_af_x)},
              {"m_af_z", num(op.m_af_z)},
              {"m_dk_x", num(op.m_dk_x)}};
}

json defaults(const std::string& sub) {
  return json{{"axis", "transverse"}, {"omega", 1.0},   {"qubit_freq", 1.0},
              {"kappa", 0.5},         {"j", 0.3},       {"g", 0.5},
              {"j_min", 0.0},         {"j_max", 0.5},   {"j_steps", 200},
              {"g_min", 0.0},         {"g_max", 1.5},   {"g_steps", 200},
              {"method", nullptr},    {"policy", "unique-stable"},
              {"init", "ps-like"},    {"t_max", kDefaultRelaxTime},
              {"steady_tol", kDefaultSteadyTol},        {"sample_dt", 1.0},
              {"out", nullptr},       {"format", sub == "critical" || sub == "ground" ? "json" : "csv"},
              {"threads", 0}};
}

json parse_value(const KeySpec& spec, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case Kind::Number: {
        const double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::Integer: {
        const long long v = std::stoll(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::Text:
        return text;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("invalid value for ") + spec.flag + ": '" + text + "'");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc["config"].is_object()) return doc["config"];
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  return doc;
}

void merge_into(json& target, const json& source, const char* origin) {
  for (const auto& [key, value] : source.items()) {
    if (!target.contains(key)) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + origin);
    }
    target[key] = value;
  }
}

double get_number(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

long long get_integer(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
    return static_cast<long long>(v.get<double>());
  }
  throw ConfigError(std::string(key) + " must be an integer");
}

std::string get_text(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

struct Resolved {
  std::string subcommand;
  json config;          // as given, in the caller's units
  ModelParams params;   // normalized to omega = 1
  double omega = 1.0;   // the caller's omega, used for the normalization
  std::optional<std::string> out;
  std::string format;
};

Resolved resolve(const std::string& sub, const json& cfg) {
  Resolved r;
  r.subcommand = sub;
  r.config = cfg;
  const auto axis = parse_axis(get_text(cfg, "axis"));
  if (!axis) throw ConfigError("axis must be transverse or longitudinal");
  ModelParams raw;
  raw.omega = get_number(cfg, "omega");
  raw.qubit_freq = get_number(cfg, "qubit_freq");
  raw.kappa = get_number(cfg, "kappa");
  raw.j = get_number(cfg, "j");
  raw.g = get_number(cfg, "g");
  raw.axis = *axis;
  try {
    validate(raw);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  r.omega = raw.omega;
  r.params = raw;
  r.params.omega = 1.0;
  r.params.qubit_freq = raw.qubit_freq / raw.omega;
  r.params.kappa = raw.kappa / raw.omega;
  r.params.j = raw.j / raw.omega;
  r.params.g = raw.g / raw.omega;
  if (!cfg.at("out").is_null()) r.out = get_text(cfg, "out");
  r.format = get_text(cfg, "format");
  if (r.format != "csv" && r.format != "json") throw ConfigError("format must be csv or json");
  if ((sub == "critical" || sub == "ground") && r.format != "json") {
    throw ConfigError(sub + " writes a JSON record; format must be json");
  }
  return r;
}

json params_json(const ModelParams& p) {
  return json{{"axis", std::string(to_string(p.axis))},
              {"omega", num(p.omega)},
              {"qubit_freq", num(p.qubit_freq)},
              {"g", num(p.g)},
              {"j", num(p.j)},
              {"kappa", num(p.kappa)}};
}

json metadata(const Resolved& r, double wall_seconds) {
  return json{{"tool", std::string(kToolName)},
              {"version", std::string(kVersion)},
              {"subcommand", r.subcommand},
              {"config", r.config},
              {"params", params_json(r.params)},
              {"wall_time_s", wall_seconds}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

// Data goes to --out (plus a sidecar) or to stdout.
void emit(const Resolved& r, const std::string& data, const json& meta, std::ostream& out) {
  if (r.out) {
    write_text(*r.out, data);
    write_text(*r.out + ".meta.json", meta.dump(2) + "\n");
  } else {
    out << data;
  }
}

Method resolve_method(const json& cfg, std::size_t cells) {
  if (cfg.at("method").is_null()) return cells <= 256u * 256u ? Method::Both : Method::Analytic;
  const auto m = parse_method(get_text(cfg, "method"));
  if (!m) throw ConfigError("method must be analytic, numeric or both");
  return *m;
}

GridSpec grid_of(const Resolved& r) {
  GridSpec g;
  g.j_min = get_number(r.config, "j_min") / r.omega;
  g.j_max = get_number(r.config, "j_max") / r.omega;
  g.g_min = get_number(r.config, "g_min") / r.omega;
  g.g_max = get_number(r.config, "g_max") / r.omega;
  const long long js = get_integer(r.config, "j_steps");
  const long long gs = get_integer(r.config, "g_steps");
  if (js <= 0 || gs <= 0) throw ConfigError("grid step counts must be positive");
  if (js > 100000 || gs > 100000) throw ConfigError("grid step counts are too large");
  g.j_steps = static_cast<int>(js);
  g.g_steps = static_cast<int>(gs);
  if (g.j_min < 0.0 || g.g_min < 0.0) throw ConfigError("grid ranges must be non-negative");
  if (g.j_max < g.j_min || g.g_max < g.g_min) throw ConfigError("grid ranges must be ordered");
  return g;
}

std::string row(std::initializer_list<std::string> fields) {
  std::string s;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) s += ',';
    s += f;
    first = false;
  }
  s += '\n';
  return s;
}

int cmd_sweep(const Resolved& r, std::ostream& out, std::ostream& err) {
  const GridSpec grid = grid_of(r);
  const Method method =
      resolve_method(r.config, static_cast<std::size_t>(grid.j_steps) * grid.g_steps);
  const long long threads = get_integer(r.config, "threads");
  const auto t0 = std::chrono::steady_clock::now();
  const PhaseMap map = sweep(r.params, grid, method, static_cast<int>(threads));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string data;
  if (r.format == "csv") {
    data = "j,g,label,n,m_af_x,m_af_z,m_dk_x,stable_families\n";
    for (const auto& c : map.cells) {
      const std::string label(to_string(c.label));
      if (c.stable_branches.empty()) {
        data += row({fmt12(c.j), fmt12(c.g), label, "", "", "", "", ""});
      }
      for (const auto& f : c.stable_branches) {
        data += row({fmt12(c.j), fmt12(c.g), label, fmt12(f.order.n), fmt12(f.order.m_af_x),
                     fmt12(f.order.m_af_z), fmt12(f.order.m_dk_x),
                     std::string(to_string(f.family))});
      }
    }
  } else {
    json cells = json::array();
    for (const auto& c : map.cells) {
      json stable = json::array();
      for (const auto& f : c.stable_branches) {
        json e = to_json(f.order);
        e["family"] = std::string(to_string(f.family));
        stable.push_back(e);
      }
      cells.push_back(json{{"j", num(c.j)},
                           {"g", num(c.g)},
                           {"label", std::string(to_string(c.label))},
                           {"stable", stable}});
    }
    data = json{{"cells", cells}}.dump(1) + "\n";
  }

  json meta = metadata(r, wall);
  meta["method"] = std::string(to_string(method));
  meta["grid"] = json{{"j_min", num(grid.j_min)}, {"j_max", num(grid.j_max)},
                      {"j_steps", grid.j_steps},  {"g_min", num(grid.g_min)},
                      {"g_max", num(grid.g_max)}, {"g_steps", grid.g_steps}};
  meta["mismatch_count"] = map.mismatch_count;
  emit(r, data, meta, out);

  if (map.mismatch_count > 0) {
    err << "sweep: " << map.mismatch_count << " cell(s) where analytic and numeric disagree\n";
    for (const auto& c : map.cells) {
      if (!c.diagnostic.empty()) {
        err << c.diagnostic;
        break;
      }
    }
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_trace(const Resolved& r, std::ostream& out, std::ostream& err) {
  const auto policy = parse_policy(get_text(r.config, "policy"));
  if (!policy) throw ConfigError("unknown policy '" + get_text(r.config, "policy") + "'");
  const double g_min = get_number(r.config, "g_min") / r.omega;
  const double g_max = get_number(r.config, "g_max") / r.omega;
  const long long steps = get_integer(r.config, "g_steps");
  if (steps <= 0) throw ConfigError("g_steps must be positive");
  if (g_min < 0.0 || g_max < g_min) throw ConfigError("g range must be non-negative and ordered");
  const Method method = resolve_method(r.config, 0);

  const auto t0 = std::chrono::steady_clock::now();
  TraceCurve curve;
  try {
    curve = trace(r.params, r.params.j, linspace(g_min, g_max, static_cast<int>(steps)), *policy,
                  method);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string data;
  if (r.format == "csv") {
    data = "g,label,n,m_af_x,m_af_z,m_dk_x,discontinuity\n";
    for (const auto& p : curve.points) {
      data += row({fmt12(p.g), std::string(to_string(p.family)), fmt12(p.order.n),
                   fmt12(p.order.m_af_x), fmt12(p.order.m_af_z), fmt12(p.order.m_dk_x),
                   p.discontinuity ? "1" : "0"});
    }
  } else {
    json pts = json::array();
    for (const auto& p : curve.points) {
      json e = to_json(p.order);
      e["g"] = num(p.g);
      e["label"] = std::string(to_string(p.family));
      e["phase"] = std::string(to_string(p.label));
      e["discontinuity"] = p.discontinuity;
      pts.push_back(e);
    }
    data = json{{"points", pts}}.dump(1) + "\n";
  }

  json transitions = json::array();
  for (const auto& t : curve.transitions) {
    transitions.push_back(json{{"g", num(t.g)},
                               {"from", std::string(to_string(t.from))},
                               {"to", std::string(to_string(t.to))},
                               {"discontinuous", t.discontinuous}});
  }
  json meta = metadata(r, wall);
  meta["method"] = std::string(to_string(method));
  meta["policy"] = std::string(to_string(*policy));
  meta["transitions"] = transitions;
  meta["mismatch_count"] = curve.mismatch_count;
  emit(r, data, meta, out);
  if (curve.mismatch_count > 0) {
    err << "trace: " << curve.mismatch_count << " point(s) where analytic and numeric disagree\n";
    return kExitMismatch;
  }
  return kExitOk;
}

MeanFieldState initial_state(const std::string& init, const ModelParams& params) {
  if (init == "afn-like") {
    try {
      return preset_afn_like(params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (init == "ps-like") return preset_ps_like(params);
  const std::string prefix = "explicit:";
  if (init.rfind(prefix, 0) != 0) {
    throw ConfigError("init must be afn-like, ps-like or explicit:<8 numbers>");
  }
  std::vector<double> v;
  std::stringstream ss(init.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("explicit initial state has a malformed number: '" + item + "'");
    }
  }
  if (v.size() != 8) throw ConfigError("explicit initial state needs exactly 8 numbers");
  StateVector x;
  std::copy(v.begin(), v.end(), x.begin());
  const MeanFieldState s = from_vector(x);
  if (!has_unit_spins(s)) throw ConfigError("explicit spins must have unit length");
  return s;
}

int cmd_evolve(const Resolved& r, std::ostream& out, std::ostream&) {
  const std::string init = get_text(r.config, "init");
  const MeanFieldState s0 = initial_state(init, r.params);
  const double t_max = get_number(r.config, "t_max") * r.omega;
  const double tol = get_number(r.config, "steady_tol");
  const double sample_dt = get_number(r.config, "sample_dt") * r.omega;
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (!(tol > 0.0)) throw ConfigError("steady_tol must be positive");
  if (!(sample_dt > 0.0)) throw ConfigError("sample_dt must be positive");

  StepControl control;
  control.sample_dt = sample_dt;
  std::vector<double> times;
  std::vector<MeanFieldState> states;
  const auto t0 = std::chrono::steady_clock::now();
  const RelaxationResult res = relax_to_steady(
      s0, r.params, tol, t_max, control, [&](double t, const MeanFieldState& s) {
        times.push_back(t);
        states.push_back(s);
      });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Nearest closed-form stationary state, by max-norm distance.
  const SteadyBranch* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  const auto branches = existing_branches(r.params);
  const StateVector xf = to_vector(res.final_state);
  for (const auto& b : branches) {
    const StateVector xb = to_vector(b.state);
    double d = 0.0;
    for (std::size_t k = 0; k < xf.size(); ++k) d = std::max(d, std::abs(xf[k] - xb[k]));
    if (d < best) {
      best = d;
      nearest = &b;
    }
  }

  std::string data;
  if (r.format == "csv") {
    data = "t,alpha_r,alpha_i,sax,say,saz,sbx,sby,sbz,spin_norm_err\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto x = to_vector(states[k]);
      data += row({fmt12(times[k]), fmt12(x[0]), fmt12(x[1]), fmt12(x[2]), fmt12(x[3]),
                   fmt12(x[4]), fmt12(x[5]), fmt12(x[6]), fmt12(x[7]),
                   fmt12(spin_norm_error(states[k]))});
    }
  } else {
    json samples = json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
      json e = json::array({num(times[k])});
      for (double v : to_vector(states[k])) e.push_back(num(v));
      e.push_back(num(spin_norm_error(states[k])));
      samples.push_back(e);
    }
    data = json{{"columns", {"t", "alpha_r", "alpha_i", "sax", "say", "saz", "sbx", "sby", "sbz",
                             "spin_norm_err"}},
                {"samples", samples}}
               .dump(1) +
           "\n";
  }

  json summary{{"converged", res.converged},
               {"residual", num(res.residual)},
               {"elapsed_time", num(res.elapsed_time / r.omega)},
               {"family", nearest ? json(std::string(to_string(nearest->phase))) : json(nullptr)},
               {"family_distance", nearest ? num(best) : json(nullptr)},
               {"order", to_json(order_parameters(res.final_state))},
               {"note", res.note}};
  json meta = metadata(r, wall);
  meta["summary"] = summary;
  emit(r, data, meta, out);
  if (!r.out) out.flush();
  return kExitOk;
}

json critical_record(const ModelParams& p) {
  const CriticalCouplings c = critical_couplings(p);
  json rec{{"j_c", num(c.j_c)},  {"g_c1", opt(c.g_c1)},       {"g_c2", opt(c.g_c2)},
           {"g_c3", opt(c.g_c3)}, {"g_tet", opt(c.g_tet)},     {"g_dicke", num(c.g_dicke)}};
  if (p.axis == IsingAxis::Transverse) {
    json roots = json::array();
    for (double g : c.g_canting) roots.push_back(num(g));
    rec["g_canting"] = roots;
  } else {
    const auto [tj, tg] = tetracritical_point(p);
    rec["tetracritical"] = json{{"j", num(tj)}, {"g", num(tg)}};
  }
  return rec;
}

json ground_critical_record(const ModelParams& p) {
  const GroundCriticalCouplings c = gs_critical_couplings(p);
  json rec{{"j_c", num(c.j_c)},
           {"g_c0", opt(c.g_c0)},
           {"g_c1", opt(c.g_c1)},
           {"g_c2", opt(c.g_c2)},
           {"g_c3", opt(c.g_c3)}};
  rec["tricritical"] =
      c.tricritical ? json{{"j", num(c.tricritical->first)}, {"g", num(c.tricritical->second)}}
                    : json(nullptr);
  return rec;
}

int cmd_critical(const Resolved& r, std::ostream& out) {
  json doc{{"tool", std::string(kToolName)},
           {"version", std::string(kVersion)},
           {"config", r.config},
           {"params", params_json(r.params)},
           {"critical", critical_record(r.params)},
           {"ground", ground_critical_record(r.params)}};
  const std::string text = doc.dump(2) + "\n";
  if (r.out) {
    write_text(*r.out, text);
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_ground(const Resolved& r, std::ostream& out) {
  const GroundPhase gp = gs_phase(r.params);
  json branches = json::array();
  for (const auto& b : gs_branches(r.params)) {
    json e{{"phase", std::string(to_string(b.phase))},
           {"exists", b.exists},
           {"principal", b.principal}};
    if (b.exists) {
      e["energy"] = num(b.energy);
      e["hessian_stable"] = b.hessian_stable;
      e["theta1"] = num(b.angle_state.theta1);
      e["theta2"] = num(b.angle_state.theta2);
      e["order"] = to_json(b.order);
    }
    if (!b.note.empty()) e["note"] = b.note;
    branches.push_back(e);
  }
  json doc{{"tool", std::string(kToolName)},
           {"version", std::string(kVersion)},
           {"config", r.config},
           {"params", params_json(r.params)},
           {"phase", std::string(to_string(gp.label))},
           {"energy", num(gp.branch.energy)},
           {"order", to_json(gp.branch.order)},
           {"branches", branches},
           {"critical", ground_critical_record(r.params)}};
  const std::string text = doc.dump(2) + "\n";
  if (r.out) {
    write_text(*r.out, text);
  } else {
    out << text;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field Dicke-Ising solver: phase maps, traces, dynamics, critical couplings"};
  app.require_subcommand(1);
  std::map<std::string, std::string> given;
  std::vector<std::pair<CLI::Option*, const KeySpec*>> options;
  std::string config_path;

  const char* subcommands[][2] = {
      {"sweep", "classify a (J, g) grid"},
      {"trace", "follow order parameters along g at fixed J"},
      {"evolve", "integrate the mean-field equations from a preset or explicit state"},
      {"critical", "closed-form critical couplings"},
      {"ground", "closed-system ground state"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : subcommands) {
    CLI::App* s = app.add_subcommand(name, help);
    for (const auto& spec : kKeys) {
      options.emplace_back(s->add_option(spec.flag, given[std::string(name) + "/" + spec.key],
                                         spec.help),
                           &spec);
    }
    s->add_option("--config", config_path, "JSON file with any of the flag keys");
    subs[name] = s;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  std::string sub;
  for (const auto& [name, s] : subs) {
    if (s->parsed()) sub = name;
  }

  try {
    json cfg = defaults(sub);
    if (!config_path.empty()) merge_into(cfg, load_config_file(config_path), "config file");
    json flags = json::object();
    for (const auto& [option, spec] : options) {
      if (option->count() == 0) continue;
      const std::string& text = given[sub + "/" + spec->key];
      if (subs[sub]->get_option_no_throw(spec->flag) != option) continue;
      flags[spec->key] = parse_value(*spec, text);
    }
    merge_into(cfg, flags, "flags");
    const Resolved r = resolve(sub, cfg);
    if (sub == "sweep") return cmd_sweep(r, out, err);
    if (sub == "trace") return cmd_trace(r, out, err);
    if (sub == "evolve") return cmd_evolve(r, out, err);
    if (sub == "critical") return cmd_critical(r, out);
    return cmd_ground(r, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IntegrationError& e) {
    err << "integration failed: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace dicke::cli
