#include "hylam/config.hpp"

#include <cmath>
#include <fstream>

#include "hylam/interp.hpp"

namespace hylam {

using nlohmann::json;

namespace {

// Collects every violation instead of stopping at the first.
struct Reader {
  std::vector<std::string>& errors;

  void fail(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }

  double num(const json& j, const std::string& path, const char* key,
             double fallback, bool required = false) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return fallback;
    }
    if (!j.at(key).is_number()) {
      fail(path + "." + key, "must be a number");
      return fallback;
    }
    return j.at(key).get<double>();
  }

  int integer(const json& j, const std::string& path, const char* key,
              int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
      fail(path + "." + key, "must be an integer");
      return fallback;
    }
    return j.at(key).get<int>();
  }

  std::string str(const json& j, const std::string& path, const char* key,
                  const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) {
      fail(path + "." + key, "must be a string");
      return fallback;
    }
    return j.at(key).get<std::string>();
  }

  std::vector<double> array(const json& j, const std::string& path,
                            const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) {
      fail(path + "." + key, "must be an array of numbers");
      return out;
    }
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) {
        fail(path + "." + key, "must be an array of numbers");
        return {};
      }
      out.push_back(v.get<double>());
    }
    return out;
  }
};

MaterialConfig parse_material(const json& j, const std::string& path,
                              Reader& r) {
  MaterialConfig m;
  m.family = r.str(j, path, "family", "power");
  if (m.family != "power" && m.family != "custom")
    r.fail(path + ".family", "unknown family '" + m.family + "'");
  m.a = r.num(j, path, "a", 1.0, m.family == "power");
  m.b = r.num(j, path, "b", 0.5, m.family == "power");
  if (m.family == "power") {
    if (!(m.a > 0.0)) r.fail(path + ".a", "must be positive");
    if (!(m.b > 0.0 && m.b < 1.0)) r.fail(path + ".b", "must lie in (0,1)");
  }
  if (j.contains("w")) {
    const json& w = j.at("w");
    m.w.family = r.str(w, path + ".w", "family", "quadratic");
    m.w.scale = r.num(w, path + ".w", "scale", 1.0);
    if (m.w.family != "quadratic" && m.w.family != "linear")
      r.fail(path + ".w.family", "unknown family '" + m.w.family + "'");
    if (!(m.w.scale > 0.0)) r.fail(path + ".w.scale", "must be positive");
  }
  return m;
}

LawConfig parse_law(const json& j, Reader& r) {
  LawConfig law;
  const std::string path = "law";
  law.kind = r.str(j, path, "kind", "quadratic_unloading");
  if (law.kind != "quadratic_unloading" && law.kind != "separable")
    r.fail(path + ".kind", "unknown kind '" + law.kind + "'");

  const bool has_parabolic = j.contains("parabolic");
  const bool has_exponential = j.contains("exponential");
  if (has_parabolic && has_exponential) {
    r.fail(path, "ambiguous: both parabolic and exponential blocks present");
  } else if (has_parabolic || has_exponential) {
    law.family = has_parabolic ? "parabolic" : "exponential";
    const json& fam = has_parabolic ? j.at("parabolic") : j.at("exponential");
    law.c = r.num(fam, path + "." + law.family, "c", 1.0, true);
    law.k = r.num(fam, path + "." + law.family, "k", 1.0, true);
  } else {
    law.family = r.str(j, path, "family", "parabolic");
    law.c = r.num(j, path, "c", 1.0);
    law.k = r.num(j, path, "k", 1.0);
  }
  if (law.kind == "quadratic_unloading") {
    if (law.family != "parabolic" && law.family != "exponential")
      r.fail(path + ".family", "unknown family '" + law.family + "'");
    if (!(law.c > 0.0)) r.fail(path + ".c", "must be positive");
    if (!(law.k > 0.0)) r.fail(path + ".k", "must be positive");
  }
  if (law.kind == "separable") {
    auto samples = [&](const char* key, std::vector<double>& xs,
                       std::vector<double>& ys) {
      if (!j.contains(key)) {
        r.fail(path + "." + key, "missing");
        return;
      }
      for (const auto& pair : j.at(key)) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number()) {
          r.fail(path + "." + key, "must be an array of [x, value] pairs");
          return;
        }
        xs.push_back(pair[0].get<double>());
        ys.push_back(pair[1].get<double>());
      }
      if (xs.size() < 2) r.fail(path + "." + key, "needs at least 2 samples");
    };
    samples("phi1_samples", law.phi1_x, law.phi1_y);
    samples("phi2_samples", law.phi2_x, law.phi2_y);
  }
  return law;
}

FieldInit parse_field(const json& j, const std::string& path, Reader& r) {
  FieldInit f;
  if (j.is_number()) {  // shorthand: a bare constant
    f.family = "constant";
    f.value = j.get<double>();
    return f;
  }
  if (!j.is_object()) {
    r.fail(path, "must be a number or an object");
    return f;
  }
  f.family = r.str(j, path, "family", "constant");
  if (f.family == "constant") {
    f.value = r.num(j, path, "value", 0.0);
  } else if (f.family == "affine") {
    f.left = r.num(j, path, "left", 0.0);
    f.right = r.num(j, path, "right", 0.0);
  } else if (f.family == "tabulated") {
    f.values = r.array(j, path, "values");
  } else {
    r.fail(path + ".family", "unknown family '" + f.family + "'");
  }
  return f;
}

void check_alpha_range(const FieldInit& f, const std::string& path,
                       Reader& r) {
  auto bad = [](double v) { return v < 0.0 || v > 1.0; };
  if (f.family == "constant" && bad(f.value))
    r.fail(path, "damage values must lie in [0,1]");
  if (f.family == "affine" && (bad(f.left) || bad(f.right)))
    r.fail(path, "damage values must lie in [0,1]");
  if (f.family == "tabulated")
    for (double v : f.values)
      if (bad(v)) {
        r.fail(path, "damage values must lie in [0,1]");
        break;
      }
}

}  // namespace

ParseResult parse_config_json(const json& root) {
  ParseResult result;
  std::vector<std::string>& errors = result.errors;
  Reader r{errors};
  if (!root.is_object()) {
    errors.push_back("config: top level must be an object");
    return result;
  }
  RunConfig cfg;

  for (const char* section :
       {"geometry", "material1", "material2", "law", "load", "time",
        "initial"})
    if (!root.contains(section))
      errors.push_back(std::string(section) + ": missing section");

  if (root.contains("geometry")) {
    const json& g = root.at("geometry");
    cfg.geometry.L = r.num(g, "geometry", "L", 1.0, true);
    cfg.geometry.n_elems = r.integer(g, "geometry", "n_elems", 32);
    if (!(cfg.geometry.L > 0.0)) r.fail("geometry.L", "must be positive");
    if (cfg.geometry.n_elems < 1) r.fail("geometry.n_elems", "must be >= 1");
  }
  if (root.contains("material1"))
    cfg.material1 = parse_material(root.at("material1"), "material1", r);
  if (root.contains("material2"))
    cfg.material2 = parse_material(root.at("material2"), "material2", r);
  if (root.contains("law")) cfg.law = parse_law(root.at("law"), r);

  if (root.contains("load")) {
    const json& l = root.at("load");
    cfg.load.profile = r.str(l, "load", "profile", "linear_ramp");
    cfg.load.T = r.num(l, "load", "T", 1.0, true);
    if (!(cfg.load.T > 0.0)) r.fail("load.T", "must be positive");
    if (cfg.load.profile == "linear_ramp") {
      cfg.load.rate = r.num(l, "load", "rate", 1.0, true);
    } else if (cfg.load.profile == "triangle") {
      cfg.load.peak_time = r.num(l, "load", "peak_time", 0.5, true);
      cfg.load.peak_value = r.num(l, "load", "peak_value", 1.0, true);
      cfg.load.end_value = r.num(l, "load", "end_value", 0.0, true);
      if (!(cfg.load.peak_time > 0.0 && cfg.load.peak_time < cfg.load.T))
        r.fail("load.peak_time", "must lie in (0, T)");
    } else if (cfg.load.profile == "tabulated") {
      cfg.load.times = r.array(l, "load", "times");
      cfg.load.values = r.array(l, "load", "values");
      if (cfg.load.times.size() != cfg.load.values.size() ||
          cfg.load.times.size() < 2)
        r.fail("load.times", "times/values must match with >= 2 samples");
    } else {
      r.fail("load.profile", "unknown profile '" + cfg.load.profile + "'");
    }
  }

  if (root.contains("time")) {
    const json& t = root.at("time");
    cfg.time.n_steps = r.integer(t, "time", "n_steps", 50);
    cfg.time.times = r.array(t, "time", "times");
    if (cfg.time.times.empty() && cfg.time.n_steps < 1)
      r.fail("time.n_steps", "must be >= 1");
  }

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    cfg.solver.max_outer_iters =
        r.integer(s, "solver", "max_outer_iters", cfg.solver.max_outer_iters);
    cfg.solver.tol_energy =
        r.num(s, "solver", "tol_energy", cfg.solver.tol_energy);
    cfg.solver.tol_grad = r.num(s, "solver", "tol_grad", cfg.solver.tol_grad);
    cfg.solver.n_restarts =
        r.integer(s, "solver", "n_restarts", cfg.solver.n_restarts);
    cfg.solver.restart_amplitude = r.num(s, "solver", "restart_amplitude",
                                         cfg.solver.restart_amplitude);
    cfg.solver.step_init = r.num(s, "solver", "step_init", cfg.solver.step_init);
    cfg.solver.step_shrink =
        r.num(s, "solver", "step_shrink", cfg.solver.step_shrink);
    cfg.solver.step_decrease =
        r.num(s, "solver", "step_decrease", cfg.solver.step_decrease);
    cfg.solver.max_inner_iters =
        r.integer(s, "solver", "max_inner_iters", cfg.solver.max_inner_iters);
    if (!(cfg.solver.tol_energy > 0.0))
      r.fail("solver.tol_energy", "must be positive");
    if (!(cfg.solver.tol_grad > 0.0))
      r.fail("solver.tol_grad", "must be positive");
    if (!(cfg.solver.step_shrink > 0.0 && cfg.solver.step_shrink < 1.0))
      r.fail("solver.step_shrink", "must lie in (0,1)");
    if (cfg.solver.n_restarts < 0)
      r.fail("solver.n_restarts", "must be >= 0");
  }

  if (root.contains("initial")) {
    const json& ini = root.at("initial");
    if (ini.contains("u1")) cfg.initial.u1 = parse_field(ini.at("u1"), "initial.u1", r);
    if (ini.contains("u2")) cfg.initial.u2 = parse_field(ini.at("u2"), "initial.u2", r);
    if (ini.contains("alpha1"))
      cfg.initial.alpha1 = parse_field(ini.at("alpha1"), "initial.alpha1", r);
    if (ini.contains("alpha2"))
      cfg.initial.alpha2 = parse_field(ini.at("alpha2"), "initial.alpha2", r);
    check_alpha_range(cfg.initial.alpha1, "initial.alpha", r);
    check_alpha_range(cfg.initial.alpha2, "initial.alpha", r);
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    if (o.contains("snapshot_steps"))
      for (const auto& v : o.at("snapshot_steps")) {
        if (!v.is_number_integer()) {
          r.fail("output.snapshot_steps", "must be integers");
          break;
        }
        cfg.output.snapshot_steps.push_back(v.get<int>());
      }
    cfg.output.verbosity = r.integer(o, "output", "verbosity", 1);
  }

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_integer())
      r.fail("seed", "must be an integer");
    else
      cfg.seed = root.at("seed").get<std::uint64_t>();
  }

  if (errors.empty()) result.config = cfg;
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  ParseResult result;
  std::ifstream in(path);
  if (!in) {
    result.errors.push_back("config: cannot open " + path);
    return result;
  }
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("config: ") + e.what());
    return result;
  }
  return parse_config_json(root);
}

nlohmann::ordered_json emit_config(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["geometry"] = {{"L", cfg.geometry.L}, {"n_elems", cfg.geometry.n_elems}};
  auto mat = [](const MaterialConfig& m) {
    nlohmann::ordered_json o;
    o["family"] = m.family;
    o["a"] = m.a;
    o["b"] = m.b;
    o["w"] = {{"family", m.w.family}, {"scale", m.w.scale}};
    return o;
  };
  j["material1"] = mat(cfg.material1);
  j["material2"] = mat(cfg.material2);
  {
    nlohmann::ordered_json o;
    o["kind"] = cfg.law.kind;
    if (cfg.law.kind == "separable") {
      auto pack = [](const std::vector<double>& xs,
                     const std::vector<double>& ys) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (size_t i = 0; i < xs.size(); ++i) arr.push_back({xs[i], ys[i]});
        return arr;
      };
      o["phi1_samples"] = pack(cfg.law.phi1_x, cfg.law.phi1_y);
      o["phi2_samples"] = pack(cfg.law.phi2_x, cfg.law.phi2_y);
    } else {
      o["family"] = cfg.law.family;
      o["c"] = cfg.law.c;
      o["k"] = cfg.law.k;
    }
    j["law"] = o;
  }
  {
    nlohmann::ordered_json o;
    o["profile"] = cfg.load.profile;
    o["T"] = cfg.load.T;
    if (cfg.load.profile == "linear_ramp") o["rate"] = cfg.load.rate;
    if (cfg.load.profile == "triangle") {
      o["peak_time"] = cfg.load.peak_time;
      o["peak_value"] = cfg.load.peak_value;
      o["end_value"] = cfg.load.end_value;
    }
    if (cfg.load.profile == "tabulated") {
      o["times"] = cfg.load.times;
      o["values"] = cfg.load.values;
    }
    j["load"] = o;
  }
  {
    nlohmann::ordered_json o;
    o["n_steps"] = cfg.time.n_steps;
    if (!cfg.time.times.empty()) o["times"] = cfg.time.times;
    j["time"] = o;
  }
  j["solver"] = {{"max_outer_iters", cfg.solver.max_outer_iters},
                 {"tol_energy", cfg.solver.tol_energy},
                 {"tol_grad", cfg.solver.tol_grad},
                 {"n_restarts", cfg.solver.n_restarts},
                 {"restart_amplitude", cfg.solver.restart_amplitude},
                 {"step_init", cfg.solver.step_init},
                 {"step_shrink", cfg.solver.step_shrink},
                 {"step_decrease", cfg.solver.step_decrease},
                 {"max_inner_iters", cfg.solver.max_inner_iters}};
  auto field = [](const FieldInit& f) {
    nlohmann::ordered_json o;
    o["family"] = f.family;
    if (f.family == "constant") o["value"] = f.value;
    if (f.family == "affine") {
      o["left"] = f.left;
      o["right"] = f.right;
    }
    if (f.family == "tabulated") o["values"] = f.values;
    return o;
  };
  j["initial"] = {{"u1", field(cfg.initial.u1)},
                  {"u2", field(cfg.initial.u2)},
                  {"alpha1", field(cfg.initial.alpha1)},
                  {"alpha2", field(cfg.initial.alpha2)}};
  j["output"] = {{"snapshot_steps", cfg.output.snapshot_steps},
                 {"verbosity", cfg.output.verbosity}};
  j["seed"] = cfg.seed;
  return j;
}

LayerMaterials build_materials(const RunConfig& cfg) {
  auto one = [](const MaterialConfig& m) {
    if (m.family != "power")
      throw std::invalid_argument("only the power family is configurable");
    return power_modulus(m.a, m.b);
  };
  auto dis = [](const DissipationConfig& w) {
    return w.family == "linear" ? linear_dissipation(w.scale)
                                : quadratic_dissipation(w.scale);
  };
  return LayerMaterials{one(cfg.material1), one(cfg.material2),
                        dis(cfg.material1.w), dis(cfg.material2.w)};
}

CohesiveLaw build_law(const RunConfig& cfg) {
  if (cfg.law.kind == "separable") {
    MonotoneCubic f1(cfg.law.phi1_x, cfg.law.phi1_y);
    MonotoneCubic f2(cfg.law.phi2_x, cfg.law.phi2_y);
    const double span = std::min(f1.x_max(), f2.x_max());
    return make_separable([f1](double y) { return f1.value(y); },
                          [f2](double z) { return f2.value(z); }, span);
  }
  const LoadingProfile profile =
      cfg.law.family == "exponential"
          ? exponential_profile(cfg.law.c, cfg.law.k)
          : parabolic_capped_profile(cfg.law.c, cfg.law.k);
  return make_quadratic_unloading(profile);
}

LoadProgram build_load(const RunConfig& cfg) {
  if (cfg.load.profile == "triangle")
    return LoadProgram::triangle(cfg.load.peak_time, cfg.load.peak_value,
                                 cfg.load.end_value, cfg.load.T);
  if (cfg.load.profile == "tabulated")
    return LoadProgram::tabulated(cfg.load.times, cfg.load.values);
  return LoadProgram::linear_ramp(cfg.load.rate, cfg.load.T);
}

namespace {

NodalField realize_field(const FieldInit& f, const Mesh& mesh) {
  NodalField v(mesh.n_nodes(), 0.0);
  if (f.family == "constant") {
    std::fill(v.begin(), v.end(), f.value);
  } else if (f.family == "affine") {
    for (int j = 0; j <= mesh.n_elems; ++j)
      v[j] = f.left + (f.right - f.left) * mesh.nodes[j] / mesh.L;
  } else {
    if (int(f.values.size()) != mesh.n_nodes())
      throw IncompatibleData("initial field: tabulated length mismatch");
    v = f.values;
  }
  return v;
}

}  // namespace

EvolutionSetup build_setup(const RunConfig& cfg) {
  EvolutionSetup setup{make_mesh(cfg.geometry.L, cfg.geometry.n_elems),
                       build_materials(cfg),
                       build_law(cfg),
                       build_load(cfg),
                       cfg.time.times.empty()
                           ? TimePartition::uniform(cfg.time.n_steps, cfg.load.T)
                           : TimePartition::from_times(cfg.time.times),
                       SolverOptions{},
                       SystemState{},
                       cfg.output.snapshot_steps,
                       false};
  setup.solver.max_outer_iters = cfg.solver.max_outer_iters;
  setup.solver.tol_energy = cfg.solver.tol_energy;
  setup.solver.tol_grad = cfg.solver.tol_grad;
  setup.solver.n_restarts = cfg.solver.n_restarts;
  setup.solver.restart_amplitude = cfg.solver.restart_amplitude;
  setup.solver.step_init = cfg.solver.step_init;
  setup.solver.step_shrink = cfg.solver.step_shrink;
  setup.solver.step_decrease = cfg.solver.step_decrease;
  setup.solver.max_inner_iters = cfg.solver.max_inner_iters;
  setup.solver.rng_seed = cfg.seed;

  setup.initial = make_state(setup.mesh);
  setup.initial.u1 = realize_field(cfg.initial.u1, setup.mesh);
  setup.initial.u2 = realize_field(cfg.initial.u2, setup.mesh);
  setup.initial.alpha1 = realize_field(cfg.initial.alpha1, setup.mesh);
  setup.initial.alpha2 = realize_field(cfg.initial.alpha2, setup.mesh);
  const NodalField d0 = slip(setup.initial);
  setup.initial.delta_h = d0;
  setup.initial.gamma = d0;
  validate_state(setup.mesh, setup.initial, setup.load.value(0.0));
  return setup;
}

}  // namespace hylam
