#include "hylam/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "hylam/csv.hpp"
#include "hylam/verification.hpp"

namespace hylam::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "hylam 0.1.0";

const std::vector<std::string> kTraceColumns = {
    "k", "t", "E", "D", "K", "W",
    "eb_residual", "stress_residual", "kkt_alpha_residual",
    "max_gamma_minus_dh", "solver_iters", "converged",
    // extras used by verify and the refinement bookkeeping
    "ubar", "sum_stress", "modulus_integral", "work_rect", "remainder_rect",
    "kkt_min_dalpha", "kkt_grad_violation", "kkt_complementarity",
    "energy_total", "warm_energy", "grad_residual"};

std::string fmt(double v) { return csv::format_double(v); }

void write_manifest(const std::string& out_dir, const char* command,
                    const RunConfig& config) {
  nlohmann::ordered_json m;
  m["tool"] = kVersion;
  m["command"] = command;
  m["seed"] = config.seed;
  m["zero_history_cutoff"] = kZeroHistoryCutoff;
  m["trace_columns"] = kTraceColumns;
  m["config"] = emit_config(config);
  std::ofstream out(out_dir + "/manifest.json", std::ios::binary);
  out << m.dump(2) << "\n";
}

void write_error_record(const std::string& out_dir, const std::string& what) {
  fs::create_directories(out_dir);
  nlohmann::ordered_json e;
  e["error"] = what;
  std::ofstream out(out_dir + "/error.json", std::ios::binary);
  out << e.dump(2) << "\n";
}

struct CheckLine {
  std::string name;
  bool ok = true;
  double worst = 0.0;
  std::string where;
};

int write_report(const std::string& path, const std::vector<CheckLine>& lines) {
  std::ofstream out(path, std::ios::binary);
  bool all_ok = true;
  for (const CheckLine& c : lines) {
    out << (c.ok ? "PASS" : "FAIL") << "  " << c.name << "  worst="
        << fmt(c.worst) << (c.where.empty() ? "" : "  at " + c.where) << "\n";
    all_ok = all_ok && c.ok;
  }
  out << (all_ok ? "ALL CHECKS PASSED\n" : "CHECKS FAILED\n");
  return all_ok ? 0 : 1;
}

}  // namespace

void write_trace_csv(const std::string& path, const EvolutionTrace& trace) {
  csv::Table t;
  t.header = kTraceColumns;
  for (const TraceRow& r : trace.rows) {
    t.rows.push_back({std::to_string(r.k), fmt(r.t), fmt(r.elastic),
                      fmt(r.damage), fmt(r.cohesive), fmt(r.work),
                      fmt(r.eb_residual), fmt(r.stress_residual),
                      fmt(std::max(r.kkt_grad_violation, r.kkt_complementarity)),
                      fmt(r.max_gamma_minus_dh), std::to_string(r.solver_iters),
                      r.converged ? "1" : "0", fmt(r.ubar), fmt(r.sum_stress),
                      fmt(r.modulus_int), fmt(r.work_rect),
                      fmt(r.remainder_rect), fmt(r.kkt_min_dalpha),
                      fmt(r.kkt_grad_violation), fmt(r.kkt_complementarity),
                      fmt(r.energy_total), fmt(r.warm_energy),
                      fmt(r.grad_residual)});
  }
  csv::write_file(path, t);
}

void write_snapshot_csv(const std::string& path, const Mesh& mesh,
                        const SystemState& state,
                        const LayerMaterials& materials) {
  std::ofstream out(path, std::ios::binary);
  out << "# nodes\n";
  out << "x,u1,u2,alpha1,alpha2,delta,delta_h,gamma\n";
  const NodalField d = slip(state);
  for (int j = 0; j <= mesh.n_elems; ++j)
    out << fmt(mesh.nodes[j]) << "," << fmt(state.u1[j]) << ","
        << fmt(state.u2[j]) << "," << fmt(state.alpha1[j]) << ","
        << fmt(state.alpha2[j]) << "," << fmt(d[j]) << ","
        << fmt(state.delta_h[j]) << "," << fmt(state.gamma[j]) << "\n";
  out << "# elements\n";
  out << "x_mid,sigma1,sigma2\n";
  const StressField f = stress_field(mesh, state, materials);
  for (int e = 0; e < mesh.n_elems; ++e)
    out << fmt(0.5 * (mesh.nodes[e] + mesh.nodes[e + 1])) << ","
        << fmt(f.sigma1[e]) << "," << fmt(f.sigma2[e]) << "\n";
}

int command_run(const RunConfig& config, const std::string& out_dir) {
  try {
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/snapshots");
    EvolutionSetup setup = build_setup(config);
    const EvolutionTrace trace = run_evolution(setup);

    if (config.output.verbosity >= 1)
      for (const TraceRow& r : trace.rows)
        std::printf("step %4d  iters %3d  energy % .12e  residual %.3e%s\n",
                    r.k, r.solver_iters, r.energy_total, r.grad_residual,
                    r.converged ? "" : "  NOT CONVERGED");

    write_trace_csv(out_dir + "/trace.csv", trace);
    for (const auto& [k, state] : trace.snapshots) {
      char name[64];
      std::snprintf(name, sizeof(name), "/snapshots/%d.csv", k);
      write_snapshot_csv(out_dir + name, setup.mesh, state, setup.materials);
    }
    write_manifest(out_dir, "run", config);

    // asserted invariants decide the exit status
    bool ok = true;
    const double scale = 1.0 + std::abs(trace.rows.back().energy_total);
    for (const TraceRow& r : trace.rows) {
      ok = ok && r.converged;
      ok = ok && r.kkt_min_dalpha >= 0.0;
      ok = ok && r.elastic >= 0.0 && r.damage >= 0.0 && r.cohesive >= 0.0;
      ok = ok && r.energy_total - trace.rows.front().energy_total -
                         r.work_rect - r.remainder_rect <=
                     1e-9 * scale;
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    write_error_record(out_dir, e.what());
    std::fprintf(stderr, "run: %s\n", e.what());
    return 2;
  }
}

int command_check_law(const RunConfig& config, const std::string& out_dir) {
  try {
    fs::create_directories(out_dir);
    const CohesiveLaw law = build_law(config);
    const AssumptionReport report = check_law(law, 64, 1e-9);
    std::ofstream out(out_dir + "/report.txt", std::ios::binary);
    for (const AssumptionCheck& e : report.entries) {
      const char* status = e.status == CheckStatus::Pass   ? "PASS"
                           : e.status == CheckStatus::Fail ? "FAIL"
                                                           : "ASSUMED";
      out << status << "  " << e.name << "  worst=" << fmt(e.worst_violation)
          << "  at (" << fmt(e.worst_y) << ", " << fmt(e.worst_z) << ")"
          << "  value=" << fmt(e.value)
          << (e.note.empty() ? "" : "  [" + e.note + "]") << "\n";
    }
    out << "grid_resolution=" << report.grid_resolution << "\n";
    out << "strict_monotonicity_constant="
        << fmt(report.strict_monotonicity_constant) << "\n";
    out << "lambda_estimate=" << fmt(report.lambda_estimate) << "\n";
    write_manifest(out_dir, "check-law", config);
    return report.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    write_error_record(out_dir, e.what());
    std::fprintf(stderr, "check-law: %s\n", e.what());
    return 2;
  }
}

int command_check_condition(const RunConfig& config,
                            const std::string& out_dir) {
  try {
    fs::create_directories(out_dir);
    const LayerMaterials materials = build_materials(config);
    const CohesiveLaw law = build_law(config);
    const ConvexityBudget budget =
        check_regularity_condition(materials, law, config.geometry.L);
    std::printf("m_over_M  %s\n", fmt(budget.m_over_M).c_str());
    std::printf("mu        %s\n", fmt(budget.mu).c_str());
    std::printf("lambda    %s\n", fmt(budget.lambda).c_str());
    std::printf("L         %s\n", fmt(budget.L).c_str());
    std::printf("margin    %s\n", fmt(budget.margin).c_str());
    std::printf("condition %s\n", budget.holds() ? "holds" : "fails");
    std::ofstream out(out_dir + "/report.txt", std::ios::binary);
    out << "m_over_M=" << fmt(budget.m_over_M) << "\nmu=" << fmt(budget.mu)
        << "\nlambda=" << fmt(budget.lambda) << "\nL=" << fmt(budget.L)
        << "\nmargin=" << fmt(budget.margin)
        << "\ncondition=" << (budget.holds() ? "holds" : "fails") << "\n";
    write_manifest(out_dir, "check-condition", config);
    return budget.holds() ? 0 : 1;
  } catch (const std::exception& e) {
    write_error_record(out_dir, e.what());
    std::fprintf(stderr, "check-condition: %s\n", e.what());
    return 2;
  }
}

int command_verify(const std::string& trace_path, const RunConfig& config,
                   const std::string& out_dir) {
  try {
    fs::create_directories(out_dir);
    const csv::Table t = csv::read_file(trace_path);
    const int cK = t.column("k"), cE = t.column("E"), cD = t.column("D"),
              cKc = t.column("K"), cW = t.column("W"),
              cEb = t.column("eb_residual"), cU = t.column("ubar"),
              cS = t.column("sum_stress"), cWr = t.column("work_rect"),
              cRr = t.column("remainder_rect"),
              cMin = t.column("kkt_min_dalpha");
    if (cK < 0 || cE < 0 || cD < 0 || cKc < 0 || cW < 0 || cEb < 0)
      throw std::runtime_error("trace is missing required columns");

    std::vector<CheckLine> lines;
    const size_t n = t.rows.size();
    if (n == 0) throw std::runtime_error("trace has no rows");

    auto total = [&](size_t i) {
      return t.num(i, cE) + t.num(i, cD) + t.num(i, cKc);
    };
    const double e0 = total(0);
    double scale = 1.0;
    for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(total(i)));

    {  // energy balance column must match the recomputed residual
      CheckLine c{"eb_residual", true, 0.0, ""};
      for (size_t i = 0; i < n; ++i) {
        const double recomputed = std::abs(total(i) - e0 - t.num(i, cW));
        const double gap = std::abs(recomputed - t.num(i, cEb));
        if (gap > c.worst) {
          c.worst = gap;
          c.where = "step " + t.rows[i][cK];
        }
      }
      c.ok = c.worst <= 1e-9 * scale;
      lines.push_back(c);
    }
    if (cU >= 0 && cS >= 0) {  // work column consistent with its quadrature
      CheckLine c{"work_quadrature", true, 0.0, ""};
      double w = 0.0;
      const double L = config.geometry.L;
      for (size_t i = 1; i < n; ++i) {
        w += (t.num(i, cU) - t.num(i - 1, cU)) / L * 0.5 *
             (t.num(i - 1, cS) + t.num(i, cS));
        const double gap = std::abs(w - t.num(i, cW));
        if (gap > c.worst) {
          c.worst = gap;
          c.where = "step " + t.rows[i][cK];
        }
      }
      c.ok = c.worst <= 1e-9 * scale;
      lines.push_back(c);
    }
    if (cWr >= 0 && cRr >= 0) {  // one-sided incremental energy inequality
      CheckLine c{"incremental_inequality", true, -kInf, ""};
      for (size_t i = 0; i < n; ++i) {
        const double excess =
            total(i) - e0 - t.num(i, cWr) - t.num(i, cRr);
        if (excess > c.worst) {
          c.worst = excess;
          c.where = "step " + t.rows[i][cK];
        }
      }
      c.ok = c.worst <= 1e-9 * scale;
      lines.push_back(c);
    }
    if (cMin >= 0) {  // irreversibility
      CheckLine c{"irreversibility", true, 0.0, ""};
      for (size_t i = 0; i < n; ++i) {
        const double v = -t.num(i, cMin);
        if (v > c.worst) {
          c.worst = v;
          c.where = "step " + t.rows[i][cK];
        }
      }
      c.ok = c.worst <= 0.0;
      lines.push_back(c);
    }
    {  // energies nonnegative
      CheckLine c{"energies_nonnegative", true, 0.0, ""};
      for (size_t i = 0; i < n; ++i) {
        const double v = -std::min({t.num(i, cE), t.num(i, cD), t.num(i, cKc)});
        if (v > c.worst) {
          c.worst = v;
          c.where = "step " + t.rows[i][cK];
        }
      }
      c.ok = c.worst <= 0.0;
      lines.push_back(c);
    }

    // snapshots, when exported next to the trace: stress constancy recheck
    const fs::path snapdir = fs::path(trace_path).parent_path() / "snapshots";
    if (fs::exists(snapdir)) {
      const EvolutionSetup setup = build_setup(config);
      CheckLine c{"stress_constancy_snapshots", true, 0.0, ""};
      const int cSt = t.column("stress_residual");
      for (const auto& entry : fs::directory_iterator(snapdir)) {
        const csv::Table snap = csv::read_file(entry.path().string());
        // nodes section was parsed as one table; rebuild state from it
        SystemState s = make_state(setup.mesh);
        const int nn = setup.mesh.n_nodes();
        if (int(snap.rows.size()) < nn) continue;
        for (int j = 0; j < nn; ++j) {
          s.u1[j] = snap.num(j, 1);
          s.u2[j] = snap.num(j, 2);
          s.alpha1[j] = snap.num(j, 3);
          s.alpha2[j] = snap.num(j, 4);
          s.delta_h[j] = snap.num(j, 6);
          s.gamma[j] = snap.num(j, 7);
        }
        const double dev =
            stress_constancy_residual(setup.mesh, s, setup.materials);
        const int k = std::stoi(entry.path().stem().string());
        if (cSt >= 0 && size_t(k) < n) {
          const double gap = std::abs(dev - t.num(size_t(k), cSt));
          if (gap > c.worst) {
            c.worst = gap;
            c.where = "snapshot " + std::to_string(k);
          }
        }
      }
      c.ok = c.worst <= 1e-9 * (1.0 + scale);
      lines.push_back(c);
    }

    // per-step recomputed residuals for downstream tooling
    {
      csv::Table rt;
      rt.header = {"k", "eb_recomputed", "one_sided_excess"};
      for (size_t i = 0; i < n; ++i) {
        const double eb = std::abs(total(i) - e0 - t.num(i, cW));
        const double ex = (cWr >= 0 && cRr >= 0)
                              ? total(i) - e0 - t.num(i, cWr) - t.num(i, cRr)
                              : 0.0;
        rt.rows.push_back({t.rows[i][cK], fmt(eb), fmt(ex)});
      }
      csv::write_file(out_dir + "/residuals.csv", rt);
    }
    write_manifest(out_dir, "verify", config);
    const int status = write_report(out_dir + "/report.txt", lines);
    for (const CheckLine& c : lines)
      if (!c.ok)
        std::fprintf(stderr, "verify: %s failed (worst %.3e %s)\n",
                     c.name.c_str(), c.worst, c.where.c_str());
    return status;
  } catch (const std::exception& e) {
    write_error_record(out_dir, e.what());
    std::fprintf(stderr, "verify: %s\n", e.what());
    return 2;
  }
}

int command_sweep(const RunConfig& config, const std::string& axis,
                  const std::string& out_dir) {
  try {
    fs::create_directories(out_dir);
    const auto eq = axis.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("axis must look like section.key=v1,v2,...");
    const std::string path = axis.substr(0, eq);
    std::vector<double> values;
    {
      std::istringstream vs(axis.substr(eq + 1));
      std::string tok;
      while (std::getline(vs, tok, ',')) values.push_back(std::stod(tok));
    }
    if (values.empty()) throw std::invalid_argument("axis has no values");

    // apply the axis to the emitted config and reparse per point
    std::vector<RunConfig> points;
    for (double v : values) {
      nlohmann::ordered_json j = emit_config(config);
      nlohmann::ordered_json* cursor = &j;
      std::istringstream ps(path);
      std::string key, last;
      std::vector<std::string> keys;
      while (std::getline(ps, key, '.')) keys.push_back(key);
      if (keys.empty()) throw std::invalid_argument("axis path is empty");
      for (size_t i = 0; i + 1 < keys.size(); ++i)
        cursor = &(*cursor)[keys[i]];
      (*cursor)[keys.back()] = v;
      ParseResult pr = parse_config_json(j);
      if (!pr.config) {
        std::string msg = "sweep point invalid:";
        for (const auto& e : pr.errors) msg += " " + e;
        throw std::invalid_argument(msg);
      }
      points.push_back(*pr.config);
    }

    std::vector<std::future<int>> futures;
    for (size_t i = 0; i < points.size(); ++i) {
      const std::string pdir = out_dir + "/point_" + std::to_string(i);
      RunConfig pc = points[i];
      pc.output.verbosity = 0;
      futures.push_back(std::async(std::launch::async, [pc, pdir] {
        return command_run(pc, pdir);
      }));
    }
    std::vector<int> status(points.size());
    for (size_t i = 0; i < futures.size(); ++i) status[i] = futures[i].get();

    csv::Table sum;
    sum.header = {"point", "axis", "value", "final_E", "final_D", "final_K",
                  "final_W", "max_eb_residual", "max_stress_residual",
                  "all_converged", "status"};
    int overall = 0;
    for (size_t i = 0; i < points.size(); ++i) {
      const std::string pdir = out_dir + "/point_" + std::to_string(i);
      const csv::Table t = csv::read_file(pdir + "/trace.csv");
      const size_t last = t.rows.size() - 1;
      double max_eb = 0.0, max_st = 0.0;
      bool conv = true;
      for (size_t r = 0; r < t.rows.size(); ++r) {
        max_eb = std::max(max_eb, t.num(r, t.column("eb_residual")));
        max_st = std::max(max_st, t.num(r, t.column("stress_residual")));
        conv = conv && t.rows[r][t.column("converged")] == "1";
      }
      sum.rows.push_back({std::to_string(i), path, fmt(values[i]),
                          t.rows[last][t.column("E")],
                          t.rows[last][t.column("D")],
                          t.rows[last][t.column("K")],
                          t.rows[last][t.column("W")], fmt(max_eb), fmt(max_st),
                          conv ? "1" : "0", std::to_string(status[i])});
      overall = std::max(overall, status[i]);
    }
    csv::write_file(out_dir + "/sweep.csv", sum);
    write_manifest(out_dir, "sweep", config);
    return overall;
  } catch (const std::exception& e) {
    write_error_record(out_dir, e.what());
    std::fprintf(stderr, "sweep: %s\n", e.what());
    return 2;
  }
}

}  // namespace hylam::cli
