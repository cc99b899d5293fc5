// toda-lab: command-line driver for the Toda hierarchy toolkit.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "toda/analysis.hpp"
#include "toda/evolution.hpp"
#include "toda/flow.hpp"
#include "toda/hierarchy.hpp"
#include "toda/io.hpp"
#include "toda/soliton.hpp"
#include "toda/spectral.hpp"

namespace fs = std::filesystem;
using toda::io::format_double;
using toda::io::json;

namespace {

constexpr const char* kToolVersion = "toda-lab 1.0.0";

// Collects the inputs and parameters of one invocation and writes every
// artifact at the end, so a failing run leaves no partial output.
class Run {
 public:
  explicit Run(std::string command)
      : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  json load(const std::string& path) {
    const std::string text = toda::io::read_text_file(path);
    inputs_[path] = toda::io::sha256_hex(text);
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw toda::SchemaError(path + ": " + e.what());
    }
  }

  void param(const std::string& key, const std::string& value) { params_[key] = value; }
  void param(const std::string& key, double value) { params_[key] = format_double(value); }
  void param(const std::string& key, int value) { params_[key] = std::to_string(value); }

  void add(const std::string& name, std::string text) {
    files_.emplace_back(name, std::move(text));
  }

  void commit(const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& [name, text] : files_) toda::io::write_text_file(dir / name, text);
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
    json manifest = {{"schema_version", toda::io::kSchemaVersion},
                     {"command", command_},
                     {"input_digests", inputs_},
                     {"parameters", params_},
                     {"tool_version", kToolVersion},
                     {"wall_time_s", wall}};
    toda::io::write_text_file(dir / "manifest.json", toda::io::dump(manifest));
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> params_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string conservation_csv(const std::vector<toda::ConservationRecord>& log) {
  std::string out = "t,tr1,tr2,tr3,tr4,min_a,tail_margin\n";
  for (const auto& rec : log) {
    out += format_double(rec.t);
    for (double v : rec.traces) out += "," + format_double(v);
    out += "," + format_double(rec.min_a) + "," + std::to_string(rec.tail_margin) + "\n";
  }
  return out;
}

std::vector<double> snapshot_times(double t0, double t_final, int count) {
  std::vector<double> out;
  for (int i = 1; i < count; ++i) out.push_back(t0 + (t_final - t0) * i / count);
  return out;
}

std::string snapshot_name(std::size_t i) {
  std::ostringstream os;
  os << "state_" << std::setw(4) << std::setfill('0') << i << ".json";
  return os.str();
}

std::pair<int, int> parse_window(const std::string& text) {
  const auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw CLI::ValidationError("--window", "expected lo:hi");
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const int lo = std::stoi(text.substr(0, colon), &used_lo);
    const int hi = std::stoi(text.substr(colon + 1), &used_hi);
    if (used_lo != colon || used_hi != text.size() - colon - 1 || lo >= hi)
      throw CLI::ValidationError("--window", "expected lo:hi with lo < hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--window", "expected integers lo:hi");
  }
}

struct FlowOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.1;
  int guard = 8;
  int snapshots = 10;

  void attach(CLI::App* app) {
    app->add_option("--rel-tol", rel_tol, "Relative tolerance")->capture_default_str();
    app->add_option("--abs-tol", abs_tol, "Absolute tolerance")->capture_default_str();
    app->add_option("--max-step", max_step, "Largest time step")->capture_default_str();
    app->add_option("--guard", guard, "Guard band in sites")->capture_default_str();
    app->add_option("--snapshots", snapshots, "Number of equal time intervals written")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  toda::FlowConfig config(double t0, double t_final) const {
    toda::FlowConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.max_step = max_step;
    cfg.guard_band = guard;
    cfg.output_times = snapshot_times(t0, t_final, snapshots);
    return cfg;
  }

  void record(Run& run) const {
    run.param("rel_tol", rel_tol);
    run.param("abs_tol", abs_tol);
    run.param("max_step", max_step);
    run.param("guard", guard);
    run.param("snapshots", snapshots);
  }
};

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("TODA_LAB_THREADS")) {
#ifdef _OPENMP
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
#else
    (void)env;
#endif
  }

  CLI::App app{"Toda hierarchy laboratory: flows, scattering data, solitons and decay diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string state_path, c_path, out_dir, sd_path, sd0_path, sd1_path, law_path;
  int r = 0;
  double t_final = 1.0;
  FlowOptions flow;

  // evolve
  auto* evolve = app.add_subcommand("evolve", "Integrate TL_r and write snapshots plus conservation.csv");
  evolve->add_option("--state", state_path, "Input state JSON")->required()->check(CLI::ExistingFile);
  evolve->add_option("--r", r, "Hierarchy order")->check(CLI::NonNegativeNumber);
  evolve->add_option("--c", c_path, "HierarchyCoeffs JSON (default: homogeneous)")->check(CLI::ExistingFile);
  evolve->add_option("--t-final", t_final, "Final time")->required();
  evolve->add_option("--out", out_dir, "Output directory")->required();
  flow.attach(evolve);

  // scatter
  int grid = 256;
  int margin = 0;
  auto* scatter = app.add_subcommand("scatter", "Compute scattering data of a state");
  scatter->add_option("--state", state_path, "Input state JSON")->required()->check(CLI::ExistingFile);
  scatter->add_option("--grid", grid, "Number of unit-circle samples")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  scatter->add_option("--margin", margin, "Truncation margin for the discrete spectrum (0: chosen from the slowest bound state)")->check(CLI::NonNegativeNumber)->capture_default_str();
  scatter->add_option("--out", out_dir, "Output directory")->required();

  // soliton
  std::vector<double> ks, gammas;
  std::string window = "-200:200";
  double t_sol = 0.0;
  auto* soliton = app.add_subcommand("soliton", "Build a reflectionless N-soliton state");
  soliton->add_option("--k", ks, "Bound state k in (-1,1)\\{0} (repeatable)")->required()->take_all();
  soliton->add_option("--gamma", gammas, "Norming constant gamma_+ > 0 (one per --k)")->required()->take_all();
  soliton->add_option("--window", window, "Site range lo:hi")->capture_default_str();
  soliton->add_option("--t", t_sol, "Time stamp")->capture_default_str();
  soliton->add_option("--out", out_dir, "Output directory")->required();

  // dispersion fit
  auto* dispersion = app.add_subcommand("dispersion", "Dispersion law tools");
  dispersion->require_subcommand(1);
  auto* fit = dispersion->add_subcommand("fit", "Fit alpha_r from two scattering data sets");
  fit->add_option("--sd0", sd0_path, "Scattering data at t0")->required()->check(CLI::ExistingFile);
  fit->add_option("--sd1", sd1_path, "Scattering data at t1")->required()->check(CLI::ExistingFile);
  fit->add_option("--r", r, "Hierarchy order")->required()->check(CLI::NonNegativeNumber);
  fit->add_option("--out", out_dir, "Output directory")->required();

  // witness growth
  double x_max = 30.0;
  int samples = 60;
  auto* witness = app.add_subcommand("witness", "Growth witnesses");
  witness->require_subcommand(1);
  auto* growth = witness->add_subcommand("growth", "Growth of the evolution factor along k = -1/x");
  growth->add_option("--sd", sd_path, "Scattering data JSON")->required()->check(CLI::ExistingFile);
  growth->add_option("--law", law_path, "DispersionLaw JSON")->required()->check(CLI::ExistingFile);
  growth->add_option("--x-max", x_max, "Largest x")->check(CLI::PositiveNumber)->capture_default_str();
  growth->add_option("--samples", samples, "Number of x samples")->check(CLI::PositiveNumber)->capture_default_str();
  growth->add_option("--out", out_dir, "Output directory")->required();

  // theorem-demo
  double bound_C = 10.0, delta = 0.1, t1 = 1.0;
  auto* demo = app.add_subcommand("theorem-demo", "Super-fast decay at two times: classify the outcome");
  demo->add_option("--state", state_path, "Initial state JSON")->required()->check(CLI::ExistingFile);
  demo->add_option("--r", r, "Hierarchy order")->check(CLI::NonNegativeNumber)->capture_default_str();
  demo->add_option("--c", c_path, "HierarchyCoeffs JSON (default: homogeneous)")->check(CLI::ExistingFile);
  demo->add_option("--C", bound_C, "Decay bound constant")->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--delta", delta, "Decay bound exponent margin")->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--t1", t1, "Second time")->capture_default_str();
  demo->add_option("--out", out_dir, "Output directory")->required();
  flow.attach(demo);

  // hierarchy show
  auto* hierarchy = app.add_subcommand("hierarchy", "Hierarchy tools");
  hierarchy->require_subcommand(1);
  auto* show = hierarchy->add_subcommand("show", "Print the TL_r field of a state as CSV (n,a_dot,b_dot)");
  show->add_option("--r", r, "Hierarchy order")->required()->check(CLI::NonNegativeNumber);
  show->add_option("--state", state_path, "Input state JSON")->required()->check(CLI::ExistingFile);
  show->add_option("--c", c_path, "HierarchyCoeffs JSON (default: homogeneous)")->check(CLI::ExistingFile);

  // kvm evolve
  auto* kvm = app.add_subcommand("kvm", "Kac-van Moerbeke lattice");
  kvm->require_subcommand(1);
  auto* kvm_evolve = kvm->add_subcommand("evolve", "Integrate the KvM flow");
  kvm_evolve->add_option("--state", state_path, "Input KvM state JSON")->required()->check(CLI::ExistingFile);
  kvm_evolve->add_option("--t-final", t_final, "Final time")->required();
  kvm_evolve->add_option("--out", out_dir, "Output directory")->required();
  flow.attach(kvm_evolve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return 2;
  }

  auto coeffs_for = [&](Run& run) {
    if (c_path.empty()) return toda::HierarchyCoeffs::homogeneous(r);
    auto coeffs = toda::io::coeffs_from_json(run.load(c_path));
    if (coeffs.r() != r && r != 0) throw toda::SchemaError("--r disagrees with the r of --c");
    return coeffs;
  };

  try {
    if (evolve->parsed()) {
      Run run("evolve");
      const auto state = toda::io::lattice_state_from_json(run.load(state_path));
      const auto coeffs = coeffs_for(run);
      run.param("r", coeffs.r());
      run.param("t_final", t_final);
      flow.record(run);
      const auto traj = toda::integrate(state, coeffs, t_final, flow.config(state.t(), t_final));
      for (std::size_t i = 0; i < traj.states.size(); ++i)
        run.add(snapshot_name(i), toda::io::dump(toda::io::to_json(traj.states[i])));
      run.add("conservation.csv", conservation_csv(traj.log));
      run.commit(out_dir);
    } else if (scatter->parsed()) {
      Run run("scatter");
      const auto state = toda::normalize(toda::io::lattice_state_from_json(run.load(state_path)));
      const auto H = toda::build_jacobi(state);
      if (margin == 0) margin = toda::auto_margin(H);
      run.param("grid", grid);
      run.param("margin", margin);
      const auto sd = toda::scattering_data(H, toda::default_k_grid(grid), margin);
      run.add("sd.json", toda::io::dump(toda::io::to_json(sd)));
      run.commit(out_dir);
    } else if (soliton->parsed()) {
      Run run("soliton");
      if (ks.size() != gammas.size())
        throw CLI::ValidationError("--gamma", "one --gamma per --k is required");
      const auto [lo, hi] = parse_window(window);
      toda::SolitonSpec spec;
      spec.t = t_sol;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        spec.bound_states.push_back({ks[i], gammas[i]});
        run.param("k" + std::to_string(i), ks[i]);
        run.param("gamma" + std::to_string(i), gammas[i]);
      }
      run.param("window", window);
      run.param("t", t_sol);
      const auto state = toda::build_soliton(spec, lo, hi);
      run.add("state.json", toda::io::dump(toda::io::to_json(state)));
      run.commit(out_dir);
    } else if (fit->parsed()) {
      Run run("dispersion fit");
      const auto sd0 = toda::io::scattering_from_json(run.load(sd0_path));
      const auto sd1 = toda::io::scattering_from_json(run.load(sd1_path));
      run.param("r", r);
      const auto result = toda::fit_dispersion(sd0, sd1, r);
      run.add("law.json", toda::io::dump(toda::io::to_json(result.law, result.residual)));
      run.commit(out_dir);
    } else if (growth->parsed()) {
      Run run("witness growth");
      const auto sd = toda::io::scattering_from_json(run.load(sd_path));
      const auto law = toda::io::dispersion_from_json(run.load(law_path));
      run.param("x_max", x_max);
      run.param("samples", samples);
      const auto rep = toda::growth_exponent_witness(sd, law, x_max, samples);
      std::string csv = "x,log_factor_minus_over_x,log_factor_plus_over_x\n";
      for (const auto& row : rep.rows)
        csv += format_double(row.x) + "," + format_double(row.rate_minus) + "," +
               format_double(row.rate_plus) + "\n";
      run.add("growth.csv", csv);
      run.add("report.json", toda::io::dump(toda::io::to_json(rep)));
      run.add("report.txt", rep.verdict + "\n");
      run.commit(out_dir);
      std::cout << rep.verdict << "\n";
    } else if (demo->parsed()) {
      Run run("theorem-demo");
      toda::TheoremScenario scenario{0.0, t1,
                                     toda::io::lattice_state_from_json(run.load(state_path)),
                                     coeffs_for(run),
                                     {bound_C, delta}};
      scenario.t0 = scenario.initial.t();
      run.param("r", scenario.coeffs.r());
      run.param("C", bound_C);
      run.param("delta", delta);
      run.param("t1", t1);
      flow.record(run);
      const auto res = toda::theorem_witness(scenario, flow.config(scenario.t0, t1));
      std::string csv = "M,tail_t0,tail_t1,bound\n";
      for (std::size_t i = 0; i < res.at_t0.rows.size(); ++i) {
        const auto& a = res.at_t0.rows[i];
        const auto& b = res.at_t1.rows[i];
        csv += std::to_string(a.M) + "," + format_double(a.tail_sum) + "," +
               format_double(b.tail_sum) + "," + format_double(a.bound) + "\n";
      }
      run.add("report.json", toda::io::dump(toda::io::to_json(res)));
      run.add("tails.csv", csv);
      run.commit(out_dir);
      std::cout << toda::to_string(res.verdict) << ": " << res.text << "\n";
    } else if (show->parsed()) {
      Run run("hierarchy show");
      const auto state = toda::io::lattice_state_from_json(run.load(state_path));
      const auto coeffs = coeffs_for(run);
      const auto f = toda::tl_field(state, coeffs);
      std::string csv = "n,a_dot,b_dot\n";
      for (std::size_t i = 0; i < f.a_dot.size(); ++i)
        csv += std::to_string(state.n_min() + static_cast<int>(i)) + "," +
               format_double(f.a_dot[i]) + "," + format_double(f.b_dot[i]) + "\n";
      std::cout << csv;
    } else if (kvm_evolve->parsed()) {
      Run run("kvm evolve");
      const auto state = toda::io::kvm_state_from_json(run.load(state_path));
      run.param("t_final", t_final);
      flow.record(run);
      const auto traj = toda::integrate_kvm(state, t_final, flow.config(state.t(), t_final));
      for (std::size_t i = 0; i < traj.states.size(); ++i)
        run.add(snapshot_name(i), toda::io::dump(toda::io::to_json(traj.states[i])));
      run.add("conservation.csv", conservation_csv(traj.log));
      run.commit(out_dir);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const toda::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
