#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "blowup/config.hpp"
#include "blowup/error.hpp"
#include "blowup/suite.hpp"

namespace fs = std::filesystem;
using namespace blowup;

namespace {

constexpr int kOk = 0, kValidation = 1, kSolver = 2, kCheck = 3;

constexpr const char* kDefaultConfig = R"({
  "problem": {"points": [[0, 0]], "alphas": [3], "m1": 1, "tau": 1, "V1": "1", "V2": "1"}
})";

/// Output directory plus the manifest of everything written to it.
class Emitter {
 public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <class F>
  void file(const std::string& name, const std::string& check_id, const std::string& tag, F&& write) {
    std::ofstream os(dir_ / name);
    write(os);
    entries_.push_back({name, check_id, tag});
  }

  void checks(const std::string& name, const CheckReport& r) {
    file(name, "", "", [&](std::ostream& os) { r.write_csv(os); });
    entries_.pop_back();
    for (const auto& row : r.rows) {
      const Entry e{name, row.check_id, row.tag};
      if (std::find(entries_.begin(), entries_.end(), e) == entries_.end()) entries_.push_back(e);
    }
  }

  void manifest() {
    std::ofstream os(dir_ / "manifest.csv");
    os << "file,check_id,tag\n";
    for (const auto& e : entries_) os << e.file << ',' << e.check_id << ',' << e.tag << '\n';
  }

 private:
  struct Entry {
    std::string file, check_id, tag;
    bool operator==(const Entry&) const = default;
  };
  fs::path dir_;
  std::vector<Entry> entries_;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidDomain:
    case ErrorKind::DuplicateCenters:
    case ErrorKind::OverlappingHoles:
    case ErrorKind::HoleTouchesBoundary:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::PointOutsideDomain:
    case ErrorKind::CoincidentPoints:
    case ErrorKind::NonpositivePotentialAtCenter:
    case ErrorKind::InvalidExponent:
    case ErrorKind::InsufficientSamples:
    case ErrorKind::SchemaError:
    case ErrorKind::ConstraintViolation:
    case ErrorKind::ParseError:
    case ErrorKind::NonpositiveSampled:
      return kValidation;
    default:
      return kSolver;
  }
}

void write_solution(Emitter& em, const Solution& s, const std::string& prefix) {
  const std::string tag = "contraction and solution";
  em.file(prefix + "report.txt", "solution.report", tag, [&](std::ostream& os) { s.report.write_record(os); });
  em.file(prefix + "history.csv", "solution.history", tag, [&](std::ostream& os) { s.report.write_history_csv(os); });
  em.file(prefix + "u.csv", "solution.u", tag, [&](std::ostream& os) { s.u.write_csv(os); });
  em.file(prefix + "phi.csv", "solution.phi", tag, [&](std::ostream& os) { s.phi.write_csv(os); });
  em.file(prefix + "U.csv", "ansatz.U", "ansatz", [&](std::ostream& os) { s.instance.U.write_csv(os); });
  em.file(prefix + "R.csv", "residual.R", "residual of the ansatz", [&](std::ostream& os) { s.instance.R.write_csv(os); });
  em.file(prefix + "coefficients.csv", "coeff.solution", "coefficient systems",
          [&](std::ostream& os) { s.instance.coeffs.write_csv(os); });
  em.file(prefix + "mesh.txt", "mesh.table", "pierced domain mesh", [&](std::ostream& os) { s.instance.mesh->write_table(os); });
}

void write_sweep_table(Emitter& em, const SweepResult& sw) {
  em.file("sweep.csv", "sweep.summary", "continuation sweep", [&](std::ostream& os) {
    os.precision(12);
    os << "rho,status,iterations,contraction_factor,phi_sup,phi_h01,pde_residual_relative,far_value,far_target\n";
    for (const auto& r : sw.reports)
      os << r.rho << ',' << to_string(r.status) << ',' << r.iterations << ',' << r.contraction_factor << ','
         << r.phi_sup << ',' << r.phi_h01 << ',' << r.pde_residual_relative << ',' << r.far_value << ','
         << r.far_target << '\n';
  });
  for (std::size_t k = 0; k < sw.reports.size(); ++k) {
    const std::string p = "rho" + std::to_string(k + 1) + "_";
    em.file(p + "report.txt", "solution.report", "contraction and solution",
            [&](std::ostream& os) { sw.reports[k].write_record(os); });
    em.file(p + "history.csv", "solution.history", "contraction and solution",
            [&](std::ostream& os) { sw.reports[k].write_history_csv(os); });
  }
}

bool sweep_converged(const SweepResult& sw) {
  for (const auto& r : sw.reports)
    if (r.status != SolveStatus::Converged) return false;
  return !sw.reports.empty();
}

int run(const RunConfig& rc, Command cmd) {
  Emitter em(rc.out);
  const GreenProvider gp = GreenProvider::for_domain(rc.problem.domain, rc.mesh.h);
  int code = kOk;
  try {
    switch (cmd) {
      case Command::Construct: {
        const Solution s = construct_solution(rc.problem, rc.rhos.front(), gp, rc.mesh, rc.solver);
        write_solution(em, s, "");
        if (s.report.status != SolveStatus::Converged) code = kSolver;
        break;
      }
      case Command::Sweep: {
        const SweepResult sw = continuation_sweep(rc.problem, rc.rhos, gp, rc.mesh, rc.solver);
        write_sweep_table(em, sw);
        if (!sweep_converged(sw)) code = kSolver;
        break;
      }
      case Command::Verify: {
        SweepResult sw;
        const CheckReport r = verify_suite(rc, gp, &sw);
        write_sweep_table(em, sw);
        em.checks("checks.csv", r);
        if (!sweep_converged(sw)) code = kSolver;
        else if (!r.all_pass()) code = kCheck;
        break;
      }
      case Command::GreenCheck: {
        const CheckReport r = green_checks(rc.verify.green_pairs, rc.seed, rc.verify.green_h, rc.verify.green_radius);
        em.checks("checks.csv", r);
        const GreenProvider numeric = GreenProvider::numeric(rc.problem.domain, rc.mesh.h);
        em.file("green_profile.csv", "green.profile", "Green function of the disk", [&](std::ostream& os) {
          os.precision(17);
          os << "point,t,value\n";
          for (std::size_t i = 0; i < rc.problem.count(); ++i) {
            const GreenProfile prof = numeric.green_gradient_profile(rc.problem.points[i], Vec2(1.0, 0.0));
            for (std::size_t k = 0; k < prof.t.size(); ++k) os << i + 1 << ',' << prof.t[k] << ',' << prof.value[k] << '\n';
          }
        });
        if (!r.all_pass()) code = kCheck;
        break;
      }
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    code = exit_code(e.kind());
  }
  em.manifest();  // partial outputs stay listed
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concentrating solutions of the mixed-sign mean field equation"};
  app.require_subcommand(1);
  std::string config_path, out, rho_list, p_list;
  std::uint64_t seed = 0;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"construct", "solve for the first rho and write the solution"},
           {"sweep", "continuation over the rho list"},
           {"verify", "run the full check suite"},
           {"green-check", "validate the numeric Green function"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--rho", rho_list, "comma-separated rho values");
    sub->add_option("--p", p_list, "comma-separated exponents");
  }
  CLI11_PARSE(app, argc, argv);
  const Command cmd = *parse_command(app.get_subcommands().front()->get_name());

  RunConfig rc;
  try {
    std::string text = kDefaultConfig;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw Error(ErrorKind::SchemaError, "cannot read " + config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      text = ss.str();
    }
    rc = parse_config(text);
    if (!out.empty()) rc.out = out;
    if (app.get_subcommands().front()->count("--seed")) rc.seed = seed;
    if (!rho_list.empty()) rc.rhos = parse_list(rho_list, "--rho");
    if (!p_list.empty()) rc.solver.p_values = rc.ps = parse_list(p_list, "--p");
    for (double r : rc.rhos)
      if (!(r > 0.0)) throw Error(ErrorKind::SchemaError, "--rho: values must be positive");
    for (double p : rc.ps)
      if (!(p >= 1.0)) throw Error(ErrorKind::SchemaError, "--p: exponents must be at least 1");
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kValidation;
  }
  if (rc.command && *rc.command != cmd)
    std::cerr << "note: command line selects " << to_string(cmd) << " over the configured " << to_string(*rc.command)
              << '\n';
  return run(rc, cmd);
}
