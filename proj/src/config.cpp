#include "blowup/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blowup/error.hpp"

namespace blowup {
namespace {

using nlohmann::json;

/// Collects every schema problem before reporting.
class Schema {
 public:
  void fail(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }

  void allow(const json& obj, const std::string& path, std::set<std::string> keys) {
    if (!obj.is_object()) return;
    for (const auto& [k, v] : obj.items())
      if (!keys.count(k)) fail(path + k, "unknown key");
  }

  const json* section(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + key, "missing");
      return nullptr;
    }
    if (!obj[key].is_object()) {
      fail(path + key, "expected an object");
      return nullptr;
    }
    return &obj[key];
  }

  template <class T>
  void scalar(const json& obj, const std::string& key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj[key];
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) return fail(path + key, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return fail(path + key, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0))
        return fail(path + key, "expected a nonnegative integer");
    } else {
      if (!v.is_number()) return fail(path + key, "expected a number");
    }
    out = v.get<T>();
  }

  void reals(const json& obj, const std::string& key, const std::string& path, std::vector<double>& out,
             bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(path + key, "missing");
      return;
    }
    const json& v = obj[key];
    if (!v.is_array()) return fail(path + key, "expected an array of numbers");
    std::vector<double> r;
    for (const auto& e : v) {
      if (!e.is_number()) return fail(path + key, "expected an array of numbers");
      r.push_back(e.get<double>());
    }
    out = std::move(r);
  }

  std::vector<Vec2> points(const json& v, const std::string& path) {
    std::vector<Vec2> out;
    if (!v.is_array()) {
      fail(path, "expected an array of [x, y] pairs");
      return out;
    }
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        fail(path, "expected an array of [x, y] pairs");
        return {};
      }
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
  }

  void positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(path, "must be positive");
  }

  void throw_if_any() const {
    if (errors_.empty()) return;
    std::string msg;
    for (const auto& e : errors_) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorKind::SchemaError, msg);
  }

 private:
  std::vector<std::string> errors_;
};

Expression scaled(const Expression& V, double nu) {
  if (nu == 1.0) return V;
  std::ostringstream os;
  os.precision(17);
  os << nu << "*(" << V.text() << ")";
  return Expression::parse(os.str());
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Construct: return "construct";
    case Command::Sweep: return "sweep";
    case Command::Verify: return "verify";
    case Command::GreenCheck: return "green-check";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Construct, Command::Sweep, Command::Verify, Command::GreenCheck})
    if (name == to_string(c)) return c;
  return std::nullopt;
}

void check_positive(const Expression& V, const char* name, const DomainSpec& domain, std::size_t min_samples) {
  // Lattice spacing chosen so that the domain mesh carries enough nodes.
  double h = std::sqrt(domain.area() / (1.2 * static_cast<double>(min_samples)));
  Mesh mesh = build_domain_mesh(domain, h);
  while (mesh.size() < min_samples) {
    h *= 0.8;
    mesh = build_domain_mesh(domain, h);
  }
  for (const Vec2& x : mesh.nodes) {
    const double v = V(x);
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << name << " = \"" << V.text() << "\" is " << v << " at (" << x.x() << ", " << x.y() << ")";
      throw Error(ErrorKind::NonpositiveSampled, os.str());
    }
  }
}

Expression parse_potential(const std::string& text, const DomainSpec& domain, std::size_t min_samples) {
  Expression e = Expression::parse(text);
  check_positive(e, "potential", domain, min_samples);
  return e;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size())
      throw Error(ErrorKind::SchemaError, std::string(what) + ": cannot read \"" + item + "\" as a number");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::SchemaError, std::string(what) + ": empty list");
  return out;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("malformed document: ") + e.what());
  }
  Schema s;
  RunConfig rc;
  if (!doc.is_object()) {
    s.fail("(root)", "expected an object");
    s.throw_if_any();
  }
  s.allow(doc, "", {"problem", "rho", "mesh", "p", "solver", "verify", "seed", "out", "command"});

  std::string V1 = "1", V2 = "1";
  double nu = 1.0;
  std::string domain_kind = "unit_disk";
  if (const json* p = s.section(doc, "problem", "", true)) {
    s.allow(*p, "problem.", {"domain", "polygon", "points", "alphas", "m1", "tau", "nu", "V1", "V2"});
    if (p->contains("points")) rc.problem.points = s.points((*p)["points"], "problem.points");
    else s.fail("problem.points", "missing");
    s.reals(*p, "alphas", "problem.", rc.problem.alphas, true);
    s.scalar(*p, "m1", "problem.", rc.problem.m1);
    s.scalar(*p, "tau", "problem.", rc.problem.tau);
    s.scalar(*p, "nu", "problem.", nu);
    s.scalar(*p, "V1", "problem.", V1);
    s.scalar(*p, "V2", "problem.", V2);
    s.scalar(*p, "domain", "problem.", domain_kind);
    if (domain_kind == "polygon") {
      if (p->contains("polygon")) {
        auto poly = s.points((*p)["polygon"], "problem.polygon");
        try {
          if (!poly.empty()) rc.problem.domain = DomainSpec::curve(std::move(poly));
        } catch (const Error& e) {
          s.fail("problem.polygon", e.what());
        }
      } else {
        s.fail("problem.polygon", "missing for a polygon domain");
      }
    } else if (domain_kind != "unit_disk") {
      s.fail("problem.domain", "expected \"unit_disk\" or \"polygon\"");
    }
    if (!(nu > 0.0)) s.fail("problem.nu", "must be positive");
  }
  s.reals(doc, "rho", "", rc.rhos);
  s.reals(doc, "p", "", rc.ps);
  for (double r : rc.rhos) s.positive(r, "rho");
  for (double p : rc.ps)
    if (!(p >= 1.0)) s.fail("p", "exponents must be at least 1");
  if (const json* m = s.section(doc, "mesh", "", false)) {
    s.allow(*m, "mesh.", {"h", "q", "min_hole_nodes"});
    s.scalar(*m, "h", "mesh.", rc.mesh.h);
    s.scalar(*m, "q", "mesh.", rc.mesh.q);
    s.scalar(*m, "min_hole_nodes", "mesh.", rc.mesh.min_hole_nodes);
    s.positive(rc.mesh.h, "mesh.h");
    if (!(rc.mesh.q > 1.0)) s.fail("mesh.q", "must exceed 1");
  }
  if (const json* o = s.section(doc, "solver", "", false)) {
    s.allow(*o, "solver.", {"tol", "maxiter", "guard", "newton_check", "far_point"});
    s.scalar(*o, "tol", "solver.", rc.solver.tol);
    s.scalar(*o, "maxiter", "solver.", rc.solver.maxiter);
    s.scalar(*o, "guard", "solver.", rc.solver.guard);
    s.scalar(*o, "newton_check", "solver.", rc.solver.newton_check);
    if (o->contains("far_point")) {
      const json& fp = (*o)["far_point"];
      if (fp.is_array() && fp.size() == 2 && fp[0].is_number() && fp[1].is_number())
        rc.solver.far_point = Vec2(fp[0].get<double>(), fp[1].get<double>());
      else
        s.fail("solver.far_point", "expected [x, y]");
    }
    s.positive(rc.solver.tol, "solver.tol");
    if (rc.solver.maxiter < 1) s.fail("solver.maxiter", "must be at least 1");
  }
  if (const json* v = s.section(doc, "verify", "", false)) {
    s.allow(*v, "verify.", {"trials", "green_pairs", "green_h", "green_radius", "kernel_spacing", "quadrature_tol",
                            "identity_alphas", "constraint_rhos"});
    s.scalar(*v, "trials", "verify.", rc.verify.trials);
    s.scalar(*v, "green_pairs", "verify.", rc.verify.green_pairs);
    s.scalar(*v, "green_h", "verify.", rc.verify.green_h);
    s.scalar(*v, "green_radius", "verify.", rc.verify.green_radius);
    s.scalar(*v, "kernel_spacing", "verify.", rc.verify.kernel_spacing);
    s.scalar(*v, "quadrature_tol", "verify.", rc.verify.quadrature_tol);
    s.reals(*v, "identity_alphas", "verify.", rc.verify.identity_alphas);
    s.reals(*v, "constraint_rhos", "verify.", rc.verify.constraint_rhos);
  }
  s.scalar(doc, "seed", "", rc.seed);
  s.scalar(doc, "out", "", rc.out);
  if (doc.contains("command")) {
    std::string c;
    s.scalar(doc, "command", "", c);
    rc.command = parse_command(c);
    if (!rc.command && !c.empty()) s.fail("command", "expected construct, sweep, verify or green-check");
  }
  s.throw_if_any();

  rc.problem.validate();
  rc.problem.V1 = Expression::parse(V1);
  rc.problem.V2 = scaled(Expression::parse(V2), nu);  // ν is absorbed into V₂
  // V₁ only enters through the positive bubbles, V₂ through the negative ones.
  if (rc.problem.m1 > 0) check_positive(rc.problem.V1, "V1", rc.problem.domain);
  if (rc.problem.m1 < rc.problem.count()) check_positive(rc.problem.V2, "V2", rc.problem.domain);
  rc.solver.p_values = rc.ps;
  return rc;
}

}  // namespace blowup
