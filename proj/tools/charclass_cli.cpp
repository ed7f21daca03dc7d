#include "charclass/filtration.hpp"
#include "charclass/regulator.hpp"
#include "charclass/verify.hpp"
#include "charclass/weil.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace charclass;

namespace {

enum Exit { ok = 0, verification_failure = 1, usage_error = 2, io_error = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::string fmt15(double x) {
  char buf[64];
  if (x == 0) x = 0;  // drop the sign of negative zero
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void check_caps(int n, int p) {
  if (n < 1 || n > 4) throw CLI::ValidationError("--n", "n must be in [1, 4]");
  if (p < 1 || p > n) throw CLI::ValidationError("--p", "p must satisfy 1 <= p <= n");
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_transgress(int n, int p, const std::string& out) {
  check_caps(n, p);
  TransgressionForm t = transgression_table(n, p);
  emit(out, to_json(t.element).dump(1) + "\n");
  std::cerr << "terms: " << t.element.size() << ", lattice: " << t.lattice
            << ", closed basic space dimension: " << t.closed.size() << "\n";
  std::cout << "residual: " << (t.residual_zero ? "exact zero" : "NONZERO") << "\n";
  return t.residual_zero ? ok : verification_failure;
}

int cmd_cocycle(int n, int p, const std::string& file, const QuadratureConfig& cfg, bool borel, const std::string& out) {
  check_caps(n, p);
  cfg.validate();
  nlohmann::json j = read_json(file);
  if (!j.is_array()) throw IoError(file + ": expected an array of tuples");
  std::string csv = "tuple_id,p,n,raw_re,raw_im,reduced,est_error\n";
  int status = ok;
  for (std::size_t row = 0; row < j.size(); ++row) {
    try {
      std::vector<CMat> tuple;
      for (auto& m : j[row]) {
        tuple.push_back(matrix_from_json(m));
        if (tuple.back().rows() != n) throw std::invalid_argument("matrix size differs from --n");
      }
      RegulatorValue v = borel ? borel_cocycle(n, p, tuple, cfg) : cs_cocycle(n, p, tuple, cfg);
      csv += std::to_string(row) + "," + std::to_string(p) + "," + std::to_string(n) + "," + fmt15(v.raw.real()) + "," +
             fmt15(v.raw.imag()) + "," + fmt15(v.reduced) + "," + fmt15(v.est_error) + "\n";
    } catch (const std::exception& e) {
      std::cerr << "row " << row << ": " << e.what() << "\n";
      status = verification_failure;
    }
  }
  emit(out, csv);
  return status;
}

int cmd_cs_flat(int p, const std::string& file, const QuadratureConfig& cfg) {
  cfg.validate();
  BarCycle c;
  try {
    c = bar_cycle_from_json(read_json(file));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(file + ": " + e.what());
  }
  int n = static_cast<int>(c.generators.front().rows());
  check_caps(n, p);
  RegulatorValue v = evaluate_on_cycle(c, p, cfg);
  std::cout << "raw: " << fmt15(v.raw.real()) << " " << fmt15(v.raw.imag()) << "\n"
            << "reduced: " << fmt15(v.reduced) << "\n"
            << "est_error: " << fmt15(v.est_error) << "\n";
  return ok;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
  nlohmann::json report = run_verify(suite, seed);
  emit(out, report.dump(1) + "\n");
  std::cerr << "seed: " << seed << ", " << (report["pass"].get<bool>() ? "all checks passed" : "FAILURES") << "\n";
  return report["pass"].get<bool>() ? ok : verification_failure;
}

int cmd_filt(const std::string& expr, const std::string& boundary, const std::string& interior) {
  CoordSystem cs;
  try {
    cs.interior = split_names(interior);
    if (boundary.empty()) {
      for (auto& v : variables_in(expr))
        if (std::find(cs.interior.begin(), cs.interior.end(), v) == cs.interior.end()) cs.boundary.push_back(v);
    } else {
      cs.boundary = split_names(boundary);
    }
    cs.validate();
    LogMeroForm f = parse_form(expr, cs);
    std::cout << classification_line(f) << "\n" << classification_summary(f) << "\n" << q_membership(f) << "\n";
  } catch (const FormParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n  " << expr << "\n  " << std::string(e.position, ' ') << "^\n";
    return usage_error;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic classes, regulators and filtrations"};
  app.require_subcommand(1);

  int n = 1, p = 1;
  std::string out, file, suite = "all", expr, boundary, interior;
  std::uint64_t seed = 7;
  bool borel = false;
  QuadratureConfig cfg;
  std::string model = "orbit";

  auto add_quadrature = [&](CLI::App* c) {
    c->add_option("--order", cfg.order, "Gauss-Legendre order per axis")->check(CLI::Range(2, 64));
    c->add_flag("--exact-derivatives", cfg.exact_derivatives, "analytic instead of finite-difference Jacobians");
    c->add_option("--model", model, "symmetric space model")->check(CLI::IsMember({"orbit", "polar"}));
    c->add_option("--threads", cfg.threads, "worker threads (0: automatic)");
  };

  auto* tr = app.add_subcommand("transgress", "solve dT_p = Q_p and export T_p");
  tr->add_option("--n", n)->required();
  tr->add_option("--p", p)->required();
  tr->add_option("--out", out, "output JSON (default stdout)");

  auto* co = app.add_subcommand("cocycle", "evaluate the cocycle on homogeneous tuples");
  co->add_option("--n", n)->required();
  co->add_option("--p", p)->required();
  co->add_option("--tuples", file, "JSON array of tuples of matrices")->required();
  co->add_flag("--borel", borel, "report the Borel cocycle instead");
  co->add_option("--out", out, "output CSV (default stdout)");
  add_quadrature(co);

  auto* cf = app.add_subcommand("cs-flat", "evaluate on a bar cycle");
  cf->add_option("--p", p)->required();
  cf->add_option("--cycle", file, "bar cycle JSON")->required();
  add_quadrature(cf);

  auto* ve = app.add_subcommand("verify", "run seeded verification suites");
  ve->add_option("--suite", suite)->check(CLI::IsMember(verify_suites()));
  ve->add_option("--seed", seed);
  ve->add_option("--out", out, "report JSON (default stdout)");

  auto* fi = app.add_subcommand("filt", "classify a logarithmic/meromorphic form");
  fi->add_option("expr", expr)->required();
  fi->add_option("--boundary", boundary, "comma-separated boundary coordinates");
  fi->add_option("--interior", interior, "comma-separated interior coordinates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : usage_error;
  }
  cfg.model = model == "polar" ? OrbitModel::polar : OrbitModel::orbit;

  try {
    if (*tr) return cmd_transgress(n, p, out);
    if (*co) return cmd_cocycle(n, p, file, cfg, borel, out);
    if (*cf) return cmd_cs_flat(p, file, cfg);
    if (*ve) return cmd_verify(suite, seed, out);
    if (*fi) return cmd_filt(expr, boundary, interior);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return io_error;
  } catch (const NotACycle& e) {
    std::cerr << e.what() << "\n";
    return verification_failure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return verification_failure;
  }
  return usage_error;
}
