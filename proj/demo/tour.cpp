// Walk through the main entry points: transgression, regulator values, a flat
// character on a simplicial set and the filtration calculus.

#include "charclass/cwchar.hpp"
#include "charclass/filtration.hpp"
#include "charclass/regulator.hpp"
#include "charclass/weil.hpp"

#include <cmath>
#include <iostream>
#include <random>

using namespace charclass;

int main() {
  for (auto [n, p] : {std::pair{1, 1}, {2, 1}, {2, 2}}) {
    const TransgressionForm& t = transgression_table(n, p);
    std::cout << "T_" << p << " on gl_" << n << ": " << t.element.size() << " terms, lattice " << t.lattice
              << ", exact residual " << (t.residual_zero ? "zero" : "nonzero") << "\n";
  }

  CMat e = CMat::Identity(1, 1), g(1, 1);
  g(0, 0) = cplx(2.0, 0.0);
  RegulatorValue v = cs_cocycle(1, 1, {e, g});
  std::cout << "cs(1, 2) reduced = " << v.reduced << "  (log 2 = " << std::log(2.0) << ")\n";

  std::mt19937_64 rng(1);
  std::vector<CMat> tuple;
  std::normal_distribution<double> nd(0.0, 0.4);
  for (int i = 0; i < 4; ++i) {
    CMat m = CMat::Identity(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(a, b) += cplx(nd(rng), nd(rng));
    tuple.push_back(m);
  }
  RegulatorValue v2 = cs_cocycle(2, 2, tuple);
  std::cout << "cs for (n,p) = (2,2): raw = (" << v2.raw.real() + 0.0 << ", " << v2.raw.imag() + 0.0
            << "), est_error = " << v2.est_error << "\n";

  SSet x = sphere2();
  SimpConnection w0(x, 2);
  SimpConnection w1 = random_connection(x, 2, rng);
  CSRep rep = flat_rep(x, w0, 1, QCochain(1, x.count(1)));
  ConnectionChange ch = connection_change(x, rep, w0, w1);
  std::cout << "connection change on the 2-sphere: cone identity residual " << ch.d_identity_residual
            << ", character residual zero: " << std::boolalpha << csrep_residual(x, ch.rep).is_zero() << "\n";

  CoordSystem zw{{"z", "w"}, {}};
  LogMeroForm f = parse_form("dz/w^2", zw);
  std::cout << classification_line(f) << "\n";
  std::cout << "on the diagonal: " << classification_line(restrict_diagonal(f, "w", "z", "z")) << "\n";
}
