// Acceptance suite: every release gate in one binary, one pass/fail line
// each. Exit status is the number of failed gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "btq/asymptotics.hpp"
#include "btq/cp1.hpp"
#include "btq/fock.hpp"
#include "btq/kernel_calculus.hpp"
#include "btq/oracles.hpp"
#include "btq/orbifold.hpp"
#include "btq/sphere_symbol.hpp"

using namespace btq;

namespace {

struct Gate {
  int number;
  std::string label;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

Rational random_weight_step(std::mt19937& rng) {
  Rational q(1 + static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 4));
  q.canonicalize();
  return q;
}

ModelWeights random_weights(std::mt19937& rng, int n) {
  std::vector<Rational> a;
  Rational cur = random_weight_step(rng);
  for (int j = 0; j < n; ++j) {
    a.push_back(cur);
    cur += random_weight_step(rng);
  }
  return ModelWeights(n, a);
}

bool composition_table_exact(const ModelWeights& w) {
  const int n = w.n();
  auto zv = [&](int j) { return KernelPoly::variable(n, Var::Z, j); };
  auto zb = [&](int j) { return KernelPoly::variable(n, Var::Zbar, j); };
  auto zbp = [&](int j) { return KernelPoly::variable(n, Var::Zbarp, j); };
  KernelPoly one = KernelPoly::one(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (compose_K(w, one, zb(j)) != zbp(j)) return false;
      if (compose_K(w, one, zv(j)) != zv(j)) return false;
      if (compose_K(w, zv(i), zb(j)) != zv(i) * zbp(j)) return false;
      if (compose_K(w, zb(i), zv(j)) != zb(i) * zv(j)) return false;
      KernelPoly expect = zbp(i) * zv(j);
      if (i == j) expect += KernelPoly::constant(n, GaussianRational(2 / w.a(j)));
      if (compose_K(w, zbp(i), zv(j)) != expect) return false;
    }
  return true;
}

std::vector<KernelPoly> kernel_monomials_up_to(int n, int degree) {
  std::vector<KernelPoly> monos;
  KernelMono cur(n);
  auto rec = [&](auto&& self, int slot, int remaining) -> void {
    if (slot == 4 * n - 1) {
      cur.e[slot] = static_cast<uint16_t>(remaining);
      KernelPoly p(n);
      p.add_term(cur, GaussianRational(1));
      monos.push_back(p);
      cur.e[slot] = 0;
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur.e[slot] = static_cast<uint16_t>(e);
      self(self, slot + 1, remaining - e);
    }
    cur.e[slot] = 0;
  };
  for (int d = 0; d <= degree; ++d) rec(rec, 0, d);
  return monos;
}

std::vector<ExperimentRecord> record_series(const std::vector<long>& ps,
                                            const std::function<double(long)>& f) {
  std::vector<ExperimentRecord> out;
  for (long p : ps) out.push_back({"acc", {}, p, f(p)});
  return out;
}

const std::vector<long> kPowers{8, 16, 32, 64, 128};

bool gate1(std::string& detail) {
  std::mt19937 rng(811);
  for (int n = 1; n <= 3; ++n)
    for (int rep = 0; rep < 2; ++rep) {
      ModelWeights w = random_weights(rng, n);
      if (!composition_table_exact(w)) {
        detail = "table identity failed at n=" + std::to_string(n);
        return false;
      }
    }
  return true;
}

bool gate2(std::string& detail) {
  ModelWeights w(1, {Rational(3)});
  auto exact = spectrum(w, Rational(20));
  auto brute = oracle::model_operator_eigenvalues_bruteforce(w, 8);
  std::vector<Rational> brute_cut;
  for (const auto& v : brute)
    if (v <= 20) brute_cut.push_back(v);
  if (brute_cut.size() != exact.size()) {
    detail = "eigenvalue count mismatch";
    return false;
  }
  for (std::size_t i = 0; i < exact.size(); ++i)
    if (std::abs(to_double(exact[i]) - to_double(brute_cut[i])) > 1e-8) {
      detail = "eigenvalue mismatch at index " + std::to_string(i);
      return false;
    }
  return true;
}

bool gate3(std::string& detail) {
  std::mt19937 rng(833);
  auto rand_rat = [&]() {
    Rational q(static_cast<long>(rng() % 13) - 6, 1 + static_cast<long>(rng() % 5));
    q.canonicalize();
    return q;
  };
  GaussianRational iu = GaussianRational::unit_im();
  for (int t = 0; t < 100; ++t) {
    int n = 1 + t % 3;
    ModelWeights w = random_weights(rng, n);
    auto random_jet = [&]() {
      KernelPoly p(n);
      for (int m = 0; m < 4; ++m) {
        KernelMono mono(n);
        int deg = static_cast<int>(rng() % 4);  // degree <= 3
        for (int d = 0; d < deg; ++d)
          mono.bump(rng() % 2 ? Var::Z : Var::Zbar, static_cast<int>(rng() % n), 1);
        p.add_term(mono, GaussianRational(rand_rat(), rand_rat()));
      }
      return SymbolJet(p);
    };
    SymbolJet f = random_jet(), g = random_jet();
    if (c1_antisymmetric(w, f, g) != iu * poisson_at_point(w, f, g)) {
      detail = "exact identity failed at trial " + std::to_string(t);
      return false;
    }
  }
  return true;
}

bool gate4(std::string& detail) {
  struct Setup {
    int n, B, margin;
    double tol;
    std::vector<Rational> a;
  };
  const std::vector<Setup> setups{{1, 16, 4, 1e-10, {Rational(2)}},
                                  {2, 12, 6, 1e-8, {Rational(3, 2), Rational(2)}}};
  for (const auto& s : setups) {
    ModelWeights w(s.n, s.a);
    auto basis = fock_basis(w, s.B);
    auto monos = kernel_monomials_up_to(s.n, 2);
    double worst = 0;
    for (const auto& F : monos)
      for (const auto& G : monos) worst = std::max(worst, verify_composition(basis, F, G, s.margin));
    if (worst > s.tol) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "n=%d worst residual %.3e > %.0e", s.n, worst, s.tol);
      detail = buf;
      return false;
    }
  }
  return true;
}

bool gate5(std::string& detail) {
  std::mt19937 rng(855);
  for (long p : {4L, 16L, 64L}) {
    for (int t = 0; t < 20; ++t) {
      double z = 1.0 - 2.0 * (static_cast<double>(rng()) / 4294967296.0);
      double th = 2.0 * M_PI * (static_cast<double>(rng()) / 4294967296.0);
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double v = bergman_diag(p, {rho * std::cos(th), rho * std::sin(th), z});
      if (std::abs(v - (p + 1)) > 1e-10) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "p=%ld deviation %.3e", p, std::abs(v - (p + 1)));
        detail = buf;
        return false;
      }
    }
  }
  return true;
}

bool gate6(std::string& detail) {
  SphereSymbol x1 = SphereSymbol::coordinate(1);
  SphereSymbol x3 = SphereSymbol::coordinate(3);
  for (long p : kPowers) {
    double defect = norm_defect(x3, p);
    if (std::abs(defect - 2.0 / (p + 2)) > 1e-12) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "x3 defect off by %.3e at p=%ld",
                    std::abs(defect - 2.0 / (p + 2)), p);
      detail = buf;
      return false;
    }
  }
  std::vector<double> norms;
  auto recs = record_series(kPowers, [&](long p) {
    double nv = operator_norm(toeplitz_sphere(x1, p));
    norms.push_back(nv);
    return sup_norm(x1) - nv;
  });
  RateFit fit = fit_power_law(recs);
  if (fit.rate < 0.9 || fit.rate > 1.1) {
    detail = "x1 defect rate " + std::to_string(fit.rate) + " outside [0.9, 1.1]";
    return false;
  }
  std::vector<ExperimentRecord> nrecs;
  for (std::size_t i = 0; i < kPowers.size(); ++i)
    nrecs.push_back({"n", {}, kPowers[i], norms[i]});
  double limit = richardson_extrapolate(nrecs, 1);
  if (std::abs(limit - 1.0) > 1e-2) {
    detail = "richardson limit " + std::to_string(limit);
    return false;
  }
  return true;
}

bool gate7(std::string& detail) {
  const std::vector<std::pair<int, int>> pairs{{1, 2}, {1, 3}, {2, 3}};
  for (auto [a, b] : pairs) {
    SphereSymbol f = SphereSymbol::coordinate(a), g = SphereSymbol::coordinate(b);
    auto recs = record_series(kPowers, [&](long p) { return commutator_residual(f, g, p); });
    double anchor = recs.front().value * 64.0;
    for (const auto& r : recs)
      if (r.value * r.p * r.p > 2.0 * anchor + 1e-14) {
        detail = "p^2-scaled residual unbounded for pair (" + std::to_string(a) + "," +
                 std::to_string(b) + ")";
        return false;
      }
    RateFit fit = fit_power_law(recs);
    if (fit.rate < 1.9) {
      detail = "rate " + std::to_string(fit.rate) + " < 1.9 for pair (" + std::to_string(a) +
               "," + std::to_string(b) + ")";
      return false;
    }
  }
  return true;
}

bool gate8(std::string& detail) {
  // gated set: pairs with deg(f g) <= 2, i.e. coordinate pairs
  for (int a = 1; a <= 3; ++a)
    for (int b = a; b <= 3; ++b) {
      SphereSymbol f = SphereSymbol::coordinate(a), g = SphereSymbol::coordinate(b);
      auto recs = record_series(kPowers, [&](long p) { return product_residual(f, g, p); });
      double anchor = recs.front().value * 8.0;
      for (const auto& r : recs)
        if (r.value * r.p > 2.0 * anchor + 1e-14) {
          detail = "p-scaled residual unbounded for (" + std::to_string(a) + "," +
                   std::to_string(b) + ")";
          return false;
        }
      RateFit fit = fit_power_law(recs);
      if (fit.rate < 0.9) {
        detail = "rate " + std::to_string(fit.rate) + " < 0.9 for (" + std::to_string(a) + "," +
                 std::to_string(b) + ")";
        return false;
      }
    }
  // informational: degree-2 symbols obey the same law in their asymptotic window
  const std::vector<long> high{64, 128, 256, 512};
  SphereSymbol q = SphereSymbol::coordinate(1) * SphereSymbol::coordinate(2);
  RateFit hf =
      fit_power_law(record_series(high, [&](long p) { return product_residual(q, q, p); }));
  std::printf("       gate 8 info: (x1*x2, x1*x2) product rate over p in {64..512}: %.4f\n",
              hf.rate);
  return true;
}

bool gate9(std::string& detail) {
  const std::vector<long> window{64, 128, 256, 512};
  for (int k : {2, 3}) {
    SphereSymbol f = SphereSymbol::coordinate(3);
    SphereSymbol g = rotation_harmonic(k);
    auto recs = record_series(window, [&](long p) {
      return orbifold_commutator_residual(f, g, invariant_basis(k, p));
    });
    RateFit fit = fit_power_law(recs);
    if (fit.rate < 1.9) {
      detail = "k=" + std::to_string(k) + " commutator rate " + std::to_string(fit.rate);
      return false;
    }
    auto d = invariant_basis(k, 64);
    double eq = orbifold_bergman_diag(d, {1.0, 0.0, 0.0});
    if (std::abs(eq - 65.0) > 0.01) {
      detail = "k=" + std::to_string(k) + " equator value " + std::to_string(eq);
      return false;
    }
    double ratio = orbifold_bergman_diag(d, {0.0, 0.0, 1.0}) / 65.0;
    if (std::abs(ratio - k) > 0.05 * k) {
      detail = "k=" + std::to_string(k) + " cone ratio " + std::to_string(ratio);
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const std::vector<Gate> gates{
      {1, "composition table exact for n in {1,2,3}, random rational weights", 1.0, gate1},
      {2, "model operator spectrum matches the finite-subspace eigenvalues", 1.0, gate2},
      {3, "antisymmetrized first star coefficient equals i{f,g} on 100 random jets", 5.0, gate3},
      {4, "matrix composition residuals within tolerance for all degree-2 monomial pairs", 30.0,
       gate4},
      {5, "Bergman diagonal constant p+1 at random points, p in {4,16,64}", 5.0, gate5},
      {6, "norm defect: exact for x3, rate and extrapolated limit for x1", 60.0, gate6},
      {7, "commutator expansion second order for coordinate pairs, p in {8..128}", 120.0, gate7},
      {8, "product expansion first order for coordinate pairs, p in {8..128}", 60.0, gate8},
      {9, "orbifold commutator rate, equator diagonal and cone multiplicity, k in {2,3}", 120.0,
       gate9},
  };
  int failures = 0;
  for (const auto& g : gates) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = g.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > g.budget_seconds) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("runtime over budget");
    }
    std::printf("[%s] %d. %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", g.number, g.label.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
  return failures;
}
