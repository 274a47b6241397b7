#ifndef BTQ_ORACLES_HPP
#define BTQ_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "btq/kernel_calculus.hpp"
#include "btq/kernel_poly.hpp"
#include "btq/model_weights.hpp"
#include "btq/multi_index.hpp"
#include "btq/sphere_symbol.hpp"

// Independent numerical and exact cross-checks. Everything here is oracle
// code: it never feeds the production paths it validates.

namespace btq::oracle {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Nodes/weights for integral of exp(-x^2) f(x) dx over R (Golub-Welsch on the
// Hermite recurrence).
inline QuadRule gauss_hermite(int m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    double b = std::sqrt(k / 2.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule r;
  r.x.resize(m);
  r.w.resize(m);
  const double mu0 = std::sqrt(M_PI);
  for (int k = 0; k < m; ++k) {
    r.x[k] = es.eigenvalues()(k);
    double v = es.eigenvectors()(0, k);
    r.w[k] = mu0 * v * v;
  }
  return r;
}

// Nodes/weights on [0, 1].
inline QuadRule gauss_legendre01(int m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int k = 0; k < m; ++k) {
    r.x[k] = 0.5 * (es.eigenvalues()(k) + 1.0);
    double v = es.eigenvectors()(0, k);
    r.w[k] = v * v;  // total weight 2 on [-1,1], halved by the substitution
  }
  return r;
}

// Quadrature over R^{2n} against the Gaussian factor of the model space:
// integral of f(Z) dZ for f(Z) = g(Z) exp(-(1/2) sum a_j |z_j|^2) with g
// polynomially bounded; callback receives the complex point.
template <typename F>
std::complex<double> gaussian_integral(const ModelWeights& w, int nodes, F&& f) {
  QuadRule gh = gauss_hermite(nodes);
  const int n = w.n();
  std::vector<int> idx(2 * n, 0);
  std::vector<std::complex<double>> z(n);
  std::complex<double> acc = 0;
  while (true) {
    double weight = 1.0, jac = 1.0, gauss_back = 0.0;
    for (int j = 0; j < n; ++j) {
      double aj = to_double(w.a(j));
      double s = std::sqrt(2.0 / aj);  // x = s t maps exp(-a x^2 / 2) to exp(-t^2)
      double xr = s * gh.x[idx[2 * j]];
      double xi = s * gh.x[idx[2 * j + 1]];
      weight *= gh.w[idx[2 * j]] * gh.w[idx[2 * j + 1]];
      jac *= s * s;
      z[j] = {xr, xi};
      gauss_back += 0.5 * aj * std::norm(z[j]);
    }
    acc += weight * jac * f(z) * std::exp(gauss_back);
    int k = 0;
    while (k < 2 * n && ++idx[k] == nodes) idx[k++] = 0;
    if (k == 2 * n) break;
  }
  return acc;
}

inline double phi_norm_quadrature(const ModelWeights& w, const MultiIndex& beta, int nodes = 40) {
  auto val = gaussian_integral(w, nodes, [&](const std::vector<std::complex<double>>& z) {
    return std::norm(phi_beta_eval(w, beta, z));
  });
  return val.real();
}

// integral over the middle variable of F(Z,W) P(Z,W) G(W,Z') P(W,Z') dW,
// compared against K[F,G](Z,Z') P(Z,Z') by the caller.
inline std::complex<double> composition_quadrature(const ModelWeights& w, const KernelPoly& F,
                                                   const KernelPoly& G,
                                                   const std::vector<std::complex<double>>& z,
                                                   const std::vector<std::complex<double>>& zp,
                                                   int nodes = 60) {
  return gaussian_integral(w, nodes, [&](const std::vector<std::complex<double>>& mid) {
    return F.eval(z, mid) * model_kernel_eval(w, z, mid) * G.eval(mid, zp) *
           model_kernel_eval(w, mid, zp);
  });
}

// Exact assembly of the model operator sum_j b_j b_j^+ on the span of
// z^beta zbar^gamma exp(-(1/4) sum a_j |z_j|^2), |beta|+|gamma| <= max_deg.
// The action is triangular in any graded order:
//   L (z^b zbar^g E) = sum_j 2 a_j g_j z^b zbar^g E - 4 b_j g_j z^{b-e_j} zbar^{g-e_j} E,
// so the eigenvalues are the diagonal entries 2 sum_j a_j g_j. Returns the
// sorted distinct eigenvalues, exactly.
inline std::vector<Rational> model_operator_eigenvalues_bruteforce(const ModelWeights& w,
                                                                   int max_deg) {
  const int n = w.n();
  auto pairs_beta = multi_indices_up_to(n, max_deg);
  struct Basis {
    MultiIndex b, g;
  };
  std::vector<Basis> basis;
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> pos;
  for (const auto& b : pairs_beta)
    for (const auto& g : multi_indices_up_to(n, max_deg - b.order())) {
      pos[{b.e, g.e}] = static_cast<int>(basis.size());
      basis.push_back({b, g});
    }
  const int N = static_cast<int>(basis.size());
  std::vector<std::vector<Rational>> M(N, std::vector<Rational>(N, Rational(0)));
  for (int c = 0; c < N; ++c) {
    const auto& [b, g] = basis[c];
    for (int j = 0; j < n; ++j) {
      if (g[j] == 0) continue;
      M[c][c] += 2 * w.a(j) * g[j];
      if (b[j] > 0) {
        auto key = std::make_pair(b.plus(j, -1).e, g.plus(j, -1).e);
        M[pos.at(key)][c] -= Rational(4) * b[j] * g[j];
      }
    }
  }
  // triangularity check in the graded order implied by total degree
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) {
      int dr = basis[r].b.order() + basis[r].g.order();
      int dc = basis[c].b.order() + basis[c].g.order();
      if (M[r][c] != 0 && dr > dc)
        throw std::logic_error("model operator matrix lost triangularity");
    }
  std::set<Rational> eigs;
  for (int c = 0; c < N; ++c) eigs.insert(M[c][c]);
  return {eigs.begin(), eigs.end()};
}

// 2d chart quadrature of <f s_k, s_j> on the sphere: angular trapezoid
// (exact for the trigonometric content) times Gauss-Legendre in w = u/(1+u)
// (exact for the polynomial radial content). Evaluates f directly at sphere
// points, independent of the Beta-integral production path.
inline std::complex<double> sphere_moment_quadrature(const SphereSymbol& f, long p, long j,
                                                     long k) {
  const int d = f.degree();
  const int ntheta = static_cast<int>(2 * (p + d) + 3);
  QuadRule gl = gauss_legendre01(static_cast<int>((p + d) / 2 + 4));
  std::complex<double> acc = 0;
  for (std::size_t iw = 0; iw < gl.x.size(); ++iw) {
    double w = gl.x[iw];
    double u = w / (1.0 - w);
    double r = std::sqrt(u);
    double radial = std::pow(r, static_cast<double>(j + k)) *
                    std::pow(1.0 - w, static_cast<double>(p));
    for (int it = 0; it < ntheta; ++it) {
      double theta = 2.0 * M_PI * it / ntheta;
      // chart point for z = r e^{i theta}: x2 carries the conjugate-chart sign
      std::array<double, 3> x{2.0 * r * std::cos(theta) / (1.0 + u),
                              -2.0 * r * std::sin(theta) / (1.0 + u),
                              (1.0 - u) / (1.0 + u)};
      std::complex<double> ang = std::exp(std::complex<double>(0.0, (k - j) * theta));
      acc += gl.w[iw] * (2.0 * M_PI / ntheta) * f.eval(x) * radial * ang;
    }
  }
  return acc / (2.0 * M_PI);
}

inline double section_norm_quadrature(long p, long k) {
  SphereSymbol one(Rational(1));
  return sphere_moment_quadrature(one, p, k, k).real();
}

// Chart-side Poisson bracket at a point, by finite differences of the pulled
// back symbols in the conjugate stereographic chart (x2 = -2y/(1+r^2)):
// {f, g} = ((1+r^2)^2 / 2)(f_y g_x - f_x g_y).
inline double poisson_chart_fd(const SphereSymbol& f, const SphereSymbol& g, double cx,
                               double cy) {
  auto at = [](double x, double y) {
    double u = x * x + y * y;
    return std::array<double, 3>{2 * x / (1 + u), -2 * y / (1 + u), (1 - u) / (1 + u)};
  };
  const double h = 1e-5;
  auto dx = [&](const SphereSymbol& s) {
    return (s.eval(at(cx + h, cy)) - s.eval(at(cx - h, cy))) / (2 * h);
  };
  auto dy = [&](const SphereSymbol& s) {
    return (s.eval(at(cx, cy + h)) - s.eval(at(cx, cy - h))) / (2 * h);
  };
  double u = cx * cx + cy * cy;
  double pref = (1 + u) * (1 + u) / 2.0;
  return pref * (dy(f) * dx(g) - dx(f) * dy(g));
}

// Roots-of-unity filter for the invariant-sector binomial sum:
// sum_{j = r0 mod k} C(p,j) v^j (1-v)^{p-j} = (1/k) sum_t zeta^{-t r0} ((1-v) + zeta^t v)^p.
inline double invariant_binomial_filter(int k, long p, int r0, double v) {
  std::complex<double> acc = 0;
  for (int t = 0; t < k; ++t) {
    std::complex<double> zeta = std::exp(std::complex<double>(0, 2.0 * M_PI * t / k));
    acc += std::exp(std::complex<double>(0, -2.0 * M_PI * t * r0 / k)) *
           std::pow((1.0 - v) + zeta * v, static_cast<double>(p));
  }
  return (acc / static_cast<double>(k)).real();
}

}  // namespace btq::oracle

#endif
