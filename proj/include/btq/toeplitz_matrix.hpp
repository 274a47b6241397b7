#ifndef BTQ_TOEPLITZ_MATRIX_HPP
#define BTQ_TOEPLITZ_MATRIX_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdio>
#include <sstream>
#include <string>

namespace btq {

// Dense compressed-multiplication matrix in an explicit orthonormal basis,
// tagged with where it lives (model space at cutoff B, sphere at power p,
// orbifold block) and what symbol produced it.
struct ToeplitzMatrix {
  std::string space;   // "fock" | "cp1" | "orbifold"
  long level = 0;      // tensor power p, or basis cutoff B on the model space
  std::string symbol;  // human-readable symbol description
  Eigen::MatrixXcd mat;

  long rows() const { return mat.rows(); }
  long cols() const { return mat.cols(); }

  double hermiticity_defect() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }

  std::string to_csv() const {
    std::string out;
    char buf[80];
    for (long i = 0; i < mat.rows(); ++i) {
      for (long j = 0; j < mat.cols(); ++j) {
        if (j) out += ",";
        std::snprintf(buf, sizeof buf, "\"%.17g,%.17g\"", mat(i, j).real(), mat(i, j).imag());
        out += buf;
      }
      out += "\n";
    }
    return out;
  }

  std::string to_json() const {
    std::ostringstream os;
    char buf[80];
    os << "{\"space\":\"" << space << "\",\"level\":" << level << ",\"symbol\":\"" << symbol
       << "\",\"rows\":" << mat.rows() << ",\"cols\":" << mat.cols() << ",\"entries\":[";
    for (long i = 0; i < mat.rows(); ++i)
      for (long j = 0; j < mat.cols(); ++j) {
        if (i || j) os << ",";
        std::snprintf(buf, sizeof buf, "[%.17g,%.17g]", mat(i, j).real(), mat(i, j).imag());
        os << buf;
      }
    os << "]}";
    return os.str();
  }
};

// Largest singular value; for (numerically) Hermitian or anti-Hermitian
// input the spectral radius via the symmetric eigensolver.
inline double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() == m.cols()) {
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    if ((m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          Eigen::MatrixXcd(std::complex<double>(0, 1) * m), Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

inline double operator_norm(const ToeplitzMatrix& m) { return operator_norm(m.mat); }

}  // namespace btq

#endif
