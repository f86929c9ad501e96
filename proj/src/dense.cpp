#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "diracbound/eigensolve.hpp"
#include "diracbound/errors.hpp"

namespace db {

namespace {
constexpr Eigen::Index kDenseLimit = 4096;

struct Pair {
  cplx value;
  Eigen::VectorXcd vector;
  double residual;
};

void finish(EigenResult& r, std::vector<Pair>& pairs, int k, bool wantVectors) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return eigen_order(a.value, b.value); });
  if (k > 0 && static_cast<int>(pairs.size()) > k) pairs.resize(k);
  for (auto& p : pairs) {
    r.eigenvalues.push_back(p.value);
    r.residuals.push_back(p.residual);
    if (wantVectors) r.vectors.push_back(std::move(p.vector));
  }
  r.clusterSizes = cluster_sizes(r.eigenvalues);
}
}  // namespace

bool eigen_order(cplx a, cplx b) {
  const double ma = std::abs(a), mb = std::abs(b);
  const double tie = 1e-12 * std::max({1.0, ma, mb});
  if (std::abs(ma - mb) > tie) return ma < mb;
  if (std::abs(a.real() - b.real()) > tie) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<int> cluster_sizes(const std::vector<cplx>& sorted, double relTol) {
  std::vector<int> out;
  if (sorted.empty()) return out;
  double scale = 1.0;
  for (const auto& v : sorted) scale = std::max(scale, std::abs(v));
  const double gap = relTol * scale;
  int run = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (std::abs(sorted[i] - sorted[i - 1]) <= gap) {
      ++run;
    } else {
      out.push_back(run);
      run = 1;
    }
  }
  out.push_back(run);
  return out;
}

EigenResult dense_hermitian_all(const Eigen::MatrixXcd& A) {
  EigenResult r;
  r.method = "dense";
  if (A.rows() == 0) return r;
  if (A.imag().cwiseAbs().maxCoeff() == 0.0) {
    // real symmetric input: real arithmetic
    const Eigen::MatrixXd Ar = A.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense symmetric eigensolver failed", INFINITY);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const Eigen::VectorXd v = es.eigenvectors().col(i);
      const double lam = es.eigenvalues()[i];
      r.eigenvalues.emplace_back(lam, 0.0);
      r.residuals.push_back((Ar * v - lam * v).norm() / v.norm());
      r.vectors.push_back(v.cast<cplx>());
    }
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense Hermitian eigensolver failed", INFINITY);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    const double lam = es.eigenvalues()[i];
    r.eigenvalues.emplace_back(lam, 0.0);
    r.residuals.push_back((A * v - lam * v).norm() / v.norm());
    r.vectors.push_back(v);
  }
  return r;
}

EigenResult hermitian_eigs(const OperatorMatrix& op, int k, double tol, bool wantVectors) {
  if (op.symmetry != Symmetry::Hermitian || !check_symmetry(op))
    throw Error(ErrorKind::Symmetry, "operator is not Hermitian");
  const Eigen::Index n = op.size();
  if (k < 1 || k > n) throw Error(ErrorKind::Parameter, "requested eigenpair count out of range");
  std::vector<std::pair<int, int>> blocks = op.blocks;
  if (blocks.empty()) blocks.push_back({0, static_cast<int>(n)});
  EigenResult r;
  std::vector<Pair> pairs;
  bool usedLanczos = false;
  for (const auto& [off, sz] : blocks) {
    const Eigen::MatrixXcd A = op.entries.block(off, off, sz, sz);
    EigenResult br;
    if (sz <= kDenseLimit) {
      br = dense_hermitian_all(A);
    } else {
      usedLanczos = true;
      br = lanczos_eigs([&A](const Eigen::MatrixXcd& X) { return Eigen::MatrixXcd(A * X); }, sz,
                        std::min<int>(k, sz), tol);
    }
    for (std::size_t i = 0; i < br.eigenvalues.size(); ++i) {
      Eigen::VectorXcd v;
      if (wantVectors) {
        v = Eigen::VectorXcd::Zero(n);
        v.segment(off, sz) = br.vectors[i];
      }
      pairs.push_back({br.eigenvalues[i], std::move(v), br.residuals[i]});
    }
  }
  r.method = usedLanczos ? "lanczos" : "dense";
  finish(r, pairs, k, wantVectors);
  // tolerance is relative to the operator scale
  const double scale = std::max(1.0, op.entries.cwiseAbs().rowwise().sum().maxCoeff());
  double worst = 0.0;
  for (double res : r.residuals) worst = std::max(worst, res);
  if (worst > tol * scale) throw ConvergenceError("eigenpair residual above tolerance", worst);
  return r;
}

std::vector<cplx> general_eigenvalues(const Eigen::MatrixXcd& A) {
  if (A.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("complex eigensolver failed", INFINITY);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + A.rows());
  std::sort(out.begin(), out.end(), eigen_order);
  return out;
}

}  // namespace db
