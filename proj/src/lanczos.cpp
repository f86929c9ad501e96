#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "diracbound/eigensolve.hpp"
#include "diracbound/errors.hpp"

namespace db {

namespace {

Eigen::MatrixXcd random_block(Eigen::Index n, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd X(n, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = cplx(nd(rng), nd(rng));
  return X;
}

// Orthogonalizes X against Q (twice) and then internally; rank-deficient directions are
// replaced by fresh random ones.
Eigen::MatrixXcd orthonormal_block(const Eigen::MatrixXcd& Q, Eigen::MatrixXcd X, std::mt19937_64& rng) {
  const Eigen::Index n = X.rows();
  for (int pass = 0; pass < 2; ++pass)
    if (Q.cols() > 0) X -= Q * (Q.adjoint() * X);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::VectorXcd v = X.col(j);
      const double before = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (Q.cols() > 0) v -= Q * (Q.adjoint() * v);
        if (j > 0) v -= X.leftCols(j) * (X.leftCols(j).adjoint() * v);
      }
      const double after = v.norm();
      if (after > 1e-10 * std::max(before, 1e-300)) {
        X.col(j) = v / after;
        break;
      }
      X.col(j) = random_block(n, 1, rng);
    }
  }
  return X;
}

}  // namespace

EigenResult lanczos_eigs(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply, Eigen::Index n,
                         int k, double tol, const LanczosOptions& opts) {
  if (k < 1 || k > n) throw Error(ErrorKind::Parameter, "requested eigenpair count out of range");
  const int bs = std::max(1, std::min<int>(opts.blockSize, static_cast<int>(n)));
  const Eigen::Index maxDim = opts.maxDim > 0 ? std::min<Eigen::Index>(opts.maxDim, n) : n;
  std::mt19937_64 rng(opts.seed);

  // Krylov basis of A^2 and its image.
  Eigen::MatrixXcd Q(n, 0), W(n, 0);
  Eigen::MatrixXcd X = orthonormal_block(Q, random_block(n, bs, rng), rng);
  double best = INFINITY;
  Eigen::Index lastCheck = 0;
  while (true) {
    const Eigen::MatrixXcd AX = apply(X);
    const Eigen::MatrixXcd BX = apply(AX);
    const Eigen::Index m0 = Q.cols();
    Q.conservativeResize(n, m0 + X.cols());
    W.conservativeResize(n, m0 + X.cols());
    Q.rightCols(X.cols()) = X;
    W.rightCols(X.cols()) = BX;
    const Eigen::Index m = Q.cols();

    const bool due = m - lastCheck >= std::max<Eigen::Index>(bs, lastCheck / 2);
    if ((m >= std::min<Eigen::Index>(n, k + bs) && due) || m >= maxDim || m >= n) {
      lastCheck = m;
      Eigen::MatrixXcd T = Q.adjoint() * W;
      T = 0.5 * (T + T.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
      // keep whole clusters of A^2 so that the Ritz space is invariant under A
      int s = static_cast<int>(std::min<Eigen::Index>(m, k + bs));
      const double gap = 1e-8 * std::max(1.0, std::abs(es.eigenvalues()[m - 1]));
      while (s < m && es.eigenvalues()[s] - es.eigenvalues()[s - 1] <= gap) ++s;
      const Eigen::MatrixXcd Z = Q * es.eigenvectors().leftCols(s);
      const Eigen::MatrixXcd AZ = apply(Z);
      Eigen::MatrixXcd H = Z.adjoint() * AZ;
      H = 0.5 * (H + H.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(H);
      const Eigen::MatrixXcd V = Z * hs.eigenvectors();
      const Eigen::MatrixXcd AV = AZ * hs.eigenvectors();
      std::vector<int> order(s);
      for (int i = 0; i < s; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return eigen_order(cplx(hs.eigenvalues()[a], 0.0), cplx(hs.eigenvalues()[b], 0.0));
      });
      const double scale = std::max(1.0, std::sqrt(std::abs(es.eigenvalues()[m - 1])));
      EigenResult r;
      r.method = "lanczos";
      double worst = 0.0;
      for (int i = 0; i < k; ++i) {
        const int c = order[i];
        const double lam = hs.eigenvalues()[c];
        const double res = (AV.col(c) - lam * V.col(c)).norm() / V.col(c).norm();
        r.eigenvalues.emplace_back(lam, 0.0);
        r.residuals.push_back(res);
        r.vectors.push_back(V.col(c));
        worst = std::max(worst, res / scale);
      }
      best = std::min(best, worst);
      if (worst <= tol || m >= n) {
        r.clusterSizes = cluster_sizes(r.eigenvalues);
        if (worst > tol) throw ConvergenceError("Lanczos did not reach the requested residual", best);
        return r;
      }
      if (m >= maxDim) throw ConvergenceError("Lanczos reached its dimension cap", best);
    }
    const int next = static_cast<int>(std::min<Eigen::Index>(bs, n - m));
    if (next <= 0) throw ConvergenceError("Lanczos basis exhausted", best);
    X = orthonormal_block(Q, BX.leftCols(next), rng);
  }
}

}  // namespace db
