#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dppss/kernels.hpp"
#include "dppss/random.hpp"

namespace dppss {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Psi(i,k) = psi_k(X_i), one data point per row of `points`. Throws if a
/// point lies outside [0,1]^d.
Eigen::MatrixXd build_feature_matrix(const ProjectionKernel& kernel,
                                     const Eigen::MatrixXd& points);

/// Discrete projection DPP K = U U^T on N items, U column-orthonormal (N x m).
template <typename Scalar>
class DiscreteProjectionDPP {
 public:
  DiscreteProjectionDPP(MatrixX<Scalar> basis, VectorX<Scalar> eigenvalues,
                        Scalar rank_tolerance)
      : basis_(std::move(basis)),
        eigenvalues_(std::move(eigenvalues)),
        rank_tolerance_(rank_tolerance),
        inclusion_(basis_.rowwise().squaredNorm()) {}

  /// Build directly from an orthonormal basis (eigenvalues set to one).
  explicit DiscreteProjectionDPP(MatrixX<Scalar> basis)
      : DiscreteProjectionDPP(basis, VectorX<Scalar>::Ones(basis.cols()), Scalar(0)) {}

  Eigen::Index size() const { return basis_.rows(); }
  Eigen::Index rank() const { return basis_.cols(); }
  const MatrixX<Scalar>& basis() const { return basis_; }
  /// Kept eigenvalues of L, decreasing.
  const VectorX<Scalar>& eigenvalues() const { return eigenvalues_; }
  Scalar rank_tolerance() const { return rank_tolerance_; }

  /// K_ii = |row i of U|^2.
  Scalar inclusion_probability(Eigen::Index i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("inclusion_probability: index out of range");
    return inclusion_[i];
  }
  const VectorX<Scalar>& inclusion_probabilities() const { return inclusion_; }

  /// Rows [row0, row0 + rows) of K.
  MatrixX<Scalar> kernel_block(Eigen::Index row0, Eigen::Index rows) const {
    return basis_.middleRows(row0, rows) * basis_.transpose();
  }

 private:
  MatrixX<Scalar> basis_;
  VectorX<Scalar> eigenvalues_;
  Scalar rank_tolerance_;
  VectorX<Scalar> inclusion_;
};

using DiscreteDPP = DiscreteProjectionDPP<double>;

inline constexpr double kDefaultRelativeRankTolerance = 1e-10;

/// Flips each column so that its largest-magnitude entry is positive.
template <typename Derived>
void canonicalize_signs(Eigen::MatrixBase<Derived>& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Index arg = 0;
    columns.col(c).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, c) < 0) columns.col(c) = -columns.col(c);
  }
}

/// The m-DPP of the L-ensemble L = (1/N) D(rho^{-1/2}) Psi Psi^T D(rho^{-1/2}),
/// which is the projection DPP onto the range of L.
///
/// Works on the n x n Gram B^T B with B = N^{-1/2} D(rho^{-1/2}) Psi, never forming
/// an N x N matrix. Eigenpairs with eigenvalue <= relative_tolerance * lambda_max
/// are dropped; U = B V Lambda^{-1/2}, reorthonormalized by modified Gram-Schmidt.
template <typename PsiDerived, typename RhoDerived>
DiscreteProjectionDPP<typename PsiDerived::Scalar> build_discrete_dpp(
    const Eigen::MatrixBase<PsiDerived>& psi, const Eigen::MatrixBase<RhoDerived>& rho,
    typename PsiDerived::Scalar relative_tolerance = kDefaultRelativeRankTolerance) {
  using Scalar = typename PsiDerived::Scalar;
  const Eigen::Index n_items = psi.rows();
  if (n_items == 0) throw std::invalid_argument("build_discrete_dpp: empty feature matrix");
  if (rho.size() != n_items) throw std::invalid_argument("build_discrete_dpp: density size mismatch");
  if ((rho.array() <= Scalar(0)).any())
    throw std::domain_error("build_discrete_dpp: densities must be positive");

  const VectorX<Scalar> row_scale =
      rho.derived().template cast<Scalar>().array().rsqrt() / std::sqrt(Scalar(n_items));
  const MatrixX<Scalar> b = row_scale.asDiagonal() * psi.derived();
  const MatrixX<Scalar> gram = b.transpose() * b;

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("build_discrete_dpp: eigensolver failed");
  const VectorX<Scalar>& values = eig.eigenvalues();  // increasing
  const Scalar lambda_max = values.size() ? values.maxCoeff() : Scalar(0);
  const Scalar tol = relative_tolerance * lambda_max;

  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = values.size() - 1; k >= 0; --k)
    if (values[k] > tol) kept.push_back(k);
  const auto m = static_cast<Eigen::Index>(kept.size());
  if (m == 0) throw std::runtime_error("build_discrete_dpp: rank zero");

  MatrixX<Scalar> vecs(gram.rows(), m);
  VectorX<Scalar> lambdas(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    vecs.col(c) = eig.eigenvectors().col(kept[c]);
    lambdas[c] = values[kept[c]];
  }
  canonicalize_signs(vecs);

  MatrixX<Scalar> u = b * vecs * lambdas.array().rsqrt().matrix().asDiagonal();
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index p = 0; p < c; ++p) u.col(c) -= u.col(p).dot(u.col(c)) * u.col(p);
    u.col(c).normalize();
  }
  canonicalize_signs(u);
  return DiscreteProjectionDPP<Scalar>(std::move(u), std::move(lambdas), tol);
}

/// Exact sampler: m rounds of "draw i with probability D_i / sum D, remove the
/// direction of row i from the row space". D is the residual diagonal. Returns
/// sorted indices. Throws if D dips below -1e-9; smaller negatives are clamped.
template <typename Scalar>
std::vector<Eigen::Index> sample_discrete(const DiscreteProjectionDPP<Scalar>& dpp, Rng& rng) {
  const Eigen::Index n_items = dpp.size();
  const Eigen::Index m = dpp.rank();
  const MatrixX<Scalar>& u = dpp.basis();

  VectorX<Scalar> residual = dpp.inclusion_probabilities();
  MatrixX<Scalar> directions(m, m);
  std::vector<Eigen::Index> chosen;
  chosen.reserve(m);

  for (Eigen::Index step = 0; step < m; ++step) {
    for (Eigen::Index i = 0; i < n_items; ++i) {
      if (residual[i] < Scalar(0)) {
        if (residual[i] < Scalar(-1e-9))
          throw std::runtime_error("sample_discrete: negative residual diagonal");
        residual[i] = Scalar(0);
      }
    }
    for (auto c : chosen) residual[c] = Scalar(0);
    const Scalar total = residual.sum();
    if (!(total > Scalar(0))) throw std::runtime_error("sample_discrete: residual mass vanished");

    const Scalar target = static_cast<Scalar>(uniform01(rng)) * total;
    Scalar acc = 0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n_items; ++i) {
      if (residual[i] <= Scalar(0)) continue;
      acc += residual[i];
      pick = i;
      if (acc > target) break;
    }
    chosen.push_back(pick);

    const auto basis = directions.leftCols(step);
    VectorX<Scalar> e = u.row(pick).transpose();
    e -= basis * (basis.transpose() * e);
    e -= basis * (basis.transpose() * e);
    e.normalize();
    directions.col(step) = e;
    residual -= (u * e).cwiseAbs2();
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

template <typename Scalar>
Scalar inclusion_probability(const DiscreteProjectionDPP<Scalar>& dpp, Eigen::Index i) {
  return dpp.inclusion_probability(i);
}

/// Inputs of the variance-transfer error terms.
struct TransferBoundInputs {
  double n = 0;
  double big_n = 0;
  double delta = 0.05;
  double delta_prime = 0.05;
  double k_max = 0;
  double epsilon = 0;  ///< relative density error (KDE route)
  double beta = 0;
};

struct ErrorFunctionals {
  double error = 0;        ///< 4 sqrt(2 log(2/d')/N) + 4/(9N^2) log^2((n^2+1)/d) + 4/N log((n^2+1)/d)
  double tilde_error = 0;  ///< same with the last two coefficients 4 replaced by n+4
};

ErrorFunctionals error_functional(const TransferBoundInputs& in);

/// Interval the exact discrete variance must fall in, given the continuous
/// variance. Exact-density route uses coefficients (lower_scale, upper_scale)
/// and err = 4 |f|^2 K_max^2 E on both sides.
struct VarianceInterval {
  double lower = 0;
  double upper = 0;
  bool contains(double v) const { return v >= lower && v <= upper; }
};

VarianceInterval transfer_interval_exact(double continuous_variance, double sup_f,
                                         const TransferBoundInputs& in,
                                         double lower_scale, double upper_scale);

/// KDE route with relative density error epsilon = in.epsilon:
///   upper 2(1+e)^2 V + 32|f|^2 K^2 E + 8|f|^2 e^2 n
///   lower (N-1)/(2N) (1-e)^2 V - 16|f|^2 K^2 E - 4|f|^2 e^2 n
VarianceInterval transfer_interval_estimated(double continuous_variance, double sup_f,
                                             const TransferBoundInputs& in);

}  // namespace dppss
