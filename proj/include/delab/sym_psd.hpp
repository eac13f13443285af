// Small symmetric positive-semidefinite matrices (d <= 8).
//
// Storage uses Eigen's bounded dynamic sizes, so nothing here allocates.
// The eigendecomposition is a cyclic Jacobi sweep with a fixed (p, q)
// order, which makes every derived quantity (square root, inverse, norms)
// bit-reproducible for a given input.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace delab {

inline constexpr int kMaxDim = 8;
inline constexpr double kTolPsd = 1e-10;
inline constexpr double kTolSymmetry = 1e-12;
inline constexpr double kTolInvertible = 1e-8;

template <typename Scalar>
using SmallMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
template <typename Scalar>
using SmallVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

using Mat = SmallMatrix<double>;
using Vec = SmallVector<double>;

struct NotSymmetric : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotPsd : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
/// Raised when lambda_min is too small to invert; callers react by shifting
/// the truncation index (c_n -> c_{max(n, n0)}).
struct NearSingular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct EigenPair {
  SmallVector<Scalar> values;   // ascending
  SmallMatrix<Scalar> vectors;  // column j pairs with values(j)

  Scalar lambda_min() const { return values(0); }
  Scalar lambda_max() const { return values(values.size() - 1); }
};

namespace detail {

template <typename Derived>
void check_square(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDim)
    throw DimensionMismatch("expected a square matrix with 1 <= d <= " + std::to_string(kMaxDim));
}

template <typename Derived>
void check_symmetric(const Eigen::MatrixBase<Derived>& m) {
  check_square(m);
  using Scalar = typename Derived::Scalar;
  const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > Scalar(kTolSymmetry) * scale)
        throw NotSymmetric("matrix is not symmetric");
}

}  // namespace detail

/// Eigenpairs of a symmetric matrix by cyclic Jacobi rotations. Sweeps stop
/// once the off-diagonal Frobenius mass drops below 1e-13 relative to the
/// matrix norm.
template <typename Derived>
EigenPair<typename Derived::Scalar> eigen(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  detail::check_symmetric(input);
  const Eigen::Index d = input.rows();

  SmallMatrix<Scalar> a = (input + input.transpose()) / Scalar(2);
  SmallMatrix<Scalar> v = SmallMatrix<Scalar>::Identity(d, d);
  const Scalar stop = Scalar(1e-13) * std::max<Scalar>(Scalar(1), a.norm());

  auto off = [&] {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off() >= stop; ++sweep) {
    for (Eigen::Index p = 0; p < d - 1; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < d; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < d; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = Scalar(0);
        for (Eigen::Index k = 0; k < d; ++k) {
          const Scalar vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // Selection sort keeps the order deterministic for repeated eigenvalues.
  EigenPair<Scalar> out;
  out.values = a.diagonal();
  out.vectors = v;
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index best = i;
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (out.values(j) < out.values(best)) best = j;
    if (best != i) {
      std::swap(out.values(i), out.values(best));
      out.vectors.col(i).swap(out.vectors.col(best));
    }
  }
  return out;
}

/// Symmetric matrix that is PSD up to kTolPsd. Construction symmetrizes the
/// input exactly, so entry(i,j) == entry(j,i) holds bitwise.
template <typename Scalar>
class SymPsd {
 public:
  SymPsd() = default;

  template <typename Derived>
  explicit SymPsd(const Eigen::MatrixBase<Derived>& m) {
    detail::check_symmetric(m);
    m_ = (m + m.transpose()) / Scalar(2);
    if (eigen(m_).lambda_min() < -Scalar(kTolPsd)) throw NotPsd("matrix is not positive semidefinite");
  }

  static SymPsd identity(int d) { return SymPsd(SmallMatrix<Scalar>::Identity(d, d)); }
  static SymPsd zero(int d) { return SymPsd(SmallMatrix<Scalar>::Zero(d, d)); }
  static SymPsd scaled_identity(int d, Scalar s) {
    return SymPsd(SmallMatrix<Scalar>(s * SmallMatrix<Scalar>::Identity(d, d)));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const SmallMatrix<Scalar>& matrix() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

 private:
  SmallMatrix<Scalar> m_;
};

using Psd = SymPsd<double>;

/// Unique PSD square root. Eigenvalues in [-kTolPsd, 0) are clamped to 0.
template <typename Scalar>
SymPsd<Scalar> psd_sqrt(const SymPsd<Scalar>& m) {
  const auto e = eigen(m.matrix());
  SmallVector<Scalar> root(e.values.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    if (e.values(i) < -Scalar(kTolPsd)) throw NotPsd("psd_sqrt: negative eigenvalue");
    root(i) = std::sqrt(std::max<Scalar>(e.values(i), Scalar(0)));
  }
  SmallMatrix<Scalar> r = e.vectors * root.asDiagonal() * e.vectors.transpose();
  return SymPsd<Scalar>(SmallMatrix<Scalar>((r + r.transpose()) / Scalar(2)));
}

/// sup_{|x| <= 1} |m x| for symmetric m, i.e. max |lambda_i|.
template <typename Derived>
typename Derived::Scalar op_norm(const Eigen::MatrixBase<Derived>& m) {
  const auto e = eigen(m);
  return std::max(std::abs(e.lambda_min()), std::abs(e.lambda_max()));
}

template <typename Scalar>
Scalar op_norm(const SymPsd<Scalar>& m) {
  return op_norm(m.matrix());
}

/// a <= b in the Loewner order: b - a has no eigenvalue below -kTolPsd.
template <typename Scalar>
bool loewner_leq(const SymPsd<Scalar>& a, const SymPsd<Scalar>& b, Scalar tol = Scalar(kTolPsd)) {
  if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dimension mismatch");
  const SmallMatrix<Scalar> diff = b.matrix() - a.matrix();
  return eigen(diff).lambda_min() >= -tol;
}

template <typename Scalar>
SymPsd<Scalar> inverse(const SymPsd<Scalar>& m) {
  const auto e = eigen(m.matrix());
  if (!(e.lambda_min() > Scalar(kTolInvertible)))
    throw NearSingular("inverse: smallest eigenvalue " + std::to_string(double(e.lambda_min())) +
                       " is below the invertibility threshold");
  SmallMatrix<Scalar> r = e.vectors * e.values.cwiseInverse().asDiagonal() * e.vectors.transpose();
  return SymPsd<Scalar>(SmallMatrix<Scalar>((r + r.transpose()) / Scalar(2)));
}

}  // namespace delab
