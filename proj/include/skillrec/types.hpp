#pragma once

#include <Eigen/Dense>

#include "skillrec/error.hpp"

namespace skillrec {

template <typename Scalar, int Rows>
using Vector = Eigen::Matrix<Scalar, Rows, 1>;

template <typename Scalar>
using Vector4 = Vector<Scalar, 4>;

template <typename Scalar>
using VectorX = Vector<Scalar, Eigen::Dynamic>;

/// Per-video recommendation vector, fixed order:
/// popularity, fit probability, normalized length, text similarity.
using FeatureVectorX = Vector4<double>;

/// Per-user weights aligned with FeatureVectorX.
using PreferenceMatrixP = Vector4<double>;

namespace feature {
inline constexpr int kPopularity = 0;
inline constexpr int kFitProbability = 1;
inline constexpr int kNormLength = 2;
inline constexpr int kTextSimilarity = 3;
}  // namespace feature

inline PreferenceMatrixP uniform_preferences() {
  return PreferenceMatrixP::Constant(0.25);
}

/// Cosine similarity; 0 when either operand has zero norm.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine_similarity: dimension mismatch");
  }
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  Scalar c = a.dot(b) / (na * nb);
  // rounding can push |c| past 1 by an ulp
  if (c > Scalar(1)) c = Scalar(1);
  if (c < Scalar(-1)) c = Scalar(-1);
  return c;
}

/// Maps v into [0,1] given the range [lo, hi]; degenerate range maps to 0.5.
template <typename Scalar>
Scalar minmax_scale(Scalar v, Scalar lo, Scalar hi) {
  if (hi == lo) return Scalar(0.5);
  return (v - lo) / (hi - lo);
}

}  // namespace skillrec
