#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <memory>

namespace altmin {

/// Closed convex set with an exact Euclidean projection oracle.
///
/// Supported kinds: coordinate boxes (possibly with infinite bounds),
/// affine subspaces {z : Gz = d}, and user-supplied projection oracles.
class ConvexSet {
 public:
  enum class Kind { kBox, kAffine, kCustom };

  static ConvexSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  /// Whole space, represented as an infinite box.
  static ConvexSet unbounded(Eigen::Index dim);
  static ConvexSet affine(Eigen::MatrixXd G, Eigen::VectorXd d);
  static ConvexSet custom(Eigen::Index dim,
                          std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project);

  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const;

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }

  bool is_box() const { return kind_ == Kind::kBox; }
  /// True when every bound is infinite (projection is the identity).
  bool is_unbounded_box() const;
  const Eigen::VectorXd& lower() const;
  const Eigen::VectorXd& upper() const;

  /// Cartesian product of boxes; both operands must be boxes.
  static ConvexSet box_product(const ConvexSet& a, const ConvexSet& b);

 private:
  ConvexSet() = default;
  struct AffineData;

  Kind kind_ = Kind::kBox;
  Eigen::Index dim_ = 0;
  Eigen::VectorXd lo_, hi_;
  std::shared_ptr<const AffineData> affine_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project_;
};

}  // namespace altmin
