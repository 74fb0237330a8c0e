#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>

#include "altmin/convex_set.hpp"
#include "altmin/quadratic.hpp"
#include "altmin/rng.hpp"

namespace altmin {

/// Convex objective with an evaluation and an exact prox oracle.
///
/// prox(v, tau) = argmin_w  tau*g(w) + 1/2 ||w - v||^2
class ProxFn {
 public:
  enum class Kind { kZero, kIndicator, kQuadratic, kL1, kCustom };

  /// Zero objective of undetermined dimension.
  ProxFn() = default;

  static ProxFn zero(Eigen::Index dim);
  static ProxFn indicator(ConvexSet set);
  static ProxFn quadratic(QuadraticFn q);
  static ProxFn l1(Eigen::Index dim, double weight = 1.0);
  static ProxFn custom(Eigen::Index dim,
                       std::function<double(const Eigen::VectorXd&)> value,
                       std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox);

  /// May return +inf (indicator outside its set). Indicator membership uses
  /// a 1e-9 tolerance.
  double value(const Eigen::VectorXd& w) const;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double tau) const;

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool is_zero() const { return kind_ == Kind::kZero; }
  bool is_indicator() const { return kind_ == Kind::kIndicator; }
  const ConvexSet& set() const;
  const QuadraticFn& quad() const;

  /// Conjugate g*(w) where a closed form exists (zero, box/affine
  /// indicator, l1, quadratic). Returns nullopt when w is outside dom g*
  /// (the corresponding dual value is -inf) and throws OracleError for
  /// custom objectives.
  std::optional<double> conjugate(const Eigen::VectorXd& w, double null_tol = 1e-8) const;

 private:
  Kind kind_ = Kind::kZero;
  Eigen::Index dim_ = 0;
  double weight_ = 1.0;
  std::shared_ptr<const ConvexSet> set_;
  std::shared_ptr<const QuadraticFn> quad_;
  std::function<double(const Eigen::VectorXd&)> value_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox_;
};

/// Exact proximity operator of g at v with parameter tau.
Eigen::VectorXd prox(const ProxFn& g, const Eigen::VectorXd& v, double tau);

struct InexactProxResult {
  Eigen::VectorXd point;
  double epsilon = 0.0;  // achieved objective-gap bound, re-measured
};

/// Inexact prox: solves exactly, perturbs by a random direction sized so the
/// prox-objective gap stays below epsilon, re-projecting (and re-measuring)
/// when g is an indicator and feasibility is required.
InexactProxResult prox_inexact(const ProxFn& g, const Eigen::VectorXd& v, double tau,
                               double epsilon, bool feasible_only, Rng& rng);

}  // namespace altmin
