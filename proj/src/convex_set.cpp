#include "altmin/convex_set.hpp"

#include <Eigen/Dense>

#include "altmin/errors.hpp"

namespace altmin {

struct ConvexSet::AffineData {
  Eigen::MatrixXd G;
  Eigen::VectorXd d;
  // Least-squares solve of G G^T y = r via LDLT (G need not have full rank
  // as long as Gz = d is consistent).
  Eigen::LDLT<Eigen::MatrixXd> gram;
};

ConvexSet ConvexSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size())
    throw ConfigError("ConvexSet::box: bound dimensions differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i])) throw ConfigError("ConvexSet::box: lower > upper");
  ConvexSet s;
  s.kind_ = Kind::kBox;
  s.dim_ = lower.size();
  s.lo_ = std::move(lower);
  s.hi_ = std::move(upper);
  return s;
}

ConvexSet ConvexSet::unbounded(Eigen::Index dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return box(Eigen::VectorXd::Constant(dim, -inf), Eigen::VectorXd::Constant(dim, inf));
}

ConvexSet ConvexSet::affine(Eigen::MatrixXd G, Eigen::VectorXd d) {
  if (G.rows() != d.size()) throw ConfigError("ConvexSet::affine: G rows != d size");
  auto data = std::make_shared<AffineData>();
  data->G = std::move(G);
  data->d = std::move(d);
  data->gram.compute(data->G * data->G.transpose());
  ConvexSet s;
  s.kind_ = Kind::kAffine;
  s.dim_ = data->G.cols();
  s.affine_ = std::move(data);
  return s;
}

ConvexSet ConvexSet::custom(Eigen::Index dim,
                            std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project) {
  if (!project) throw ConfigError("ConvexSet::custom: missing projection oracle");
  ConvexSet s;
  s.kind_ = Kind::kCustom;
  s.dim_ = dim;
  s.project_ = std::move(project);
  return s;
}

Eigen::VectorXd ConvexSet::project(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw ConfigError("ConvexSet::project: dimension mismatch");
  switch (kind_) {
    case Kind::kBox:
      return v.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::kAffine: {
      Eigen::VectorXd y = affine_->gram.solve(affine_->G * v - affine_->d);
      return v - affine_->G.transpose() * y;
    }
    case Kind::kCustom:
      return project_(v);
  }
  return v;
}

bool ConvexSet::contains(const Eigen::VectorXd& v, double tol) const {
  switch (kind_) {
    case Kind::kBox:
      for (Eigen::Index i = 0; i < dim_; ++i)
        if (v[i] < lo_[i] - tol || v[i] > hi_[i] + tol) return false;
      return true;
    case Kind::kAffine:
      return (affine_->G * v - affine_->d).lpNorm<Eigen::Infinity>() <= tol;
    case Kind::kCustom:
      return (project_(v) - v).lpNorm<Eigen::Infinity>() <= tol;
  }
  return false;
}

bool ConvexSet::is_unbounded_box() const {
  if (kind_ != Kind::kBox) return false;
  return !lo_.array().isFinite().any() && !hi_.array().isFinite().any();
}

const Eigen::VectorXd& ConvexSet::lower() const {
  if (kind_ != Kind::kBox) throw OracleError("ConvexSet: not a box");
  return lo_;
}

const Eigen::VectorXd& ConvexSet::upper() const {
  if (kind_ != Kind::kBox) throw OracleError("ConvexSet: not a box");
  return hi_;
}

ConvexSet ConvexSet::box_product(const ConvexSet& a, const ConvexSet& b) {
  Eigen::VectorXd lo(a.dim() + b.dim()), hi(a.dim() + b.dim());
  lo << a.lower(), b.lower();
  hi << a.upper(), b.upper();
  return box(std::move(lo), std::move(hi));
}

}  // namespace altmin
