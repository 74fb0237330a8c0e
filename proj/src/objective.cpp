#include "altmin/objective.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "altmin/errors.hpp"

namespace altmin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ProxFn ProxFn::zero(Eigen::Index dim) {
  ProxFn g;
  g.kind_ = Kind::kZero;
  g.dim_ = dim;
  return g;
}

ProxFn ProxFn::indicator(ConvexSet set) {
  ProxFn g;
  g.kind_ = Kind::kIndicator;
  g.dim_ = set.dim();
  g.set_ = std::make_shared<ConvexSet>(std::move(set));
  return g;
}

ProxFn ProxFn::quadratic(QuadraticFn q) {
  ProxFn g;
  g.kind_ = Kind::kQuadratic;
  g.dim_ = q.dim();
  g.quad_ = std::make_shared<QuadraticFn>(std::move(q));
  return g;
}

ProxFn ProxFn::l1(Eigen::Index dim, double weight) {
  if (weight <= 0) throw ConfigError("ProxFn::l1: weight must be > 0");
  ProxFn g;
  g.kind_ = Kind::kL1;
  g.dim_ = dim;
  g.weight_ = weight;
  return g;
}

ProxFn ProxFn::custom(Eigen::Index dim,
                      std::function<double(const Eigen::VectorXd&)> value,
                      std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox) {
  if (!value || !prox) throw OracleError("ProxFn::custom: missing oracle");
  ProxFn g;
  g.kind_ = Kind::kCustom;
  g.dim_ = dim;
  g.value_ = std::move(value);
  g.prox_ = std::move(prox);
  return g;
}

double ProxFn::value(const Eigen::VectorXd& w) const {
  switch (kind_) {
    case Kind::kZero: return 0.0;
    case Kind::kIndicator: return set_->contains(w) ? 0.0 : kInf;
    case Kind::kQuadratic: return quad_->value(w);
    case Kind::kL1: return weight_ * w.lpNorm<1>();
    case Kind::kCustom: return value_(w);
  }
  return 0.0;
}

Eigen::VectorXd ProxFn::prox(const Eigen::VectorXd& v, double tau) const {
  if (tau <= 0) throw ConfigError("prox: tau must be > 0");
  switch (kind_) {
    case Kind::kZero:
      return v;
    case Kind::kIndicator:
      return set_->project(v);
    case Kind::kQuadratic: {
      // (I + tau H) w = v - tau h
      const Eigen::Index n = v.size();
      Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + tau * quad_->H();
      return Eigen::LLT<Eigen::MatrixXd>(M).solve(v - tau * quad_->h());
    }
    case Kind::kL1: {
      const double t = tau * weight_;
      Eigen::VectorXd w(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i)
        w[i] = v[i] > t ? v[i] - t : (v[i] < -t ? v[i] + t : 0.0);
      return w;
    }
    case Kind::kCustom:
      return prox_(v, tau);
  }
  return v;
}

const ConvexSet& ProxFn::set() const {
  if (!set_) throw OracleError("ProxFn: no constraint set");
  return *set_;
}

const QuadraticFn& ProxFn::quad() const {
  if (!quad_) throw OracleError("ProxFn: not a quadratic objective");
  return *quad_;
}

std::optional<double> ProxFn::conjugate(const Eigen::VectorXd& w, double null_tol) const {
  switch (kind_) {
    case Kind::kZero:
      // support function of {0}: 0 at w = 0, +inf otherwise
      if (w.lpNorm<Eigen::Infinity>() <= null_tol) return 0.0;
      return std::nullopt;
    case Kind::kIndicator: {
      const ConvexSet& s = *set_;
      if (s.is_box()) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
          const double bound = w[i] >= 0 ? s.upper()[i] : s.lower()[i];
          if (std::isfinite(bound)) {
            acc += w[i] * bound;
          } else if (std::abs(w[i]) > null_tol) {
            return std::nullopt;  // unbounded coordinate
          }
        }
        return acc;
      }
      if (s.kind() == ConvexSet::Kind::kAffine) {
        // sup over {Gz = d}: finite iff w is orthogonal to the nullspace of
        // G, in which case the value is <w, z0> for any feasible z0.
        Eigen::VectorXd z0 = s.project(Eigen::VectorXd::Zero(s.dim()));
        Eigen::VectorXd null_part = s.project(z0 + w) - z0;
        if (null_part.lpNorm<Eigen::Infinity>() > null_tol * (1 + w.lpNorm<Eigen::Infinity>()))
          return std::nullopt;  // unbounded along the subspace
        return w.dot(z0);
      }
      throw OracleError("ProxFn::conjugate: unsupported indicator set");
    }
    case Kind::kQuadratic: {
      // g*(w) = 1/2 (w - h)' H^{-1} (w - h)
      Eigen::VectorXd d = quad_->solve(w - quad_->h());
      return 0.5 * d.dot(w - quad_->h());
    }
    case Kind::kL1:
      if (w.lpNorm<Eigen::Infinity>() <= weight_ + null_tol) return 0.0;
      return std::nullopt;
    case Kind::kCustom:
      throw OracleError("ProxFn::conjugate: no closed form for custom objective");
  }
  return std::nullopt;
}

Eigen::VectorXd prox(const ProxFn& g, const Eigen::VectorXd& v, double tau) {
  return g.prox(v, tau);
}

InexactProxResult prox_inexact(const ProxFn& g, const Eigen::VectorXd& v, double tau,
                               double epsilon, bool feasible_only, Rng& rng) {
  if (epsilon < 0) throw ConfigError("prox_inexact: epsilon must be >= 0");
  Eigen::VectorXd exact = g.prox(v, tau);
  if (epsilon == 0.0) return {exact, 0.0};

  const double base = tau * g.value(exact) + 0.5 * (exact - v).squaredNorm();
  const bool reproject = g.is_indicator() && feasible_only;
  Eigen::VectorXd dir = rng.unit_direction(v.size());

  auto candidate = [&](double s) {
    Eigen::VectorXd w = exact + s * dir;
    if (reproject) w = g.set().project(w);
    return w;
  };
  auto gap = [&](const Eigen::VectorXd& w) {
    const double val = tau * g.value(w) + 0.5 * (w - v).squaredNorm() - base;
    return val;
  };

  // 1/2 s^2 alone already gives the gap for smooth-free directions, so
  // sqrt(2 eps) is the natural starting scale; shrink until within budget.
  double s = std::sqrt(2.0 * epsilon);
  Eigen::VectorXd w = candidate(s);
  double achieved = gap(w);
  for (int it = 0; it < 200 && !(achieved <= epsilon && std::isfinite(achieved)); ++it) {
    s *= 0.8;
    w = candidate(s);
    achieved = gap(w);
  }
  if (!(achieved <= epsilon) || !std::isfinite(achieved)) return {exact, 0.0};
  return {w, std::max(achieved, 0.0)};
}

}  // namespace altmin
