#pragma once

#include <cmath>
#include <string>

#include "altmin/errors.hpp"

namespace altmin {

/// Parametric family of error magnitudes ||delta^k||, ||theta^k||, ||e^k||
/// or eps^k, indexed by the outer iteration k >= 1. All families are
/// non-increasing in k.
class ErrorSchedule {
 public:
  enum class Family { kZero, kConstant, kPower, kGeometric };

  static ErrorSchedule zero() { return {Family::kZero, 0.0, 0.0, 0.0}; }
  static ErrorSchedule constant(double c) {
    check_c(c);
    return {Family::kConstant, c, 0.0, 0.0};
  }
  /// c / k^p
  static ErrorSchedule power(double c, double p) {
    check_c(c);
    if (p < 0) throw ConfigError("ErrorSchedule: power exponent must be >= 0");
    return {Family::kPower, c, p, 0.0};
  }
  /// c * r^k
  static ErrorSchedule geometric(double c, double r) {
    check_c(c);
    if (r < 0 || r >= 1) throw ConfigError("ErrorSchedule: ratio must be in [0,1)");
    return {Family::kGeometric, c, 0.0, r};
  }

  double operator()(int k) const {
    if (k < 1) throw ConfigError("ErrorSchedule: k must be >= 1");
    switch (family_) {
      case Family::kZero: return 0.0;
      case Family::kConstant: return c_;
      case Family::kPower: return c_ / std::pow(static_cast<double>(k), p_);
      case Family::kGeometric: return c_ * std::pow(r_, k);
    }
    return 0.0;
  }

  bool is_zero() const { return family_ == Family::kZero || c_ == 0.0; }
  Family family() const { return family_; }
  double c() const { return c_; }
  double p() const { return p_; }
  double r() const { return r_; }

  std::string str() const {
    switch (family_) {
      case Family::kZero: return "zero";
      case Family::kConstant: return "const:" + std::to_string(c_);
      case Family::kPower: return "power:" + std::to_string(c_) + ":" + std::to_string(p_);
      case Family::kGeometric: return "geom:" + std::to_string(c_) + ":" + std::to_string(r_);
    }
    return "?";
  }

 private:
  ErrorSchedule(Family f, double c, double p, double r) : family_(f), c_(c), p_(p), r_(r) {}
  static void check_c(double c) {
    if (c < 0) throw ConfigError("ErrorSchedule: magnitude must be >= 0");
  }
  Family family_;
  double c_, p_, r_;
};

/// Prescribed decrease function alpha^k for the local-solve certificates.
/// alpha^0 is the base-case value; power uses alpha0/k^p for k >= 1.
class DecreaseFunction {
 public:
  enum class Rate { kPower, kGeometric };

  static DecreaseFunction power(double alpha0, double p) {
    check_alpha0(alpha0);
    if (p < 0) throw ConfigError("DecreaseFunction: exponent must be >= 0");
    return {Rate::kPower, alpha0, p, 0.0};
  }
  static DecreaseFunction geometric(double alpha0, double r) {
    check_alpha0(alpha0);
    if (r <= 0 || r >= 1) throw ConfigError("DecreaseFunction: ratio must be in (0,1)");
    return {Rate::kGeometric, alpha0, 0.0, r};
  }

  double value(int k) const {
    if (k < 0) throw ConfigError("DecreaseFunction: k must be >= 0");
    if (k == 0) return alpha0_;
    return rate_ == Rate::kPower ? alpha0_ / std::pow(static_cast<double>(k), p_)
                                 : alpha0_ * std::pow(r_, k);
  }

  DecreaseFunction with_alpha0(double alpha0) const {
    DecreaseFunction d = *this;
    check_alpha0(alpha0);
    d.alpha0_ = alpha0;
    return d;
  }

  double alpha0() const { return alpha0_; }
  Rate rate() const { return rate_; }
  double p() const { return p_; }
  double r() const { return r_; }

 private:
  DecreaseFunction(Rate rate, double alpha0, double p, double r)
      : rate_(rate), alpha0_(alpha0), p_(p), r_(r) {}
  static void check_alpha0(double a) {
    if (!(a > 0)) throw ConfigError("DecreaseFunction: alpha0 must be > 0");
  }
  Rate rate_;
  double alpha0_, p_, r_;
};

}  // namespace altmin
