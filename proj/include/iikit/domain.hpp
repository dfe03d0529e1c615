#pragma once

#include <cmath>
#include <string>

namespace iikit {

/// Integration domain K: a finite interval [a, b], the half line [0, inf)
/// or the whole real line.
class Domain {
 public:
  enum class Kind { finite, half_line, real_line };

  static Domain finite(double a, double b);
  static Domain half_line() { return Domain(Kind::half_line, 0.0, INFINITY); }
  static Domain real_line() { return Domain(Kind::real_line, -INFINITY, INFINITY); }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::finite; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }

  /// Closed-set membership (endpoints included for finite domains).
  bool contains(double t) const noexcept;

  std::string describe() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

}  // namespace iikit
