#pragma once
// Scalar nonlinearities f_i with three bounded derivatives, from a fixed
// registry so that the smoothness hypothesis can be checked.
//
// Names: "zero", "sin:beta", "tanh:beta", "cauchy" (1/(1+v^2)),
// "affine_tanh:a,b,beta" (a + b tanh(beta v)), "linear:beta" (beta v, only
// bounded on compacts; used for scalar oracles).

#include <array>
#include <string>
#include <vector>

namespace roughheat {

class ScalarField {
 public:
  static ScalarField parse(const std::string& name);

  const std::string& name() const noexcept { return name_; }
  /// r-th derivative, r = 0..3.
  double eval(int r, double v) const;
  double value(double v) const { return eval(0, v); }
  double derivative(double v) const { return eval(1, v); }
  /// Declared sup |f^(r)|; infinite for unbounded fields.
  double bound(int r) const { return bounds_.at(static_cast<std::size_t>(r)); }
  bool bounded() const noexcept;
  bool is_zero() const noexcept { return kind_ == Kind::zero; }

 private:
  enum class Kind { zero, sine, tanh, cauchy, affine_tanh, linear };
  Kind kind_ = Kind::zero;
  double a_ = 0.0, b_ = 0.0, beta_ = 1.0;
  std::string name_ = "zero";
  std::array<double, 4> bounds_{0.0, 0.0, 0.0, 0.0};
};

/// m scalar fields, one per driver channel.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<ScalarField> components);
  /// Names separated by ';', or a single name broadcast to all channels.
  static VectorField parse(const std::string& spec, int channels);

  int channels() const noexcept { return static_cast<int>(f_.size()); }
  const ScalarField& operator[](int i) const { return f_.at(static_cast<std::size_t>(i)); }
  bool is_zero() const noexcept;
  bool bounded() const noexcept;
  std::string descriptor() const;

 private:
  std::vector<ScalarField> f_;
};

}  // namespace roughheat
