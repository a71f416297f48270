#include "roughheat/vector_field.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "roughheat/error.hpp"

namespace roughheat {
namespace {

std::vector<double> parse_params(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParameterError("bad vector-field parameter '" + item + "'");
    }
    if (used != item.size()) throw ParameterError("bad vector-field parameter '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Derivatives of tanh u in terms of t = tanh u.
double tanh_derivative(int r, double t) {
  const double s = 1.0 - t * t;
  switch (r) {
    case 0: return t;
    case 1: return s;
    case 2: return -2.0 * t * s;
    default: return -2.0 * s * (1.0 - 3.0 * t * t);
  }
}

}  // namespace

ScalarField ScalarField::parse(const std::string& name) {
  ScalarField f;
  f.name_ = name;
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::vector<double> p =
      colon == std::string::npos ? std::vector<double>{} : parse_params(name.substr(colon + 1));
  auto want = [&](std::size_t n, double dflt) {
    if (p.empty()) return dflt;
    if (p.size() != n) throw ParameterError("wrong parameter count for vector field '" + name + "'");
    return p[0];
  };
  const double inf = std::numeric_limits<double>::infinity();
  if (head == "zero") {
    f.kind_ = Kind::zero;
  } else if (head == "sin") {
    f.kind_ = Kind::sine;
    f.beta_ = want(1, 1.0);
    const double b = std::abs(f.beta_);
    f.bounds_ = {1.0, b, b * b, b * b * b};
  } else if (head == "tanh") {
    f.kind_ = Kind::tanh;
    f.beta_ = want(1, 1.0);
    const double b = std::abs(f.beta_);
    f.bounds_ = {1.0, b, b * b * 4.0 / (3.0 * std::sqrt(3.0)), 2.0 * b * b * b};
  } else if (head == "cauchy") {
    if (!p.empty()) throw ParameterError("cauchy takes no parameters");
    f.kind_ = Kind::cauchy;
    // sup |f'''| = 4.6686 (numerically), rounded up
    f.bounds_ = {1.0, 3.0 * std::sqrt(3.0) / 8.0, 2.0, 4.7};
  } else if (head == "affine_tanh") {
    if (p.size() != 3) throw ParameterError("affine_tanh needs a,b,beta");
    f.kind_ = Kind::affine_tanh;
    f.a_ = p[0];
    f.b_ = p[1];
    f.beta_ = p[2];
    const double b = std::abs(f.b_), be = std::abs(f.beta_);
    f.bounds_ = {std::abs(f.a_) + b, b * be, b * be * be * 4.0 / (3.0 * std::sqrt(3.0)),
                 2.0 * b * be * be * be};
  } else if (head == "linear") {
    f.kind_ = Kind::linear;
    f.beta_ = want(1, 1.0);
    f.bounds_ = {inf, std::abs(f.beta_), 0.0, 0.0};
  } else {
    throw ParameterError("unknown vector field '" + name + "'");
  }
  return f;
}

double ScalarField::eval(int r, double v) const {
  if (r < 0 || r > 3) throw ParameterError("derivative order must lie in 0..3");
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::sine: {
      const double bp = std::pow(beta_, r);
      const double u = beta_ * v;
      switch (r) {
        case 0: return std::sin(u);
        case 1: return bp * std::cos(u);
        case 2: return -bp * std::sin(u);
        default: return -bp * std::cos(u);
      }
    }
    case Kind::tanh:
      return std::pow(beta_, r) * tanh_derivative(r, std::tanh(beta_ * v));
    case Kind::affine_tanh: {
      const double core = b_ * std::pow(beta_, r) * tanh_derivative(r, std::tanh(beta_ * v));
      return r == 0 ? a_ + core : core;
    }
    case Kind::cauchy: {
      const double q = 1.0 / (1.0 + v * v);
      switch (r) {
        case 0: return q;
        case 1: return -2.0 * v * q * q;
        case 2: return (6.0 * v * v - 2.0) * q * q * q;
        default: return 24.0 * v * (1.0 - v * v) * q * q * q * q;
      }
    }
    case Kind::linear:
      return r == 0 ? beta_ * v : (r == 1 ? beta_ : 0.0);
  }
  return 0.0;
}

bool ScalarField::bounded() const noexcept {
  for (double b : bounds_) {
    if (!std::isfinite(b)) return false;
  }
  return true;
}

VectorField::VectorField(std::vector<ScalarField> components) : f_(std::move(components)) {
  if (f_.empty()) throw ParameterError("vector field needs at least one component");
}

VectorField VectorField::parse(const std::string& spec, int channels) {
  if (channels < 1) throw ParameterError("channel count must be >= 1");
  std::vector<ScalarField> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) parts.push_back(ScalarField::parse(item));
  if (parts.size() == 1) parts.assign(static_cast<std::size_t>(channels), parts.front());
  if (static_cast<int>(parts.size()) != channels) {
    throw ShapeError("vector field has " + std::to_string(parts.size()) + " components for " +
                     std::to_string(channels) + " channels");
  }
  return VectorField(std::move(parts));
}

bool VectorField::is_zero() const noexcept {
  for (const auto& f : f_) {
    if (!f.is_zero()) return false;
  }
  return true;
}

bool VectorField::bounded() const noexcept {
  for (const auto& f : f_) {
    if (!f.bounded()) return false;
  }
  return true;
}

std::string VectorField::descriptor() const {
  std::string out;
  for (std::size_t i = 0; i < f_.size(); ++i) {
    if (i) out += ';';
    out += f_[i].name();
  }
  return out;
}

}  // namespace roughheat
