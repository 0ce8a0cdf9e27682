#pragma once

#include "steklov/geometry.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

template <int Dim>
struct BoundingBox {
  Vec<Dim> lo, hi;
};

template <int Dim, typename VertexRange>
BoundingBox<Dim> bounding_box(const VertexRange& vertices) {
  BoundingBox<Dim> bb;
  bb.lo = Vec<Dim>::Constant(std::numeric_limits<double>::infinity());
  bb.hi = -bb.lo;
  for (const auto& v : vertices) {
    bb.lo = bb.lo.cwiseMin(v);
    bb.hi = bb.hi.cwiseMax(v);
  }
  return bb;
}

/// Scalar coefficient field with a declared lower bound. The bound is part
/// of the data because the correction formula needs a known alpha_0; it is
/// re-checked against evaluator values at every assembly quadrature point.
template <int Dim>
struct CoefficientField {
  std::function<double(const Vec<Dim>&)> evaluator;
  double lower_bound = 0.0;
  std::string descriptor;

  double operator()(const Vec<Dim>& x) const { return evaluator(x); }
};

namespace detail {

inline std::vector<double> parse_csv_floats(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size()) throw std::invalid_argument("bad float: " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty parameter list");
  return out;
}

}  // namespace detail

/// Coefficient mini-language:
///   const:c               constant c
///   affine:a,b1,..,bDim   a + b . x
///   sinbump:a,b           a + b * prod_i sin(pi x_i)
/// The conservative automatic lower bound (const: c; affine: min over the
/// bounding-box corners; sinbump: a - |b|) is used unless `user_bound` is
/// given. A user bound is trusted as declared and verified at assembly.
template <int Dim>
CoefficientField<Dim> make_coefficient(const std::string& descriptor,
                                       const BoundingBox<Dim>& bbox,
                                       std::optional<double> user_bound = std::nullopt) {
  auto colon = descriptor.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("coefficient descriptor needs name:params, got " +
                                descriptor);
  const std::string name = descriptor.substr(0, colon);
  const auto params = detail::parse_csv_floats(descriptor.substr(colon + 1));

  CoefficientField<Dim> field;
  field.descriptor = descriptor;
  double auto_bound = 0.0;

  if (name == "const") {
    if (params.size() != 1) throw std::invalid_argument("const takes 1 parameter");
    const double c = params[0];
    field.evaluator = [c](const Vec<Dim>&) { return c; };
    auto_bound = c;
  } else if (name == "affine") {
    if (params.size() != std::size_t(Dim) + 1)
      throw std::invalid_argument("affine takes 1+dim parameters");
    const double a = params[0];
    Vec<Dim> b;
    for (int d = 0; d < Dim; ++d) b[d] = params[d + 1];
    field.evaluator = [a, b](const Vec<Dim>& x) { return a + b.dot(x); };
    auto_bound = std::numeric_limits<double>::infinity();
    for (int corner = 0; corner < (1 << Dim); ++corner) {
      Vec<Dim> x;
      for (int d = 0; d < Dim; ++d)
        x[d] = (corner >> d) & 1 ? bbox.hi[d] : bbox.lo[d];
      auto_bound = std::min(auto_bound, a + b.dot(x));
    }
  } else if (name == "sinbump") {
    if (params.size() != 2) throw std::invalid_argument("sinbump takes 2 parameters");
    const double a = params[0], b = params[1];
    field.evaluator = [a, b](const Vec<Dim>& x) {
      double p = 1.0;
      for (int d = 0; d < Dim; ++d) p *= std::sin(M_PI * x[d]);
      return a + b * p;
    };
    auto_bound = a - std::abs(b);
  } else {
    throw std::invalid_argument("unknown coefficient kind: " + name);
  }

  field.lower_bound = user_bound.value_or(auto_bound);
  return field;
}

}  // namespace steklov
