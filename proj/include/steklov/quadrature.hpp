#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace steklov {

/// Symmetric quadrature rule on the reference SDim-simplex. Points are
/// barycentric tuples; weights sum to 1 and are scaled by |kappa| or |e|
/// at the call site. Positive-weight rules only.
template <int SDim>
struct QuadratureRule {
  static constexpr int sdim = SDim;
  int exact_degree = 0;
  std::vector<std::array<double, SDim + 1>> points;
  std::vector<double> weights;

  int size() const { return int(weights.size()); }
};

namespace detail {

// Nudge the last weight so the sum is exactly 1 in floating point.
template <int SDim>
QuadratureRule<SDim> finish(QuadratureRule<SDim> r) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < r.weights.size(); ++i) s += r.weights[i];
  r.weights.back() = 1.0 - s;
  return r;
}

inline void orbit3_abb(QuadratureRule<2>& r, double a, double b, double w) {
  r.points.push_back({a, b, b});
  r.points.push_back({b, a, b});
  r.points.push_back({b, b, a});
  r.weights.insert(r.weights.end(), 3, w);
}

inline void orbit6_abc(QuadratureRule<2>& r, double a, double b, double c, double w) {
  const double p[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                          {b, c, a}, {c, a, b}, {c, b, a}};
  for (const auto& q : p) r.points.push_back({q[0], q[1], q[2]});
  r.weights.insert(r.weights.end(), 6, w);
}

inline void orbit4_abbb(QuadratureRule<3>& r, double a, double b, double w) {
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> p{b, b, b, b};
    p[i] = a;
    r.points.push_back(p);
  }
  r.weights.insert(r.weights.end(), 4, w);
}

inline void orbit6_aabb(QuadratureRule<3>& r, double a, double b, double w) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      std::array<double, 4> p{b, b, b, b};
      p[i] = a;
      p[j] = a;
      r.points.push_back(p);
    }
  r.weights.insert(r.weights.end(), 6, w);
}

// `a` is the repeated coordinate: all 12 permutations of (a,a,b,c).
inline void orbit12_aabc(QuadratureRule<3>& r, double a, double b, double c, double w) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      int rest[2], k = 0;
      for (int t = 0; t < 4; ++t)
        if (t != i && t != j) rest[k++] = t;
      for (int swap = 0; swap < 2; ++swap) {
        std::array<double, 4> p{a, a, a, a};
        p[rest[0]] = swap ? c : b;
        p[rest[1]] = swap ? b : c;
        r.points.push_back(p);
      }
    }
  r.weights.insert(r.weights.end(), 12, w);
}

inline QuadratureRule<1> segment_rule(int degree) {
  QuadratureRule<1> r;
  auto sym = [&r](double t, double w) {
    r.points.push_back({1.0 - t, t});
    r.weights.push_back(w);
    if (t != 0.5) {
      r.points.push_back({t, 1.0 - t});
      r.weights.push_back(w);
    }
  };
  if (degree <= 1) {
    r.exact_degree = 1;
    sym(0.5, 1.0);
  } else if (degree <= 3) {
    r.exact_degree = 3;
    sym(0.5 - 0.5 / std::sqrt(3.0), 0.5);
  } else if (degree <= 5) {
    r.exact_degree = 5;
    sym(0.5, 4.0 / 9.0);
    sym(0.5 - 0.5 * std::sqrt(3.0 / 5.0), 5.0 / 18.0);
  } else {
    r.exact_degree = 7;
    sym(0.5 - 0.5 * 0.33998104358485626, 0.65214515486254614 / 2.0);
    sym(0.5 - 0.5 * 0.86113631159405258, 0.34785484513745386 / 2.0);
  }
  return finish(r);
}

inline QuadratureRule<2> triangle_rule(int degree) {
  QuadratureRule<2> r;
  if (degree <= 1) {
    r.exact_degree = 1;
    r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    r.weights.push_back(1.0);
  } else if (degree <= 2) {
    r.exact_degree = 2;
    orbit3_abb(r, 2.0 / 3, 1.0 / 6, 1.0 / 3);
  } else if (degree <= 4) {
    // Dunavant 6-point, degree 4
    r.exact_degree = 4;
    orbit3_abb(r, 0.108103018168070, 0.445948490915965, 0.223381589678011);
    orbit3_abb(r, 0.816847572980459, 0.091576213509771, 0.109951743655322);
  } else if (degree <= 5) {
    r.exact_degree = 5;
    r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    r.weights.push_back(9.0 / 40.0);
    orbit3_abb(r, 0.059715871789770, 0.470142064105115, 0.132394152788506);
    orbit3_abb(r, 0.797426985353087, 0.101286507323456, 0.125939180544827);
  } else {
    // Dunavant 12-point, degree 6
    r.exact_degree = 6;
    orbit3_abb(r, 0.873821971016996, 0.063089014491502, 0.050844906370207);
    orbit3_abb(r, 0.501426509658179, 0.249286745170910, 0.116786275726379);
    orbit6_abc(r, 0.636502499121399, 0.310352451033785, 0.053145049844816,
               0.082851075618374);
  }
  return finish(r);
}

inline QuadratureRule<3> tet_rule(int degree) {
  QuadratureRule<3> r;
  if (degree <= 1) {
    r.exact_degree = 1;
    r.points.push_back({0.25, 0.25, 0.25, 0.25});
    r.weights.push_back(1.0);
  } else if (degree <= 2) {
    r.exact_degree = 2;
    orbit4_abbb(r, 0.585410196624969, 0.138196601125011, 0.25);
  } else if (degree <= 5) {
    // 14-point, degree 5
    r.exact_degree = 5;
    orbit4_abbb(r, 0.067342242210098, 0.310885919263301, 0.112687925718016);
    orbit4_abbb(r, 0.721794249067326, 0.092735250310891, 0.073493043116362);
    orbit6_aabb(r, 0.454496295874350, 0.045503704125650, 0.042546020777081);
  } else {
    // Keast 24-point, degree 6
    r.exact_degree = 6;
    orbit4_abbb(r, 0.356191386222545, 0.214602871259152, 0.039922750258168);
    orbit4_abbb(r, 0.877978124396166, 0.040673958534611, 0.010077211055321);
    orbit4_abbb(r, 0.032986329573173, 0.322337890142276, 0.055357181543654);
    orbit12_aabc(r, 0.063661001875018, 0.269672331458316, 0.603005664791649,
                 27.0 / 560.0);
  }
  return finish(r);
}

}  // namespace detail

/// Rule on the reference SDim-simplex exact to at least `degree`.
/// Degrees above 6 are not in the catalog.
template <int SDim>
QuadratureRule<SDim> simplex_rule(int degree) {
  if (degree > 6) throw std::runtime_error("quadrature degree > 6 unsupported");
  if constexpr (SDim == 1) return detail::segment_rule(degree);
  else if constexpr (SDim == 2) return detail::triangle_rule(degree);
  else return detail::tet_rule(degree);
}

/// Cell rule for a Dim-dimensional mesh.
template <int Dim>
QuadratureRule<Dim> cell_rule(int degree) {
  return simplex_rule<Dim>(degree);
}

/// Face rule (on the (Dim-1)-simplex) for a Dim-dimensional mesh.
template <int Dim>
QuadratureRule<Dim - 1> face_rule(int degree) {
  return simplex_rule<Dim - 1>(degree);
}

}  // namespace steklov
