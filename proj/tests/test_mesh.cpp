#include <steklov/mesh.hpp>
#include <steklov/mesh_io.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace steklov;
using Catch::Approx;

namespace {

template <int Dim>
void check_conformity(const SimplicialMesh<Dim>& m, Domain d) {
  // measures add up to the domain measure
  double total = 0.0, btotal = 0.0;
  double min_quality = 1e300;
  for (int c = 0; c < m.n_cells(); ++c) {
    const auto g = m.cell_geometry(c);
    REQUIRE(g.measure > 0.0);
    total += g.measure;
    min_quality = std::min(min_quality, g.inradius() / g.diameter);
  }
  REQUIRE(total == Approx(domain_measure(d)).epsilon(1e-12));

  // interior faces shared by exactly 2 cells, boundary faces by 1, and the
  // boundary faces tile the boundary
  std::vector<int> count(m.n_faces(), 0);
  for (int c = 0; c < m.n_cells(); ++c)
    for (int i = 0; i <= Dim; ++i) {
      const int f = m.cell_faces[c][i];
      REQUIRE(f >= 0);
      REQUIRE(f < m.n_faces());
      ++count[f];
    }
  for (int f = 0; f < m.n_faces(); ++f) {
    REQUIRE(count[f] == (m.boundary_face_flags[f] ? 1 : 2));
    if (m.boundary_face_flags[f]) {
      std::array<Vec<Dim>, Dim> fv;
      for (int i = 0; i < Dim; ++i) fv[i] = m.vertices[m.faces[f][i]];
      btotal += facet_measure<Dim>(fv);
    }
  }
  REQUIRE(btotal == Approx(domain_boundary_measure(d)).epsilon(1e-12));
  REQUIRE(min_quality > 0.1);
}

template <int Dim>
double min_shape_quality(const SimplicialMesh<Dim>& m) {
  double q = 1e300;
  for (int c = 0; c < m.n_cells(); ++c) {
    const auto g = m.cell_geometry(c);
    q = std::min(q, g.inradius() / g.diameter);
  }
  return q;
}

}  // namespace

TEST_CASE("catalog base meshes have the documented entity counts") {
  const auto sq = generate<2>(Domain::square, 0);
  CHECK(sq.n_cells() == 2);
  CHECK(sq.n_vertices() == 4);
  CHECK(sq.n_faces() == 5);

  const auto sq1 = generate<2>(Domain::square, 1);
  CHECK(sq1.n_cells() == 8);
  CHECK(sq1.n_vertices() == 9);
  CHECK(sq1.n_faces() == 16);

  const auto hex = generate<2>(Domain::hexagon, 0);
  CHECK(hex.n_cells() == 6);
  CHECK(hex.n_vertices() == 7);
  CHECK(hex.n_faces() == 12);

  const auto lsh = generate<2>(Domain::lshape, 0);
  CHECK(lsh.n_cells() == 6);
  CHECK(lsh.n_vertices() == 8);
  CHECK(lsh.n_faces() == 13);

  const auto cube = generate<3>(Domain::cube, 0);
  CHECK(cube.n_cells() == 6);
  CHECK(cube.n_vertices() == 8);
  CHECK(cube.n_faces() == 18);
  int boundary = 0;
  for (auto f : cube.boundary_face_flags) boundary += f;
  CHECK(boundary == 12);

  const auto fic = generate<3>(Domain::fichera, 0);
  CHECK(fic.n_cells() == 42);
}

TEST_CASE("generated meshes are conforming with exact domain measures") {
  for (int level : {0, 1, 2, 3}) {
    check_conformity(generate<2>(Domain::square, level), Domain::square);
    check_conformity(generate<2>(Domain::lshape, level), Domain::lshape);
    check_conformity(generate<2>(Domain::hexagon, level), Domain::hexagon);
  }
  for (int level : {0, 1, 2}) {
    check_conformity(generate<3>(Domain::cube, level), Domain::cube);
    check_conformity(generate<3>(Domain::fichera, level), Domain::fichera);
  }
}

TEST_CASE("generate rejects bad arguments") {
  REQUIRE_FALSE(parse_domain("disk").has_value());
  REQUIRE_THROWS_AS(generate<2>(Domain::cube, 1), std::runtime_error);
  REQUIRE_THROWS_AS(generate<3>(Domain::square, 1), std::runtime_error);
  REQUIRE_THROWS_AS(generate<2>(Domain::square, -1), std::runtime_error);
  // cell cap: square level 2 has 32 cells
  REQUIRE_THROWS_AS(generate<2>(Domain::square, 2, 10), std::runtime_error);
  REQUIRE_NOTHROW(generate<2>(Domain::square, 2, 32));
}

TEST_CASE("uniform refinement multiplies cells by 2^dim and halves h") {
  const auto sq = generate<2>(Domain::square, 0);
  const auto sq_r = uniform_refine(sq);
  CHECK(sq_r.n_cells() == 8);
  CHECK(mesh_diameter(sq_r) == mesh_diameter(sq) / 2.0);

  const auto cube = generate<3>(Domain::cube, 0);
  const auto cube_r = uniform_refine(cube);
  CHECK(cube_r.n_cells() == 48);
  CHECK(mesh_diameter(cube_r) == mesh_diameter(cube) / 2.0);

  // dyadic vertex coordinates halve bit-exactly; the hexagon's sqrt(3)/2
  // coordinates land within an ulp after repeated midpoint averaging
  for (Domain d : {Domain::square, Domain::lshape}) {
    auto m = generate<2>(d, 0);
    for (int l = 0; l < 3; ++l) {
      const auto r = uniform_refine(m);
      CHECK(mesh_diameter(r) == mesh_diameter(m) / 2.0);
      m = r;
    }
  }
  {
    auto m = generate<2>(Domain::hexagon, 0);
    for (int l = 0; l < 3; ++l) {
      const auto r = uniform_refine(m);
      CHECK(mesh_diameter(r) == Approx(mesh_diameter(m) / 2.0).epsilon(1e-15));
      m = r;
    }
  }
  for (Domain d : {Domain::cube, Domain::fichera}) {
    auto m = generate<3>(d, 0);
    for (int l = 0; l < 2; ++l) {
      const auto r = uniform_refine(m);
      CHECK(mesh_diameter(r) == mesh_diameter(m) / 2.0);
      m = r;
    }
  }

  // refinement respects the cap
  REQUIRE_THROWS_AS(uniform_refine(sq, 7), std::runtime_error);

  // 3D refinement needs catalog provenance
  auto naked = cube;
  naked.domain.reset();
  REQUIRE_THROWS_AS(uniform_refine(naked), std::runtime_error);
}

TEST_CASE("shape quality is level-independent") {
  for (Domain d : {Domain::square, Domain::lshape, Domain::hexagon}) {
    const double q0 = min_shape_quality(generate<2>(d, 0));
    for (int level : {1, 2, 3})
      REQUIRE(min_shape_quality(generate<2>(d, level)) ==
              Approx(q0).epsilon(1e-10));
  }
  for (Domain d : {Domain::cube, Domain::fichera}) {
    const double q0 = min_shape_quality(generate<3>(d, 0));
    for (int level : {1, 2})
      REQUIRE(min_shape_quality(generate<3>(d, level)) ==
              Approx(q0).epsilon(1e-10));
  }
}

TEST_CASE("mesh_diameter matches the refinement-row values") {
  CHECK(mesh_diameter(generate<2>(Domain::square, 0)) == Approx(std::sqrt(2.0)));
  CHECK(mesh_diameter(generate<2>(Domain::square, 5)) ==
        Approx(std::sqrt(2.0) / 32.0));
  // the 6-triangle fan of the unit-side hexagon has unit element diameter
  CHECK(mesh_diameter(generate<2>(Domain::hexagon, 0)) == Approx(1.0));
  CHECK(mesh_diameter(generate<2>(Domain::lshape, 0)) == Approx(std::sqrt(2.0)));
  CHECK(mesh_diameter(generate<3>(Domain::cube, 0)) == Approx(std::sqrt(3.0)));
  CHECK(mesh_diameter(generate<3>(Domain::fichera, 1)) ==
        Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("element geometry on reference shapes") {
  SECTION("unit right triangle") {
    const auto g = compute_geometry<2>(
        {Vec<2>(0, 0), Vec<2>(1, 0), Vec<2>(0, 1)});
    CHECK(g.measure == Approx(0.5));
    CHECK(g.diameter == Approx(std::sqrt(2.0)));
    // hypotenuse is the face opposite vertex 0
    CHECK(g.face_measures[0] == Approx(std::sqrt(2.0)));
    CHECK(g.heights[0] == Approx(std::sqrt(2.0) / 2.0));
    for (int i = 0; i < 3; ++i)
      CHECK(g.heights[i] * g.face_measures[i] ==
            Approx(2.0 * g.measure).epsilon(1e-12));
    Vec<2> sum = g.barycentric_gradients[0] + g.barycentric_gradients[1] +
                 g.barycentric_gradients[2];
    CHECK(sum.norm() < 1e-12);
  }
  SECTION("reference tetrahedron") {
    const auto g = compute_geometry<3>({Vec<3>(0, 0, 0), Vec<3>(1, 0, 0),
                                        Vec<3>(0, 1, 0), Vec<3>(0, 0, 1)});
    CHECK(g.measure == Approx(1.0 / 6.0));
    CHECK(g.diameter == Approx(std::sqrt(2.0)));
    for (int i = 0; i < 4; ++i)
      CHECK(g.heights[i] * g.face_measures[i] ==
            Approx(3.0 * g.measure).epsilon(1e-12));
    Vec<3> sum = Vec<3>::Zero();
    for (const auto& gr : g.barycentric_gradients) sum += gr;
    CHECK(sum.norm() < 1e-12);
  }
  SECTION("equilateral triangle has H = sqrt(3)/2 over every face") {
    const auto g = compute_geometry<2>(
        {Vec<2>(0, 0), Vec<2>(1, 0), Vec<2>(0.5, std::sqrt(3.0) / 2.0)});
    for (int i = 0; i < 3; ++i)
      CHECK(g.heights[i] == Approx(std::sqrt(3.0) / 2.0));
  }
  SECTION("degenerate simplex is rejected") {
    REQUIRE_THROWS_AS(
        compute_geometry<2>({Vec<2>(0, 0), Vec<2>(1, 0), Vec<2>(2, 0)}),
        std::runtime_error);
  }
}

TEST_CASE("mesh export round-trips bit-exactly") {
  const auto m = generate<2>(Domain::square, 0);
  std::stringstream ss;
  export_mesh(m, ss);

  // header + 4 vertex lines + 2 cell lines
  int lines = 0;
  for (char c : ss.str())
    if (c == '\n') ++lines;
  CHECK(lines == 7);

  const auto back = import_mesh<2>(ss);
  REQUIRE(back.n_vertices() == m.n_vertices());
  REQUIRE(back.n_cells() == m.n_cells());
  for (int v = 0; v < m.n_vertices(); ++v)
    CHECK(back.vertices[v] == m.vertices[v]);
  CHECK(back.cells == m.cells);
  CHECK(back.faces == m.faces);
  CHECK(back.boundary_face_flags == m.boundary_face_flags);

  // second export produces identical bytes
  std::stringstream ss2;
  export_mesh(back, ss2);
  CHECK(ss.str() == ss2.str());

  SECTION("3D round-trip with irrational coordinates") {
    auto tet = make_mesh<3>(
        {Vec<3>(0, 0, 0), Vec<3>(M_PI, 0, 0), Vec<3>(0, std::sqrt(2.0), 0),
         Vec<3>(1.0 / 3.0, 2.0 / 7.0, std::exp(1.0))},
        {{0, 1, 2, 3}});
    std::stringstream s3;
    export_mesh(tet, s3);
    const auto back3 = import_mesh<3>(s3);
    for (int v = 0; v < 4; ++v) CHECK(back3.vertices[v] == tet.vertices[v]);
  }

  SECTION("empty mesh cannot be exported") {
    SimplicialMesh<2> empty;
    std::stringstream out;
    REQUIRE_THROWS_AS(export_mesh(empty, out), std::runtime_error);
  }

  SECTION("dimension mismatch on import is an error") {
    std::stringstream bad(ss.str());
    REQUIRE_THROWS_AS(import_mesh<3>(bad), std::runtime_error);
  }
}
