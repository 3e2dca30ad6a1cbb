#include <cmath>
#include <limits>

#include "doctest.h"
#include "flexsim/mesh.hpp"

using namespace flexsim;

TEST_CASE("build_mesh derives spacings") {
  const Mesh m = build_mesh({50, 10000, 2.0, 10.0});
  CHECK(m.h() == 2.0 / 50.0);
  CHECK(m.k() == 10.0 / 10000.0);
  CHECK(m.h() == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(m.k() == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(m.n_nodes() == 51);
  CHECK(m.n_levels() == 10001);
}

TEST_CASE("minimal legal mesh") {
  const Mesh m = build_mesh({4, 2, 1.0, 1.0});
  CHECK(m.h() == 0.25);
  CHECK(m.k() == 0.5);
}

TEST_CASE("invalid configs name the offending field") {
  auto field_of = [](MeshConfig c) {
    try {
      build_mesh(c);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of({3, 10000, 2.0, 10.0}) == "n_space");
  CHECK(field_of({50, 1, 2.0, 10.0}) == "n_time");
  CHECK(field_of({50, 100, 0.0, 10.0}) == "length");
  CHECK(field_of({50, 100, -1.0, 10.0}) == "length");
  CHECK(field_of({50, 100, 1.0, 0.0}) == "final_time");
  CHECK(field_of({50, 100, std::numeric_limits<double>::infinity(), 1.0}) == "length");
  CHECK(field_of({50, 100, 1.0, std::nan("")}) == "final_time");
  CHECK(validate(MeshConfig{0, 0, -1.0, -1.0}).size() == 4);
}

TEST_CASE("node positions and level times") {
  const Mesh m = build_mesh({50, 10000, 2.0, 10.0});
  CHECK(node_position(m, 0) == 0.0);
  CHECK(node_position(m, 50) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(node_position(m, 51), std::out_of_range);
  CHECK(level_time(m, 0) == 0.0);
  CHECK(level_time(m, 10000) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(level_time(m, 10001), std::out_of_range);
}

TEST_CASE("last node lands on the length within one ulp") {
  for (std::size_t n : {4u, 7u, 13u, 50u, 97u, 1000u}) {
    for (double length : {0.3, 1.0, 2.0, 3.7, 10.0}) {
      const Mesh m = build_mesh({n, 10, length, 1.0});
      const double end = node_position(m, n);
      CHECK(std::abs(end - length) <= std::nextafter(length, 2 * length) - length);
    }
  }
}

TEST_CASE("build_mesh is pure") {
  const MeshConfig c{17, 123, 1.3, 0.7};
  CHECK(build_mesh(c) == build_mesh(c));
}
