#include <doctest.h>

#include "tsvar/errors.hpp"
#include "tsvar/timescale.hpp"

using namespace tsvar;

TEST_CASE("integers grid jump operators") {
  const TimeScaleGrid g = make_timescale(IntegersSpec{-2, 3});
  CHECK(g.size() == 6);
  CHECK(g.sigma(0.0) == 1.0);
  CHECK(g.rho(0.0) == -1.0);
  CHECK(g.mu(0.0) == 1.0);
  CHECK(g.sigma(3.0) == 3.0);
  CHECK(g.mu(3.0) == 0.0);
  CHECK(g.rho(-2.0) == -2.0);
  CHECK(g.intent_at(2) == Intent::exact_discrete);
}

TEST_CASE("power2 grid has doubling graininess") {
  const TimeScaleGrid g = make_timescale(Power2Spec{0, 4});
  CHECK(g.size() == 5);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g.mu_at(i) == g.point(i));
  CHECK(g.back() == 16.0);
}

TEST_CASE("uniform and sampled constructors") {
  const TimeScaleGrid u = make_timescale(UniformSpec{0.0, 1.0, 0.25});
  CHECK(u.size() == 5);
  CHECK(u.back() == 1.0);
  CHECK_THROWS_AS(make_timescale(UniformSpec{0.0, 1.0, 0.3}), InvalidInput);

  const TimeScaleGrid s = make_timescale(SampledSpec{0.0, 1.0, 0.3});
  CHECK(s.size() == 5);  // 0, 0.3, 0.6, 0.9, 1
  CHECK(s.back() == 1.0);
  CHECK(s.intent_at(0) == Intent::sampled_continuum);
  CHECK(to_string(s.intent_at(0)) == "sampled-continuum");

  const TimeScaleGrid s2 = make_timescale(SampledSpec{0.0, 1.0, 0.001});
  CHECK(s2.size() == 1001);
}

TEST_CASE("classification reports the literal grid") {
  const TimeScaleGrid g = make_timescale(ExplicitSpec{{0.0, 1.0, 3.0}});
  const Classification mid = g.classify(1.0);
  CHECK(mid.right_scattered);
  CHECK(mid.left_scattered);
  CHECK(mid.isolated);
  CHECK_FALSE(mid.dense);
  const Classification last = g.classify(3.0);
  CHECK(last.right_dense);
  CHECK_FALSE(last.right_scattered);
  CHECK(g.classify(0.0).left_dense);
}

TEST_CASE("invalid grids and lookups") {
  CHECK_THROWS_AS(make_timescale(ExplicitSpec{{1.0}}), InvalidInput);
  CHECK_THROWS_AS(make_timescale(ExplicitSpec{{0.0, 2.0, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(make_timescale(ExplicitSpec{{0.0, 0.0}}), InvalidInput);
  CHECK_THROWS_AS(make_timescale(IntegersSpec{3, 3}), InvalidInput);
  const TimeScaleGrid g = make_timescale(IntegersSpec{0, 3});
  CHECK_THROWS_AS(g.index_of(0.5), InvalidInput);
  CHECK_FALSE(g.contains(0.5));
  CHECK(g.contains(2.0));
}

TEST_CASE("kappa windows") {
  const TimeScaleGrid g = make_timescale(IntegersSpec{0, 3});
  const GridWindow k1 = kappa(g);
  CHECK(k1.size() == 3);
  const GridWindow k2 = kappa(k1);
  CHECK(k2.size() == 2);
  CHECK(k2.point(1) == 1.0);
  const TimeScaleGrid two = make_timescale(IntegersSpec{0, 1});
  CHECK(kappa(two).size() == 1);
  CHECK_THROWS_AS(kappa(kappa(two)), InvalidInput);
}

TEST_CASE("grid copies share and compare equal") {
  const TimeScaleGrid a = make_timescale(Power2Spec{-1, 2});
  const TimeScaleGrid b = a;
  CHECK(a == b);
  CHECK(a.point(0) == 0.5);
  CHECK_FALSE(a == make_timescale(Power2Spec{-1, 3}));
}
