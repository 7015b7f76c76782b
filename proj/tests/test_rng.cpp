#include <doctest.h>

#include <vector>

#include "adastar/rng.hpp"

using namespace adastar;

TEST_CASE("identical seeds and paths give identical streams") {
  RngStream a = substream(10, StreamTag::Generation, {3, 7, 1});
  RngStream b = substream(10, StreamTag::Generation, {3, 7, 1});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different context words give different streams") {
  RngStream a = substream(10, StreamTag::Generation, {3, 7, 1});
  RngStream b = substream(10, StreamTag::Generation, {3, 7, 2});
  RngStream c = substream(10, StreamTag::CotTokens, {3, 7, 1});
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    if (va == b.next_u64()) ++same_ab;
    if (va == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("next_unit stays in [0,1) and has a sane mean") {
  RngStream rng = substream(42, StreamTag::EvalDraw);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("next_normal moments") {
  RngStream rng = substream(7, StreamTag::Difficulty);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sq += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("next_int covers inclusive bounds") {
  RngStream rng = substream(3, StreamTag::CotTokens);
  bool lo_seen = false, hi_seen = false;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.next_int(2, 5);
    REQUIRE(v >= 2);
    REQUIRE(v <= 5);
    lo_seen |= v == 2;
    hi_seen |= v == 5;
  }
  CHECK(lo_seen);
  CHECK(hi_seen);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> w = v;
  RngStream r1 = substream(9, StreamTag::DrawOrder, {1});
  RngStream r2 = substream(9, StreamTag::DrawOrder, {1});
  shuffle(v, r1);
  shuffle(w, r2);
  CHECK(v == w);
  std::sort(w.begin(), w.end());
  CHECK(w == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}
