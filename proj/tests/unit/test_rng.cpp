#include <cmath>

#include "doctest.h"
#include "envsynth/core/rng.hpp"

using envsynth::SeededRng;

TEST_CASE("equal seeds produce identical streams") {
  SeededRng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different seeds diverge") {
  SeededRng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    same += a.next_u64() == b.next_u64();
  }
  CHECK(same == 0);
}

TEST_CASE("split streams are independent of parent consumption") {
  SeededRng a(7);
  SeededRng b(7);
  (void)b.next_u64();
  (void)b.next_u64();
  SeededRng child_a = a.split(3);
  SeededRng child_b = b.split(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(child_a.next_u64() == child_b.next_u64());
  }
  SeededRng other = a.split(4);
  CHECK(other.next_u64() != a.split(3).next_u64());
}

TEST_CASE("next_double lies in [0,1) and next_index in range") {
  SeededRng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const double d = rng.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    CHECK(rng.next_index(7) < 7);
  }
}

TEST_CASE("normal deviates have the right first two moments") {
  SeededRng rng(2024);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}
