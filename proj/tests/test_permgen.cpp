#include <algorithm>
#include <map>

#include "doctest.h"
#include "pdcsq/permgen.hpp"
#include "pdcsq/statsverify.hpp"
#include "support/oracles.hpp"

using namespace pdcsq;

namespace {

std::uint64_t bruteDerangementCount(int n, int firstEntry = 0) {
  std::uint64_t count = 0;
  for (const Row& p : oracle::allPermutations(n)) {
    bool fixedPointFree = true;
    for (int i = 0; i < n; ++i)
      if (p[i] == i + 1) fixedPointFree = false;
    if (!fixedPointFree) continue;
    if (firstEntry && p[0] != firstEntry) continue;
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("uniform permutation basics") {
  RngStream rng(42, 0);
  CHECK(uniformPermutation(1, rng) == Row{1});
  CHECK_THROWS_AS(uniformPermutation(0, rng), std::invalid_argument);
  for (int i = 0; i < 200; ++i) {
    Row p = uniformPermutation(9, rng);
    Row sorted = p;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == Row{1, 2, 3, 4, 5, 6, 7, 8, 9});
  }
}

TEST_CASE("shuffle uniformity over S3") {
  RngStream rng(7, 0);
  std::map<Row, std::uint64_t> freq;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++freq[uniformPermutation(3, rng)];
  REQUIRE(freq.size() == 6);
  std::vector<std::uint64_t> counts;
  for (const auto& [perm, count] : freq) counts.push_back(count);
  ChiSquareReport report = chiSquareUniform(counts);
  CHECK(report.valid);
  CHECK(report.pValue > 1e-3);
}

TEST_CASE("derangements never contain a fixed point") {
  RngStream rng(3, 1);
  for (int n = 2; n <= 7; ++n)
    for (int i = 0; i < 500; ++i) CHECK(isDerangement(uniformDerangement(n, rng)));
}

TEST_CASE("the unique derangement of two elements") {
  RngStream rng(1, 0);
  for (int i = 0; i < 10; ++i) CHECK(uniformDerangement(2, rng) == Row{2, 1});
}

TEST_CASE("derangement counts against brute force") {
  CHECK(derangementCount(0) == 1);
  CHECK(derangementCount(1) == 0);
  CHECK(derangementCount(4) == bruteDerangementCount(4));
  CHECK(derangementCount(4) == 9);
  CHECK(derangementCount(5) == bruteDerangementCount(5));
  CHECK(derangementCount(5) == 44);
  // nearest integer to 9!/e
  CHECK(derangementCount(9) == 133496);
  CHECK_THROWS_AS(derangementCount(-1), std::invalid_argument);
}

TEST_CASE("derangements with a prescribed first entry") {
  RngStream rng(11, 2);
  SUBCASE("n=3, first entry 2 forces (2,3,1)") {
    CHECK(bruteDerangementCount(3, 2) == 1);
    for (int i = 0; i < 20; ++i)
      CHECK(uniformDerangementStartingWith(3, 2, rng) == Row{2, 3, 1});
  }
  SUBCASE("n=4 class sizes are equal and counted") {
    CHECK(bruteDerangementCount(4, 2) == 3);
    CHECK(derangementCountStartingWith(4) == 3);
    for (int i = 2; i <= 4; ++i)
      CHECK(bruteDerangementCount(4, i) == 3);
    for (int i = 2; i <= 5; ++i)
      CHECK(bruteDerangementCount(5, i) == derangementCountStartingWith(5));
  }
  SUBCASE("draws satisfy both constraints") {
    for (int i = 0; i < 300; ++i) {
      Row p = uniformDerangementStartingWith(5, 3, rng);
      CHECK(p[0] == 3);
      CHECK(isDerangement(p));
    }
  }
  SUBCASE("first entry 1 would be a fixed point") {
    CHECK_THROWS_AS(uniformDerangementStartingWith(4, 1, rng), std::invalid_argument);
  }
}

TEST_CASE("derangement sampling is uniform at n=4") {
  RngStream rng(5, 0);
  std::map<Row, std::uint64_t> freq;
  for (int i = 0; i < 9000; ++i) ++freq[uniformDerangement(4, rng)];
  REQUIRE(freq.size() == 9);
  std::vector<std::uint64_t> counts;
  for (const auto& [perm, count] : freq) counts.push_back(count);
  ChiSquareReport report = chiSquareUniform(counts);
  CHECK(report.valid);
  CHECK(report.pValue > 1e-3);
}

TEST_CASE("identical streams reproduce, distinct streams differ") {
  RngStream a(123, 4), b(123, 4), c(123, 5);
  Row pa = uniformPermutation(9, a), pb = uniformPermutation(9, b);
  CHECK(pa == pb);
  bool allSame = true;
  for (int i = 0; i < 16; ++i)
    if (a.next() != c.next()) allSame = false;
  CHECK_FALSE(allSame);
}
