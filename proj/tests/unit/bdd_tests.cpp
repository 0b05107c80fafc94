#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/test_util.hpp"
#include "tamc/sym/bdd.hpp"

using namespace tamc::sym;
using tamc::test::Rng;

namespace {

// Random formula over the manager's variables, by structural recursion.
BddRef random_formula(BddManager& mgr, Rng& rng, int depth) {
  if (depth == 0) {
    int v = (int)rng.range(0, mgr.num_vars() - 1);
    return rng.chance(50) ? mgr.var(v) : mgr.nvar(v);
  }
  BddRef a = random_formula(mgr, rng, depth - 1);
  BddRef b = random_formula(mgr, rng, depth - 1);
  switch (rng.range(0, 3)) {
    case 0: return mgr.band(a, b);
    case 1: return mgr.bor(a, b);
    case 2: return mgr.bnot(a);
    default: return mgr.bdiff(a, b);
  }
}

std::uint64_t brute_count(BddManager& mgr, BddRef f, const std::vector<int>& vars) {
  std::uint64_t count = 0;
  mgr.enumerate(f, vars, [&](const std::vector<int>&) {
    ++count;
    return true;
  });
  return count;
}

}  // namespace

TEST_CASE("canonicity: equal sets have equal refs across 1000 random identities") {
  BddManager mgr(8);
  Rng rng(20260808);
  for (int round = 0; round < 1000; ++round) {
    BddRef a = random_formula(mgr, rng, 3);
    BddRef b = random_formula(mgr, rng, 3);
    // double complement
    CHECK(mgr.bnot(mgr.bnot(a)) == a);
    // De Morgan
    CHECK(mgr.bnot(mgr.band(a, b)) == mgr.bor(mgr.bnot(a), mgr.bnot(b)));
    CHECK(mgr.bnot(mgr.bor(a, b)) == mgr.band(mgr.bnot(a), mgr.bnot(b)));
    // absorption and annihilation
    CHECK(mgr.bor(a, mgr.band(a, b)) == a);
    CHECK(mgr.band(a, mgr.bor(a, b)) == a);
    CHECK(mgr.band(a, mgr.bnot(a)) == mgr.bfalse());
    CHECK(mgr.bor(a, mgr.bnot(a)) == mgr.btrue());
    // difference
    CHECK(mgr.bor(mgr.bdiff(a, b), mgr.band(a, b)) == a);
  }
}

TEST_CASE("counting matches enumeration") {
  BddManager mgr(6);
  Rng rng(99);
  std::vector<int> all{0, 1, 2, 3, 4, 5};
  for (int round = 0; round < 50; ++round) {
    BddRef f = random_formula(mgr, rng, 3);
    CHECK(mgr.count(f) == brute_count(mgr, f, all));
  }
}

TEST_CASE("cube and enumerate agree on fixed assignments") {
  BddManager mgr(5);
  BddRef c = mgr.cube({1, -1, 0, -1, 1});
  std::vector<int> all{0, 1, 2, 3, 4};
  std::size_t seen = 0;
  mgr.enumerate(c, all, [&](const std::vector<int>& v) {
    CHECK(v[0] == 1);
    CHECK(v[2] == 0);
    CHECK(v[4] == 1);
    ++seen;
    return true;
  });
  CHECK(seen == 4);
}

TEST_CASE("exists quantifies variables away") {
  BddManager mgr(4);
  BddRef f = mgr.band(mgr.var(0), mgr.bor(mgr.var(1), mgr.nvar(2)));
  std::vector<bool> mask{false, true, false, false};
  BddRef g = mgr.exists(f, mask);
  // g = x0 && (true || !x2) = x0
  CHECK(g == mgr.var(0));
}

TEST_CASE("rename swaps interleaved unprimed and primed variables") {
  BddManager mgr(6);  // three state bits, interleaved primed copies
  std::vector<int> swap{1, 0, 3, 2, 5, 4};
  BddRef f = mgr.band(mgr.var(0), mgr.bor(mgr.var(2), mgr.nvar(4)));
  BddRef g = mgr.rename(f, swap);
  BddRef expected = mgr.band(mgr.var(1), mgr.bor(mgr.var(3), mgr.nvar(5)));
  CHECK(g == expected);
  CHECK(mgr.rename(g, swap) == f);
}

TEST_CASE("image computation agrees with the explicit relation") {
  // Relation over one state bit pair: (x, x') with x' = !x.
  BddManager mgr(2);
  BddRef rel = mgr.bor(mgr.band(mgr.var(0), mgr.nvar(1)), mgr.band(mgr.nvar(0), mgr.var(1)));
  std::vector<bool> unprimed_mask{true, false};
  BddRef from_zero = mgr.cube({0, -1});
  BddRef image = mgr.exists(mgr.band(rel, from_zero), unprimed_mask);
  CHECK(image == mgr.var(1));
}
