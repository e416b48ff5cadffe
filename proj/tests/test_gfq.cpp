#include <catch2/catch_amalgamated.hpp>

#include "motivic/gfq.hpp"

using namespace motivic;
using namespace motivic::gfq;

// Reference multiplication in F_2[t]/(t^2+t+1), worked out coefficientwise,
// independent of the tower machinery.
static std::vector<int> f4_mul_reference(const std::vector<int>& a, const std::vector<int>& b) {
  // (a0 + a1 t)(b0 + b1 t) = a0b0 + (a0b1 + a1b0) t + a1b1 t^2, t^2 = t + 1
  int c0 = (a[0] * b[0] + a[1] * b[1]) % 2;
  int c1 = (a[0] * b[1] + a[1] * b[0] + a[1] * b[1]) % 2;
  return {c0, c1};
}

TEST_CASE("first irreducible moduli are the expected ones") {
  CHECK(first_irreducible(2, 2).c == std::vector<int>{1, 1, 1});  // t^2+t+1
  CHECK(first_irreducible(3, 2).c == std::vector<int>{1, 0, 1});  // t^2+1
  CHECK(poly_irreducible(first_irreducible(2, 4)));
  CHECK(poly_irreducible(first_irreducible(5, 3)));
  CHECK(poly_irreducible(first_irreducible(7, 2)));
}

TEST_CASE("prime field arithmetic") {
  FieldTower t(5, {1});
  auto a = t.from_int(0, 2), b = t.from_int(0, 3);
  CHECK(t.is_zero(t.add(a, b)));
  CHECK(t.equal(t.mul(a, b), t.from_int(0, 1)));
  CHECK_THROWS_AS(t.inv(t.zero(0)), CalcError);
}

TEST_CASE("F_4 multiplication against reference") {
  FieldTower t(2, {2});
  int lvl = t.K_index();
  REQUIRE(t.degree(lvl) == 2);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      auto a = t.element_at(lvl, i), b = t.element_at(lvl, j);
      auto ref = f4_mul_reference(a.coords, b.coords);
      CHECK(t.mul(a, b).coords == ref);
    }
  }
  // t*(t+1) = 1 in F_4
  auto g = t.generator(lvl);
  CHECK(t.equal(t.mul(g, t.add(g, t.one(lvl))), t.one(lvl)));
}

TEST_CASE("multiplicative group order") {
  for (int p : {2, 3, 5}) {
    for (int deg : {1, 2, 3}) {
      FieldTower t(p, {deg});
      int lvl = t.K_index();
      Integer size = t.level_size(lvl);
      SplitMix64 rng(42);
      for (int trial = 0; trial < 20; ++trial) {
        Integer idx = 1 + Integer(rng.next()) % (size - 1);
        auto a = t.element_at(lvl, idx);
        CHECK(t.equal(t.pow(a, size - 1), t.one(lvl)));
      }
    }
  }
}

TEST_CASE("frobenius is a field automorphism fixing the base") {
  FieldTower t(3, {1, 2});
  int K = t.K_index();
  REQUIRE(t.degree(K) == 2);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = t.element_at(K, Integer(rng.below(9)));
    auto b = t.element_at(K, Integer(rng.below(9)));
    CHECK(t.equal(t.frobenius_q(t.add(a, b), 1), t.add(t.frobenius_q(a, 1), t.frobenius_q(b, 1))));
    CHECK(t.equal(t.frobenius_q(t.mul(a, b), 1), t.mul(t.frobenius_q(a, 1), t.frobenius_q(b, 1))));
    CHECK(t.equal(t.frobenius_q(t.frobenius_q(a, 1), 1), a));  // order = degree
  }
  // base field fixed pointwise
  for (int v = 0; v < 3; ++v) {
    auto e = t.embed(t.from_int(t.k_index(), v), K);
    CHECK(t.equal(t.frobenius_q(e, 1), e));
  }
}

TEST_CASE("frobenius on F_9 generator g with g^2 = -1 gives -g") {
  FieldTower t(3, {2});
  int lvl = t.K_index();
  auto g = t.generator(lvl);
  REQUIRE(t.equal(t.mul(g, g), t.neg(t.one(lvl))));  // modulus is t^2+1
  CHECK(t.equal(t.frobenius_p(g, 1), t.neg(g)));
}

TEST_CASE("embeddings commute") {
  FieldTower t(2, {1, 2});
  int top = t.ensure_level(4);
  int mid = t.index_by_degree(2);
  int bot = t.index_by_degree(1);
  for (int v = 0; v < 2; ++v) {
    auto e = t.from_int(bot, v);
    CHECK(t.equal(t.embed(t.embed(e, mid), top), t.embed(e, top)));
  }
  // embedding respects arithmetic
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto a = t.element_at(mid, i), b = t.element_at(mid, j);
      CHECK(t.equal(t.embed(t.mul(a, b), top), t.mul(t.embed(a, top), t.embed(b, top))));
      CHECK(t.equal(t.embed(t.add(a, b), top), t.add(t.embed(a, top), t.embed(b, top))));
    }
}

TEST_CASE("section inverts embedding and rejects outsiders") {
  FieldTower t(3, {1, 2});
  int K = t.K_index(), k = t.k_index();
  for (int v = 0; v < 3; ++v) {
    auto e = t.from_int(k, v);
    CHECK(t.equal(t.section(t.embed(e, K), k), e));
  }
  CHECK_FALSE(t.try_section(t.generator(K), k).has_value());
}

TEST_CASE("roots of unity") {
  FieldTower t(5, {1});
  auto r2 = t.roots_of_unity(2, 0);
  REQUIRE(r2.present);
  CHECK(t.equal(r2.primitive, t.from_int(0, 4)));  // -1
  auto r4 = t.roots_of_unity(4, 0);
  REQUIRE(r4.present);
  CHECK(t.equal(r4.primitive, t.from_int(0, 2)));  // 2^4=16=1, 2^2=4 != 1
  CHECK_FALSE(t.roots_of_unity(3, 0).present);     // 3 does not divide 4
  CHECK_THROWS_AS(t.roots_of_unity(5, 0), CalcError);  // wild order
}

TEST_CASE("artin-schreier generator for F_4/F_2") {
  FieldTower t(2, {1, 2});
  int K = t.K_index(), k = t.k_index();
  auto omega = t.artin_schreier_omega(K, k);
  // omega = t with t^2+t+1 = 0; gamma = absolute frobenius
  CHECK(omega.coords == std::vector<int>{0, 1});
  CHECK(t.equal(t.frobenius_p(omega, 1), t.add(omega, t.one(K))));
  // omega^2 - omega = 1 lies in F_2
  auto c = t.sub(t.mul(omega, omega), omega);
  CHECK(t.equal(c, t.one(K)));
  CHECK_FALSE(t.try_section(omega, k).has_value());  // omega not in K'
}

TEST_CASE("artin-schreier generator for F_27/F_3 cross-checked by brute force") {
  FieldTower t(3, {1, 3});
  int K = t.K_index(), k = t.k_index();
  auto omega = t.artin_schreier_omega(K, k);
  CHECK(t.equal(t.frobenius_p(omega, 1), t.add(omega, t.one(K))));
  // brute force: count all z in F_27 with z^3 - z = omega^3 - omega; omega among them
  auto a = t.sub(t.pow(omega, 3), omega);
  CHECK(t.try_section(a, k).has_value());
  int hits = 0;
  bool found = false;
  for (int i = 0; i < 27; ++i) {
    auto z = t.element_at(K, i);
    if (t.equal(t.sub(t.pow(z, 3), z), a)) {
      ++hits;
      if (t.equal(z, omega)) found = true;
    }
  }
  CHECK(hits == 3);
  CHECK(found);
}

TEST_CASE("artin-schreier rejects wrong degrees") {
  FieldTower t(3, {1, 2});
  CHECK_THROWS_AS(t.artin_schreier_omega(t.K_index(), t.k_index()), CalcError);
}

TEST_CASE("deterministic root finding") {
  FieldTower t(5, {1, 2});
  int K = t.K_index();
  PolyFp f = first_irreducible(5, 2);
  auto r1 = t.find_root(f, K);
  auto r2 = t.find_root(f, K);
  CHECK(t.equal(r1, r2));
  // evaluate f at the root
  auto acc = t.zero(K);
  for (size_t i = f.c.size(); i-- > 0;) acc = t.add(t.mul(acc, r1), t.from_int(K, f.c[i]));
  CHECK(t.is_zero(acc));
}

TEST_CASE("level mismatch is rejected") {
  FieldTower t(2, {1, 2});
  CHECK_THROWS_AS(t.add(t.one(0), t.one(1)), CalcError);
}

TEST_CASE("matrix solve and kernel over a level") {
  FieldTower t(5, {1});
  MatLev m(t, 0, 2, 2);
  m.at(0, 0) = t.from_int(0, 0);
  m.at(0, 1) = t.from_int(0, 1);
  m.at(1, 0) = t.from_int(0, 1);
  m.at(1, 1) = t.from_int(0, 0);
  auto inv = m.inverse();
  auto prod = m.mul(inv);
  CHECK(t.equal(prod.at(0, 0), t.one(0)));
  CHECK(t.equal(prod.at(1, 1), t.one(0)));
  CHECK(t.is_zero(prod.at(0, 1)));

  MatLev sing(t, 0, 2, 2);
  sing.at(0, 0) = t.from_int(0, 1);
  sing.at(0, 1) = t.from_int(0, 2);
  sing.at(1, 0) = t.from_int(0, 2);
  sing.at(1, 1) = t.from_int(0, 4);
  CHECK(sing.rank() == 1);
  auto ker = sing.kernel_basis();
  REQUIRE(ker.size() == 1);
  auto img = sing.mul_vec(ker[0]);
  CHECK(t.is_zero(img[0]));
  CHECK(t.is_zero(img[1]));
}

TEST_CASE("level polynomial compose and eval") {
  FieldTower t(3, {1});
  // f = x^2 + 1, g = x + 2 -> f(g) = x^2 + 4x + 5 = x^2 + x + 2
  LevelPoly f = t.lp_from(0, {t.one(0), t.zero(0), t.one(0)});
  LevelPoly g = t.lp_from(0, {t.from_int(0, 2), t.one(0)});
  LevelPoly fg = t.lp_compose(f, g);
  for (int v = 0; v < 3; ++v) {
    auto x = t.from_int(0, v);
    CHECK(t.equal(t.lp_eval(fg, x), t.lp_eval(f, t.lp_eval(g, x))));
  }
}
