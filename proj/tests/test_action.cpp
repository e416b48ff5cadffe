#include <catch2/catch_amalgamated.hpp>

#include "motivic/action.hpp"

using namespace motivic;
using namespace motivic::action;
using gfq::FieldElement;
using gfq::FieldTower;

namespace {

Action make_action(int p, std::vector<int> tower_steps, int dim, AbelianGroupSpec group) {
  Action a;
  a.tower = FieldTower(p, tower_steps);
  a.dim = dim;
  a.group = std::move(group);
  return a;
}

Generator gen(const Action& a, long twist, std::vector<long> matrix, std::vector<long> translation,
              long order) {
  Generator g;
  g.twist = twist;
  int K = a.level_K();
  for (long v : matrix) g.matrix.push_back(a.tower.from_int(K, v));
  for (long v : translation) g.translation.push_back(a.tower.from_int(K, v));
  g.declared_order = order;
  return g;
}

// the shear on A^2 in canonical variable order (invariant coordinate
// first): x_1 -> x_1, x_2 -> x_2 + x_1
Action shear_a2(int p) {
  Action a = make_action(p, {1}, 2, {{p}, {}});
  a.generators.push_back(gen(a, 0, {1, 0, 1, 1}, {0, 0}, p));
  return a;
}

}  // namespace

TEST_CASE("compose identities") {
  Action a = make_action(5, {1}, 1, {{}, {2}});
  a.generators.push_back(gen(a, 0, {4}, {0}, 2));  // x -> -x
  Generator id = identity_generator(a);
  CHECK(generator_equal(a, compose(a, id, a.generators[0]), a.generators[0]));
  CHECK(generator_equal(a, compose(a, a.generators[0], a.generators[0]), id));
}

TEST_CASE("shear generator composed p times is the identity") {
  for (int p : {2, 3, 5}) {
    Action a = shear_a2(p);
    Generator pw = generator_power(a, a.generators[0], p);
    CHECK(generator_equal(a, pw, identity_generator(a)));
    Generator shy = generator_power(a, a.generators[0], p - 1);
    CHECK_FALSE(generator_equal(a, shy, identity_generator(a)));
  }
}

TEST_CASE("composition agrees with pointwise composition") {
  // twisted pair over F_9/F_3: alpha = (1,1,b) and beta = (phi, b^{q-1}, 0)
  Action a = make_action(3, {1, 2}, 1, {{3}, {2}});
  const FieldTower& t = a.tower;
  int K = a.level_K();
  FieldElement b = t.generator(K);
  Generator alpha;
  alpha.twist = 0;
  alpha.matrix = {t.one(K)};
  alpha.translation = {b};
  alpha.declared_order = 3;
  Generator beta;
  beta.twist = 1;
  beta.matrix = {t.pow(b, 2)};  // b^{q-1} with q=3
  beta.translation = {t.zero(K)};
  beta.declared_order = 2;
  a.generators = {alpha, beta};
  REQUIRE(validate(a).valid());

  int eval = a.tower.ensure_level(4);
  Generator ab = compose(a, alpha, beta);
  SplitMix64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Point pt;
    pt.j = static_cast<long>(rng.below(2));
    pt.v = {a.tower.element_at(eval, Integer(rng.below(81)))};
    // coordinate-ring composition reverses the order of point maps:
    // (alpha o beta) acts on points as beta after alpha
    Point lhs = point_apply(a, ab, pt, eval);
    Point rhs = point_apply(a, beta, point_apply(a, alpha, pt, eval), eval);
    CHECK(lhs.j == rhs.j);
    CHECK(a.tower.equal(lhs.v[0], rhs.v[0]));
  }
}

TEST_CASE("validate accepts the trivial action") {
  Action a = make_action(5, {1}, 0, {{}, {}});
  CHECK(validate(a).valid());
}

TEST_CASE("validate rejects non-commuting generators") {
  // two declared Z/2 x Z/2 generators over F_5 that do not commute
  Action a = make_action(5, {1}, 2, {{}, {2, 2}});
  a.generators.push_back(gen(a, 0, {0, 1, 1, 0}, {0, 0}, 2));   // swap
  a.generators.push_back(gen(a, 0, {1, 0, 0, 4}, {0, 0}, 2));   // diag(1,-1)
  auto rep = validate(a);
  REQUIRE_FALSE(rep.valid());
  bool found = false;
  for (const auto& i : rep.issues) found |= i.check == "commutativity";
  CHECK(found);
}

TEST_CASE("validate rejects missing roots of unity") {
  // tame order 3 over F_5: 3 does not divide 4
  Action a = make_action(5, {1}, 1, {{}, {3}});
  a.generators.push_back(gen(a, 0, {1}, {0}, 3));
  auto rep = validate(a);
  REQUIRE_FALSE(rep.valid());
  bool found = false;
  for (const auto& i : rep.issues) found |= i.check == "roots-of-unity";
  CHECK(found);
}

TEST_CASE("validate rejects twists that do not generate the Galois group") {
  // K = F_9 over F_3 but only trivial twists
  Action a = make_action(3, {1, 2}, 1, {{}, {2}});
  a.generators.push_back(gen(a, 0, {2}, {0}, 2));  // x -> -x, no twist
  auto rep = validate(a);
  REQUIRE_FALSE(rep.valid());
  bool found = false;
  for (const auto& i : rep.issues) found |= i.check == "twist-surjectivity";
  CHECK(found);
}

TEST_CASE("validate rejects wrong declared orders") {
  Action a = make_action(5, {1}, 1, {{}, {2}});
  a.generators.push_back(gen(a, 0, {2}, {0}, 2));  // 2 has order 4 in F_5^*
  auto rep = validate(a);
  REQUIRE_FALSE(rep.valid());
  bool found = false;
  for (const auto& i : rep.issues) found |= i.check == "generator-order";
  CHECK(found);
}

TEST_CASE("normalize is the identity on already-normalized input") {
  Action a = shear_a2(3);
  auto [norm, cb] = normalize(a);
  CHECK(cb.identity);
  CHECK(is_translation_shape(norm));
}

TEST_CASE("normalize diagonalizes the swap action") {
  // Z/2 over F_5 acting by the swap matrix; eigenbasis (1,1), (1,-1)
  Action a = make_action(5, {1}, 2, {{}, {2}});
  a.generators.push_back(gen(a, 0, {0, 1, 1, 0}, {0, 0}, 2));
  REQUIRE(validate(a).valid());
  auto [norm, cb] = normalize(a);
  REQUIRE_FALSE(cb.identity);
  CHECK(is_translation_shape(norm));
  const FieldTower& t = norm.tower;
  int K = norm.level_K();
  // diagonal entries are +1 and -1 in the deterministic order
  std::vector<FieldElement> diag{norm.generators[0].matrix[0], norm.generators[0].matrix[3]};
  bool plus_first = t.equal(diag[0], t.one(K)) && t.equal(diag[1], t.from_int(K, 4));
  bool minus_first = t.equal(diag[0], t.from_int(K, 4)) && t.equal(diag[1], t.one(K));
  CHECK((plus_first || minus_first));
}

TEST_CASE("normalize preserves the transformation pointwise") {
  // mixed wild+tame action over F_3, d=2: shear entangled with a sign flip
  Action a = make_action(3, {1}, 2, {{3}, {2}});
  a.generators.push_back(gen(a, 0, {1, 0, 1, 1}, {0, 0}, 3));
  a.generators.push_back(gen(a, 0, {2, 0, 0, 2}, {0, 0}, 2));  // -identity
  REQUIRE(validate(a).valid());
  // conjugate by a non-trivial basis to make normalize work for it
  ChangeOfBasis mix;
  mix.identity = false;
  const FieldTower& t = a.tower;
  int K = a.level_K();
  mix.matrix = {t.from_int(K, 1), t.from_int(K, 2), t.from_int(K, 1), t.from_int(K, 0)};
  mix.inverse = detail::mat_inverse(t, K, mix.matrix, 2);
  Action scrambled = conjugate(a, mix);
  REQUIRE(validate(scrambled).valid());

  auto [norm, cb] = normalize(scrambled);
  CHECK(is_translation_shape(norm));
  Action check = conjugate(scrambled, cb);
  for (size_t gi = 0; gi < norm.generators.size(); ++gi)
    CHECK(generator_equal(norm, check.generators[gi], norm.generators[gi]));

  // pointwise: conjugated generators act exactly like the normalized data
  SplitMix64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Point pt;
    pt.j = 0;
    pt.v = {t.element_at(K, Integer(rng.below(3))), t.element_at(K, Integer(rng.below(3)))};
    for (size_t gi = 0; gi < norm.generators.size(); ++gi) {
      Point lhs = point_apply(norm, norm.generators[gi], pt, K);
      Point rhs = point_apply(check, check.generators[gi], pt, K);
      CHECK(t.equal(lhs.v[0], rhs.v[0]));
      CHECK(t.equal(lhs.v[1], rhs.v[1]));
    }
  }
}

TEST_CASE("tame fixed point for x -> -x + c over F_5") {
  Action a = make_action(5, {1}, 1, {{}, {2}});
  long c = 2;
  a.generators.push_back(gen(a, 0, {4}, {c}, 2));
  REQUIRE(validate(a).valid());
  auto v0 = tame_fixed_point(a);
  REQUIRE(v0.has_value());
  // fixed point of -v + c = v is c/2 = 3c
  CHECK(a.tower.equal((*v0)[0], a.tower.from_int(a.level_K(), 3 * c)));
  Action rec = recenter(a, *v0);
  CHECK(a.tower.is_zero(rec.generators[0].translation[0]));
}

TEST_CASE("fixed point not needed when translations vanish") {
  Action a = make_action(5, {1}, 1, {{}, {2}});
  a.generators.push_back(gen(a, 0, {4}, {0}, 2));
  CHECK_FALSE(tame_fixed_point(a).has_value());
}

TEST_CASE("recentering leaves wild linear parts and data intact") {
  // valid mixed action shifted off-center so the tame translation is
  // nonzero; the fixed-point step must recover centered coordinates
  Action a = make_action(3, {1}, 2, {{3}, {2}});
  a.generators.push_back(gen(a, 0, {1, 0, 1, 1}, {0, 0}, 3));
  a.generators.push_back(gen(a, 0, {2, 0, 0, 2}, {0, 0}, 2));  // -identity
  REQUIRE(validate(a).valid());
  std::vector<FieldElement> shift{a.tower.from_int(a.level_K(), 1),
                                  a.tower.from_int(a.level_K(), 2)};
  Action shifted = recenter(a, shift);
  REQUIRE(validate(shifted).valid());
  REQUIRE_FALSE(a.tower.is_zero(shifted.generators[1].translation[0]));

  auto res = normalize_and_center(shifted);
  REQUIRE(res.recentering.has_value());
  for (size_t gi = 0; gi < res.action.generators.size(); ++gi)
    for (size_t mi = 0; mi < res.action.generators[gi].matrix.size(); ++mi)
      CHECK(a.tower.equal(res.action.generators[gi].matrix[mi],
                          shifted.generators[gi].matrix[mi]));
  // tame translations are gone
  CHECK(a.tower.is_zero(res.action.generators[1].translation[0]));
  CHECK(a.tower.is_zero(res.action.generators[1].translation[1]));
}

TEST_CASE("normalize handles the twisted tame generator over F_9") {
  // beta = (phi, -1, 0): valid Z/2 with twist generating Gal(F_9/F_3)
  Action a = make_action(3, {1, 2}, 1, {{}, {2}});
  a.generators.push_back(gen(a, 0, {2}, {0}, 2));
  a.generators[0].twist = 1;
  REQUIRE(validate(a).valid());
  auto [norm, cb] = normalize(a);
  CHECK(is_translation_shape(norm));
}

TEST_CASE("group relations replay after normalization") {
  Action a = make_action(5, {1}, 2, {{}, {4, 2}});
  a.generators.push_back(gen(a, 0, {0, 1, 4, 0}, {0, 0}, 4));  // order-4 rotation
  a.generators.push_back(gen(a, 0, {4, 0, 0, 4}, {0, 0}, 2));  // -identity
  REQUIRE(validate(a).valid());
  auto res = normalize_and_center(a);
  const Action& n = res.action;
  CHECK(generator_equal(n, generator_power(n, n.generators[0], 4), identity_generator(n)));
  CHECK(generator_equal(n, generator_power(n, n.generators[1], 2), identity_generator(n)));
  Generator ab = compose(n, n.generators[0], n.generators[1]);
  Generator ba = compose(n, n.generators[1], n.generators[0]);
  CHECK(generator_equal(n, ab, ba));
}
