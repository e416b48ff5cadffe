#include <catch2/catch_amalgamated.hpp>

#include "motivic/catalog.hpp"
#include "motivic/io.hpp"

using namespace motivic;

TEST_CASE("tower round trip is byte-exact") {
  for (auto steps : std::vector<std::vector<int>>{{1}, {2}, {1, 2}, {2, 2}, {1, 3}}) {
    gfq::FieldTower t(steps.back() <= 2 ? 3 : 2, steps);
    auto doc = io::tower_to_json(t);
    std::string text = io::dump(doc);
    auto t2 = io::tower_from_json(io::parse_text(text));
    CHECK(io::dump(io::tower_to_json(t2)) == text);
    CHECK(t2.p() == t.p());
    CHECK(t2.K_index() == t.K_index());
  }
}

TEST_CASE("tower with a tampered modulus is rejected") {
  gfq::FieldTower t(2, {1, 2});
  auto doc = io::tower_to_json(t);
  doc["moduli"][1] = std::vector<int>{0, 0, 1};  // t^2, not irreducible
  CHECK_THROWS_AS(io::tower_from_json(doc), CalcError);
}

TEST_CASE("class round trip, including big coefficients and residues") {
  using namespace mclass;
  MotivicClass c(RingTag::M_eq(6));
  LefschetzPoly f;
  f.add_term(-2, Integer(3));
  f.add_term(5, Integer("123456789012345678901234567890"));
  c.add_term(Monomial::single("E1") * Monomial::single("E2"), f);
  c.add_term(Monomial::unit(), LefschetzPoly::constant(-7));
  std::string text = io::dump(io::class_to_json(c));
  auto c2 = io::class_from_json(io::parse_text(text));
  CHECK(c2 == c);
  CHECK(io::dump(io::class_to_json(c2)) == text);

  auto residue = mclass::MotivicClass::constant(RingTag{RingBase::K0, true, 0, true}, 2);
  auto r2 = io::class_from_json(io::class_to_json(residue));
  CHECK(r2 == residue);
}

TEST_CASE("random classes round trip", "[property]") {
  using namespace mclass;
  SplitMix64 rng(0xD00D);
  const std::vector<std::string> pool{"A", "B", "C"};
  for (int i = 0; i < 300; ++i) {
    MotivicClass c(RingTag::M());
    int terms = 1 + static_cast<int>(rng.below(4));
    for (int t = 0; t < terms; ++t) {
      Monomial m;
      for (int s = static_cast<int>(rng.below(3)); s-- > 0;)
        m = m * Monomial::single(pool[rng.below(pool.size())]);
      LefschetzPoly f;
      f.add_term(static_cast<int>(rng.below(7)) - 3, Integer(static_cast<long>(rng.below(19)) - 9));
      c.add_term(m, f);
    }
    auto text = io::dump(io::class_to_json(c));
    auto c2 = io::class_from_json(io::parse_text(text));
    REQUIRE(c2 == c);
    REQUIRE(io::dump(io::class_to_json(c2)) == text);
  }
}

TEST_CASE("action round trip over the whole catalog") {
  for (const auto& item : catalog::builtin_actions()) {
    CAPTURE(item.name);
    std::string text = io::dump(io::action_to_json(item.act));
    auto a2 = io::action_from_json(io::parse_text(text));
    REQUIRE(io::dump(io::action_to_json(a2)) == text);
    REQUIRE(action::validate(a2).valid());
    REQUIRE(a2.dim == item.act.dim);
    REQUIRE(a2.group.order() == item.act.group.order());
  }
}

TEST_CASE("model round trip over the gallery and the mutants") {
  for (const auto& item : catalog::builtin_models()) {
    CAPTURE(item.name);
    std::string text = io::dump(io::model_to_json(item.model));
    auto m2 = io::model_from_json(io::parse_text(text));
    REQUIRE(io::dump(io::model_to_json(m2)) == text);
    REQUIRE(nearby::congruence_check(m2).holds);
  }
  for (const auto& item : catalog::builtin_mutated_models()) {
    CAPTURE(item.name);
    auto m2 = io::model_from_json(io::parse_text(io::dump(io::model_to_json(item.model))));
    REQUIRE_FALSE(nearby::congruence_check(m2).holds);
  }
}

TEST_CASE("parse errors carry the right code") {
  try {
    io::parse_text("{nope");
    FAIL("expected ParseError");
  } catch (const CalcError& e) {
    CHECK(e.code() == Errc::ParseError);
  }
  try {
    io::class_from_json(io::parse_text("{\"ring\": \"K9\", \"terms\": []}"));
    FAIL("expected ParseError");
  } catch (const CalcError& e) {
    CHECK(e.code() == Errc::ParseError);
  }
}

TEST_CASE("catalog composition") {
  auto actions = catalog::builtin_actions();
  CHECK(actions.size() >= 20);
  int twisted = 0;
  bool b_zero = false, frob = false, as = false;
  for (const auto& item : actions) {
    if (item.twisted) ++twisted;
    b_zero |= item.notes.find("branch:b-zero") != std::string::npos;
    frob |= item.notes.find("branch:frobenius-trivial") != std::string::npos;
    as |= item.notes.find("branch:artin-schreier") != std::string::npos;
  }
  CHECK(twisted >= 3);
  CHECK(b_zero);
  CHECK(frob);
  CHECK(as);
  // every abelian group of order <= 6 with factors from {2,3,4,5} appears
  std::set<std::multiset<long>> groups;
  for (const auto& item : actions) {
    std::multiset<long> sig;
    for (long w : item.act.group.wild_orders) sig.insert(w);
    for (long t : item.act.group.tame_orders) sig.insert(t);
    groups.insert(sig);
  }
  CHECK(groups.count({}) == 1);
  CHECK(groups.count({2}) == 1);
  CHECK(groups.count({3}) == 1);
  CHECK(groups.count({4}) == 1);
  CHECK(groups.count({5}) == 1);
  CHECK(groups.count({2, 2}) == 1);
  CHECK(groups.count({2, 3}) == 1);
  // towers over all four base fields
  std::set<long> bases;
  for (const auto& item : actions)
    bases.insert(item.act.tower.level_size(item.act.tower.k_index()).get_si());
  CHECK(bases == std::set<long>{2, 3, 4, 5});
  CHECK(catalog::builtin_models().size() >= 5);
  CHECK(catalog::builtin_mutated_models().size() >= 5);
}
