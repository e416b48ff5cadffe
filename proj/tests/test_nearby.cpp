#include <catch2/catch_amalgamated.hpp>

#include "motivic/nearby.hpp"

using namespace motivic;
using namespace motivic::nearby;
using mclass::LefschetzPoly;
using mclass::MotivicClass;
using mclass::RingTag;
using mclass::UVPoly;

TEST_CASE("crossing model: the three assembly values") {
  SncModel m = builders::crossing_xy2();
  // S_f = (L-1) + [cover] + (1-L)
  auto sf = nearby_fiber(m);
  CHECK(sf.tag() == RingTag::M_eq(2));
  {
    MotivicClass expect(RingTag::M_eq(2));
    expect.add_term(mclass::Monomial::single("E2cover"), LefschetzPoly::constant(1));
    CHECK(sf == expect);  // (L-1) and (1-L) cancel
  }
  // S_f/mu = L - 1
  auto sfq = nearby_fiber_quotient(m);
  CHECK(sfq == MotivicClass::lefschetz(RingTag::M()) - MotivicClass::one(RingTag::M()));
  // R(f) = 2L - 1 = -1 mod L
  auto rf = motivic_reduction(m);
  RingTag residue{mclass::RingBase::K0, false, 0, true};
  CHECK(rf == MotivicClass::constant(residue, -1));
}

TEST_CASE("crossing model congruence holds; corrupted data fails with witness") {
  SncModel m = builders::crossing_xy2();
  auto res = congruence_check(m);
  CHECK(res.holds);
  RingTag residue{mclass::RingBase::K0, false, 0, true};
  CHECK(res.lhs == MotivicClass::constant(residue, -1));

  // wrong intersection class: E12 declared 0 instead of 1
  SncModel bad = builders::crossing_xy2();
  bad.strata[2].class_E = MotivicClass::zero(RingTag::K0());
  auto res2 = congruence_check(bad);
  CHECK_FALSE(res2.holds);
  CHECK(res2.witness == MotivicClass::constant(residue, 1));
}

TEST_CASE("single component models") {
  SncModel m = builders::single_component();
  auto sfq = nearby_fiber_quotient(m);
  CHECK(sfq == MotivicClass::symbol(RingTag::M(), "F"));
  CHECK(congruence_check(m).holds);

  SncModel m3 = builders::single_component(3);
  CHECK(congruence_check(m3).holds);
}

TEST_CASE("symbolic two-component model is congruent for any exponents") {
  for (auto [a, b] : std::vector<std::pair<long, long>>{{2, 3}, {1, 2}, {4, 6}}) {
    SncModel m = builders::two_component_powers(a, b);
    auto res = congruence_check(m);
    CHECK(res.holds);
  }
}

TEST_CASE("triangle and chain models are congruent") {
  CHECK(congruence_check(builders::triangle()).holds);
  CHECK(congruence_check(builders::chain_246()).holds);
}

TEST_CASE("model validation rejects malformed data") {
  SncModel m = builders::crossing_xy2();
  m.strata.pop_back();  // missing stratum
  CHECK_THROWS_AS(validate_model(m), CalcError);

  SncModel wrong_m = builders::crossing_xy2();
  wrong_m.strata[1].m = 1;  // gcd over {E2} is 2
  CHECK_THROWS_AS(validate_model(wrong_m), CalcError);

  SncModel dup = builders::crossing_xy2();
  dup.strata[1].subset = {0};
  CHECK_THROWS_AS(validate_model(dup), CalcError);
}

TEST_CASE("m recomputation: gcd property on random multiplicities") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    long a = 1 + static_cast<long>(rng.below(12));
    long b = 1 + static_cast<long>(rng.below(12));
    SncModel m = builders::two_component_powers(a, b);
    for (const auto& st : m.strata) {
      // m divides every multiplicity over the subset...
      for (int i : st.subset) CHECK(m.components[i].multiplicity % st.m == 0);
      // ...and is the greatest such integer
      bool greatest = true;
      for (long cand = st.m + 1; cand <= 12; ++cand) {
        bool divides_all = true;
        for (int i : st.subset) divides_all &= m.components[i].multiplicity % cand == 0;
        greatest &= !divides_all;
      }
      CHECK(greatest);
    }
  }
}

TEST_CASE("declared total class is checked before reduction") {
  SncModel m = builders::crossing_xy2();
  RingTag k0 = RingTag::K0();
  m.total_class = MotivicClass::lefschetz(k0).scale(LefschetzPoly::constant(2)) -
                  MotivicClass::one(k0);  // 2L - 1, the true value
  CHECK_NOTHROW(motivic_reduction(m));
  m.total_class = MotivicClass::lefschetz(k0);  // wrong
  CHECK_THROWS_AS(motivic_reduction(m), CalcError);
}

TEST_CASE("blowup step identity") {
  RingTag k0 = RingTag::K0();
  // codim 1: replacement by [P^1] preserves the residue
  BlowupStep s1{1, MotivicClass::symbol(k0, "C"), MotivicClass::symbol(k0, "A"), std::nullopt};
  CHECK(blowup_step_identity(s1));
  // degenerate exponent 0: [P^0] = 1
  BlowupStep s0{1, MotivicClass::symbol(k0, "C"), MotivicClass::symbol(k0, "A"), 0};
  CHECK(blowup_step_identity(s0));
  // random classes, all codimensions 1..8
  SplitMix64 rng(77);
  for (int codim = 1; codim <= 8; ++codim) {
    for (int trial = 0; trial < 100; ++trial) {
      MotivicClass center(k0), ambient(k0);
      for (int t = 0; t < 3; ++t) {
        LefschetzPoly f;
        f.add_term(static_cast<int>(rng.below(5)), Integer(static_cast<long>(rng.below(9)) - 4));
        mclass::Monomial mono;
        if (rng.below(2)) mono = mclass::Monomial::single(rng.below(2) ? "C" : "D");
        center.add_term(mono, f);
        LefschetzPoly g;
        g.add_term(static_cast<int>(rng.below(5)), Integer(static_cast<long>(rng.below(9)) - 4));
        ambient.add_term(mono, g);
      }
      BlowupStep st{codim, center, ambient, std::nullopt};
      REQUIRE(blowup_step_identity(st));
    }
  }
}

TEST_CASE("realize the crossing model at q = 3") {
  SncModel m = builders::crossing_xy2();
  auto rep = realize_model(m, mclass::RealizationSpec::point_count(3));
  // S_f/mu = L - 1 -> 2, which is -1 mod 3
  CHECK(rep.nearby_quotient == UVPoly::constant(2));
  CHECK(rep.nearby_residue == UVPoly::constant(2));
  CHECK(rep.residues_match);
  CHECK(rep.shadow_ok);
  CHECK_FALSE(rep.generic_fiber_equiv_one);
}

TEST_CASE("realize a projective-line fiber: congruent to 1") {
  SncModel m = builders::projective_line_fiber();
  for (long q : {2L, 3L, 7L}) {
    auto rep = realize_model(m, mclass::RealizationSpec::point_count(q));
    CHECK(rep.reduction_pre == UVPoly::constant(q + 1));
    CHECK(rep.generic_fiber_equiv_one);
    CHECK(rep.reduction_equiv_one);
    CHECK(rep.shadow_ok);
  }
  auto hd = realize_model(m, mclass::RealizationSpec::hodge_deligne());
  // HD([P^1]) = 1 + uv
  CHECK(hd.reduction_pre == UVPoly::constant(1) + UVPoly::uv());
  CHECK(hd.generic_fiber_equiv_one);
  CHECK(hd.shadow_ok);
}

TEST_CASE("realization commutes with assembly") {
  SncModel m = builders::crossing_xy2();
  auto spec = mclass::RealizationSpec::point_count(5);
  auto lhs = mclass::realize(nearby_fiber_quotient(m), spec);
  UVPoly rhs;
  UVPoly one_minus_q = UVPoly::constant(1) - spec.L_image;
  for (const auto& st : m.strata) {
    UVPoly term = mclass::realize(st.class_E, spec);
    rhs = rhs + one_minus_q.pow(static_cast<unsigned>(st.subset.size() - 1)) * term;
  }
  CHECK(lhs == rhs);
}

TEST_CASE("five distinct mutations all break the congruence") {
  auto mutate = [](int which) {
    SncModel m = builders::crossing_xy2();
    RingTag k0 = RingTag::K0();
    switch (which) {
      case 0:  // intersection point dropped
        m.strata[2].class_E = MotivicClass::zero(k0);
        break;
      case 1:  // first stratum declared an affine line instead of a torus
        m.strata[0].class_E = MotivicClass::lefschetz(k0);
        break;
      case 2: {  // triangle with a doubled intersection point
        SncModel tri = builders::triangle();
        tri.strata[3].class_E = MotivicClass::constant(k0, 2);
        return tri;
      }
      case 3:  // intersection doubled
        m.strata[2].class_E = MotivicClass::constant(k0, 2);
        break;
      default:  // first cover corrupted away from its stratum class
        m.strata[0].class_E_cover = MotivicClass::lefschetz(k0);
        break;
    }
    return m;
  };
  for (int which = 0; which < 5; ++which) {
    CAPTURE(which);
    auto res = congruence_check(mutate(which));
    CHECK_FALSE(res.holds);
    CHECK_FALSE(res.witness.is_zero());
  }
}
