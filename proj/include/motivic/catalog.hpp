#pragma once

// The bundled action catalog and SNC model gallery.
//
// The catalog spans every abelian group of order at most 6 built from cyclic
// factors of order 2, 3, 4, 5 over towers with base F_2, F_3, F_4, F_5 and
// relative degree up to 2, including all three descent branches of the
// one-dimensional wild case and several semi-linearly twisted actions.
// Every item validates; the verification harness checks the symbolic
// quotient class against the orbit-counting oracle on each of them.

#include <string>
#include <vector>

#include "motivic/action.hpp"
#include "motivic/nearby.hpp"

namespace motivic::catalog {

struct CatalogAction {
  std::string name;
  action::Action act;
  std::string notes;
  bool twisted = false;
};

namespace detail {

inline action::Action base(int p, std::vector<int> steps, int dim,
                           action::AbelianGroupSpec group) {
  action::Action a;
  a.tower = gfq::FieldTower(p, std::move(steps));
  a.dim = dim;
  a.group = std::move(group);
  return a;
}

inline action::Generator gen_ints(const action::Action& a, long twist, std::vector<long> matrix,
                                  std::vector<long> translation, long order) {
  action::Generator g;
  g.twist = twist;
  int K = a.tower.K_index();
  for (long v : matrix) g.matrix.push_back(a.tower.from_int(K, v));
  for (long v : translation) g.translation.push_back(a.tower.from_int(K, v));
  g.declared_order = order;
  return g;
}

inline action::Generator gen_elems(long twist, std::vector<gfq::FieldElement> matrix,
                                   std::vector<gfq::FieldElement> translation, long order) {
  action::Generator g;
  g.twist = twist;
  g.matrix = std::move(matrix);
  g.translation = std::move(translation);
  g.declared_order = order;
  return g;
}

}  // namespace detail

inline std::vector<CatalogAction> builtin_actions() {
  using detail::base;
  using detail::gen_elems;
  using detail::gen_ints;
  std::vector<CatalogAction> out;

  auto add = [&](std::string name, action::Action a, std::string notes, bool twisted = false) {
    auto rep = action::validate(a);
    require(rep.valid(), Errc::Internal, "catalog item '" + name + "': " + rep.summary());
    out.push_back({std::move(name), std::move(a), std::move(notes), twisted});
  };

  // trivial groups
  add("trivial-f2-d1", base(2, {1}, 1, {{}, {}}), "trivial group");
  add("trivial-f5-d2", base(5, {1}, 2, {{}, {}}), "trivial group, d=2");

  // Z/2 tame
  {
    action::Action a = base(3, {1}, 1, {{}, {2}});
    a.generators.push_back(gen_ints(a, 0, {2}, {0}, 2));
    add("sign-f3-d1", std::move(a), "tame Z/2, sign action");
  }
  {
    action::Action a = base(5, {1}, 1, {{}, {2}});
    a.generators.push_back(gen_ints(a, 0, {4}, {0}, 2));
    add("sign-f5-d1", std::move(a), "tame Z/2, sign action");
  }
  {
    action::Action a = base(5, {1}, 1, {{}, {2}});
    a.generators.push_back(gen_ints(a, 0, {4}, {2}, 2));
    add("sign-shifted-f5-d1", std::move(a), "tame Z/2 with translation (recentering)");
  }
  {
    action::Action a = base(5, {1}, 2, {{}, {2}});
    a.generators.push_back(gen_ints(a, 0, {0, 1, 1, 0}, {0, 0}, 2));
    add("swap-f5-d2", std::move(a), "tame Z/2 swapping coordinates (eigenbasis)");
  }
  {
    action::Action a = base(5, {1}, 2, {{}, {2}});
    a.generators.push_back(gen_ints(a, 0, {4, 0, 0, 4}, {0, 0}, 2));
    add("negation-f5-d2", std::move(a), "tame Z/2 negating the plane");
  }

  // wild translations on the line: the frobenius-trivial branch
  for (int p : {2, 3, 5}) {
    action::Action a = base(p, {1}, 1, {{p}, {}});
    a.generators.push_back(gen_ints(a, 0, {1}, {1}, p));
    add("translation-f" + std::to_string(p) + "-d1", std::move(a),
        "wild Z/" + std::to_string(p) + ", branch:frobenius-trivial");
  }

  // wild shears on the plane
  for (int p : {2, 3}) {
    action::Action a = base(p, {1}, 2, {{p}, {}});
    a.generators.push_back(gen_ints(a, 0, {1, 0, 1, 1}, {0, 0}, p));
    add("shear-f" + std::to_string(p) + "-d2", std::move(a),
        "wild Z/" + std::to_string(p) + " shear");
  }

  // twisted wild Z/2 over F_4/F_2: pure Galois and Artin-Schreier branches
  {
    action::Action a = base(2, {1, 2}, 1, {{2}, {}});
    a.generators.push_back(gen_ints(a, 1, {1}, {0}, 2));
    add("galois-f4-d1", std::move(a), "wild Z/2, branch:b-zero", true);
  }
  {
    action::Action a = base(2, {1, 2}, 1, {{2}, {}});
    a.generators.push_back(gen_ints(a, 1, {1}, {1}, 2));
    add("artin-schreier-f4-d1", std::move(a), "wild Z/2, branch:artin-schreier", true);
  }

  // twisted wild Z/4 over F_4/F_2: composes both wild branches
  {
    action::Action a = base(2, {1, 2}, 1, {{4}, {}});
    int K = a.tower.K_index();
    a.generators.push_back(gen_elems(1, {a.tower.one(K)}, {a.tower.generator(K)}, 4));
    add("wild-z4-f4-d1", std::move(a),
        "wild Z/4, branch:frobenius-trivial then branch:artin-schreier", true);
  }

  // Klein four group, wild and twisted over F_4/F_2
  {
    action::Action a = base(2, {1, 2}, 1, {{2, 2}, {}});
    a.generators.push_back(gen_ints(a, 1, {1}, {1}, 2));
    a.generators.push_back(gen_ints(a, 0, {1}, {1}, 2));
    add("klein-wild-f4-d1", std::move(a), "wild Z/2 x Z/2, mixed twists", true);
  }
  // Klein four group, tame
  {
    action::Action a = base(5, {1}, 2, {{}, {2, 2}});
    a.generators.push_back(gen_ints(a, 0, {4, 0, 0, 1}, {0, 0}, 2));
    a.generators.push_back(gen_ints(a, 0, {1, 0, 0, 4}, {0, 0}, 2));
    add("klein-tame-f5-d2", std::move(a), "tame Z/2 x Z/2, separate signs");
  }
  {
    action::Action a = base(3, {1}, 2, {{}, {2, 2}});
    a.generators.push_back(gen_ints(a, 0, {2, 0, 0, 1}, {0, 0}, 2));
    a.generators.push_back(gen_ints(a, 0, {1, 0, 0, 2}, {0, 0}, 2));
    add("klein-tame-f3-d2", std::move(a), "tame Z/2 x Z/2 over F_3");
  }

  // Z/4
  {
    action::Action a = base(5, {1}, 1, {{}, {4}});
    a.generators.push_back(gen_ints(a, 0, {2}, {0}, 4));
    add("z4-tame-f5-d1", std::move(a), "tame Z/4, primitive fourth root");
  }
  {
    action::Action a = base(2, {1}, 2, {{4}, {}});
    a.generators.push_back(gen_ints(a, 0, {1, 0, 1, 1}, {1, 0}, 4));
    add("wild-z4-shear-f2-d2", std::move(a), "wild Z/4 shear with translation");
  }

  // Z/5 wild over F_5 (the heaviest enumeration in the catalog)
  {
    action::Action a = base(5, {1}, 1, {{5}, {}});
    a.generators.push_back(gen_ints(a, 0, {1}, {1}, 5));
    add("translation-z5-f5-d1", std::move(a), "wild Z/5, branch:frobenius-trivial");
  }

  // Z/6 = wild Z/3 x tame Z/2 over F_9/F_3, both generators entangled
  {
    action::Action a = base(3, {1, 2}, 1, {{3}, {2}});
    int K = a.tower.K_index();
    gfq::FieldElement t = a.tower.generator(K);
    a.generators.push_back(gen_elems(0, {a.tower.one(K)}, {t}, 3));
    a.generators.push_back(gen_elems(1, {a.tower.pow(t, 2)}, {a.tower.zero(K)}, 2));
    add("z6-twisted-f9-d1", std::move(a), "wild Z/3 x tame Z/2, twisted", true);
  }

  // tame Z/2 over F_9/F_3 with twist
  {
    action::Action a = base(3, {1, 2}, 1, {{}, {2}});
    a.generators.push_back(gen_ints(a, 1, {2}, {0}, 2));
    add("sign-twisted-f9-d1", std::move(a), "tame Z/2 with Frobenius twist", true);
  }
  {
    action::Action a = base(3, {1, 2}, 1, {{}, {2}});
    a.generators.push_back(gen_ints(a, 1, {1}, {0}, 2));
    add("galois-f9-d1", std::move(a), "tame Z/2, pure Galois action", true);
  }

  // Z/3 tame over F_4 (third roots of unity in the base field)
  {
    action::Action a = base(2, {2}, 1, {{}, {3}});
    int K = a.tower.K_index();
    a.generators.push_back(gen_elems(0, {a.tower.generator(K)}, {a.tower.zero(K)}, 3));
    add("z3-tame-f4-d1", std::move(a), "tame Z/3 over F_4");
  }

  // towers with base F_4: wild Z/2 over F_16/F_4
  {
    action::Action a = base(2, {2, 2}, 1, {{2}, {}});
    a.generators.push_back(gen_ints(a, 1, {1}, {0}, 2));
    add("galois-f16-d1", std::move(a), "wild Z/2 over F_16/F_4, branch:b-zero", true);
  }
  {
    action::Action a = base(2, {2, 2}, 1, {{2}, {}});
    int K = a.tower.K_index();
    int k = a.tower.k_index();
    // translation in F_4 (the trace kernel), so the twisted generator has order 2
    gfq::FieldElement b = a.tower.embed(a.tower.generator(k), K);
    a.generators.push_back(gen_elems(1, {a.tower.one(K)}, {b}, 2));
    add("artin-schreier-f16-d1", std::move(a),
        "wild Z/2 over F_16/F_4, branch:artin-schreier", true);
  }

  return out;
}

struct CatalogModel {
  std::string name;
  nearby::SncModel model;
};

inline std::vector<CatalogModel> builtin_models() {
  std::vector<CatalogModel> out;
  out.push_back({"crossing-xy2", nearby::builders::crossing_xy2()});
  out.push_back({"single-reduced", nearby::builders::single_component(1)});
  out.push_back({"single-triple", nearby::builders::single_component(3)});
  out.push_back({"powers-x2y3", nearby::builders::two_component_powers(2, 3)});
  out.push_back({"triangle", nearby::builders::triangle()});
  out.push_back({"chain-246", nearby::builders::chain_246()});
  out.push_back({"projective-line", nearby::builders::projective_line_fiber()});
  return out;
}

struct MutatedModel {
  std::string name;
  nearby::SncModel model;
  std::string description;
};

// negative controls: structurally valid models whose declared classes are
// inconsistent, so the congruence check must fail on each
inline std::vector<MutatedModel> builtin_mutated_models() {
  using mclass::MotivicClass;
  using mclass::RingTag;
  RingTag k0 = RingTag::K0();
  std::vector<MutatedModel> out;
  {
    auto m = nearby::builders::crossing_xy2();
    m.strata[2].class_E = MotivicClass::zero(k0);
    out.push_back({"crossing-missing-point", std::move(m), "intersection class dropped to 0"});
  }
  {
    auto m = nearby::builders::crossing_xy2();
    m.strata[0].class_E = MotivicClass::lefschetz(k0);
    out.push_back({"crossing-line-not-torus", std::move(m),
                   "first stratum declared L instead of L-1"});
  }
  {
    auto m = nearby::builders::crossing_xy2();
    m.strata[2].class_E = MotivicClass::constant(k0, 2);
    out.push_back({"crossing-doubled-point", std::move(m), "intersection class doubled"});
  }
  {
    auto m = nearby::builders::crossing_xy2();
    m.strata[0].class_E_cover = MotivicClass::lefschetz(k0);
    out.push_back({"crossing-bad-cover", std::move(m),
                   "first cover no longer matches its stratum"});
  }
  {
    auto m = nearby::builders::triangle();
    m.strata[3].class_E = MotivicClass::constant(k0, 2);
    out.push_back({"triangle-doubled-point", std::move(m),
                   "one pairwise intersection declared twice"});
  }
  return out;
}

}  // namespace motivic::catalog
