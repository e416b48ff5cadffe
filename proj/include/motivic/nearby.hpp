#pragma once

// Motivic nearby fiber and motivic reduction from declared SNC data.
//
// A model lists components E_i with multiplicities N_i and, for every
// nonempty subset I, the class of the open stratum E_I^o together with the
// class of its mu_{m_I}-cover, m_I = gcd of the multiplicities over I.
// Strata classes are inputs: the chart-level construction of the covers is
// resolution machinery and out of scope here; the assembly formulas consume
// exactly this combinatorial data.
//
//   S_f       = sum over I of (1-L)^{|I|-1} [cover of E_I^o]   (equivariant)
//   S_f / mu  = the quotient homomorphism applied to S_f
//   R(f)      = sum over I of [E_I^o], reduced mod L
//
// congruence_check verifies S_f/mu = R(f) mod L; on well-formed models this
// is a theorem, so a failure is a certificate that the declared data is
// inconsistent (the witness is the nonzero difference).

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "motivic/common.hpp"
#include "motivic/mclass.hpp"
#include "motivic/quotient.hpp"

namespace motivic::nearby {

using mclass::MotivicClass;
using mclass::RingTag;
using mclass::SymbolTable;

struct SncComponent {
  std::string name;
  long multiplicity = 1;
};

struct Stratum {
  std::vector<int> subset;       // component indices, sorted ascending
  MotivicClass class_E;          // plain class of E_I^o, tagged K0
  MotivicClass class_E_cover;    // class of the cover, tagged K0_mu{m} (or K0 when m = 1)
  long m = 1;                    // declared gcd of multiplicities over I
};

struct SncModel {
  std::vector<SncComponent> components;
  std::vector<Stratum> strata;  // one per nonempty subset of the components
  std::optional<MotivicClass> total_class;  // declared class of h^{-1}(X_0), if any
  SymbolTable symbols;          // session table for the stratum symbols
};

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

inline long subset_gcd(const SncModel& model, const std::vector<int>& subset) {
  long g = 0;
  for (int i : subset) g = std::gcd(g, model.components[i].multiplicity);
  return g;
}

// Structural checks: every nonempty subset of the components is declared
// exactly once (empty strata must carry class 0 explicitly), the declared
// m equals the recomputed gcd, and cover tags are coherent.  Whether each
// declared cover really quotients to its stratum is the congruence check's
// business, not validation's.
inline void validate_model(const SncModel& model) {
  size_t nc = model.components.size();
  require(nc >= 1, Errc::ModelInvalid, "model needs at least one component");
  require(nc <= 16, Errc::ModelInvalid, "too many components");
  std::set<std::string> names;
  for (const auto& c : model.components) {
    require(c.multiplicity >= 1, Errc::ModelInvalid,
            "component '" + c.name + "' has nonpositive multiplicity");
    require(names.insert(c.name).second, Errc::ModelInvalid,
            "duplicate component name '" + c.name + "'");
  }
  std::set<std::vector<int>> seen;
  for (const auto& st : model.strata) {
    require(!st.subset.empty(), Errc::ModelInvalid, "stratum with empty index set");
    require(std::is_sorted(st.subset.begin(), st.subset.end()) &&
                std::adjacent_find(st.subset.begin(), st.subset.end()) == st.subset.end(),
            Errc::ModelInvalid, "stratum index set must be strictly increasing");
    for (int i : st.subset)
      require(i >= 0 && static_cast<size_t>(i) < nc, Errc::ModelInvalid,
              "stratum index out of range");
    require(seen.insert(st.subset).second, Errc::ModelInvalid, "duplicate stratum");
    long g = subset_gcd(model, st.subset);
    require(st.m == g, Errc::ModelInvalid,
            "stratum m = " + std::to_string(st.m) + " but gcd of multiplicities is " +
                std::to_string(g));
    // tags: E plain K0; cover K0 when m = 1, K0_mu{m} otherwise
    require(st.class_E.tag() == RingTag::K0(), Errc::ModelInvalid,
            "stratum class must be tagged K0");
    RingTag want = st.m == 1 ? RingTag::K0() : RingTag::K0_eq(st.m);
    require(st.class_E_cover.tag() == want, Errc::ModelInvalid,
            "cover class must be tagged " + want.to_string());
    // cover grammar: symbol-free, or a single equivariant symbol
    int acted = 0;
    for (const auto& [mono, coeff] : st.class_E_cover.body())
      for (const auto& s : mono.syms)
        if (model.symbols.known(s) && model.symbols.info(s).action_tag > 0) ++acted;
    if (acted > 0) {
      require(acted == 1 && st.class_E_cover.body().size() == 1, Errc::ModelInvalid,
              "cover class must be a single equivariant symbol or symbol-free");
      const auto& [mono, coeff] = *st.class_E_cover.body().begin();
      require(mono.syms.size() == 1 && coeff == mclass::LefschetzPoly::constant(1),
              Errc::ModelInvalid, "cover class must be a bare equivariant symbol");
      require(model.symbols.info(mono.syms[0]).action_tag == st.m, Errc::ModelInvalid,
              "cover symbol carries the wrong action tag");
    }
  }
  size_t expect = (static_cast<size_t>(1) << nc) - 1;
  require(model.strata.size() == expect, Errc::ModelInvalid,
          "expected " + std::to_string(expect) + " strata (declare empty ones with class 0), got " +
              std::to_string(model.strata.size()));
}

// ---------------------------------------------------------------------------
// assembly
// ---------------------------------------------------------------------------

inline long cover_tag_lcm(const SncModel& model) {
  long l = 1;
  for (const auto& st : model.strata) l = std::lcm(l, st.m);
  return l;
}

// S_f = sum (1-L)^{|I|-1} [cover], in the localized equivariant ring tagged
// with the lcm of the stratum tags
inline MotivicClass nearby_fiber(const SncModel& model) {
  validate_model(model);
  RingTag out = RingTag::M_eq(cover_tag_lcm(model));
  MotivicClass acc(out);
  mclass::LefschetzPoly one_minus_L =
      mclass::LefschetzPoly::constant(1) - mclass::LefschetzPoly::L();
  for (const auto& st : model.strata) {
    MotivicClass term = st.class_E_cover.coerce(out);
    acc = acc + term.scale(one_minus_L.pow(static_cast<unsigned>(st.subset.size() - 1)));
  }
  return acc;
}

// declared quotient rules: each bare cover symbol maps to its stratum class
inline quotient::QuotientRules model_quotient_rules(const SncModel& model) {
  quotient::QuotientRules rules;
  for (const auto& st : model.strata) {
    for (const auto& [mono, coeff] : st.class_E_cover.body())
      for (const auto& s : mono.syms)
        if (model.symbols.known(s) && model.symbols.info(s).action_tag > 0)
          rules.images.emplace(s, st.class_E);
  }
  return rules;
}

// S_f / mu: the quotient homomorphism applied to the nearby fiber with the
// model's declared cover rules
inline MotivicClass nearby_fiber_quotient(const SncModel& model) {
  MotivicClass sf = nearby_fiber(model);
  return quotient::quotient_homomorphism(sf, model.symbols, model_quotient_rules(model));
}

// R(f): the strata partition h^{-1}(X_0), so its class is the plain sum of
// the stratum classes; reduced mod L
inline MotivicClass motivic_reduction(const SncModel& model) {
  validate_model(model);
  MotivicClass acc(RingTag::K0());
  for (const auto& st : model.strata) acc = acc + st.class_E;
  if (model.total_class.has_value()) {
    MotivicClass declared = model.total_class->canonicalize(model.symbols);
    require(declared == acc.canonicalize(model.symbols), Errc::TotalClassMismatch,
            "declared total class " + model.total_class->to_string() +
                " does not match the stratum sum " + acc.to_string());
  }
  return acc.mod_L();
}

struct CongruenceResult {
  bool holds = false;
  MotivicClass lhs;      // S_f/mu reduced mod L
  MotivicClass rhs;      // R(f)
  MotivicClass witness;  // lhs - rhs
};

// mod L, the quotient of the nearby fiber equals the motivic reduction;
// false (with witness) certifies inconsistent declared data
inline CongruenceResult congruence_check(const SncModel& model) {
  CongruenceResult res;
  MotivicClass sfq = nearby_fiber_quotient(model);
  // the quotient lands in M; reduction needs the class visibly in K0
  res.lhs = sfq.mod_L().canonicalize(model.symbols);
  res.rhs = motivic_reduction(model).canonicalize(model.symbols);
  res.witness = res.lhs - res.rhs;
  res.holds = res.witness.is_zero();
  return res;
}

// ---------------------------------------------------------------------------
// blowup step identity
// ---------------------------------------------------------------------------

struct BlowupStep {
  int codim = 1;
  MotivicClass center_class;
  MotivicClass ambient_class;
  // The replacement inserts [P^e] copies of the center.  The bookkeeping
  // exponent e is a parameter (default: the codimension); any e >= 0 gives
  // [P^e] = 1 mod L, so the residue statement is insensitive to the choice.
  std::optional<int> exponent;
};

// ambient - center + [P^e] center = ambient mod L: the difference is
// ([P^e] - 1) center = (L + ... + L^e) center, visibly divisible by L
inline bool blowup_step_identity(const BlowupStep& s) {
  require(s.codim >= 1, Errc::ParseError, "codimension must be positive");
  int e = s.exponent.value_or(s.codim);
  require(e >= 0, Errc::ParseError, "exponent must be nonnegative");
  mclass::LefschetzPoly proj;  // [P^e] = 1 + L + ... + L^e
  for (int i = 0; i <= e; ++i) proj.add_term(i, 1);
  MotivicClass replaced =
      s.ambient_class - s.center_class + s.center_class.scale(proj);
  MotivicClass diff = replaced - s.ambient_class;
  for (const auto& [mono, coeff] : diff.body())
    if (coeff.min_exponent() < 1) return false;
  return true;
}

// ---------------------------------------------------------------------------
// realization report
// ---------------------------------------------------------------------------

struct RealizedModelReport {
  mclass::UVPoly L_image;
  mclass::UVPoly nearby_quotient;       // realized S_f/mu
  mclass::UVPoly reduction_pre;         // realized stratum sum (before mod L)
  mclass::UVPoly nearby_residue;        // realized S_f/mu taken mod L_image
  mclass::UVPoly reduction_residue;     // realized reduction mod L_image
  bool residues_match = false;
  bool generic_fiber_equiv_one = false; // realized S_f/mu = 1 mod L_image
  bool reduction_equiv_one = false;     // realized R(f) = 1 mod L_image
  bool shadow_ok = false;               // generic = 1 forces reduction = 1
};

namespace detail {

// residue of a uv-polynomial modulo the realized Lefschetz class: modulo the
// integer q for point counts, modulo the ideal (uv) for Hodge-Deligne
inline mclass::UVPoly residue_mod_L(const mclass::UVPoly& v, const mclass::UVPoly& L_image) {
  using mclass::UVPoly;
  if (L_image.is_constant()) {
    Integer q = L_image.constant_value();
    require(q != 0, Errc::ParseError, "realization of L must be nonzero");
    UVPoly out;
    for (const auto& [e, c] : v.terms) {
      Integer r = c % q;
      if (r < 0) r += (q < 0 ? -q : q);
      out.add_term(e.first, e.second, r);
    }
    return out;
  }
  require(L_image == UVPoly::uv(), Errc::ParseError,
          "only integer and uv realizations of L are supported");
  UVPoly out;
  for (const auto& [e, c] : v.terms)
    if (e.first == 0 || e.second == 0) out.add_term(e.first, e.second, c);
  return out;
}

}  // namespace detail

// Realize S_f/mu and the reduction, reduce both modulo the realized L, and
// check the residue shadow: a generic fiber congruent to 1 forces the
// reduction to be congruent to 1.
inline RealizedModelReport realize_model(const SncModel& model,
                                         const mclass::RealizationSpec& spec) {
  RealizedModelReport rep;
  rep.L_image = spec.L_image;
  rep.nearby_quotient = mclass::realize(nearby_fiber_quotient(model), spec);
  MotivicClass pre(RingTag::K0());
  for (const auto& st : model.strata) pre = pre + st.class_E;
  rep.reduction_pre = mclass::realize(pre, spec);
  rep.nearby_residue = detail::residue_mod_L(rep.nearby_quotient, spec.L_image);
  rep.reduction_residue = detail::residue_mod_L(rep.reduction_pre, spec.L_image);
  rep.residues_match = rep.nearby_residue == rep.reduction_residue;
  auto one_res = detail::residue_mod_L(mclass::UVPoly::constant(1), spec.L_image);
  rep.generic_fiber_equiv_one = rep.nearby_residue == one_res;
  rep.reduction_equiv_one = rep.reduction_residue == one_res;
  rep.shadow_ok = !rep.generic_fiber_equiv_one || rep.reduction_equiv_one;
  return rep;
}

// ---------------------------------------------------------------------------
// model builders used by the bundled gallery and the tests
// ---------------------------------------------------------------------------

namespace builders {

// f = x y^2 on A^2: two lines with multiplicities 1 and 2 meeting in a
// point; the double cover of the second stratum stays a torus
inline SncModel crossing_xy2() {
  SncModel m;
  m.components = {{"E1", 1}, {"E2", 2}};
  RingTag k0 = RingTag::K0();
  m.symbols.declare("E2cover", 2, "double cover of the punctured second component");
  auto torus = MotivicClass::lefschetz(k0) - MotivicClass::one(k0);
  Stratum s1{{0}, torus, torus, 1};
  Stratum s2{{1}, torus, MotivicClass::symbol(RingTag::K0_eq(2), "E2cover"), 2};
  Stratum s12{{0, 1}, MotivicClass::one(k0), MotivicClass::one(k0), 1};
  m.strata = {s1, s2, s12};
  return m;
}

// one smooth reduced component with a symbolic stratum class
inline SncModel single_component(long multiplicity = 1) {
  SncModel m;
  m.components = {{"E1", multiplicity}};
  RingTag k0 = RingTag::K0();
  m.symbols.declare("F", 0, "class of the single stratum");
  MotivicClass f = MotivicClass::symbol(k0, "F");
  if (multiplicity == 1) {
    m.strata = {Stratum{{0}, f, f, 1}};
  } else {
    m.symbols.declare("Fcover", multiplicity, "cover of the single stratum");
    m.strata = {Stratum{{0}, f,
                        MotivicClass::symbol(RingTag::K0_eq(multiplicity), "Fcover"),
                        multiplicity}};
  }
  return m;
}

// f = x^a y^b with symbolic strata
inline SncModel two_component_powers(long a, long b) {
  SncModel m;
  m.components = {{"E1", a}, {"E2", b}};
  RingTag k0 = RingTag::K0();
  long m12 = std::gcd(a, b);
  auto sym = [&](const std::string& name, long tag) {
    m.symbols.declare(name, tag);
    return MotivicClass::symbol(tag > 1 ? RingTag::K0_eq(tag) : k0, name);
  };
  MotivicClass e1 = sym("S1", 0), e2 = sym("S2", 0), e12 = sym("S12", 0);
  MotivicClass c1 = a > 1 ? sym("S1cover", a) : e1;
  MotivicClass c2 = b > 1 ? sym("S2cover", b) : e2;
  MotivicClass c12 = m12 > 1 ? sym("S12cover", m12) : e12;
  m.strata = {Stratum{{0}, e1, c1, a}, Stratum{{1}, e2, c2, b}, Stratum{{0, 1}, e12, c12, m12}};
  return m;
}

// three reduced lines meeting pairwise in three distinct points
inline SncModel triangle() {
  SncModel m;
  m.components = {{"E1", 1}, {"E2", 1}, {"E3", 1}};
  RingTag k0 = RingTag::K0();
  auto torus = MotivicClass::lefschetz(k0) - MotivicClass::one(k0);
  auto pt = MotivicClass::one(k0);
  auto zero = MotivicClass::zero(k0);
  m.strata = {
      Stratum{{0}, torus, torus, 1},    Stratum{{1}, torus, torus, 1},
      Stratum{{2}, torus, torus, 1},    Stratum{{0, 1}, pt, pt, 1},
      Stratum{{0, 2}, pt, pt, 1},       Stratum{{1, 2}, pt, pt, 1},
      Stratum{{0, 1, 2}, zero, zero, 1},
  };
  return m;
}

// chain E1 - E2 - E3 with multiplicities (2, 4, 6): nontrivial m_I on every
// stratum, the far intersection empty
inline SncModel chain_246() {
  SncModel m;
  m.components = {{"E1", 2}, {"E2", 4}, {"E3", 6}};
  RingTag k0 = RingTag::K0();
  auto cover_sym = [&](const std::string& name, long tag) {
    m.symbols.declare(name, tag);
    return MotivicClass::symbol(RingTag::K0_eq(tag), name);
  };
  auto aff = MotivicClass::lefschetz(k0);               // E2 open stratum: an affine line
  auto torus = MotivicClass::lefschetz(k0) - MotivicClass::one(k0);
  auto pt = MotivicClass::one(k0);
  auto zero = MotivicClass::zero(k0);
  MotivicClass zero2 = MotivicClass::zero(RingTag::K0_eq(2));
  m.strata = {
      Stratum{{0}, torus, cover_sym("C1", 2), 2},
      Stratum{{1}, aff, cover_sym("C2", 4), 4},
      Stratum{{2}, torus, cover_sym("C3", 6), 6},
      Stratum{{0, 1}, pt, cover_sym("C12", 2), 2},
      Stratum{{0, 2}, zero, zero2, 2},
      Stratum{{1, 2}, pt, cover_sym("C23", 2), 2},
      Stratum{{0, 1, 2}, zero, zero2, 2},
  };
  return m;
}

// a fiber that is a smooth projective line: reduction congruent to 1
inline SncModel projective_line_fiber() {
  SncModel m;
  m.components = {{"E1", 1}};
  RingTag k0 = RingTag::K0();
  auto p1 = MotivicClass::one(k0) + MotivicClass::lefschetz(k0);
  m.strata = {Stratum{{0}, p1, p1, 1}};
  return m;
}

}  // namespace builders

}  // namespace motivic::nearby
