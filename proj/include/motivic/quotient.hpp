#pragma once

// The quotient engine.
//
// * invariant_ring_d1 computes K[x]^G = k'[y] for a normalized semi-linear
//   affine action on the line, descending through order-p subgroups.  Each
//   descent lands in one of three cases: the subgroup generator translates
//   by 0 (pure Galois descent), it translates by b != 0 while acting
//   trivially on K (substitute y = x + (p-1) b^{1-p} x^p), or it acts on K
//   through an Artin-Schreier extension (substitute y = x - z for the
//   eigencomponent z of a chain coefficient).  The pure tame remainder is
//   solved degree by degree.  Every step is recorded in a replayable trace.
//
// * quotient_class returns L^d with a certificate: the fibration descent
//   down to the line plus the full d=1 case analysis on the base line.
//
// * orbit_count_oracle counts |(V/G)(F_{q^m})| as the number of
//   Frobenius^m-stable G-orbits by exhaustive enumeration of the subfields
//   that can carry stable orbits.  orbit_count_burnside computes the same
//   number by the counting lemma, solving one F_p-affine system per group
//   element; it scales past the enumeration budget and cross-checks the
//   enumeration on small inputs.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "motivic/action.hpp"
#include "motivic/common.hpp"
#include "motivic/gfq.hpp"
#include "motivic/mclass.hpp"

namespace motivic::quotient {

using action::Action;
using action::Generator;
using gfq::FieldElement;
using gfq::FieldTower;
using gfq::LevelPoly;
using gfq::MatFp;

// ---------------------------------------------------------------------------
// multivariate polynomials over a tower level
// ---------------------------------------------------------------------------

struct MultiPoly {
  int level = 0;
  int nvars = 0;
  std::map<std::vector<int>, FieldElement> terms;

  static MultiPoly zero(int level, int nvars) { return MultiPoly{level, nvars, {}}; }

  static MultiPoly constant(const FieldTower& t, int level, int nvars, FieldElement c) {
    MultiPoly f{level, nvars, {}};
    if (!t.is_zero(c)) f.terms[std::vector<int>(nvars, 0)] = std::move(c);
    return f;
  }

  static MultiPoly variable(const FieldTower& t, int level, int nvars, int i, int power = 1) {
    MultiPoly f{level, nvars, {}};
    std::vector<int> e(nvars, 0);
    e[i] = power;
    f.terms[e] = t.one(level);
    return f;
  }

  bool is_zero() const { return terms.empty(); }
};

inline MultiPoly mp_add(const FieldTower& t, const MultiPoly& a, const MultiPoly& b) {
  MultiPoly r = a;
  for (const auto& [e, c] : b.terms) {
    auto it = r.terms.find(e);
    if (it == r.terms.end()) {
      r.terms.emplace(e, c);
    } else {
      it->second = t.add(it->second, c);
      if (t.is_zero(it->second)) r.terms.erase(it);
    }
  }
  return r;
}

inline MultiPoly mp_scale(const FieldTower& t, const MultiPoly& a, const FieldElement& s) {
  MultiPoly r{a.level, a.nvars, {}};
  if (t.is_zero(s)) return r;
  for (const auto& [e, c] : a.terms) {
    FieldElement v = t.mul(c, s);
    if (!t.is_zero(v)) r.terms[e] = v;
  }
  return r;
}

inline MultiPoly mp_mul(const FieldTower& t, const MultiPoly& a, const MultiPoly& b) {
  MultiPoly r{a.level, a.nvars, {}};
  for (const auto& [ea, ca] : a.terms)
    for (const auto& [eb, cb] : b.terms) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      FieldElement v = t.mul(ca, cb);
      auto it = r.terms.find(e);
      if (it == r.terms.end()) {
        if (!t.is_zero(v)) r.terms.emplace(std::move(e), std::move(v));
      } else {
        it->second = t.add(it->second, v);
        if (t.is_zero(it->second)) r.terms.erase(it);
      }
    }
  return r;
}

inline MultiPoly mp_pow(const FieldTower& t, const MultiPoly& a, int k) {
  MultiPoly r = MultiPoly::constant(t, a.level, a.nvars, t.one(a.level));
  for (int i = 0; i < k; ++i) r = mp_mul(t, r, a);
  return r;
}

inline bool mp_equal(const FieldTower& t, const MultiPoly& a, const MultiPoly& b) {
  if (a.terms.size() != b.terms.size()) return false;
  auto ia = a.terms.begin();
  auto ib = b.terms.begin();
  for (; ia != a.terms.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!t.equal(ia->second, ib->second)) return false;
  }
  return true;
}

// apply a generator on the coordinate ring: x_i -> sum_j A_ij x_j + a_i,
// coefficients through the twist
inline MultiPoly mp_substitute(const Action& act, const Generator& g, const MultiPoly& f) {
  const FieldTower& t = act.tower;
  int d = act.dim;
  std::vector<MultiPoly> image;
  image.reserve(d);
  for (int i = 0; i < d; ++i) {
    MultiPoly gi = MultiPoly::constant(t, f.level, d, t.embed(g.translation[i], f.level));
    for (int j = 0; j < d; ++j) {
      FieldElement coef = t.embed(g.matrix[static_cast<size_t>(i) * d + j], f.level);
      gi = mp_add(t, gi, mp_scale(t, MultiPoly::variable(t, f.level, d, j), coef));
    }
    image.push_back(std::move(gi));
  }
  MultiPoly out = MultiPoly::zero(f.level, d);
  for (const auto& [e, c] : f.terms) {
    MultiPoly term =
        MultiPoly::constant(t, f.level, d, t.frobenius_q(c, g.twist));
    for (int i = 0; i < d; ++i)
      if (e[i] > 0) term = mp_mul(t, term, mp_pow(t, image[i], e[i]));
    out = mp_add(t, out, term);
  }
  return out;
}

// true iff every generator of the action fixes the polynomial
inline bool invariant_check(const MultiPoly& f, const Action& a) {
  for (const auto& g : a.generators)
    if (!mp_equal(a.tower, mp_substitute(a, g, f), f)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// computation trace
// ---------------------------------------------------------------------------

struct TraceStep {
  std::string kind;  // subgroup-descent | case-b-zero | case-frobenius-trivial |
                     // case-artin-schreier | eigencomponent-fix | tame-base |
                     // fibration-descent
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<LevelPoly> subst;  // coordinate change y = subst(x), level = current K
};

struct ComputationTrace {
  std::vector<TraceStep> steps;
};

struct StabilizerDatum {
  std::vector<std::vector<long>> fixing_words;  // exponent tuples over the generators
  long orbit_size = 0;
  long group_order = 0;
};

// ---------------------------------------------------------------------------
// d = 1 invariant ring
// ---------------------------------------------------------------------------

struct InvariantRingResult {
  FieldTower tower;         // owns every level referenced below (extended copy)
  int base_field_level = 0; // the invariant subfield k' reached
  int input_level_K = 0;    // K of the input action
  LevelPoly generator_poly; // y as a polynomial in x, coefficients at input K
  ComputationTrace trace;
};

namespace detail {

struct D1Wild {
  long twist = 0;     // exponent of the q-Frobenius, taken mod the current [K:k]
  FieldElement b;     // translation, at the current K level
  int exp = 0;        // remaining order is p^exp
};

struct D1Tame {
  long twist = 0;
  FieldElement mu;    // eigenvalue, lives in k but stored at the current K level
  long order = 1;
};

inline std::string fe_str(const FieldTower& t, const FieldElement& e) { return t.to_string(e); }

// compose translations-with-twist on the line: (e, b) * (e', b') in the
// coordinate-ring orientation gives (e + e', b + sigma_e(b'))
inline std::pair<long, FieldElement> d1_power(const FieldTower& t, long n, long twist,
                                              const FieldElement& b, long m) {
  long e = 0;
  FieldElement acc = t.zero(b.level);
  for (long i = 0; i < m; ++i) {
    acc = t.add(acc, t.frobenius_q(b, e));
    e = (e + twist) % n;
  }
  return {e, acc};
}

// F_p-matrix of the map s -> sigma^twist(s) on a level (q-Frobenius power)
inline MatFp twist_matrix(const FieldTower& t, int lvl, long twist) {
  int D = t.degree(lvl);
  MatFp m(t.p(), D, D);
  FieldElement g = t.generator(lvl), gp = t.one(lvl);
  for (int j = 0; j < D; ++j) {
    FieldElement img = t.frobenius_q(gp, twist);
    for (int i = 0; i < D; ++i) m.at(i, j) = img.coords[i];
    if (j + 1 < D) gp = t.mul(gp, g);
  }
  return m;
}

// F_p-matrix of multiplication by c on a level
inline MatFp mult_matrix(const FieldTower& t, int lvl, const FieldElement& c) {
  int D = t.degree(lvl);
  MatFp m(t.p(), D, D);
  FieldElement g = t.generator(lvl), gp = t.one(lvl);
  for (int j = 0; j < D; ++j) {
    FieldElement img = t.mul(gp, c);
    for (int i = 0; i < D; ++i) m.at(i, j) = img.coords[i];
    if (j + 1 < D) gp = t.mul(gp, g);
  }
  return m;
}

}  // namespace detail

// Requires a validated, normalized, centered action with d = 1 (tame
// translations zero, wild matrices trivial).  Returns the presentation
// K[x]^G = k'[y] together with the replayable trace.
inline InvariantRingResult invariant_ring_d1(const Action& input) {
  require(input.dim == 1, Errc::ShapeViolation, "invariant_ring_d1 requires dimension 1");
  const int p = input.tower.p();

  InvariantRingResult res;
  res.tower = input.tower;
  FieldTower& tw = res.tower;
  int k = tw.k_index();
  int K = tw.K_index();
  res.input_level_K = K;
  const int origK = K;

  // unpack and sanity-check the normalized shape
  std::vector<detail::D1Wild> wild;
  std::vector<detail::D1Tame> tame;
  {
    long n = tw.rel_degree(k, K);
    for (size_t gi = 0; gi < input.generators.size(); ++gi) {
      const Generator& g = input.generators[gi];
      if (input.wild_generator(gi)) {
        require(tw.equal(g.matrix[0], tw.one(K)), Errc::ShapeViolation,
                "wild generator is not in translation shape");
        detail::D1Wild w;
        w.twist = ((g.twist % n) + n) % n;
        w.b = g.translation[0];
        long o = input.group.wild_orders[gi];
        w.exp = 0;
        while (o > 1) {
          o /= p;
          ++w.exp;
        }
        if (w.exp > 0) wild.push_back(std::move(w));
      } else {
        require(tw.is_zero(g.translation[0]), Errc::ShapeViolation,
                "tame generator still has a translation; recenter first");
        require(tw.try_section(g.matrix[0], k).has_value(), Errc::ShapeViolation,
                "tame eigenvalue does not lie in the base field; normalize first");
        detail::D1Tame tm;
        tm.twist = ((g.twist % n) + n) % n;
        tm.mu = g.matrix[0];
        tm.order = input.group.tame_orders[gi - input.group.wild_orders.size()];
        tame.push_back(std::move(tm));
      }
    }
  }

  LevelPoly y_in_x = tw.lp_from(origK, {tw.zero(origK), tw.one(origK)});  // y = x

  auto embed_poly_to_orig = [&](const LevelPoly& f) {
    LevelPoly r{origK, {}};
    for (const auto& c : f.c) r.c.push_back(tw.embed(c, origK));
    return tw.lp_trim(r);
  };

  auto trace_step = [&](std::string kind,
                        std::vector<std::pair<std::string, std::string>> params,
                        std::optional<LevelPoly> subst) {
    res.trace.steps.push_back({std::move(kind), std::move(params), std::move(subst)});
  };

  // ---- wild descent --------------------------------------------------------
  while (!wild.empty()) {
    long n = tw.rel_degree(k, K);
    detail::D1Wild& w0 = wild.front();

    // gamma = alpha_1^{p^{exp-1}} generates an order-p subgroup
    long pw = 1;
    for (int i = 0; i + 1 < w0.exp; ++i) pw *= p;
    auto [gtw, gb] = detail::d1_power(tw, n, w0.twist, w0.b, pw);
    trace_step("subgroup-descent",
               {{"generator", "0"},
                {"power", std::to_string(pw)},
                {"gamma_twist", std::to_string(gtw)},
                {"gamma_translation", detail::fe_str(tw, gb)}},
               std::nullopt);

    long rel = ((gtw % n) + n) % n;
    bool frob_trivial = rel == 0;

    if (frob_trivial && tw.is_zero(gb)) {
      // gamma acts trivially; the subgroup is in the kernel of the action
      trace_step("case-b-zero", {{"note", "gamma acts trivially"}}, std::nullopt);
      if (--w0.exp == 0) wild.erase(wild.begin());
      continue;
    }

    if (!frob_trivial && tw.is_zero(gb)) {
      // pure Galois descent: K[x]^{gamma} = K'[x], no coordinate change
      long t_ord = n / std::gcd(n, rel);
      require(t_ord == p, Errc::ShapeViolation,
              "subgroup Galois action has order " + std::to_string(t_ord) +
                  ", expected the characteristic");
      require(tw.degree(K) % p == 0, Errc::ShapeViolation, "no index-p subfield");
      int Kp = tw.ensure_level(tw.degree(K) / p);
      trace_step("case-b-zero", {{"gamma_twist", std::to_string(rel)}}, std::nullopt);
      long np = tw.rel_degree(k, Kp);
      std::vector<detail::D1Wild> new_wild;
      for (size_t wi = 0; wi < wild.size(); ++wi) {
        detail::D1Wild w = wild[wi];
        auto sec = tw.try_section(w.b, Kp);
        require(sec.has_value(), Errc::ShapeViolation,
                "wild translation does not descend under Galois descent");
        w.b = *sec;
        if (wi == 0 && --w.exp == 0) {
          require(tw.is_zero(w.b), Errc::ShapeViolation,
                  "exhausted generator did not become trivial");
          continue;
        }
        w.twist = ((w.twist % np) + np) % np;
        new_wild.push_back(std::move(w));
      }
      std::vector<detail::D1Tame> new_tame;
      for (const auto& tm : tame) {
        detail::D1Tame nt = tm;
        nt.twist = ((tm.twist % np) + np) % np;
        nt.mu = tw.section(tm.mu, Kp);
        new_tame.push_back(std::move(nt));
      }
      wild = std::move(new_wild);
      tame = std::move(new_tame);
      K = Kp;
      continue;
    }

    if (frob_trivial) {
      // gamma: x -> x + b with trivial Galois part.  The invariant
      // coordinate is y = x + (p-1) b^{1-p} x^p.
      const FieldElement b = gb;
      FieldElement btilde =
          tw.mul(tw.from_int(K, p - 1), tw.inv(tw.pow(b, Integer(p - 1))));
      // commutation forces every twist to fix b up to its tame eigenvalue
      for (const auto& w : wild)
        require(tw.equal(tw.frobenius_q(b, w.twist), b), Errc::ShapeViolation,
                "wild twist does not fix the subgroup translation");
      for (const auto& tm : tame)
        require(tw.equal(tw.frobenius_q(b, tm.twist), tw.mul(tm.mu, b)), Errc::ShapeViolation,
                "tame twist does not scale the subgroup translation by its eigenvalue");

      std::vector<FieldElement> coeffs(static_cast<size_t>(p) + 1, tw.zero(K));
      coeffs[1] = tw.one(K);
      coeffs[static_cast<size_t>(p)] = btilde;
      LevelPoly subst = tw.lp_from(K, coeffs);
      trace_step("case-frobenius-trivial",
                 {{"b", detail::fe_str(tw, b)}, {"btilde", detail::fe_str(tw, btilde)}},
                 subst);
      y_in_x = tw.lp_compose(embed_poly_to_orig(subst), y_in_x);

      for (auto& w : wild)
        w.b = tw.add(w.b, tw.mul(btilde, tw.pow(w.b, Integer(p))));
      if (--w0.exp == 0) {
        require(tw.is_zero(wild.front().b), Errc::ShapeViolation,
                "exhausted generator did not become trivial");
        wild.erase(wild.begin());
      }
      continue;
    }

    // Artin-Schreier case: gamma acts on K through an order-p Galois
    // automorphism; descend to its fixed field K'.
    long t_ord = n / std::gcd(n, rel);
    require(t_ord == p, Errc::ShapeViolation,
            "subgroup Galois action has order " + std::to_string(t_ord) +
                ", expected the characteristic");
    require(tw.degree(K) % p == 0, Errc::ShapeViolation, "no index-p subfield");
    int Kp = tw.ensure_level(tw.degree(K) / p);

    // omega with gamma(omega) = omega + 1
    FieldElement omega = tw.artin_schreier_omega(K, Kp);
    {
      FieldElement c = tw.sub(tw.frobenius_q(omega, rel), omega);
      // c is a nonzero prime-field constant; rescale so it becomes 1
      for (size_t i = 1; i < c.coords.size(); ++i)
        require(c.coords[i] == 0, Errc::Internal, "Artin-Schreier defect is not a constant");
      require(c.coords[0] != 0, Errc::Internal, "Artin-Schreier defect vanishes");
      omega = tw.div(omega, c);
    }

    // Jordan chain 1, omega, v_3, ..., v_p with gamma(v_i) = v_i + v_{i-1}
    std::vector<FieldElement> chain{tw.one(K), omega};
    {
      int D = tw.degree(K);
      MatFp gm = detail::twist_matrix(tw, K, rel);
      for (int i = 0; i < D; ++i) gm.at(i, i) = gfq::mod_norm(gm.at(i, i) - 1, p);
      while (static_cast<int>(chain.size()) < p) {
        auto sol = gm.solve(chain.back().coords);
        require(sol.has_value(), Errc::ShapeViolation, "Jordan chain construction failed");
        chain.push_back(FieldElement{K, *sol});
      }
    }

    // write b in the chain basis with coefficients in K'
    std::vector<FieldElement> bc;  // b_i at level Kp
    {
      int D = tw.degree(K), Dp = tw.degree(Kp);
      MatFp sys(p, D, D);
      FieldElement gp = tw.generator(Kp), gpp = tw.one(Kp);
      std::vector<FieldElement> kp_basis;
      for (int t2 = 0; t2 < Dp; ++t2) {
        kp_basis.push_back(gpp);
        if (t2 + 1 < Dp) gpp = tw.mul(gpp, gp);
      }
      for (int ci = 0; ci < p; ++ci)
        for (int t2 = 0; t2 < Dp; ++t2) {
          FieldElement col = tw.mul(tw.embed(kp_basis[t2], K), chain[ci]);
          for (int r = 0; r < D; ++r) sys.at(r, ci * Dp + t2) = col.coords[r];
        }
      auto sol = sys.solve(gb.coords);
      require(sol.has_value(), Errc::ShapeViolation, "chain decomposition failed");
      for (int ci = 0; ci < p; ++ci) {
        FieldElement c = tw.zero(Kp);
        for (int t2 = 0; t2 < Dp; ++t2) c.coords[t2] = (*sol)[ci * Dp + t2];
        bc.push_back(std::move(c));
      }
      require(tw.is_zero(bc[static_cast<size_t>(p) - 1]), Errc::ShapeViolation,
              "top chain coefficient of b must vanish for an order-p generator");
    }

    // b' = b_1 v_2 + sum_{i=2}^{p-1} b_i v_{i+1}
    FieldElement bprime = tw.mul(tw.embed(bc[0], K), chain[1]);
    for (int i = 2; i <= p - 1; ++i)
      bprime = tw.add(bprime, tw.mul(tw.embed(bc[static_cast<size_t>(i) - 1], K), chain[i]));

    LevelPoly substAS = tw.lp_from(K, {tw.neg(bprime), tw.one(K)});  // y = x - b'
    trace_step("case-artin-schreier",
               {{"omega", detail::fe_str(tw, omega)},
                {"gamma_twist", std::to_string(rel)},
                {"b", detail::fe_str(tw, gb)},
                {"bprime", detail::fe_str(tw, bprime)}},
               substAS);
    y_in_x = tw.lp_compose(embed_poly_to_orig(substAS), y_in_x);

    // eigencomponent fix: replace b' by its joint eigencomponent z for the
    // tame twists so that tame generators stay diagonal
    FieldElement z = bprime;
    if (!tame.empty()) {
      int D = tw.degree(K);
      // joint kernel of (sigma_l - mu_l) containing the needed component:
      // project b' onto it along the other joint eigenspaces
      // decompose: refine the full space by all tame generators
      struct Space {
        std::vector<std::vector<int>> basis;  // F_p coordinate vectors
        bool target = true;
      };
      std::vector<Space> spaces;
      {
        Space whole;
        for (int i = 0; i < D; ++i) {
          std::vector<int> e(D, 0);
          e[i] = 1;
          whole.basis.push_back(std::move(e));
        }
        spaces.push_back(std::move(whole));
      }
      for (const auto& tm : tame) {
        MatFp sigma = detail::twist_matrix(tw, K, tm.twist);
        auto eig = tw.roots_of_unity(tm.order, k);
        require(eig.present, Errc::ShapeViolation, "missing tame roots of unity");
        std::vector<FieldElement> eigs;
        FieldElement zg = tw.one(k);
        for (long e = 0; e < tm.order; ++e) {
          eigs.push_back(zg);
          zg = tw.mul(zg, eig.primitive);
        }
        std::sort(eigs.begin(), eigs.end(), [&](const FieldElement& x, const FieldElement& y) {
          return tw.compare(x, y) < 0;
        });
        FieldElement mu_k = tw.section(tm.mu, k);
        std::vector<Space> next;
        for (const auto& S : spaces) {
          for (const auto& mu : eigs) {
            MatFp op = sigma;
            MatFp mm = detail::mult_matrix(tw, K, tw.embed(mu, K));
            // sigma - mu
            for (int i = 0; i < D; ++i)
              for (int j = 0; j < D; ++j)
                op.at(i, j) = gfq::mod_norm(op.at(i, j) - mm.at(i, j), p);
            // restrict to S
            MatFp rest(p, D, static_cast<int>(S.basis.size()));
            for (size_t c = 0; c < S.basis.size(); ++c) {
              std::vector<int> img = op.mul_vec(S.basis[c]);
              for (int r = 0; r < D; ++r) rest.at(r, static_cast<int>(c)) = img[r];
            }
            auto ker = rest.kernel_basis();
            if (ker.empty()) continue;
            Space sub;
            sub.target = S.target && tw.equal(mu, mu_k);
            for (const auto& coeffs : ker) {
              std::vector<int> v(D, 0);
              for (size_t c = 0; c < coeffs.size(); ++c)
                for (int r = 0; r < D; ++r)
                  v[r] = gfq::mod_norm(v[r] + static_cast<long>(coeffs[c]) * S.basis[c][r], p);
              sub.basis.push_back(std::move(v));
            }
            next.push_back(std::move(sub));
          }
        }
        spaces = std::move(next);
      }
      // express b' in the decomposition and keep the target component
      MatFp all(p, tw.degree(K), 0);
      std::vector<std::pair<int, int>> ranges;  // (start, len) with target flag via spaces
      {
        int total = 0;
        for (const auto& S : spaces) total += static_cast<int>(S.basis.size());
        require(total == tw.degree(K), Errc::ShapeViolation,
                "tame eigenspace decomposition is not a direct sum");
        all = MatFp(p, tw.degree(K), total);
        int col = 0;
        for (const auto& S : spaces) {
          ranges.emplace_back(col, static_cast<int>(S.basis.size()));
          for (const auto& v : S.basis) {
            for (int r = 0; r < tw.degree(K); ++r) all.at(r, col) = v[r];
            ++col;
          }
        }
      }
      auto sol = all.solve(bprime.coords);
      require(sol.has_value(), Errc::Internal, "decomposition solve failed");
      FieldElement zz = tw.zero(K);
      for (size_t si = 0; si < spaces.size(); ++si) {
        if (!spaces[si].target) continue;
        auto [start, len] = ranges[si];
        for (int c = 0; c < len; ++c)
          for (int r = 0; r < tw.degree(K); ++r)
            zz.coords[r] = gfq::mod_norm(
                zz.coords[r] + static_cast<long>((*sol)[start + c]) * spaces[si].basis[c][r], p);
      }
      if (!tw.equal(zz, bprime)) {
        FieldElement shift = tw.sub(bprime, zz);  // lies in K'
        require(tw.try_section(shift, Kp).has_value(), Errc::ShapeViolation,
                "non-eigencomponent part of b' does not descend");
        LevelPoly substFix = tw.lp_from(K, {shift, tw.one(K)});  // ytilde = y + (b' - z)
        trace_step("eigencomponent-fix",
                   {{"component", detail::fe_str(tw, zz)},
                    {"descended_shift", detail::fe_str(tw, shift)}},
                   substFix);
        y_in_x = tw.lp_compose(embed_poly_to_orig(substFix), y_in_x);
      }
      z = zz;
    }

    // the load-bearing identity: gamma(z) - z = b
    require(tw.equal(tw.sub(tw.frobenius_q(z, rel), z), gb), Errc::ShapeViolation,
            "chain eigencomponent does not solve (gamma - 1) z = b");

    // descend the data to K'
    std::vector<detail::D1Wild> new_wild;
    for (size_t wi = 0; wi < wild.size(); ++wi) {
      detail::D1Wild w = wild[wi];
      FieldElement nb = tw.add(w.b, tw.sub(z, tw.frobenius_q(z, w.twist)));
      auto sec = tw.try_section(nb, Kp);
      require(sec.has_value(), Errc::ShapeViolation,
              "descended wild translation does not lie in the subfield");
      w.b = *sec;
      if (wi == 0) {
        if (--w.exp == 0) {
          require(tw.is_zero(w.b), Errc::ShapeViolation,
                  "exhausted generator did not become trivial");
          continue;
        }
      }
      long np = tw.rel_degree(k, Kp);
      w.twist = ((w.twist % np) + np) % np;
      new_wild.push_back(std::move(w));
    }
    std::vector<detail::D1Tame> new_tame;
    for (const auto& tm : tame) {
      require(tw.equal(tw.frobenius_q(z, tm.twist), tw.mul(tm.mu, z)) || tw.is_zero(z),
              Errc::ShapeViolation, "eigencomponent is not scaled by the tame eigenvalue");
      detail::D1Tame nt = tm;
      long np = tw.rel_degree(k, Kp);
      nt.twist = ((tm.twist % np) + np) % np;
      nt.mu = tw.section(tm.mu, Kp);  // mu lies in k, hence in K'
      new_tame.push_back(std::move(nt));
    }
    wild = std::move(new_wild);
    tame = std::move(new_tame);
    K = Kp;
  }

  // ---- tame base case -------------------------------------------------------
  {
    long n = tw.rel_degree(k, K);
    long bound = 1;
    for (const auto& tm : tame) bound *= tm.order;
    int e_found = 1;
    FieldElement c_found = tw.one(K);
    if (!tame.empty()) {
      bool found = false;
      int D = tw.degree(K);
      for (int e = 1; e <= bound && !found; ++e) {
        MatFp stacked(tw.p(), static_cast<int>(tame.size()) * D, D);
        for (size_t l = 0; l < tame.size(); ++l) {
          MatFp sigma = detail::twist_matrix(tw, K, tame[l].twist);
          MatFp mm = detail::mult_matrix(tw, K, tw.pow(tame[l].mu, Integer(e)));
          MatFp op = mm.mul(sigma);  // s -> mu^e sigma(s)
          for (int i = 0; i < D; ++i) op.at(i, i) = gfq::mod_norm(op.at(i, i) - 1, tw.p());
          for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) stacked.at(static_cast<int>(l) * D + i, j) = op.at(i, j);
        }
        auto ker = stacked.kernel_basis();
        if (!ker.empty()) {
          e_found = e;
          c_found = FieldElement{K, ker[0]};
          found = true;
        }
      }
      require(found, Errc::Internal, "no invariant monomial of degree up to the group order");
    }
    std::vector<FieldElement> coeffs(static_cast<size_t>(e_found) + 1, tw.zero(K));
    coeffs[static_cast<size_t>(e_found)] = c_found;
    LevelPoly substT = tw.lp_from(K, coeffs);
    trace_step("tame-base",
               {{"degree", std::to_string(e_found)}, {"coefficient", detail::fe_str(tw, c_found)}},
               substT);
    y_in_x = tw.lp_compose(embed_poly_to_orig(substT), y_in_x);

    // invariant subfield: fixed field of the surviving twists
    long g = n;
    for (const auto& tm : tame) g = std::gcd(g, tm.twist);
    int kp = tw.ensure_level(tw.degree(k) * static_cast<int>(g));
    res.base_field_level = kp;
  }

  res.generator_poly = y_in_x;
  return res;
}

// replay the coordinate changes of a trace and compare with the recorded
// composite presentation
inline bool replay_trace(const InvariantRingResult& res) {
  const FieldTower& tw = res.tower;
  int origK = res.input_level_K;
  LevelPoly y = tw.lp_from(origK, {tw.zero(origK), tw.one(origK)});
  for (const auto& step : res.trace.steps) {
    if (!step.subst.has_value()) continue;
    LevelPoly s{origK, {}};
    for (const auto& c : step.subst->c) s.c.push_back(tw.embed(c, origK));
    s = tw.lp_trim(s);
    y = tw.lp_compose(s, y);
  }
  if (y.c.size() != res.generator_poly.c.size()) return false;
  for (size_t i = 0; i < y.c.size(); ++i)
    if (!tw.equal(y.c[i], res.generator_poly.c[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// quotient class with certificate
// ---------------------------------------------------------------------------

struct QuotientClassResult {
  mclass::MotivicClass cls;
  ComputationTrace trace;
  action::ChangeOfBasis basis;
  std::optional<std::vector<FieldElement>> recentering;
  std::optional<InvariantRingResult> line_invariants;  // d >= 1: the base-line run
};

// restriction of a normalized action to the invariant line x_1
inline Action restrict_to_base_line(const Action& norm) {
  Action line = norm;
  line.dim = 1;
  line.generators.clear();
  for (const auto& g : norm.generators) {
    Generator r;
    r.twist = g.twist;
    r.matrix = {g.matrix[0]};
    r.translation = {g.translation[0]};
    r.declared_order = g.declared_order;
    line.generators.push_back(std::move(r));
  }
  return line;
}

// [V/G] = L^d, tagged K0 for tame actions and K0_mod for wild ones, with a
// trace of the fibration descent and the base-line invariant ring.
inline QuotientClassResult quotient_class(const Action& a) {
  auto rep = action::validate(a);
  require(rep.valid(), Errc::HypothesisViolation, rep.summary());

  QuotientClassResult out;
  auto norm = action::normalize_and_center(a);
  out.basis = norm.basis;
  out.recentering = norm.recentering;

  long order = a.group.order();
  for (int dim = a.dim; dim >= 2; --dim) {
    // project onto the invariant coordinate line of the current fiber; the
    // generic fiber is handled by induction with the full group as
    // stabilizer of the generic point
    int t = a.dim - dim;  // 0-based index of the base coordinate at this step
    TraceStep step;
    step.kind = "fibration-descent";
    step.params.push_back({"fiber_dimension", std::to_string(dim)});
    step.params.push_back({"base_coordinate", "x" + std::to_string(t + 1)});
    step.params.push_back({"stabilizer", "full group of order " + std::to_string(order) +
                                             " at the generic base point"});
    std::string basedata;
    for (size_t gi = 0; gi < norm.action.generators.size(); ++gi) {
      const Generator& g = norm.action.generators[gi];
      if (gi) basedata += "; ";
      basedata += "gen" + std::to_string(gi) + ": twist " + std::to_string(g.twist) +
                  ", diag " +
                  norm.action.tower.to_string(
                      g.matrix[static_cast<size_t>(t) * a.dim + t]) +
                  ", translation " + norm.action.tower.to_string(g.translation[t]);
    }
    step.params.push_back({"base_line_datum", basedata});
    out.trace.steps.push_back(std::move(step));
  }

  if (a.dim >= 1) {
    Action line = restrict_to_base_line(norm.action);
    InvariantRingResult inv = invariant_ring_d1(line);
    for (const auto& s : inv.trace.steps) out.trace.steps.push_back(s);
    out.line_invariants = std::move(inv);
  }

  mclass::RingTag tag = a.group.is_tame() ? mclass::RingTag::K0() : mclass::RingTag::K0_mod();
  out.cls = mclass::MotivicClass::lefschetz(tag, a.dim);
  if (a.dim == 0) out.cls = mclass::MotivicClass::one(tag);
  return out;
}

// ---------------------------------------------------------------------------
// quotient homomorphism on classes
// ---------------------------------------------------------------------------

struct QuotientRules {
  std::map<std::string, mclass::MotivicClass> images;  // equivariant symbol -> plain class
  bool wild = false;  // quotients of wild actions land in the modified ring
};

// Additive map K_0^G -> K_0^*: declared symbol quotients are substituted,
// trivially-acted factors pass through (L goes to L), and the output keeps
// the localization of the input.
inline mclass::MotivicClass quotient_homomorphism(const mclass::MotivicClass& c,
                                                  const mclass::SymbolTable& table,
                                                  const QuotientRules& rules) {
  using mclass::MotivicClass;
  using mclass::RingTag;
  RingTag out_tag{c.tag().base, c.tag().modified || rules.wild, 0, false};
  require(!c.tag().mod_l, Errc::TagMismatch, "cannot quotient a mod-L residue");
  MotivicClass out(out_tag);
  for (const auto& [mono, coeff] : c.body()) {
    // split the monomial into trivially-acted symbols and acted symbols
    std::vector<std::string> trivial, acted;
    for (const auto& s : mono.syms) {
      if (table.known(s) && table.info(s).action_tag > 0)
        acted.push_back(s);
      else
        trivial.push_back(s);
    }
    MotivicClass term = MotivicClass::from_poly(out_tag, coeff);
    for (const auto& s : trivial) term = term * MotivicClass::symbol(out_tag, s);
    if (acted.size() > 1)
      fail(Errc::MissingQuotientRule,
           "monomial " + mono.to_string() +
               " mixes several acted symbols; no product rule is declared");
    if (acted.size() == 1) {
      auto it = rules.images.find(acted[0]);
      require(it != rules.images.end(), Errc::MissingQuotientRule,
              "no quotient image declared for symbol '" + acted[0] + "'");
      require(mclass::coercible(it->second.tag(), out_tag), Errc::TagMismatch,
              "quotient image of '" + acted[0] + "' lives in " + it->second.tag().to_string());
      term = term * it->second.coerce(out_tag);
    }
    out = out + term;
  }
  return out;
}

// [V/G] = L^d [B/G] for an equivariant affine bundle of rank d: quotient the
// base through the declared rules and multiply by L^d.
inline mclass::MotivicClass affine_bundle_quotient_rule(int rank,
                                                        const mclass::MotivicClass& base,
                                                        const mclass::SymbolTable& table,
                                                        const QuotientRules& rules) {
  require(rank >= 0, Errc::ParseError, "bundle rank must be nonnegative");
  require(base.tag().equivariant > 0, Errc::UnquotientedBase,
          "base class carries no equivariant tag");
  mclass::MotivicClass img;
  try {
    img = quotient_homomorphism(base, table, rules);
  } catch (const CalcError& e) {
    if (e.code() == Errc::MissingQuotientRule)
      fail(Errc::UnquotientedBase, std::string("base quotient undeclared: ") + e.what());
    throw;
  }
  return mclass::MotivicClass::lefschetz(img.tag(), rank) * img;
}

// ---------------------------------------------------------------------------
// orbit counting
// ---------------------------------------------------------------------------

struct OracleOptions {
  long max_points = 40000000;  // enumeration budget per call
  int max_degree = 64;         // cap on the evaluation field degree over F_p
};

struct OracleStats {
  long points_enumerated = 0;
  int work_degree = 0;
  long stable_orbits = 0;
};

namespace detail {

// flat arithmetic in one tower level, for the enumeration hot loop
struct FlatField {
  int p = 2;
  int W = 1;
  std::vector<int> red;  // (W-1) rows: x^{W+i} reduced, row-major W columns

  FlatField() = default;
  FlatField(const FieldTower& t, int lvl) : p(t.p()), W(t.degree(lvl)) {
    const gfq::PolyFp& m = t.modulus(lvl);
    // x^W = -(lower part of modulus)
    std::vector<int> cur(W, 0);
    for (int i = 0; i < W; ++i) cur[i] = gfq::mod_norm(-m.c[i], p);
    red.reserve(static_cast<size_t>(std::max(0, W - 1)) * W);
    for (int i = 0; i + 1 < W; ++i) {
      for (int j = 0; j < W; ++j) red.push_back(cur[j]);
      // multiply by x and reduce
      std::vector<int> nxt(W, 0);
      int top = cur[W - 1];
      for (int j = W - 1; j > 0; --j) nxt[j] = cur[j - 1];
      nxt[0] = 0;
      if (top != 0)
        for (int j = 0; j < W; ++j)
          nxt[j] = gfq::mod_norm(nxt[j] + static_cast<long>(top) * gfq::mod_norm(-m.c[j], p), p);
      cur = std::move(nxt);
    }
  }

  void mul(const int* a, const int* b, int* out, long* scratch) const {
    for (int i = 0; i < 2 * W - 1; ++i) scratch[i] = 0;
    for (int i = 0; i < W; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < W; ++j) scratch[i + j] += static_cast<long>(a[i]) * b[j];
    }
    for (int i = 2 * W - 2; i >= W; --i) {
      long coef = scratch[i] % p;
      if (coef == 0) continue;
      const int* row = &red[static_cast<size_t>(i - W) * W];
      for (int j = 0; j < W; ++j) scratch[j] += coef * row[j];
    }
    for (int j = 0; j < W; ++j) out[j] = gfq::mod_norm(scratch[j], p);
  }

  void matvec(const std::vector<int>& m, const int* v, int* out) const {
    for (int i = 0; i < W; ++i) {
      long acc = 0;
      const int* row = &m[static_cast<size_t>(i) * W];
      for (int j = 0; j < W; ++j) acc += static_cast<long>(row[j]) * v[j];
      out[i] = gfq::mod_norm(acc, p);
    }
  }
};

// F_p matrix of a -> a^{p^times} on a level, flattened row-major
inline std::vector<int> frobenius_flat(const FieldTower& t, int lvl, long times) {
  int D = t.degree(lvl);
  std::vector<int> m(static_cast<size_t>(D) * D, 0);
  FieldElement g = t.generator(lvl), gp = t.one(lvl);
  for (int j = 0; j < D; ++j) {
    FieldElement img = t.frobenius_p(gp, times);
    for (int i = 0; i < D; ++i) m[static_cast<size_t>(i) * D + j] = img.coords[i];
    if (j + 1 < D) gp = t.mul(gp, g);
  }
  return m;
}

// all group elements as generator words and composed data
struct GroupElement {
  std::vector<long> word;  // exponent per generator
  Generator datum;
};

inline std::vector<GroupElement> enumerate_group(const Action& a) {
  std::vector<long> orders;
  for (long w : a.group.wild_orders) orders.push_back(w);
  for (long t : a.group.tame_orders) orders.push_back(t);
  std::vector<GroupElement> out;
  std::vector<long> word(orders.size(), 0);
  while (true) {
    GroupElement ge;
    ge.word = word;
    ge.datum = action::identity_generator(a);
    for (size_t i = 0; i < word.size(); ++i)
      if (word[i] > 0)
        ge.datum = action::compose(a, ge.datum,
                                   action::generator_power(a, a.generators[i], word[i]));
    out.push_back(std::move(ge));
    size_t i = 0;
    for (; i < word.size(); ++i) {
      if (++word[i] < orders[i]) break;
      word[i] = 0;
    }
    if (i == word.size()) break;
  }
  return out;
}

inline long element_order(const Action& a, const Generator& g) {
  Generator cur = g;
  Generator id = action::identity_generator(a);
  long order = 1;
  while (!action::generator_equal(a, cur, id)) {
    cur = action::compose(a, cur, g);
    ++order;
    require(order <= a.group.order(), Errc::Internal, "element order exceeds the group order");
  }
  return order;
}

}  // namespace detail

// the documented worst-case evaluation degree (relative to q)
inline long oracle_ambient_degree(const Action& a, long m) {
  long l = 1;
  for (long c = 1; c <= a.group.order(); ++c) l = std::lcm(l, c);
  return m * a.galois_degree() * l;
}

// |(V/G)(F_{q^m})| by exhaustive enumeration of Frobenius^m-stable G-orbits.
// Every stable orbit consists of points over F_{q^{mc}} for a single cycle
// length c dividing |G|, so enumerating those subfields sees every stable
// orbit.  Throws BudgetExceeded when the slices are too large.
inline Integer orbit_count_oracle(const Action& a, long m, OracleOptions opt = OracleOptions(),
                                  OracleStats* stats = nullptr) {
  auto rep = action::validate(a);
  require(rep.valid(), Errc::HypothesisViolation, rep.summary());
  require(m >= 1, Errc::ParseError, "field power m must be positive");

  const long order = a.group.order();
  const long n = a.galois_degree();
  const int s = a.tower.degree(a.tower.k_index());
  const int d = a.dim;
  const int p = a.tower.p();

  if (d == 0) {
    // points are the embeddings of K alone; the twists act transitively on
    // them because they generate the Galois group
    if (stats) *stats = OracleStats{0, s, 1};
    return 1;
  }

  // slices: cycle lengths c | order with n | mc
  std::vector<long> slice_cs;
  for (long c = 1; c <= order; ++c)
    if (order % c == 0 && (m * c) % n == 0) slice_cs.push_back(c);

  // budget
  Integer total_points = 0;
  for (long c : slice_cs)
    total_points += Integer(n) * integer_pow(Integer(p), static_cast<unsigned long>(s * m * c * d));
  if (total_points > opt.max_points) {
    fail(Errc::BudgetExceeded,
         "enumeration needs " + total_points.get_str() + " points (budget " +
             std::to_string(opt.max_points) + "); worst-case evaluation field F_q^N with N = " +
             std::to_string(oracle_ambient_degree(a, m)));
  }

  long work_deg = s * static_cast<int>(std::lcm(n, m * order));
  require(work_deg <= opt.max_degree, Errc::BudgetExceeded,
          "evaluation field degree " + std::to_string(work_deg) + " exceeds the cap " +
              std::to_string(opt.max_degree));

  FieldTower tw = a.tower;
  tw.raise_limits({p, opt.max_degree});
  int W = tw.ensure_level(static_cast<int>(work_deg));
  const int DW = tw.degree(W);
  detail::FlatField ff(tw, W);

  // group elements embedded per twist index j
  std::vector<detail::GroupElement> elems = detail::enumerate_group(a);
  struct FlatGen {
    long twist;
    // per j: matrix entries (d*d) and translation (d), flat coords at W
    std::vector<std::vector<int>> mat, trans;
  };
  std::vector<FlatGen> flat;
  flat.reserve(elems.size());
  for (const auto& ge : elems) {
    FlatGen fg;
    fg.twist = ((ge.datum.twist % n) + n) % n;
    for (long j = 0; j < n; ++j) {
      std::vector<int> mj, tj;
      for (const auto& e : ge.datum.matrix) {
        FieldElement w = tw.embed(tw.frobenius_q(e, j), W);
        mj.insert(mj.end(), w.coords.begin(), w.coords.end());
      }
      for (const auto& e : ge.datum.translation) {
        FieldElement w = tw.embed(tw.frobenius_q(e, j), W);
        tj.insert(tj.end(), w.coords.begin(), w.coords.end());
      }
      fg.mat.push_back(std::move(mj));
      fg.trans.push_back(std::move(tj));
    }
    flat.push_back(std::move(fg));
  }

  std::vector<int> frobm = detail::frobenius_flat(tw, W, static_cast<long>(s) * m);

  // candidates: group elements whose twist matches Frobenius^m on embeddings
  std::vector<size_t> candidates;
  for (size_t gi = 0; gi < flat.size(); ++gi)
    if (((flat[gi].twist - m) % n + n) % n == 0) candidates.push_back(gi);

  std::set<std::vector<int>> stable_keys;
  long enumerated = 0;

  std::vector<long> scratch_long(2 * DW);
  std::vector<int> fv(static_cast<size_t>(d) * DW), gv(static_cast<size_t>(d) * DW),
      acc(DW), tmp(DW);

  auto apply_flat = [&](const FlatGen& fg, long j, const int* v, int* out) {
    for (int i = 0; i < d; ++i) {
      const int* tr = &fg.trans[j][static_cast<size_t>(i) * DW];
      for (int t2 = 0; t2 < DW; ++t2) acc[t2] = tr[t2];
      for (int jj = 0; jj < d; ++jj) {
        const int* me = &fg.mat[j][(static_cast<size_t>(i) * d + jj) * DW];
        ff.mul(me, v + static_cast<size_t>(jj) * DW, tmp.data(), scratch_long.data());
        for (int t2 = 0; t2 < DW; ++t2) acc[t2] = gfq::mod_norm(acc[t2] + tmp[t2], p);
      }
      std::copy(acc.begin(), acc.end(), out + static_cast<size_t>(i) * DW);
    }
  };

  auto orbit_key = [&](long j, const int* v) {
    std::vector<std::vector<int>> pts;
    pts.reserve(flat.size());
    for (const auto& fg : flat) {
      std::vector<int> enc(1 + static_cast<size_t>(d) * DW);
      enc[0] = static_cast<int>(((j + fg.twist) % n + n) % n);
      apply_flat(fg, j, v, gv.data());
      std::copy(gv.begin(), gv.end(), enc.begin() + 1);
      pts.push_back(std::move(enc));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<int> key;
    for (const auto& e : pts) key.insert(key.end(), e.begin(), e.end());
    return key;
  };

  for (long c : slice_cs) {
    int sub = tw.ensure_level(s * static_cast<int>(m) * static_cast<int>(c));
    int Dsub = tw.degree(sub);
    // embedded F_p-basis of the subfield
    std::vector<std::vector<int>> basis;
    FieldElement g = tw.generator(sub), gp = tw.one(sub);
    for (int t2 = 0; t2 < Dsub; ++t2) {
      basis.push_back(tw.embed(gp, W).coords);
      if (t2 + 1 < Dsub) gp = tw.mul(gp, g);
    }
    // odometer over (subfield)^d
    std::vector<int> digits(static_cast<size_t>(d) * Dsub, 0);
    std::vector<int> v(static_cast<size_t>(d) * DW, 0);
    Integer count = integer_pow(Integer(p), static_cast<unsigned long>(d) * Dsub);
    for (Integer it = 0; it < count; ++it) {
      // process current v
      for (long j = 0; j < n; ++j) {
        ++enumerated;
        // Frobenius^m image
        for (int i = 0; i < d; ++i)
          ff.matvec(frobm, v.data() + static_cast<size_t>(i) * DW,
                    fv.data() + static_cast<size_t>(i) * DW);
        for (size_t ci : candidates) {
          apply_flat(flat[ci], j, v.data(), gv.data());
          if (gv == fv) {
            stable_keys.insert(orbit_key(j, v.data()));
            break;
          }
        }
      }
      // increment odometer: digit t -> add basis vector into coordinate block
      if (it + 1 < count) {
        size_t t2 = 0;
        while (true) {
          int coord = static_cast<int>(t2) / Dsub;
          int bidx = static_cast<int>(t2) % Dsub;
          int* block = v.data() + static_cast<size_t>(coord) * DW;
          const std::vector<int>& bv = basis[bidx];
          for (int x = 0; x < DW; ++x) block[x] = gfq::mod_norm(block[x] + bv[x], p);
          if (++digits[t2] < p) break;
          digits[t2] = 0;
          ++t2;
        }
      }
    }
  }

  if (stats) {
    stats->points_enumerated = enumerated;
    stats->work_degree = DW;
    stats->stable_orbits = static_cast<long>(stable_keys.size());
  }
  return Integer(static_cast<long>(stable_keys.size()));
}

// The same count by the counting lemma:
//   #stable orbits = (1/|G|) sum_g #Fix(g^{-1} o Frob^m),
// where each fixed set is cut out by an F_p-affine system over the field
// F_{q^{lcm(n, m ord(g))}}.  Exact, and independent of the enumeration path.
inline Integer orbit_count_burnside(const Action& a, long m,
                                    OracleOptions opt = OracleOptions()) {
  auto rep = action::validate(a);
  require(rep.valid(), Errc::HypothesisViolation, rep.summary());
  require(m >= 1, Errc::ParseError, "field power m must be positive");

  const long order = a.group.order();
  const long n = a.galois_degree();
  const int s = a.tower.degree(a.tower.k_index());
  const int d = a.dim;
  const int p = a.tower.p();

  FieldTower tw = a.tower;
  tw.raise_limits({p, opt.max_degree});

  std::vector<detail::GroupElement> elems = detail::enumerate_group(a);
  Integer total = 0;
  for (const auto& ge : elems) {
    long e_g = ((ge.datum.twist % n) + n) % n;
    if (((e_g - m) % n + n) % n != 0) continue;  // no embedding index is fixed
    long o = detail::element_order(a, ge.datum);
    long wdeg = static_cast<long>(s) * std::lcm(n, m * o);
    require(wdeg <= opt.max_degree, Errc::BudgetExceeded,
            "fixed-point field degree " + std::to_string(wdeg) + " exceeds the cap");
    int W = tw.ensure_level(static_cast<int>(wdeg));
    int DW = tw.degree(W);

    Generator inv = o == 1 ? action::identity_generator(a)
                           : action::generator_power(a, ge.datum, o - 1);

    std::vector<int> frobm = detail::frobenius_flat(tw, W, static_cast<long>(s) * m);

    for (long j = 0; j < n; ++j) {
      long jm = (j + m) % n;
      // v = iota_{jm}(A_inv) v^{q^m} + iota_{jm}(a_inv)
      // linear system (Id - M Frob) v = t over F_p
      int dim = d * DW;
      MatFp sys(p, dim, dim);
      std::vector<int> rhs(dim, 0);
      // embed inverse datum at index jm
      std::vector<FieldElement> Mi, ti;
      for (const auto& e2 : inv.matrix) Mi.push_back(tw.embed(tw.frobenius_q(e2, jm), W));
      for (const auto& e2 : inv.translation) ti.push_back(tw.embed(tw.frobenius_q(e2, jm), W));
      for (int i = 0; i < d; ++i)
        for (int t2 = 0; t2 < DW; ++t2) rhs[static_cast<size_t>(i) * DW + t2] = ti[i].coords[t2];
      // columns: basis vector in coordinate block jj, basis index bi
      for (int jj = 0; jj < d; ++jj)
        for (int bi = 0; bi < DW; ++bi) {
          // w = Frob^m(e)
          FieldElement e2 = tw.zero(W);
          e2.coords[bi] = 1;
          FieldElement w = tw.frobenius_p(e2, static_cast<long>(s) * m);
          // image in each output coordinate: delta - M_{i,jj} w
          for (int i = 0; i < d; ++i) {
            FieldElement mv = tw.mul(Mi[static_cast<size_t>(i) * d + jj], w);
            for (int t2 = 0; t2 < DW; ++t2) {
              int val = gfq::mod_norm(-mv.coords[t2], p);
              if (i == jj && t2 == bi) val = gfq::mod_norm(val + 1, p);
              sys.at(i * DW + t2, jj * DW + bi) = val;
            }
          }
        }
      MatFp homo = sys;
      auto sol = sys.solve(rhs);
      if (!sol.has_value()) continue;
      int nullity = dim - homo.rank();
      total += integer_pow(Integer(p), static_cast<unsigned long>(nullity));
    }
  }
  require(total % order == 0, Errc::Internal, "counting lemma sum is not divisible by |G|");
  return total / order;
}

// subgroup of generator words fixing a point, with the orbit-stabilizer data
inline StabilizerDatum stabilizer(const Action& a, const action::Point& pt, int eval_level) {
  StabilizerDatum out;
  out.group_order = a.group.order();
  std::vector<detail::GroupElement> elems = detail::enumerate_group(a);
  std::set<std::pair<long, std::vector<std::vector<int>>>> orbit;
  for (const auto& ge : elems) {
    action::Point img = action::point_apply(a, ge.datum, pt, eval_level);
    std::vector<std::vector<int>> coords;
    for (const auto& e : img.v) coords.push_back(e.coords);
    bool fixes = img.j == pt.j;
    if (fixes)
      for (int i = 0; i < a.dim; ++i) fixes &= a.tower.equal(img.v[i], pt.v[i]);
    if (fixes) out.fixing_words.push_back(ge.word);
    orbit.insert({img.j, coords});
  }
  out.orbit_size = static_cast<long>(orbit.size());
  require(out.orbit_size * static_cast<long>(out.fixing_words.size()) == out.group_order,
          Errc::Internal, "orbit-stabilizer identity failed");
  return out;
}

}  // namespace motivic::quotient
