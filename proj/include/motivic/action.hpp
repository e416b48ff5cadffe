#pragma once

// Finite abelian group presentations acting semi-linearly and affinely on
// A^d_K over a Galois tower K/k.  A generator is a (twist, matrix,
// translation) datum acting on the coordinate ring: x_i is sent to
// sum_j A_ij x_j + a_i and K-coefficients pass through the twist, a power of
// the q-Frobenius.  Normalization produces coordinates in which tame
// generators act diagonally by roots of unity and wild generators act by
// unitriangular maps plus translations.

#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "motivic/common.hpp"
#include "motivic/gfq.hpp"

namespace motivic::action {

using gfq::FieldElement;
using gfq::FieldTower;
using gfq::MatLev;

struct AbelianGroupSpec {
  std::vector<long> wild_orders;  // powers of the ambient characteristic
  std::vector<long> tame_orders;  // coprime to the characteristic

  long order() const {
    long o = 1;
    for (long w : wild_orders) o *= w;
    for (long t : tame_orders) o *= t;
    return o;
  }
  long tame_part() const {
    long q = 1;
    for (long t : tame_orders) q *= t;
    return q;
  }
  bool is_tame() const { return wild_orders.empty(); }
  size_t factor_count() const { return wild_orders.size() + tame_orders.size(); }
};

struct Generator {
  long twist = 0;  // exponent of the q-Frobenius on K relative to k
  std::vector<FieldElement> matrix;       // d x d, row-major, entries at level K
  std::vector<FieldElement> translation;  // length d, entries at level K
  long declared_order = 1;
};

struct Action {
  FieldTower tower;
  int dim = 0;
  AbelianGroupSpec group;
  std::vector<Generator> generators;  // wild factors first, then tame factors

  int level_K() const { return tower.K_index(); }
  int level_k() const { return tower.k_index(); }
  long galois_degree() const { return tower.rel_degree(tower.k_index(), tower.K_index()); }
  bool wild_generator(size_t idx) const { return idx < group.wild_orders.size(); }
};

// ---------------------------------------------------------------------------
// generator algebra
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<FieldElement> mat_identity(const FieldTower& t, int lvl, int d) {
  std::vector<FieldElement> m(static_cast<size_t>(d) * d, t.zero(lvl));
  for (int i = 0; i < d; ++i) m[static_cast<size_t>(i) * d + i] = t.one(lvl);
  return m;
}

inline std::vector<FieldElement> mat_mul(const FieldTower& t, const std::vector<FieldElement>& a,
                                         const std::vector<FieldElement>& b, int d) {
  int lvl = a.empty() ? 0 : a[0].level;
  std::vector<FieldElement> r(static_cast<size_t>(d) * d, t.zero(lvl));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const FieldElement& aik = a[static_cast<size_t>(i) * d + k];
      if (t.is_zero(aik)) continue;
      for (int j = 0; j < d; ++j)
        r[static_cast<size_t>(i) * d + j] =
            t.add(r[static_cast<size_t>(i) * d + j], t.mul(aik, b[static_cast<size_t>(k) * d + j]));
    }
  return r;
}

inline std::vector<FieldElement> mat_vec(const FieldTower& t, const std::vector<FieldElement>& a,
                                         const std::vector<FieldElement>& v, int d) {
  int lvl = v.empty() ? 0 : v[0].level;
  std::vector<FieldElement> r(d, t.zero(lvl));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      r[i] = t.add(r[i], t.mul(a[static_cast<size_t>(i) * d + j], v[j]));
  return r;
}

inline std::vector<FieldElement> twist_all(const FieldTower& t,
                                           const std::vector<FieldElement>& v, long e) {
  std::vector<FieldElement> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(t.frobenius_q(x, e));
  return r;
}

inline std::vector<FieldElement> mat_inverse(const FieldTower& t, int lvl,
                                             const std::vector<FieldElement>& a, int d) {
  MatLev m(t, lvl, d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = a[static_cast<size_t>(i) * d + j];
  MatLev inv = m.inverse();
  std::vector<FieldElement> r;
  r.reserve(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r.push_back(inv.at(i, j));
  return r;
}

}  // namespace detail

inline Generator identity_generator(const Action& a) {
  Generator g;
  g.twist = 0;
  g.matrix = detail::mat_identity(a.tower, a.level_K(), a.dim);
  g.translation = std::vector<FieldElement>(a.dim, a.tower.zero(a.level_K()));
  g.declared_order = 1;
  return g;
}

// Composition on the coordinate ring: (g o g') sends x to g(g'(x)), giving
// (sigma sigma', sigma(A') * A, sigma(A') * a + sigma(a')).
inline Generator compose(const Action& ctx, const Generator& g, const Generator& gp) {
  const FieldTower& t = ctx.tower;
  long n = ctx.galois_degree();
  Generator r;
  r.twist = (g.twist + gp.twist) % n;
  std::vector<FieldElement> twisted = detail::twist_all(t, gp.matrix, g.twist);
  r.matrix = detail::mat_mul(t, twisted, g.matrix, ctx.dim);
  r.translation = detail::mat_vec(t, twisted, g.translation, ctx.dim);
  std::vector<FieldElement> ta = detail::twist_all(t, gp.translation, g.twist);
  for (int i = 0; i < ctx.dim; ++i) r.translation[i] = t.add(r.translation[i], ta[i]);
  r.declared_order = 0;  // composite, no declared order
  return r;
}

inline bool generator_equal(const Action& ctx, const Generator& a, const Generator& b) {
  long n = ctx.galois_degree();
  if (((a.twist - b.twist) % n + n) % n != 0) return false;
  for (size_t i = 0; i < a.matrix.size(); ++i)
    if (!ctx.tower.equal(a.matrix[i], b.matrix[i])) return false;
  for (size_t i = 0; i < a.translation.size(); ++i)
    if (!ctx.tower.equal(a.translation[i], b.translation[i])) return false;
  return true;
}

inline Generator generator_power(const Action& ctx, const Generator& g, long e) {
  Generator r = identity_generator(ctx);
  Generator base = g;
  while (e > 0) {
    if (e & 1) r = compose(ctx, r, base);
    base = compose(ctx, base, base);
    e >>= 1;
  }
  return r;
}

// Action on geometric points.  A point of A^d_K as a k-scheme is a pair
// (j, v): the embedding K -> F_{q^N} twisted by the j-th power of the
// q-Frobenius, and a coordinate vector over the evaluation field.
// g sends (j, v) to (j + twist, iota_j(A) v + iota_j(a)).
struct Point {
  long j = 0;
  std::vector<FieldElement> v;  // entries at some evaluation level containing K
};

inline Point point_apply(const Action& ctx, const Generator& g, const Point& pt, int eval_level) {
  const FieldTower& t = ctx.tower;
  long n = ctx.galois_degree();
  Point out;
  out.j = ((pt.j + g.twist) % n + n) % n;
  out.v.reserve(ctx.dim);
  for (int i = 0; i < ctx.dim; ++i) {
    FieldElement acc = t.embed(t.frobenius_q(g.translation[i], pt.j), eval_level);
    for (int jj = 0; jj < ctx.dim; ++jj) {
      FieldElement coef =
          t.embed(t.frobenius_q(g.matrix[static_cast<size_t>(i) * ctx.dim + jj], pt.j), eval_level);
      acc = t.add(acc, t.mul(coef, pt.v[jj]));
    }
    out.v.push_back(std::move(acc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
  std::string check;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
  std::string summary() const {
    if (valid()) return "valid";
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "; ";
      s += i.check + ": " + i.detail;
    }
    return s;
  }
};

// Hypothesis checks: factor orders (wild = powers of p, tame coprime to p),
// declared orders realized by the data, pairwise commutativity, twists
// generating Gal(K/k), and tame roots of unity present in the base field.
// Malformed shapes (wrong matrix sizes) are hard errors instead.
inline ValidationReport validate(const Action& a) {
  const FieldTower& t = a.tower;
  int d = a.dim;
  require(d >= 0, Errc::ParseError, "negative dimension");
  require(a.generators.size() == a.group.factor_count(), Errc::ParseError,
          "generator count does not match the group presentation");
  for (const auto& g : a.generators) {
    require(g.matrix.size() == static_cast<size_t>(d) * d, Errc::ParseError,
            "matrix size does not match the dimension");
    require(g.translation.size() == static_cast<size_t>(d), Errc::ParseError,
            "translation size does not match the dimension");
  }

  ValidationReport rep;
  int p = t.p();
  long n = a.galois_degree();

  // factor orders
  for (long w : a.group.wild_orders) {
    long v = w;
    while (v % p == 0) v /= p;
    if (v != 1)
      rep.issues.push_back({"group-shape", "wild order " + std::to_string(w) +
                                               " is not a power of the characteristic " +
                                               std::to_string(p)});
  }
  for (long q : a.group.tame_orders) {
    if (q % p == 0)
      rep.issues.push_back({"group-shape", "tame order " + std::to_string(q) +
                                               " is divisible by the characteristic"});
  }

  // declared orders match the group factors and are realized by the data
  for (size_t i = 0; i < a.generators.size(); ++i) {
    long expected = i < a.group.wild_orders.size()
                        ? a.group.wild_orders[i]
                        : a.group.tame_orders[i - a.group.wild_orders.size()];
    const Generator& g = a.generators[i];
    if (g.declared_order != expected) {
      rep.issues.push_back({"generator-order",
                            "generator " + std::to_string(i) + " declares order " +
                                std::to_string(g.declared_order) + ", group factor has order " +
                                std::to_string(expected)});
      continue;
    }
    Generator pw = generator_power(a, g, g.declared_order);
    if (!generator_equal(a, pw, identity_generator(a)))
      rep.issues.push_back({"generator-order", "generator " + std::to_string(i) +
                                                   " does not have order " +
                                                   std::to_string(g.declared_order)});
  }

  // commutativity
  for (size_t i = 0; i < a.generators.size(); ++i)
    for (size_t j = i + 1; j < a.generators.size(); ++j) {
      Generator gij = compose(a, a.generators[i], a.generators[j]);
      Generator gji = compose(a, a.generators[j], a.generators[i]);
      if (!generator_equal(a, gij, gji))
        rep.issues.push_back({"commutativity", "generators " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " do not commute"});
    }

  // twists generate Gal(K/k)
  long g = n;
  for (const auto& gen : a.generators) g = std::gcd(g, ((gen.twist % n) + n) % n);
  if (n > 1 && g != 1)
    rep.issues.push_back({"twist-surjectivity",
                          "twists generate an index-" + std::to_string(g) +
                              " subgroup of the Galois group of degree " + std::to_string(n)});

  // roots of unity for tame orders must lie in the base field k
  for (long q : a.group.tame_orders) {
    if (q % p == 0) continue;  // reported above
    auto roots = t.roots_of_unity(q, t.k_index());
    if (!roots.present)
      rep.issues.push_back({"roots-of-unity",
                            "the base field has no primitive " + std::to_string(q) +
                                "-th roots of unity (" + std::to_string(q) +
                                " does not divide |k|-1)"});
  }

  return rep;
}

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

// Eq-translation shape: wild matrices unitriangular towards earlier
// variables, tame matrices diagonal.
inline bool is_translation_shape(const Action& a) {
  const FieldTower& t = a.tower;
  int d = a.dim;
  for (size_t gi = 0; gi < a.generators.size(); ++gi) {
    const auto& m = a.generators[gi].matrix;
    bool wild = a.wild_generator(gi);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const FieldElement& e = m[static_cast<size_t>(i) * d + j];
        if (wild) {
          if (i == j && !t.equal(e, t.one(a.level_K()))) return false;
          if (j > i && !t.is_zero(e)) return false;
        } else {
          if (i != j && !t.is_zero(e)) return false;
          if (i == j && !t.try_section(e, a.level_k()).has_value()) return false;
        }
      }
  }
  return true;
}

struct ChangeOfBasis {
  std::vector<FieldElement> matrix;   // d x d over K: new coordinates y = P x
  std::vector<FieldElement> inverse;  // P^{-1}
  bool identity = true;
};

inline Action conjugate(const Action& a, const ChangeOfBasis& cb) {
  if (cb.identity) return a;
  const FieldTower& t = a.tower;
  Action out = a;
  for (auto& g : out.generators) {
    std::vector<FieldElement> tp = detail::twist_all(t, cb.matrix, g.twist);
    g.matrix = detail::mat_mul(t, detail::mat_mul(t, tp, g.matrix, a.dim), cb.inverse, a.dim);
    g.translation = detail::mat_vec(t, tp, g.translation, a.dim);
  }
  return out;
}

namespace detail {

// The k-linear action of a generator on linear forms sum_i s_i x_i: the
// coefficient vector s in K^d maps to (sum_i A_ij sigma(s_i))_j.  Returned
// as a matrix over the base level k in the basis g_K^l * x_i.
inline MatLev form_matrix(const Action& act, const Generator& g) {
  const FieldTower& t = act.tower;
  int K = act.level_K(), k = act.level_k();
  int n = t.rel_degree(k, K), d = act.dim;
  int kdim = n * d;
  MatLev m(t, k, kdim, kdim);
  FieldElement gen = t.generator(K), gl = t.one(K);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < d; ++i) {
      // basis form s with s_i = g^l
      FieldElement s = t.frobenius_q(gl, g.twist);
      for (int j = 0; j < d; ++j) {
        FieldElement entry = t.mul(g.matrix[static_cast<size_t>(i) * d + j], s);
        std::vector<FieldElement> blocks = t.rel_decompose(entry, k);
        for (int bl = 0; bl < n; ++bl) m.at(j * n + bl, i * n + l) = blocks[bl];
      }
    }
    if (l + 1 < n) gl = t.mul(gl, gen);
  }
  return m;
}

inline std::vector<FieldElement> kvec_to_form(const Action& act,
                                              const std::vector<FieldElement>& v) {
  const FieldTower& t = act.tower;
  int K = act.level_K(), k = act.level_k();
  int n = t.rel_degree(k, K), d = act.dim;
  std::vector<FieldElement> form;
  form.reserve(d);
  for (int i = 0; i < d; ++i) {
    std::vector<FieldElement> blocks(v.begin() + static_cast<size_t>(i) * n,
                                     v.begin() + static_cast<size_t>(i + 1) * n);
    form.push_back(t.rel_compose(blocks, k, K));
  }
  return form;
}

using Subspace = std::vector<std::vector<FieldElement>>;  // list of kdim basis vectors over k

inline MatLev columns_to_mat(const FieldTower& t, int lvl, const Subspace& cols) {
  int rows = cols.empty() ? 0 : static_cast<int>(cols[0].size());
  MatLev m(t, lvl, rows, static_cast<int>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c)
    for (int r = 0; r < rows; ++r) m.at(r, static_cast<int>(c)) = cols[c][r];
  return m;
}

}  // namespace detail

// Produces coordinates matching the translation shape: iterates over tame
// generators refining joint eigenspaces, triangularizes wild generators
// within each joint eigenspace by iterated kernels of (A - 1), then selects
// a K-basis from the resulting k-basis.  Deterministic: eigenvalues are
// visited in the fixed element order.
inline std::pair<Action, ChangeOfBasis> normalize(const Action& a) {
  const FieldTower& t = a.tower;
  int K = a.level_K(), k = a.level_k();
  int n = t.rel_degree(k, K), d = a.dim;
  int kdim = n * d;

  ChangeOfBasis cb;
  cb.identity = true;
  if (is_translation_shape(a) || d == 0) return {a, cb};

  // form matrices over k
  std::vector<MatLev> lam;
  lam.reserve(a.generators.size());
  for (const auto& g : a.generators) lam.push_back(detail::form_matrix(a, g));

  // start from the standard basis of k^kdim
  detail::Subspace whole;
  for (int i = 0; i < kdim; ++i) {
    std::vector<FieldElement> e(kdim, t.zero(k));
    e[i] = t.one(k);
    whole.push_back(std::move(e));
  }
  std::vector<detail::Subspace> spaces{whole};

  // refine by tame generators
  for (size_t gi = a.group.wild_orders.size(); gi < a.generators.size(); ++gi) {
    long order = a.group.tame_orders[gi - a.group.wild_orders.size()];
    auto roots = t.roots_of_unity(order, k);
    require(roots.present, Errc::NormalizationFailed,
            "missing roots of unity for tame order " + std::to_string(order));
    // all order-th roots of unity, sorted by the fixed element order
    std::vector<FieldElement> eigs;
    FieldElement z = t.one(k);
    for (long e = 0; e < order; ++e) {
      eigs.push_back(z);
      z = t.mul(z, roots.primitive);
    }
    std::sort(eigs.begin(), eigs.end(),
              [&](const FieldElement& x, const FieldElement& y) { return t.compare(x, y) < 0; });
    eigs.erase(std::unique(eigs.begin(), eigs.end(),
                           [&](const FieldElement& x, const FieldElement& y) {
                             return t.equal(x, y);
                           }),
               eigs.end());

    std::vector<detail::Subspace> next;
    for (const auto& S : spaces) {
      MatLev bs = detail::columns_to_mat(t, k, S);
      int found = 0;
      for (const auto& mu : eigs) {
        // kernel of (Lam - mu) restricted to S
        MatLev img(t, k, kdim, static_cast<int>(S.size()));
        for (size_t c = 0; c < S.size(); ++c) {
          std::vector<FieldElement> lv = lam[gi].mul_vec(S[c]);
          for (int r = 0; r < kdim; ++r)
            img.at(r, static_cast<int>(c)) = t.sub(lv[r], t.mul(mu, S[c][r]));
        }
        auto ker = img.kernel_basis();
        if (ker.empty()) continue;
        detail::Subspace sub;
        for (const auto& coeffs : ker) sub.push_back(bs.mul_vec(coeffs));
        found += static_cast<int>(sub.size());
        next.push_back(std::move(sub));
      }
      require(found == static_cast<int>(S.size()), Errc::NormalizationFailed,
              "tame generator " + std::to_string(gi) +
                  " is not diagonalizable over the base field");
    }
    spaces = std::move(next);
  }

  // triangularize wild generators within each joint eigenspace
  std::vector<std::vector<FieldElement>> ordered;  // global k-basis, flag-compatible
  size_t nwild = a.group.wild_orders.size();
  for (const auto& S : spaces) {
    if (nwild == 0) {
      for (const auto& v : S) ordered.push_back(v);
      continue;
    }
    int dimS = static_cast<int>(S.size());
    MatLev bs = detail::columns_to_mat(t, k, S);
    // C_l = matrix of (Lam_l - 1) restricted to S, in S-coordinates
    std::vector<MatLev> C;
    for (size_t l = 0; l < nwild; ++l) {
      MatLev cl(t, k, dimS, dimS);
      for (int c = 0; c < dimS; ++c) {
        std::vector<FieldElement> lv = lam[l].mul_vec(S[c]);
        for (int r = 0; r < kdim; ++r) lv[r] = t.sub(lv[r], S[c][r]);
        auto coeffs = bs.solve(lv);
        require(coeffs.has_value(), Errc::NormalizationFailed,
                "wild generator does not preserve a joint eigenspace");
        for (int r = 0; r < dimS; ++r) cl.at(r, c) = (*coeffs)[r];
      }
      C.push_back(std::move(cl));
    }
    // iterated kernels: flag F_1 <= F_2 <= ... with (A - 1) F_{t+1} <= F_t
    detail::Subspace flag;  // vectors in S-coordinates, flag-ordered
    while (static_cast<int>(flag.size()) < dimS) {
      MatLev w = detail::columns_to_mat(t, k, flag);
      // condition: C_l v lies in span(flag) for all l
      // rows: for each l, the components of C_l v transverse to span(flag)
      MatLev full(t, k, dimS, dimS);
      for (size_t c = 0; c < flag.size(); ++c)
        for (int r = 0; r < dimS; ++r) full.at(r, static_cast<int>(c)) = flag[c][r];
      // complete flag to a basis to get a transverse projection
      {
        int col = static_cast<int>(flag.size());
        for (int cand = 0; cand < dimS && col < dimS; ++cand) {
          MatLev probe(t, k, dimS, col + 1);
          for (int r = 0; r < dimS; ++r) {
            for (int c = 0; c < col; ++c) probe.at(r, c) = full.at(r, c);
            probe.at(r, col) = r == cand ? t.one(k) : t.zero(k);
          }
          if (probe.rank() == col + 1) {
            full.at(cand, col) = t.one(k);
            ++col;
          }
        }
        require(col == dimS, Errc::NormalizationFailed, "flag completion failed");
      }
      MatLev inv = full.inverse();
      int fs = static_cast<int>(flag.size());
      int trans = dimS - fs;
      MatLev stacked(t, k, trans * static_cast<int>(nwild), dimS);
      for (size_t l = 0; l < nwild; ++l) {
        for (int c = 0; c < dimS; ++c) {
          std::vector<FieldElement> col(dimS, t.zero(k));
          for (int r = 0; r < dimS; ++r) col[r] = C[l].at(r, c);
          std::vector<FieldElement> coords = inv.mul_vec(col);
          for (int r = 0; r < trans; ++r)
            stacked.at(static_cast<int>(l) * trans + r, c) = coords[fs + r];
        }
      }
      auto ker = stacked.kernel_basis();
      // keep kernel vectors independent of the current flag
      MatLev grow(t, k, dimS, dimS);
      int gcol = 0;
      for (const auto& v : flag) {
        for (int r = 0; r < dimS; ++r) grow.at(r, gcol) = v[r];
        ++gcol;
      }
      int added = 0;
      for (const auto& v : ker) {
        MatLev probe(t, k, dimS, gcol + 1);
        for (int r = 0; r < dimS; ++r) {
          for (int c = 0; c < gcol; ++c) probe.at(r, c) = grow.at(r, c);
          probe.at(r, gcol) = v[r];
        }
        if (probe.rank() == gcol + 1) {
          for (int r = 0; r < dimS; ++r) grow.at(r, gcol) = v[r];
          flag.push_back(v);
          ++gcol;
          ++added;
        }
      }
      require(added > 0, Errc::NormalizationFailed,
              "wild generators are not unipotent on a joint eigenspace");
    }
    for (const auto& v : flag) ordered.push_back(bs.mul_vec(v));
  }

  require(static_cast<int>(ordered.size()) == kdim, Errc::NormalizationFailed,
          "basis construction lost dimensions");

  // select a K-basis: keep vectors outside the K-span of those already kept
  std::vector<std::vector<FieldElement>> selected;  // forms in K^d
  for (const auto& v : ordered) {
    if (static_cast<int>(selected.size()) == d) break;
    std::vector<FieldElement> form = detail::kvec_to_form(a, v);
    MatLev probe(t, K, static_cast<int>(selected.size()) + 1, d);
    for (size_t r = 0; r < selected.size(); ++r)
      for (int c = 0; c < d; ++c) probe.at(static_cast<int>(r), c) = selected[r][c];
    for (int c = 0; c < d; ++c) probe.at(static_cast<int>(selected.size()), c) = form[c];
    if (probe.rank() == static_cast<int>(selected.size()) + 1) selected.push_back(form);
  }
  require(static_cast<int>(selected.size()) == d, Errc::NormalizationFailed,
          "could not select a K-basis from the k-basis");

  cb.identity = false;
  cb.matrix.clear();
  for (const auto& row : selected)
    for (int c = 0; c < d; ++c) cb.matrix.push_back(row[c]);
  cb.inverse = detail::mat_inverse(t, K, cb.matrix, d);

  Action out = conjugate(a, cb);
  require(is_translation_shape(out), Errc::NormalizationFailed,
          "conjugated action is not in translation shape");
  return {out, cb};
}

// ---------------------------------------------------------------------------
// tame fixed point
// ---------------------------------------------------------------------------

// Joint fixed point of the tame part, solved k-linearly: for every tame
// generator, A c - sigma(c) = -translation.  Recentering coordinates at the
// solution removes all tame translations; wild translations transform along
// but their linear parts are untouched.  Returns nullopt when no recentering
// is needed.
inline std::optional<std::vector<FieldElement>> tame_fixed_point(const Action& a) {
  const FieldTower& t = a.tower;
  int K = a.level_K(), k = a.level_k();
  int n = t.rel_degree(k, K), d = a.dim;
  int kdim = n * d;
  size_t nwild = a.group.wild_orders.size();

  bool needed = false;
  for (size_t gi = nwild; gi < a.generators.size(); ++gi)
    for (const auto& e : a.generators[gi].translation)
      if (!t.is_zero(e)) needed = true;
  if (!needed) return std::nullopt;

  size_t ntame = a.generators.size() - nwild;
  MatLev sys(t, k, static_cast<int>(ntame) * kdim, kdim);
  std::vector<FieldElement> rhs(static_cast<size_t>(ntame) * kdim, t.zero(k));

  FieldElement gen = t.generator(K);
  for (size_t gi = nwild; gi < a.generators.size(); ++gi) {
    const Generator& g = a.generators[gi];
    int row0 = static_cast<int>(gi - nwild) * kdim;
    // columns: basis vector c = g_K^l in slot i
    FieldElement gl = t.one(K);
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < d; ++i) {
        // image (A c - sigma(c)) in K^d
        std::vector<FieldElement> img(d, t.zero(K));
        for (int j = 0; j < d; ++j)
          img[j] = t.mul(g.matrix[static_cast<size_t>(j) * d + i], gl);
        img[i] = t.sub(img[i], t.frobenius_q(gl, g.twist));
        for (int j = 0; j < d; ++j) {
          std::vector<FieldElement> blocks = t.rel_decompose(img[j], k);
          for (int bl = 0; bl < n; ++bl) sys.at(row0 + j * n + bl, i * n + l) = blocks[bl];
        }
      }
      if (l + 1 < n) gl = t.mul(gl, gen);
    }
    for (int j = 0; j < d; ++j) {
      std::vector<FieldElement> blocks = t.rel_decompose(t.neg(g.translation[j]), k);
      for (int bl = 0; bl < n; ++bl) rhs[static_cast<size_t>(row0) + j * n + bl] = blocks[bl];
    }
  }

  auto sol = sys.solve(rhs);
  require(sol.has_value(), Errc::Inconsistent,
          "no joint tame fixed point; input violates the abelian/tame hypotheses");
  // assemble c in K^d
  std::vector<FieldElement> c;
  c.reserve(d);
  for (int i = 0; i < d; ++i) {
    std::vector<FieldElement> blocks(sol->begin() + static_cast<size_t>(i) * n,
                                     sol->begin() + static_cast<size_t>(i + 1) * n);
    c.push_back(t.rel_compose(blocks, k, K));
  }
  return c;
}

// shift coordinates by the fixed point: y_i = x_i - c_i
inline Action recenter(const Action& a, const std::vector<FieldElement>& c) {
  const FieldTower& t = a.tower;
  Action out = a;
  for (auto& g : out.generators) {
    std::vector<FieldElement> ac = detail::mat_vec(t, g.matrix, c, a.dim);
    for (int i = 0; i < a.dim; ++i) {
      g.translation[i] = t.add(g.translation[i], t.sub(ac[i], t.frobenius_q(c[i], g.twist)));
    }
  }
  return out;
}

struct NormalizationResult {
  Action action;
  ChangeOfBasis basis;
  std::optional<std::vector<FieldElement>> recentering;  // y = P x - c
};

// Normalized coordinates with tame translations removed; the launch point
// for the quotient engine.
inline NormalizationResult normalize_and_center(const Action& a) {
  auto [norm, cb] = normalize(a);
  NormalizationResult res;
  res.basis = cb;
  res.recentering = tame_fixed_point(norm);
  if (res.recentering.has_value()) {
    norm = recenter(norm, *res.recentering);
    size_t nwild = norm.group.wild_orders.size();
    for (size_t gi = nwild; gi < norm.generators.size(); ++gi)
      for (const auto& e : norm.generators[gi].translation)
        require(norm.tower.is_zero(e), Errc::Internal, "recentering left a tame translation");
  }
  res.action = std::move(norm);
  return res;
}

}  // namespace motivic::action
