#pragma once

// Exact arithmetic in finite fields F_q and towers F_q ⊂ F_{q^n} ⊂ ... with
// Frobenius maps, roots of unity and Artin–Schreier generators.
//
// Every level of a tower is represented over the prime field F_p by a monic
// irreducible modulus chosen deterministically (first irreducible in a fixed
// enumeration), so identical parameters always produce identical towers.
// Embeddings between levels are computed once, when a level is created, by
// finding a root of the smaller modulus in the larger field.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "motivic/common.hpp"

namespace motivic::gfq {

// ---------------------------------------------------------------------------
// arithmetic mod a small prime
// ---------------------------------------------------------------------------

inline int mod_norm(long v, int p) {
  long r = v % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

inline int mod_inv(int a, int p) {
  require(a % p != 0, Errc::DivisionByZero, "inverse of zero mod " + std::to_string(p));
  // extended euclid
  int t = 0, newt = 1, r = p, newr = mod_norm(a, p);
  while (newr != 0) {
    int q = r / newr;
    int tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  return mod_norm(t, p);
}

inline bool is_prime_small(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::pair<long, int>> factor_small(long n) {
  std::vector<std::pair<long, int>> fs;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      int e = 0;
      while (n % d == 0) {
        n /= d;
        ++e;
      }
      fs.emplace_back(d, e);
    }
  }
  if (n > 1) fs.emplace_back(n, 1);
  return fs;
}

// ---------------------------------------------------------------------------
// dense polynomials over F_p  (coefficient c[i] of x^i, no trailing zeros)
// ---------------------------------------------------------------------------

struct PolyFp {
  int p = 2;
  std::vector<int> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  static PolyFp zero(int p) { return PolyFp{p, {}}; }
  static PolyFp x(int p) { return PolyFp{p, {0, 1}}; }
  static PolyFp constant(int p, long v) {
    PolyFp f{p, {mod_norm(v, p)}};
    f.trim();
    return f;
  }

  bool operator==(const PolyFp& o) const { return p == o.p && c == o.c; }
};

inline PolyFp poly_add(const PolyFp& a, const PolyFp& b) {
  PolyFp r{a.p, {}};
  r.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (size_t i = 0; i < r.c.size(); ++i) {
    long v = (i < a.c.size() ? a.c[i] : 0) + (i < b.c.size() ? b.c[i] : 0);
    r.c[i] = mod_norm(v, a.p);
  }
  r.trim();
  return r;
}

inline PolyFp poly_sub(const PolyFp& a, const PolyFp& b) {
  PolyFp r{a.p, {}};
  r.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (size_t i = 0; i < r.c.size(); ++i) {
    long v = (i < a.c.size() ? a.c[i] : 0) - (i < b.c.size() ? b.c[i] : 0);
    r.c[i] = mod_norm(v, a.p);
  }
  r.trim();
  return r;
}

inline PolyFp poly_mul(const PolyFp& a, const PolyFp& b) {
  if (a.is_zero() || b.is_zero()) return PolyFp::zero(a.p);
  PolyFp r{a.p, std::vector<int>(a.c.size() + b.c.size() - 1, 0)};
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (size_t j = 0; j < b.c.size(); ++j) {
      r.c[i + j] = mod_norm(r.c[i + j] + static_cast<long>(a.c[i]) * b.c[j], a.p);
    }
  }
  r.trim();
  return r;
}

// division with remainder; divisor need not be monic
inline std::pair<PolyFp, PolyFp> poly_divmod(const PolyFp& a, const PolyFp& b) {
  require(!b.is_zero(), Errc::DivisionByZero, "polynomial division by zero");
  PolyFp q = PolyFp::zero(a.p), r = a;
  int inv_lead = mod_inv(b.c.back(), a.p);
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int shift = r.degree() - b.degree();
    int coef = mod_norm(static_cast<long>(r.c.back()) * inv_lead, a.p);
    if (static_cast<int>(q.c.size()) <= shift) q.c.resize(shift + 1, 0);
    q.c[shift] = mod_norm(q.c[shift] + coef, a.p);
    for (int i = 0; i <= b.degree(); ++i) {
      r.c[i + shift] = mod_norm(r.c[i + shift] - static_cast<long>(coef) * b.c[i], a.p);
    }
    r.trim();
  }
  q.trim();
  return {q, r};
}

inline PolyFp poly_mod(const PolyFp& a, const PolyFp& b) { return poly_divmod(a, b).second; }

inline PolyFp poly_gcd(PolyFp a, PolyFp b) {
  while (!b.is_zero()) {
    PolyFp r = poly_mod(a, b);
    a = b;
    b = r;
  }
  if (!a.is_zero()) {
    int inv = mod_inv(a.c.back(), a.p);
    for (auto& v : a.c) v = mod_norm(static_cast<long>(v) * inv, a.p);
  }
  return a;
}

inline PolyFp poly_mulmod(const PolyFp& a, const PolyFp& b, const PolyFp& m) {
  return poly_mod(poly_mul(a, b), m);
}

inline PolyFp poly_powmod(PolyFp base, const Integer& e, const PolyFp& m) {
  PolyFp r = PolyFp::constant(m.p, 1);
  base = poly_mod(base, m);
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  if (e == 0) return r;
  for (size_t i = bits; i-- > 0;) {
    r = poly_mulmod(r, r, m);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = poly_mulmod(r, base, m);
  }
  return r;
}

// f monic of degree n >= 1 is irreducible over F_p iff x^{p^n} = x (mod f)
// and gcd(x^{p^{n/l}} - x, f) = 1 for every prime l | n.
inline bool poly_irreducible(const PolyFp& f) {
  int n = f.degree();
  if (n < 1) return false;
  if (n == 1) return true;
  const PolyFp x = PolyFp::x(f.p);
  auto frob_iter = [&](int k) {
    // x^{p^k} mod f
    PolyFp t = poly_mod(x, f);
    for (int i = 0; i < k; ++i) t = poly_powmod(t, f.p, f);
    return t;
  };
  if (!(frob_iter(n) == poly_mod(x, f))) return false;
  for (auto [l, e] : factor_small(n)) {
    PolyFp g = poly_sub(frob_iter(n / static_cast<int>(l)), x);
    PolyFp d = poly_gcd(g, f);
    if (d.degree() != 0) return false;
  }
  return true;
}

// First monic irreducible of the given degree: the non-leading coefficients
// are enumerated as base-p digits of 0, 1, 2, ... with the constant term
// least significant.
inline PolyFp first_irreducible(int p, int degree) {
  if (degree == 1) return PolyFp::x(p);  // c = 0 gives x, already irreducible
  Integer count = integer_pow(Integer(p), degree);
  for (Integer c = 0; c < count; ++c) {
    PolyFp f{p, std::vector<int>(degree + 1, 0)};
    f.c[degree] = 1;
    Integer rest = c;
    for (int i = 0; i < degree; ++i) {
      f.c[i] = static_cast<int>(mpz_fdiv_ui(rest.get_mpz_t(), p));
      rest /= p;
    }
    if (poly_irreducible(f)) return f;
  }
  fail(Errc::Internal, "no irreducible polynomial found");  // unreachable
}

// ---------------------------------------------------------------------------
// dense matrices over F_p
// ---------------------------------------------------------------------------

struct MatFp {
  int p = 2;
  int rows = 0, cols = 0;
  std::vector<int> a;  // row-major

  MatFp() = default;
  MatFp(int p_, int r, int c) : p(p_), rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}

  int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  int at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  static MatFp identity(int p, int n) {
    MatFp m(p, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::vector<int> mul_vec(const std::vector<int>& v) const {
    std::vector<int> r(rows, 0);
    for (int i = 0; i < rows; ++i) {
      long acc = 0;
      for (int j = 0; j < cols; ++j) acc += static_cast<long>(at(i, j)) * v[j];
      r[i] = mod_norm(acc, p);
    }
    return r;
  }

  MatFp mul(const MatFp& o) const {
    MatFp r(p, rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        int aik = at(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < o.cols; ++j)
          r.at(i, j) = mod_norm(r.at(i, j) + static_cast<long>(aik) * o.at(k, j), p);
      }
    return r;
  }

  // in-place row reduction; returns pivot column of each pivot row
  std::vector<int> rref() {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
      int sel = -1;
      for (int i = r; i < rows; ++i)
        if (at(i, c) != 0) {
          sel = i;
          break;
        }
      if (sel < 0) continue;
      for (int j = 0; j < cols; ++j) std::swap(at(sel, j), at(r, j));
      int inv = mod_inv(at(r, c), p);
      for (int j = 0; j < cols; ++j) at(r, j) = mod_norm(static_cast<long>(at(r, j)) * inv, p);
      for (int i = 0; i < rows; ++i) {
        if (i == r || at(i, c) == 0) continue;
        int f = at(i, c);
        for (int j = 0; j < cols; ++j)
          at(i, j) = mod_norm(at(i, j) - static_cast<long>(f) * at(r, j), p);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  int rank() const {
    MatFp t = *this;
    return static_cast<int>(t.rref().size());
  }

  // solve A x = b, free variables set to zero; nullopt if inconsistent
  std::optional<std::vector<int>> solve(const std::vector<int>& b) const {
    MatFp aug(p, rows, cols + 1);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols) = b[i];
    }
    std::vector<int> piv = aug.rref();
    for (size_t i = 0; i < piv.size(); ++i)
      if (piv[i] == cols) return std::nullopt;
    std::vector<int> x(cols, 0);
    for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug.at(static_cast<int>(i), cols);
    return x;
  }

  std::vector<std::vector<int>> kernel_basis() const {
    MatFp t = *this;
    std::vector<int> piv = t.rref();
    std::vector<bool> is_piv(cols, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<std::vector<int>> basis;
    for (int c = 0; c < cols; ++c) {
      if (is_piv[c]) continue;
      std::vector<int> v(cols, 0);
      v[c] = 1;
      for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = mod_norm(-t.at(static_cast<int>(i), c), p);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  MatFp inverse() const {
    require(rows == cols, Errc::Internal, "inverse of non-square matrix");
    MatFp aug(p, rows, 2 * cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols + i) = 1;
    }
    std::vector<int> piv = aug.rref();
    require(static_cast<int>(piv.size()) == rows && piv[rows - 1] == rows - 1 && piv[0] == 0,
            Errc::Internal, "matrix not invertible");
    for (int i = 0; i < rows; ++i)
      require(piv[i] == i, Errc::Internal, "matrix not invertible");
    MatFp inv(p, rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) inv.at(i, j) = aug.at(i, cols + j);
    return inv;
  }
};

// ---------------------------------------------------------------------------
// field elements and towers
// ---------------------------------------------------------------------------

// Coefficient vector over F_p in the power basis of its level's generator.
// Arithmetic is closed within a level; cross-level use requires an explicit
// embedding through the tower.
struct FieldElement {
  int level = 0;
  std::vector<int> coords;

  bool operator==(const FieldElement& o) const { return level == o.level && coords == o.coords; }
};

struct FrobeniusPower {
  long exponent = 0;  // power of the q-Frobenius relative to the tower's base field
};

class FieldTower;

// Default desk-scale bounds; raise them explicitly for larger experiments.
struct TowerLimits {
  int max_p = 13;
  int max_degree = 64;
};

// univariate polynomial with coefficients in one tower level
struct LevelPoly {
  int level = 0;
  std::vector<FieldElement> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
};

class FieldTower {
 public:
  using Limits = TowerLimits;

  FieldTower() = default;

  // step_degrees are relative extension degrees starting from the prime
  // field: {s, n, ...} builds F_p ⊂ F_{p^s} = k ⊂ F_{p^{sn}} = K ⊂ ...
  FieldTower(int p, const std::vector<int>& step_degrees, TowerLimits lim = TowerLimits()) : p_(p), limits_(lim) {
    require(is_prime_small(p), Errc::ParseError, "characteristic must be prime");
    require(p <= lim.max_p, Errc::BudgetExceeded,
            "characteristic " + std::to_string(p) + " exceeds limit " + std::to_string(lim.max_p));
    add_level(1);
    long deg = 1;
    for (int s : step_degrees) {
      require(s >= 1, Errc::ParseError, "extension degree must be positive");
      deg *= s;
      require(deg <= lim.max_degree, Errc::BudgetExceeded,
              "tower degree " + std::to_string(deg) + " exceeds limit");
      ensure_level(static_cast<int>(deg));
    }
    step_degrees_ = step_degrees;
    k_index_ = step_degrees.empty() ? 0 : index_by_degree(static_cast<int>(step_degrees[0]));
    K_index_ = index_by_degree(static_cast<int>(deg));
  }

  // Rebuild from serialized data; provided moduli are verified irreducible.
  static FieldTower from_serialized(int p, const std::vector<int>& step_degrees,
                                    const std::vector<PolyFp>& moduli, TowerLimits lim = TowerLimits()) {
    FieldTower t(p, step_degrees, lim);
    size_t li = 0;
    long deg = 1;
    std::vector<long> degs{1};
    for (int s : step_degrees) degs.push_back(deg *= s);
    for (long d : degs) {
      require(li < moduli.size(), Errc::ParseError, "missing modulus");
      int idx = t.index_by_degree(static_cast<int>(d));
      const PolyFp& m = moduli[li++];
      require(m.degree() == static_cast<int>(d) && poly_irreducible(m), Errc::ParseError,
              "modulus is not an irreducible polynomial of the declared degree");
      // deterministic construction must agree with the serialized tower
      require(m == t.levels_[idx].modulus, Errc::ParseError,
              "modulus does not match the deterministic tower construction");
    }
    return t;
  }

  int p() const { return p_; }

  // Raise degree bounds on a private working copy (the oracle's evaluation
  // fields routinely exceed the declared tower).
  void raise_limits(const TowerLimits& lim) {
    limits_.max_p = std::max(limits_.max_p, lim.max_p);
    limits_.max_degree = std::max(limits_.max_degree, lim.max_degree);
  }

  int k_index() const { return k_index_; }
  int K_index() const { return K_index_; }
  int level_count() const { return static_cast<int>(levels_.size()); }
  int degree(int lvl) const { return levels_[lvl].degree; }
  const PolyFp& modulus(int lvl) const { return levels_[lvl].modulus; }
  const std::vector<int>& step_degrees() const { return step_degrees_; }
  const Limits& limits() const { return limits_; }

  Integer level_size(int lvl) const { return integer_pow(Integer(p_), degree(lvl)); }

  int index_by_degree(int deg) const {
    for (int i = 0; i < level_count(); ++i)
      if (levels_[i].degree == deg) return i;
    return -1;
  }

  // relative degree [sup : sub]; the degrees must divide
  int rel_degree(int sub, int sup) const {
    require(degree(sup) % degree(sub) == 0, Errc::LevelMismatch, "levels do not nest");
    return degree(sup) / degree(sub);
  }

  // Creates the level (and its embeddings into/from existing levels) if it
  // is not already present. Returns the level index.
  int ensure_level(int absolute_degree) {
    require(absolute_degree >= 1 && absolute_degree <= limits_.max_degree, Errc::BudgetExceeded,
            "field degree " + std::to_string(absolute_degree) + " exceeds limit " +
                std::to_string(limits_.max_degree));
    int idx = index_by_degree(absolute_degree);
    if (idx >= 0) return idx;
    return add_level(absolute_degree);
  }

  // ---- element constructors -------------------------------------------

  FieldElement zero(int lvl) const { return FieldElement{lvl, std::vector<int>(degree(lvl), 0)}; }

  FieldElement from_int(int lvl, long v) const {
    FieldElement e = zero(lvl);
    e.coords[0] = mod_norm(v, p_);
    return e;
  }

  FieldElement one(int lvl) const { return from_int(lvl, 1); }

  FieldElement generator(int lvl) const {
    FieldElement e = zero(lvl);
    if (degree(lvl) == 1) return e;  // the prime field: its generator is 0 (root of x)
    e.coords[1] = 1;
    return e;
  }

  FieldElement from_coords(int lvl, std::vector<int> coords) const {
    require(static_cast<int>(coords.size()) == degree(lvl), Errc::ParseError,
            "coordinate vector has wrong length");
    for (auto& v : coords) v = mod_norm(v, p_);
    return FieldElement{lvl, std::move(coords)};
  }

  // deterministic enumeration: element k has the base-p digits of k as
  // coordinates, constant term least significant
  FieldElement element_at(int lvl, Integer idx) const {
    FieldElement e = zero(lvl);
    for (int i = 0; i < degree(lvl); ++i) {
      e.coords[i] = static_cast<int>(mpz_fdiv_ui(idx.get_mpz_t(), p_));
      idx /= p_;
    }
    return e;
  }

  Integer element_index(const FieldElement& a) const {
    Integer idx = 0;
    for (int i = degree(a.level); i-- > 0;) {
      idx *= p_;
      idx += a.coords[i];
    }
    return idx;
  }

  // fixed total order on field elements of one level
  int compare(const FieldElement& a, const FieldElement& b) const {
    check_level(a, b);
    for (int i = degree(a.level); i-- > 0;) {
      if (a.coords[i] != b.coords[i]) return a.coords[i] < b.coords[i] ? -1 : 1;
    }
    return 0;
  }

  bool is_zero(const FieldElement& a) const {
    for (int v : a.coords)
      if (v != 0) return false;
    return true;
  }

  bool equal(const FieldElement& a, const FieldElement& b) const {
    check_level(a, b);
    return a.coords == b.coords;
  }

  // ---- arithmetic -------------------------------------------------------

  FieldElement add(const FieldElement& a, const FieldElement& b) const {
    check_level(a, b);
    FieldElement r = a;
    for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = mod_norm(r.coords[i] + b.coords[i], p_);
    return r;
  }

  FieldElement sub(const FieldElement& a, const FieldElement& b) const {
    check_level(a, b);
    FieldElement r = a;
    for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = mod_norm(r.coords[i] - b.coords[i], p_);
    return r;
  }

  FieldElement neg(const FieldElement& a) const {
    FieldElement r = a;
    for (auto& v : r.coords) v = mod_norm(-v, p_);
    return r;
  }

  FieldElement mul(const FieldElement& a, const FieldElement& b) const {
    check_level(a, b);
    PolyFp pa = to_poly(a), pb = to_poly(b);
    PolyFp pr = poly_mulmod(pa, pb, levels_[a.level].modulus);
    return from_poly(a.level, pr);
  }

  FieldElement inv(const FieldElement& a) const {
    require(!is_zero(a), Errc::DivisionByZero, "inverse of zero");
    // extended euclid in F_p[x] against the modulus
    PolyFp r0 = levels_[a.level].modulus, r1 = to_poly(a);
    PolyFp s0 = PolyFp::zero(p_), s1 = PolyFp::constant(p_, 1);
    while (!(r1.degree() <= 0)) {
      auto [q, r2] = poly_divmod(r0, r1);
      PolyFp s2 = poly_sub(s0, poly_mul(q, s1));
      r0 = r1;
      r1 = r2;
      s0 = s1;
      s1 = s2;
    }
    require(!r1.is_zero(), Errc::Internal, "modulus not irreducible?");
    int lead_inv = mod_inv(r1.c[0], p_);
    PolyFp res = poly_mul(s1, PolyFp::constant(p_, lead_inv));
    return from_poly(a.level, poly_mod(res, levels_[a.level].modulus));
  }

  FieldElement div(const FieldElement& a, const FieldElement& b) const { return mul(a, inv(b)); }

  FieldElement pow(const FieldElement& a, const Integer& e) const {
    if (e < 0) return pow(inv(a), -e);
    FieldElement r = one(a.level);
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return r;
    for (size_t i = bits; i-- > 0;) {
      r = mul(r, r);
      if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, a);
    }
    return r;
  }

  // absolute Frobenius a -> a^{p^times}
  FieldElement frobenius_p(const FieldElement& a, long times = 1) const {
    int d = degree(a.level);
    long t = ((times % d) + d) % d;
    FieldElement r = a;
    for (long i = 0; i < t; ++i) r.coords = levels_[a.level].frobenius.mul_vec(r.coords);
    return r;
  }

  // q-Frobenius relative to the base field k: a -> a^{q^power}
  FieldElement frobenius_q(const FieldElement& a, long power) const {
    int s = degree(k_index_);
    require(degree(a.level) % s == 0, Errc::LevelMismatch,
            "level is not an extension of the base field");
    long n = degree(a.level) / s;
    long e = ((power % n) + n) % n;
    return frobenius_p(a, e * s);
  }

  // ---- embeddings ---------------------------------------------------------

  FieldElement embed(const FieldElement& a, int to_level) const {
    if (a.level == to_level) return a;
    const EmbedData& em = embedding(a.level, to_level);
    FieldElement r = zero(to_level);
    for (int t = 0; t < degree(a.level); ++t) {
      if (a.coords[t] == 0) continue;
      for (int j = 0; j < degree(to_level); ++j)
        r.coords[j] = mod_norm(r.coords[j] + static_cast<long>(a.coords[t]) * em.root_powers[t].coords[j], p_);
    }
    return r;
  }

  // coordinates of a with respect to the power basis of sup's generator over
  // sub: a = sum_j embed(c_j) * g_sup^j
  std::vector<FieldElement> rel_decompose(const FieldElement& a, int sub) const {
    int sup = a.level;
    if (sub == sup) return {a};
    const EmbedData& em = embedding(sub, sup);
    std::vector<int> y = em.rel_inverse.mul_vec(a.coords);
    int r = rel_degree(sub, sup), ds = degree(sub);
    std::vector<FieldElement> out;
    out.reserve(r);
    for (int j = 0; j < r; ++j) {
      FieldElement c = zero(sub);
      for (int t = 0; t < ds; ++t) c.coords[t] = y[static_cast<size_t>(j) * ds + t];
      out.push_back(std::move(c));
    }
    return out;
  }

  FieldElement rel_compose(const std::vector<FieldElement>& coeffs, int sub, int sup) const {
    FieldElement g = generator(sup), acc = zero(sup), gp = one(sup);
    for (size_t j = 0; j < coeffs.size(); ++j) {
      acc = add(acc, mul(embed(coeffs[j], sup), gp));
      if (j + 1 < coeffs.size()) gp = mul(gp, g);
    }
    return acc;
  }

  std::optional<FieldElement> try_section(const FieldElement& a, int to_level) const {
    if (a.level == to_level) return a;
    require(degree(a.level) % degree(to_level) == 0, Errc::LevelMismatch, "not a subfield");
    std::vector<FieldElement> cs = rel_decompose(a, to_level);
    for (size_t j = 1; j < cs.size(); ++j)
      if (!is_zero(cs[j])) return std::nullopt;
    return cs[0];
  }

  FieldElement section(const FieldElement& a, int to_level) const {
    auto s = try_section(a, to_level);
    require(s.has_value(), Errc::LevelMismatch, "element does not lie in the requested subfield");
    return *s;
  }

  // ---- roots of unity -----------------------------------------------------

  struct RootsResult {
    bool present = false;
    FieldElement primitive;
  };

  // true iff m divides |level| - 1; returns a primitive m-th root when present
  RootsResult roots_of_unity(long m, int lvl) const {
    require(m >= 1, Errc::ParseError, "root order must be positive");
    require(m % p_ != 0, Errc::WildOrder,
            "order " + std::to_string(m) + " is divisible by the characteristic");
    Integer size = level_size(lvl);
    Integer grp = size - 1;
    if (grp % m != 0) return {false, zero(lvl)};
    Integer cof = grp / m;
    auto fac = factor_small(m);
    for (Integer idx = 1; idx < size; ++idx) {
      FieldElement z = pow(element_at(lvl, idx), cof);
      bool primitive = !equal(z, one(lvl)) || m == 1;
      for (auto [l, e] : fac) {
        if (equal(pow(z, Integer(m / l)), one(lvl))) {
          primitive = false;
          break;
        }
      }
      if (primitive) return {true, z};
    }
    fail(Errc::Internal, "no primitive root found despite divisibility");
  }

  // ---- Artin–Schreier -----------------------------------------------------

  // For [K:K'] = p, returns omega with gamma(omega) = omega + 1 where gamma
  // is the relative Frobenius a -> a^{|K'|} generating Gal(K/K').
  // omega^p - omega automatically lies in K'.
  FieldElement artin_schreier_omega(int levelK, int levelKprime) const {
    require(degree(levelK) % degree(levelKprime) == 0, Errc::NoSuchExtension, "levels do not nest");
    require(degree(levelK) == p_ * degree(levelKprime), Errc::NoSuchExtension,
            "extension degree is not the characteristic");
    // solve (gamma - 1) z = 1 over F_p
    int D = degree(levelK);
    MatFp m(p_, D, D);
    FieldElement g = generator(levelK), gp = one(levelK);
    for (int j = 0; j < D; ++j) {
      FieldElement img = sub(frobenius_p(gp, degree(levelKprime)), gp);
      for (int i = 0; i < D; ++i) m.at(i, j) = img.coords[i];
      if (j + 1 < D) gp = mul(gp, g);
    }
    std::vector<int> rhs(D, 0);
    rhs[0] = 1;
    auto sol = m.solve(rhs);
    require(sol.has_value(), Errc::Internal, "Artin-Schreier generator system inconsistent");
    return FieldElement{levelK, *sol};
  }

  // ---- polynomials over a level -------------------------------------------

  LevelPoly lp_trim(LevelPoly f) const {
    while (!f.c.empty() && is_zero(f.c.back())) f.c.pop_back();
    return f;
  }

  LevelPoly lp_from(int lvl, std::vector<FieldElement> cs) const {
    return lp_trim(LevelPoly{lvl, std::move(cs)});
  }

  LevelPoly lp_add(const LevelPoly& a, const LevelPoly& b) const {
    LevelPoly r{a.level, {}};
    size_t n = std::max(a.c.size(), b.c.size());
    r.c.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      FieldElement v = i < a.c.size() ? a.c[i] : zero(a.level);
      if (i < b.c.size()) v = add(v, b.c[i]);
      r.c.push_back(std::move(v));
    }
    return lp_trim(r);
  }

  LevelPoly lp_sub(const LevelPoly& a, const LevelPoly& b) const {
    LevelPoly nb{b.level, {}};
    nb.c.reserve(b.c.size());
    for (const auto& v : b.c) nb.c.push_back(neg(v));
    return lp_add(a, nb);
  }

  LevelPoly lp_mul(const LevelPoly& a, const LevelPoly& b) const {
    if (a.c.empty() || b.c.empty()) return LevelPoly{a.level, {}};
    LevelPoly r{a.level, std::vector<FieldElement>(a.c.size() + b.c.size() - 1, zero(a.level))};
    for (size_t i = 0; i < a.c.size(); ++i) {
      if (is_zero(a.c[i])) continue;
      for (size_t j = 0; j < b.c.size(); ++j)
        r.c[i + j] = add(r.c[i + j], mul(a.c[i], b.c[j]));
    }
    return lp_trim(r);
  }

  LevelPoly lp_scale(const LevelPoly& a, const FieldElement& s) const {
    LevelPoly r{a.level, {}};
    r.c.reserve(a.c.size());
    for (const auto& v : a.c) r.c.push_back(mul(v, s));
    return lp_trim(r);
  }

  LevelPoly lp_mod(const LevelPoly& a, const LevelPoly& m) const {
    require(!m.c.empty(), Errc::DivisionByZero, "polynomial division by zero");
    LevelPoly r = a;
    FieldElement lead_inv = inv(m.c.back());
    while (!r.c.empty() && r.degree() >= m.degree()) {
      FieldElement coef = mul(r.c.back(), lead_inv);
      int shift = r.degree() - m.degree();
      for (int i = 0; i <= m.degree(); ++i)
        r.c[i + shift] = sub(r.c[i + shift], mul(coef, m.c[i]));
      r = lp_trim(r);
    }
    return r;
  }

  LevelPoly lp_mulmod(const LevelPoly& a, const LevelPoly& b, const LevelPoly& m) const {
    return lp_mod(lp_mul(a, b), m);
  }

  LevelPoly lp_powmod(LevelPoly base, const Integer& e, const LevelPoly& m) const {
    LevelPoly r = lp_from(base.level, {one(base.level)});
    base = lp_mod(base, m);
    if (e == 0) return r;
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = bits; i-- > 0;) {
      r = lp_mulmod(r, r, m);
      if (mpz_tstbit(e.get_mpz_t(), i)) r = lp_mulmod(r, base, m);
    }
    return r;
  }

  LevelPoly lp_gcd(LevelPoly a, LevelPoly b) const {
    while (!b.c.empty()) {
      LevelPoly r = lp_mod(a, b);
      a = b;
      b = r;
    }
    if (!a.c.empty()) a = lp_scale(a, inv(a.c.back()));
    return a;
  }

  FieldElement lp_eval(const LevelPoly& f, const FieldElement& x) const {
    FieldElement acc = zero(f.level);
    for (size_t i = f.c.size(); i-- > 0;) acc = add(mul(acc, x), f.c[i]);
    return acc;
  }

  // substitute g into f: f(g(x))
  LevelPoly lp_compose(const LevelPoly& f, const LevelPoly& g) const {
    LevelPoly acc{f.level, {}};
    for (size_t i = f.c.size(); i-- > 0;) {
      acc = lp_mul(acc, g);
      acc = lp_add(acc, lp_from(f.level, {f.c[i]}));
    }
    return acc;
  }

  // apply a coefficient map (e.g. a Frobenius power) to all coefficients
  template <typename F>
  LevelPoly lp_map(const LevelPoly& f, F&& fn) const {
    LevelPoly r{f.level, {}};
    r.c.reserve(f.c.size());
    for (const auto& v : f.c) r.c.push_back(fn(v));
    return lp_trim(r);
  }

  std::string lp_to_string(const LevelPoly& f, const std::string& var = "x") const {
    if (f.c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = f.c.size(); i-- > 0;) {
      if (is_zero(f.c[i])) continue;
      if (!first) os << " + ";
      first = false;
      os << to_string(f.c[i]);
      if (i == 1) os << "*" << var;
      if (i > 1) os << "*" << var << "^" << i;
    }
    return os.str();
  }

  // ---- root finding ---------------------------------------------------------

  // A root in `lvl` of a monic irreducible f over F_p whose degree divides
  // the level degree. Deterministic: random choices come from a fixed seed.
  FieldElement find_root(const PolyFp& f, int lvl) const {
    require(degree(lvl) % f.degree() == 0, Errc::Internal, "root does not exist at this level");
    if (f.degree() == 1) return from_int(lvl, -f.c[0]);
    LevelPoly g{lvl, {}};
    for (int v : f.c) g.c.push_back(from_int(lvl, v));
    g = lp_trim(g);
    SplitMix64 rng(0x6d6f746976696331ULL ^ (static_cast<std::uint64_t>(p_) << 32) ^
                   static_cast<std::uint64_t>(degree(lvl)) ^ (static_cast<std::uint64_t>(f.degree()) << 16));
    Integer size = level_size(lvl);
    while (g.degree() > 1) {
      // pick a random element; both splitting strategies need one
      Integer ridx = 1 + Integer(rng.next()) % (size - 1);
      FieldElement r = element_at(lvl, ridx);
      LevelPoly h{lvl, {}};
      if (p_ == 2) {
        // trace splitter: sum of (r*y)^{2^i} over the absolute degree
        LevelPoly t = lp_mod(lp_from(lvl, {zero(lvl), r}), g);
        LevelPoly acc = t;
        for (int i = 1; i < degree(lvl); ++i) {
          t = lp_mulmod(t, t, g);
          acc = lp_add(acc, t);
        }
        h = acc;
      } else {
        LevelPoly shifted = lp_from(lvl, {r, one(lvl)});  // y + r
        LevelPoly e = lp_powmod(shifted, (size - 1) / 2, g);
        h = lp_sub(e, lp_from(lvl, {one(lvl)}));
      }
      LevelPoly d = lp_gcd(h, g);
      if (d.degree() > 0 && d.degree() < g.degree()) {
        LevelPoly other = lp_divide_exact(g, d);
        g = d.degree() <= other.degree() ? d : other;
      }
    }
    require(g.degree() == 1, Errc::Internal, "root splitting failed");
    return neg(mul(g.c[0], inv(g.c[1])));
  }

  std::string to_string(const FieldElement& a) const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < a.coords.size(); ++i) {
      if (i) os << ",";
      os << a.coords[i];
    }
    os << "]";
    return os.str();
  }

 private:
  struct Level {
    int degree = 1;
    PolyFp modulus;
    MatFp frobenius;  // matrix of a -> a^p over F_p
  };

  struct EmbedData {
    std::vector<FieldElement> root_powers;  // powers of the embedded generator, at `to`
    MatFp rel_inverse;                      // inverse of the relative power-basis matrix
  };

  int p_ = 2;
  Limits limits_;
  std::vector<Level> levels_;
  std::vector<int> step_degrees_;
  int k_index_ = 0;
  int K_index_ = 0;
  std::map<std::pair<int, int>, EmbedData> embeddings_;

  void check_level(const FieldElement& a, const FieldElement& b) const {
    require(a.level == b.level, Errc::LevelMismatch, "elements live at different tower levels");
  }

  PolyFp to_poly(const FieldElement& a) const {
    PolyFp f{p_, a.coords};
    f.trim();
    return f;
  }

  FieldElement from_poly(int lvl, const PolyFp& f) const {
    FieldElement e = zero(lvl);
    for (size_t i = 0; i < f.c.size(); ++i) e.coords[i] = f.c[i];
    return e;
  }

  LevelPoly lp_divide_exact(const LevelPoly& a, const LevelPoly& b) const {
    // long division, remainder must vanish
    LevelPoly q{a.level, std::vector<FieldElement>(a.c.size(), zero(a.level))};
    LevelPoly r = a;
    FieldElement lead_inv = inv(b.c.back());
    while (!r.c.empty() && r.degree() >= b.degree()) {
      FieldElement coef = mul(r.c.back(), lead_inv);
      int shift = r.degree() - b.degree();
      q.c[shift] = coef;
      for (int i = 0; i <= b.degree(); ++i)
        r.c[i + shift] = sub(r.c[i + shift], mul(coef, b.c[i]));
      r = lp_trim(r);
    }
    require(r.c.empty(), Errc::Internal, "inexact polynomial division");
    return lp_trim(q);
  }

  int add_level(int deg) {
    Level lv;
    lv.degree = deg;
    lv.modulus = first_irreducible(p_, deg);
    levels_.push_back(std::move(lv));
    int idx = level_count() - 1;
    build_frobenius(idx);
    for (int other = 0; other < idx; ++other) {
      if (deg % degree(other) == 0) build_embedding(other, idx);
      if (degree(other) % deg == 0 && degree(other) != deg) build_embedding(idx, other);
    }
    return idx;
  }

  void build_frobenius(int lvl) {
    int d = degree(lvl);
    MatFp m(p_, d, d);
    // columns: coords of (g^j)^p = (g^p)^j
    FieldElement gp = one(lvl);
    FieldElement gfrob = from_poly(lvl, poly_powmod(PolyFp::x(p_), p_, levels_[lvl].modulus));
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) m.at(i, j) = gp.coords[i];
      if (j + 1 < d) gp = mul(gp, gfrob);
    }
    levels_[lvl].frobenius = std::move(m);
  }

  void build_embedding(int sub, int sup) {
    EmbedData em;
    FieldElement root = find_root(levels_[sub].modulus, sup);
    int ds = degree(sub), dS = degree(sup);
    em.root_powers.reserve(ds);
    FieldElement rp = one(sup);
    for (int t = 0; t < ds; ++t) {
      em.root_powers.push_back(rp);
      if (t + 1 < ds) rp = mul(rp, root);
    }
    // relative power-basis matrix: column (j*ds + t) = g_sup^j * root^t
    int r = dS / ds;
    MatFp mat(p_, dS, dS);
    FieldElement g = generator(sup), gj = one(sup);
    for (int j = 0; j < r; ++j) {
      for (int t = 0; t < ds; ++t) {
        FieldElement col = mul(gj, em.root_powers[t]);
        for (int i = 0; i < dS; ++i) mat.at(i, static_cast<size_t>(j) * ds + t) = col.coords[i];
      }
      if (j + 1 < r) gj = mul(gj, g);
    }
    em.rel_inverse = mat.inverse();
    embeddings_[{sub, sup}] = std::move(em);
  }

  const EmbedData& embedding(int sub, int sup) const {
    auto it = embeddings_.find({sub, sup});
    require(it != embeddings_.end(), Errc::LevelMismatch,
            "no embedding between the requested levels");
    return it->second;
  }
};

// ---------------------------------------------------------------------------
// matrices over one tower level
// ---------------------------------------------------------------------------

struct MatLev {
  const FieldTower* tw = nullptr;
  int level = 0;
  int rows = 0, cols = 0;
  std::vector<FieldElement> a;

  MatLev() = default;
  MatLev(const FieldTower& t, int lvl, int r, int c)
      : tw(&t), level(lvl), rows(r), cols(c), a(static_cast<size_t>(r) * c, t.zero(lvl)) {}

  FieldElement& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const FieldElement& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  static MatLev identity(const FieldTower& t, int lvl, int n) {
    MatLev m(t, lvl, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = t.one(lvl);
    return m;
  }

  std::vector<FieldElement> mul_vec(const std::vector<FieldElement>& v) const {
    std::vector<FieldElement> r(rows, tw->zero(level));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (!tw->is_zero(at(i, j))) r[i] = tw->add(r[i], tw->mul(at(i, j), v[j]));
    return r;
  }

  MatLev mul(const MatLev& o) const {
    MatLev r(*tw, level, rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        if (tw->is_zero(at(i, k))) continue;
        for (int j = 0; j < o.cols; ++j)
          r.at(i, j) = tw->add(r.at(i, j), tw->mul(at(i, k), o.at(k, j)));
      }
    return r;
  }

  std::vector<int> rref() {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
      int sel = -1;
      for (int i = r; i < rows; ++i)
        if (!tw->is_zero(at(i, c))) {
          sel = i;
          break;
        }
      if (sel < 0) continue;
      for (int j = 0; j < cols; ++j) std::swap(at(sel, j), at(r, j));
      FieldElement inv = tw->inv(at(r, c));
      for (int j = 0; j < cols; ++j) at(r, j) = tw->mul(at(r, j), inv);
      for (int i = 0; i < rows; ++i) {
        if (i == r || tw->is_zero(at(i, c))) continue;
        FieldElement f = at(i, c);
        for (int j = 0; j < cols; ++j) at(i, j) = tw->sub(at(i, j), tw->mul(f, at(r, j)));
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  int rank() const {
    MatLev t = *this;
    return static_cast<int>(t.rref().size());
  }

  std::optional<std::vector<FieldElement>> solve(const std::vector<FieldElement>& b) const {
    MatLev aug(*tw, level, rows, cols + 1);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols) = b[i];
    }
    std::vector<int> piv = aug.rref();
    for (size_t i = 0; i < piv.size(); ++i)
      if (piv[i] == cols) return std::nullopt;
    std::vector<FieldElement> x(cols, tw->zero(level));
    for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug.at(static_cast<int>(i), cols);
    return x;
  }

  std::vector<std::vector<FieldElement>> kernel_basis() const {
    MatLev t = *this;
    std::vector<int> piv = t.rref();
    std::vector<bool> is_piv(cols, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<std::vector<FieldElement>> basis;
    for (int c = 0; c < cols; ++c) {
      if (is_piv[c]) continue;
      std::vector<FieldElement> v(cols, tw->zero(level));
      v[c] = tw->one(level);
      for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = tw->neg(t.at(static_cast<int>(i), c));
      basis.push_back(std::move(v));
    }
    return basis;
  }

  MatLev inverse() const {
    require(rows == cols, Errc::Internal, "inverse of non-square matrix");
    MatLev aug(*tw, level, rows, 2 * cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols + i) = tw->one(level);
    }
    std::vector<int> piv = aug.rref();
    for (int i = 0; i < rows; ++i)
      require(i < static_cast<int>(piv.size()) && piv[i] == i, Errc::Internal,
              "matrix not invertible");
    MatLev inv(*tw, level, rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) inv.at(i, j) = aug.at(i, cols + j);
    return inv;
  }
};

}  // namespace motivic::gfq
