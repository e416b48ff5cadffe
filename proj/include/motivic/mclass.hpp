#pragma once

// The symbolic ring of motivic classes: formal integer combinations of
// stratum-symbol monomials with Laurent-polynomial coefficients in the
// Lefschetz class L.  Scissors relations are oriented rewrite rules kept in
// a session symbol table; canonical forms are unique once the rules are
// applied.  Realization morphisms (point counts, Hodge–Deligne) map classes
// to integers or two-variable polynomials.

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "motivic/common.hpp"

namespace motivic::mclass {

// ---------------------------------------------------------------------------
// Laurent polynomials in L
// ---------------------------------------------------------------------------

struct LefschetzPoly {
  std::map<int, Integer> terms;  // exponent -> coefficient, no zeros stored

  static LefschetzPoly zero() { return {}; }
  static LefschetzPoly constant(Integer v) {
    LefschetzPoly f;
    if (v != 0) f.terms[0] = std::move(v);
    return f;
  }
  static LefschetzPoly L(int e = 1, Integer coeff = 1) {
    LefschetzPoly f;
    if (coeff != 0) f.terms[e] = std::move(coeff);
    return f;
  }

  bool is_zero() const { return terms.empty(); }

  int min_exponent() const { return terms.empty() ? 0 : terms.begin()->first; }
  int max_exponent() const { return terms.empty() ? 0 : terms.rbegin()->first; }

  LefschetzPoly& add_term(int e, const Integer& c) {
    if (c == 0) return *this;
    auto it = terms.find(e);
    if (it == terms.end()) {
      terms.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
    return *this;
  }

  friend LefschetzPoly operator+(const LefschetzPoly& a, const LefschetzPoly& b) {
    LefschetzPoly r = a;
    for (const auto& [e, c] : b.terms) r.add_term(e, c);
    return r;
  }

  friend LefschetzPoly operator-(const LefschetzPoly& a, const LefschetzPoly& b) {
    LefschetzPoly r = a;
    for (const auto& [e, c] : b.terms) r.add_term(e, -c);
    return r;
  }

  friend LefschetzPoly operator*(const LefschetzPoly& a, const LefschetzPoly& b) {
    LefschetzPoly r;
    for (const auto& [ea, ca] : a.terms)
      for (const auto& [eb, cb] : b.terms) r.add_term(ea + eb, ca * cb);
    return r;
  }

  LefschetzPoly operator-() const {
    LefschetzPoly r;
    for (const auto& [e, c] : terms) r.terms[e] = -c;
    return r;
  }

  LefschetzPoly pow(unsigned k) const {
    LefschetzPoly r = constant(1);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  bool operator==(const LefschetzPoly& o) const { return terms == o.terms; }

  std::string to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
      const auto& [e, c] = *it;
      Integer abs = c < 0 ? Integer(-c) : c;
      if (first) {
        if (c < 0) os << "-";
        first = false;
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      bool unit = abs == 1 && e != 0;
      if (!unit) os << abs.get_str();
      if (e != 0) {
        if (!unit) os << "*";
        os << "L";
        if (e != 1) os << "^" << e;
      }
    }
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// ring tags
// ---------------------------------------------------------------------------

enum class RingBase { K0, M };

// Which ring a class lives in.  `equivariant` is the order m of the mu_m
// recorded on the class (0 = plain); classes with m | m' coerce upward,
// matching the profinite limit over the mu_m.  `mod_l` marks residues after
// setting L = 0; residues never coerce.
struct RingTag {
  RingBase base = RingBase::K0;
  bool modified = false;
  long equivariant = 0;
  bool mod_l = false;

  bool operator==(const RingTag& o) const {
    return base == o.base && modified == o.modified && equivariant == o.equivariant &&
           mod_l == o.mod_l;
  }
  bool operator!=(const RingTag& o) const { return !(*this == o); }

  bool localized() const { return base == RingBase::M; }

  static RingTag K0() { return {}; }
  static RingTag K0_mod() { return {RingBase::K0, true, 0, false}; }
  static RingTag M() { return {RingBase::M, false, 0, false}; }
  static RingTag M_mod() { return {RingBase::M, true, 0, false}; }
  static RingTag K0_eq(long m) { return {RingBase::K0, false, m, false}; }
  static RingTag M_eq(long m) { return {RingBase::M, false, m, false}; }

  std::string to_string() const {
    std::string s = base == RingBase::K0 ? "K0" : "M";
    if (modified) s += "_mod";
    if (equivariant > 0) s += "_mu" + std::to_string(equivariant);
    if (mod_l) s += "/L";
    return s;
  }

  static std::optional<RingTag> parse(const std::string& text) {
    RingTag t;
    std::string s = text;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "/L") {
      t.mod_l = true;
      s = s.substr(0, s.size() - 2);
    }
    auto mu = s.find("_mu");
    if (mu != std::string::npos) {
      try {
        t.equivariant = std::stol(s.substr(mu + 3));
      } catch (...) {
        return std::nullopt;
      }
      if (t.equivariant <= 0) return std::nullopt;
      s = s.substr(0, mu);
    }
    if (s.size() >= 4 && s.substr(s.size() - 4) == "_mod") {
      t.modified = true;
      s = s.substr(0, s.size() - 4);
    }
    if (s == "K0") {
      t.base = RingBase::K0;
    } else if (s == "M") {
      t.base = RingBase::M;
    } else {
      return std::nullopt;
    }
    return t;
  }
};

// Legal coercions: K0 -> M (localize), unmodified -> modified, plain ->
// equivariant, and mu_m -> mu_m' when m | m'.  Residues only match exactly.
inline bool coercible(const RingTag& from, const RingTag& to) {
  if (from == to) return true;
  if (from.mod_l || to.mod_l) return false;
  if (from.base == RingBase::M && to.base == RingBase::K0) return false;
  if (from.modified && !to.modified) return false;
  if (from.equivariant != to.equivariant) {
    if (to.equivariant == 0) return false;
    if (from.equivariant != 0 && to.equivariant % from.equivariant != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// symbols and monomials
// ---------------------------------------------------------------------------

// commutative monomial of stratum symbols; sorted with repetitions
struct Monomial {
  std::vector<std::string> syms;

  static Monomial unit() { return {}; }
  static Monomial single(std::string name) { return {{std::move(name)}}; }

  bool is_unit() const { return syms.empty(); }

  Monomial operator*(const Monomial& o) const {
    Monomial r = *this;
    r.syms.insert(r.syms.end(), o.syms.begin(), o.syms.end());
    std::sort(r.syms.begin(), r.syms.end());
    return r;
  }

  bool operator<(const Monomial& o) const { return syms < o.syms; }
  bool operator==(const Monomial& o) const { return syms == o.syms; }

  std::string to_string() const {
    std::string s;
    for (size_t i = 0; i < syms.size(); ++i) {
      if (i) s += "*";
      s += "[" + syms[i] + "]";
    }
    return s;
  }
};

class SymbolTable;

// ---------------------------------------------------------------------------
// motivic classes
// ---------------------------------------------------------------------------

class MotivicClass {
 public:
  MotivicClass() = default;
  explicit MotivicClass(RingTag tag) : tag_(tag) {}

  static MotivicClass zero(RingTag tag) { return MotivicClass(tag); }

  static MotivicClass constant(RingTag tag, Integer v) {
    MotivicClass c(tag);
    c.set_term(Monomial::unit(), LefschetzPoly::constant(std::move(v)));
    return c;
  }

  static MotivicClass one(RingTag tag) { return constant(tag, 1); }

  static MotivicClass lefschetz(RingTag tag, int e = 1) {
    MotivicClass c(tag);
    c.set_term(Monomial::unit(), LefschetzPoly::L(e));
    return c;
  }

  static MotivicClass from_poly(RingTag tag, LefschetzPoly f) {
    MotivicClass c(tag);
    c.set_term(Monomial::unit(), std::move(f));
    return c;
  }

  static MotivicClass symbol(RingTag tag, const std::string& name) {
    MotivicClass c(tag);
    c.set_term(Monomial::single(name), LefschetzPoly::constant(1));
    return c;
  }

  const RingTag& tag() const { return tag_; }
  const std::map<Monomial, LefschetzPoly>& body() const { return body_; }
  bool is_zero() const { return body_.empty(); }

  void set_term(const Monomial& m, LefschetzPoly f) {
    if (f.is_zero()) {
      body_.erase(m);
    } else {
      check_exponents(f);
      body_[m] = std::move(f);
    }
  }

  void add_term(const Monomial& m, const LefschetzPoly& f) {
    if (f.is_zero()) return;
    check_exponents(f);
    auto it = body_.find(m);
    if (it == body_.end()) {
      body_.emplace(m, f);
    } else {
      it->second = it->second + f;
      if (it->second.is_zero()) body_.erase(it);
    }
  }

  MotivicClass coerce(RingTag to) const {
    require(coercible(tag_, to), Errc::TagMismatch,
            "no coercion from " + tag_.to_string() + " to " + to.to_string());
    MotivicClass r = *this;
    r.tag_ = to;
    return r;
  }

  friend MotivicClass operator+(const MotivicClass& a, const MotivicClass& b) {
    require(a.tag_ == b.tag_, Errc::TagMismatch,
            "cannot add " + a.tag_.to_string() + " and " + b.tag_.to_string());
    MotivicClass r = a;
    for (const auto& [m, f] : b.body_) r.add_term(m, f);
    return r;
  }

  friend MotivicClass operator-(const MotivicClass& a, const MotivicClass& b) {
    return a + (-b);
  }

  MotivicClass operator-() const {
    MotivicClass r(tag_);
    for (const auto& [m, f] : body_) r.body_[m] = -f;
    return r;
  }

  friend MotivicClass operator*(const MotivicClass& a, const MotivicClass& b) {
    require(a.tag_ == b.tag_, Errc::TagMismatch,
            "cannot multiply " + a.tag_.to_string() + " and " + b.tag_.to_string());
    MotivicClass r(a.tag_);
    for (const auto& [ma, fa] : a.body_)
      for (const auto& [mb, fb] : b.body_) r.add_term(ma * mb, fa * fb);
    return r;
  }

  MotivicClass scale(const LefschetzPoly& f) const {
    MotivicClass r(tag_);
    for (const auto& [m, g] : body_) r.add_term(m, f * g);
    return r;
  }

  bool operator==(const MotivicClass& o) const { return tag_ == o.tag_ && body_ == o.body_; }
  bool operator!=(const MotivicClass& o) const { return !(*this == o); }

  // Substitute all registered rewrite rules; terminates because rule
  // registration rejects circular definitions.
  MotivicClass canonicalize(const SymbolTable& table) const;

  // Substitute L := 0.  Requires every coefficient to have nonnegative
  // exponents (the class is visibly in the image of K_0); the result is
  // tagged as a mod-L residue over K0.
  MotivicClass mod_L() const {
    require(!tag_.mod_l, Errc::TagMismatch, "class is already a mod-L residue");
    MotivicClass r(RingTag{RingBase::K0, tag_.modified, tag_.equivariant, true});
    for (const auto& [m, f] : body_) {
      require(f.min_exponent() >= 0, Errc::NegativeExponent,
              "coefficient of " + (m.is_unit() ? std::string("1") : m.to_string()) +
                  " has a negative power of L; the class is not visibly in the image of K0");
      auto it = f.terms.find(0);
      if (it != f.terms.end()) r.add_term(m, LefschetzPoly::constant(it->second));
    }
    return r;
  }

  std::string to_string() const {
    if (body_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, f] : body_) {
      if (!first) os << " + ";
      first = false;
      bool wrap = f.terms.size() > 1 || (!m.is_unit() && !(f == LefschetzPoly::constant(1)));
      if (m.is_unit()) {
        os << f.to_string();
      } else if (f == LefschetzPoly::constant(1)) {
        os << m.to_string();
      } else {
        if (wrap) os << "(";
        os << f.to_string();
        if (wrap) os << ")";
        os << "*" << m.to_string();
      }
    }
    return os.str();
  }

 private:
  RingTag tag_;
  std::map<Monomial, LefschetzPoly> body_;

  void check_exponents(const LefschetzPoly& f) const {
    if (tag_.base == RingBase::K0 && f.min_exponent() < 0)
      fail(Errc::NegativeExponent, "negative powers of L require a localized (M) ring tag");
  }

  friend class SymbolTable;
};

// Session object holding symbol declarations and oriented rewrite rules
// (scissors decompositions and declared identifications).  Not safe to share
// across threads while being mutated.
class SymbolTable {
 public:
  struct Info {
    long action_tag = 0;  // 0 = plain symbol, m > 0 = carries a mu_m action
    std::string note;
    std::optional<MotivicClass> rule;  // oriented rewrite: [symbol] := class
    bool rule_needs_modified = false;  // identification valid only under a *_mod tag
  };

  void declare(const std::string& name, long action_tag = 0, std::string note = {});
  bool known(const std::string& name) const { return table_.count(name) > 0; }
  const Info& info(const std::string& name) const;

  // scissors relation: [total] := closed + open
  void define_scissors(const std::string& total, const MotivicClass& closed,
                       const MotivicClass& open);

  // universal-homeomorphism identification: rewrite [rewritten] to [kept];
  // only applies inside *_mod-tagged classes
  void declare_equal_mod(const std::string& kept, const std::string& rewritten);

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, i] : table_) out.push_back(n);
    return out;
  }

 private:
  std::map<std::string, Info> table_;

  void set_rule(const std::string& name, MotivicClass rule, bool needs_modified);
  void check_not_circular(const std::string& name, const MotivicClass& rule) const;
};

// ---------------------------------------------------------------------------
// symbol table implementation
// ---------------------------------------------------------------------------

inline void SymbolTable::declare(const std::string& name, long action_tag, std::string note) {
  require(!name.empty(), Errc::ParseError, "symbol name must be nonempty");
  require(!known(name), Errc::SymbolAlreadyDefined, "symbol '" + name + "' already declared");
  Info info;
  info.action_tag = action_tag;
  info.note = std::move(note);
  table_[name] = std::move(info);
}

inline const SymbolTable::Info& SymbolTable::info(const std::string& name) const {
  auto it = table_.find(name);
  require(it != table_.end(), Errc::MissingSymbolImage, "unknown symbol '" + name + "'");
  return it->second;
}

inline void SymbolTable::check_not_circular(const std::string& name,
                                            const MotivicClass& rule) const {
  // DFS through symbols that already have rules; reaching `name` again
  // would make substitution non-terminating
  std::vector<std::string> stack;
  std::set<std::string> seen;
  for (const auto& [m, f] : rule.body())
    for (const auto& s : m.syms) stack.push_back(s);
  while (!stack.empty()) {
    std::string s = stack.back();
    stack.pop_back();
    require(s != name, Errc::CircularRule,
            "definition of '" + name + "' is circular");
    if (!seen.insert(s).second) continue;
    auto it = table_.find(s);
    if (it == table_.end() || !it->second.rule.has_value()) continue;
    for (const auto& [m, f] : it->second.rule->body())
      for (const auto& sym : m.syms) stack.push_back(sym);
  }
}

inline void SymbolTable::set_rule(const std::string& name, MotivicClass rule,
                                  bool needs_modified) {
  auto it = table_.find(name);
  require(it != table_.end(), Errc::MissingSymbolImage, "unknown symbol '" + name + "'");
  require(!it->second.rule.has_value(), Errc::SymbolAlreadyDefined,
          "symbol '" + name + "' already has a decomposition");
  check_not_circular(name, rule);
  it->second.rule = std::move(rule);
  it->second.rule_needs_modified = needs_modified;
}

inline void SymbolTable::define_scissors(const std::string& total, const MotivicClass& closed,
                                         const MotivicClass& open) {
  require(closed.tag() == open.tag(), Errc::TagMismatch,
          "closed and open parts live in different rings");
  set_rule(total, closed + open, /*needs_modified=*/false);
}

inline void SymbolTable::declare_equal_mod(const std::string& kept,
                                           const std::string& rewritten) {
  require(known(kept), Errc::MissingSymbolImage, "unknown symbol '" + kept + "'");
  const Info& ik = table_.at(kept);
  const Info& ir = info(rewritten);
  require(ik.action_tag == ir.action_tag, Errc::TagMismatch,
          "identified symbols carry different action tags");
  RingTag t = RingTag::K0_mod();
  t.equivariant = ik.action_tag;
  set_rule(rewritten, MotivicClass::symbol(t, kept), /*needs_modified=*/true);
}

inline MotivicClass MotivicClass::canonicalize(const SymbolTable& table) const {
  MotivicClass out(tag_);
  for (const auto& [mono, coeff] : body_) {
    MotivicClass term = from_poly(tag_, coeff);
    for (const auto& s : mono.syms) {
      const SymbolTable::Info& info = table.info(s);
      if (info.action_tag > 0) {
        require(tag_.equivariant > 0 && tag_.equivariant % info.action_tag == 0,
                Errc::TagMismatch,
                "symbol '" + s + "' carries a mu_" + std::to_string(info.action_tag) +
                    " action but the class is tagged " + tag_.to_string());
      }
      if (info.rule.has_value()) {
        if (info.rule_needs_modified)
          require(tag_.modified, Errc::TagMismatch,
                  "identification of '" + s + "' is only valid in a modified ring");
        require(coercible(info.rule->tag(), tag_), Errc::TagMismatch,
                "rule for '" + s + "' lives in " + info.rule->tag().to_string() +
                    ", not coercible to " + tag_.to_string());
        term = term * info.rule->coerce(tag_).canonicalize(table);
      } else {
        term = term * symbol(tag_, s);
      }
    }
    out = out + term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// realization morphisms
// ---------------------------------------------------------------------------

// Polynomial in u, v with integer coefficients.  Integer targets are the
// constant polynomials, so one value type covers point counts and
// Hodge–Deligne realizations.
struct UVPoly {
  std::map<std::pair<int, int>, Integer> terms;

  static UVPoly zero() { return {}; }
  static UVPoly constant(Integer v) {
    UVPoly f;
    if (v != 0) f.terms[{0, 0}] = std::move(v);
    return f;
  }
  static UVPoly uv() {
    UVPoly f;
    f.terms[{1, 1}] = 1;
    return f;
  }

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms.begin()->first == std::make_pair(0, 0));
  }
  Integer constant_value() const {
    auto it = terms.find({0, 0});
    return it == terms.end() ? Integer(0) : it->second;
  }

  UVPoly& add_term(int ue, int ve, const Integer& c) {
    if (c == 0) return *this;
    auto key = std::make_pair(ue, ve);
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(key, c);
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
    return *this;
  }

  friend UVPoly operator+(const UVPoly& a, const UVPoly& b) {
    UVPoly r = a;
    for (const auto& [e, c] : b.terms) r.add_term(e.first, e.second, c);
    return r;
  }

  friend UVPoly operator-(const UVPoly& a, const UVPoly& b) {
    UVPoly r = a;
    for (const auto& [e, c] : b.terms) r.add_term(e.first, e.second, -c);
    return r;
  }

  friend UVPoly operator*(const UVPoly& a, const UVPoly& b) {
    UVPoly r;
    for (const auto& [ea, ca] : a.terms)
      for (const auto& [eb, cb] : b.terms)
        r.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
    return r;
  }

  UVPoly pow(unsigned k) const {
    UVPoly r = constant(1);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  bool operator==(const UVPoly& o) const { return terms == o.terms; }

  std::string to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
      const auto& [e, c] = *it;
      Integer abs = c < 0 ? Integer(-c) : c;
      if (first) {
        if (c < 0) os << "-";
        first = false;
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      bool unit = abs == 1 && (e.first || e.second);
      if (!unit) os << abs.get_str();
      if (e.first) {
        os << "u";
        if (e.first != 1) os << "^" << e.first;
      }
      if (e.second) {
        os << "v";
        if (e.second != 1) os << "^" << e.second;
      }
    }
    return os.str();
  }
};

struct RealizationSpec {
  UVPoly L_image;
  std::map<std::string, UVPoly> symbol_images;

  // point counting over F_q
  static RealizationSpec point_count(const Integer& q) {
    RealizationSpec s;
    s.L_image = UVPoly::constant(q);
    return s;
  }

  // Hodge–Deligne E-polynomial: L realizes to uv
  static RealizationSpec hodge_deligne() {
    RealizationSpec s;
    s.L_image = UVPoly::uv();
    return s;
  }

  RealizationSpec& with_symbol(const std::string& name, UVPoly v) {
    symbol_images[name] = std::move(v);
    return *this;
  }
};

// Ring-homomorphic image: L -> L_image, symbols -> their images, extended
// additively and multiplicatively.  L_image must be invertible for honest
// localized classes; negative exponents realize through integer division,
// which is exact for the point-count and Hodge–Deligne targets used here.
inline UVPoly realize(const MotivicClass& c, const RealizationSpec& spec) {
  require(!c.tag().mod_l, Errc::TagMismatch, "cannot realize a mod-L residue directly");
  UVPoly out;
  for (const auto& [mono, coeff] : c.body()) {
    UVPoly term = UVPoly::constant(0);
    // coefficient: sum coeff_e * L_image^e
    UVPoly cval;
    for (const auto& [e, k] : coeff.terms) {
      require(e >= 0, Errc::NegativeExponent,
              "realization of negative powers of L is not supported");
      cval = cval + UVPoly::constant(k) * spec.L_image.pow(static_cast<unsigned>(e));
    }
    term = cval;
    for (const auto& s : mono.syms) {
      auto it = spec.symbol_images.find(s);
      require(it != spec.symbol_images.end(), Errc::MissingSymbolImage,
              "no realization image for symbol '" + s + "'");
      term = term * it->second;
    }
    out = out + term;
  }
  return out;
}

}  // namespace motivic::mclass
