#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <gmpxx.h>

namespace motivic {

using Integer = mpz_class;

// Error codes shared across all modules.  The CLI maps a subset of these to
// process exit statuses; everything else is a plain failure.
enum class Errc {
  TagMismatch,
  SymbolAlreadyDefined,
  CircularRule,
  NegativeExponent,
  MissingSymbolImage,
  DivisionByZero,
  LevelMismatch,
  WildOrder,
  NoSuchExtension,
  ShapeViolation,
  HypothesisViolation,
  NormalizationFailed,
  Inconsistent,
  UnquotientedBase,
  MissingQuotientRule,
  ModelInvalid,
  TotalClassMismatch,
  BudgetExceeded,
  ParseError,
  Internal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::TagMismatch: return "TagMismatch";
    case Errc::SymbolAlreadyDefined: return "SymbolAlreadyDefined";
    case Errc::CircularRule: return "CircularRule";
    case Errc::NegativeExponent: return "NegativeExponent";
    case Errc::MissingSymbolImage: return "MissingSymbolImage";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::LevelMismatch: return "LevelMismatch";
    case Errc::WildOrder: return "WildOrder";
    case Errc::NoSuchExtension: return "NoSuchExtension";
    case Errc::ShapeViolation: return "ShapeViolation";
    case Errc::HypothesisViolation: return "HypothesisViolation";
    case Errc::NormalizationFailed: return "NormalizationFailed";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::UnquotientedBase: return "UnquotientedBase";
    case Errc::MissingQuotientRule: return "MissingQuotientRule";
    case Errc::ModelInvalid: return "ModelInvalid";
    case Errc::TotalClassMismatch: return "TotalClassMismatch";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::ParseError: return "ParseError";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

class CalcError : public std::runtime_error {
 public:
  CalcError(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw CalcError(code, msg);
}

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

// Deterministic PRNG (splitmix64).  Used wherever an algorithm needs random
// choices (polynomial root splitting, test data); seeds are fixed so runs
// are reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound)
  std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

 private:
  std::uint64_t state_;
};

inline Integer integer_pow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

}  // namespace motivic
