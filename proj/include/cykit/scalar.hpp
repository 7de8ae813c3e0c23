#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <variant>

#include "cykit/error.hpp"

namespace cykit::exactla {

enum class FieldKind { Rational, Prime };

struct FieldSpec {
  FieldKind kind = FieldKind::Rational;
  std::uint64_t p = 0;  // modulus, only for Prime

  static FieldSpec rational() { return {FieldKind::Rational, 0}; }
  static FieldSpec prime(std::uint64_t p);

  bool operator==(const FieldSpec& o) const { return kind == o.kind && p == o.p; }
  bool operator!=(const FieldSpec& o) const { return !(*this == o); }
  std::string describe() const;
};

// Exact field element: arbitrary-precision rational or residue mod a prime.
// Elements of different fields never combine; doing so is an IntegrityError.
class Scalar {
 public:
  Scalar() : v_(mpq_class(0)) {}
  static Scalar zero(const FieldSpec& f);
  static Scalar one(const FieldSpec& f);
  static Scalar of_int(long n, const FieldSpec& f);
  static Scalar of_fraction(const mpz_class& num, const mpz_class& den, const FieldSpec& f);
  static Scalar of_rational(const mpq_class& q) { Scalar s; s.v_ = q; return s; }

  FieldSpec field() const;
  bool is_zero() const;
  bool is_one() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar operator-() const;
  Scalar inverse() const;
  Scalar& operator+=(const Scalar& o) { *this = *this + o; return *this; }
  Scalar& operator-=(const Scalar& o) { *this = *this - o; return *this; }
  Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }

  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  // Rational access (throws on prime-field elements).
  const mpq_class& rational() const;
  // Residue access (throws on rationals).
  std::uint64_t residue() const;

  std::string to_string() const;

 private:
  struct Fp {
    std::uint64_t v;
    std::uint64_t p;
    bool operator==(const Fp& o) const = default;
  };
  std::variant<mpq_class, Fp> v_;

  static void check_same(const Scalar& a, const Scalar& b);
  friend class ScalarTestPeek;
};

}  // namespace cykit::exactla
