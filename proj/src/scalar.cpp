#include "cykit/scalar.hpp"

namespace cykit::exactla {

namespace {

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  unsigned __int128 acc = 1, base = b % p;
  while (e) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
  if (a == 0) throw IntegrityError("division by zero in F_p");
  return mod_pow(a, p - 2, p);
}

std::uint64_t mod_of_mpz(const mpz_class& z, std::uint64_t p) {
  mpz_class r = z % mpz_class(static_cast<unsigned long>(p));
  if (r < 0) r += static_cast<unsigned long>(p);
  return r.get_ui();
}

}  // namespace

FieldSpec FieldSpec::prime(std::uint64_t p) {
  if (!is_prime_u64(p)) throw ParseError("modulus " + std::to_string(p) + " is not prime");
  if (p >= (1ull << 31)) throw ParseError("prime modulus too large (need p < 2^31)");
  return {FieldKind::Prime, p};
}

std::string FieldSpec::describe() const {
  return kind == FieldKind::Rational ? "Q" : "F_" + std::to_string(p);
}

Scalar Scalar::zero(const FieldSpec& f) {
  Scalar s;
  if (f.kind == FieldKind::Rational) s.v_ = mpq_class(0);
  else s.v_ = Fp{0, f.p};
  return s;
}

Scalar Scalar::one(const FieldSpec& f) { return of_int(1, f); }

Scalar Scalar::of_int(long n, const FieldSpec& f) {
  Scalar s;
  if (f.kind == FieldKind::Rational) {
    s.v_ = mpq_class(n);
  } else {
    s.v_ = Fp{mod_of_mpz(mpz_class(n), f.p), f.p};
  }
  return s;
}

Scalar Scalar::of_fraction(const mpz_class& num, const mpz_class& den, const FieldSpec& f) {
  if (den == 0) throw ParseError("zero denominator");
  Scalar s;
  if (f.kind == FieldKind::Rational) {
    mpq_class q(num, den);
    q.canonicalize();
    s.v_ = q;
  } else {
    std::uint64_t d = mod_of_mpz(den, f.p);
    if (d == 0)
      throw IntegrityError("denominator divisible by modulus " + std::to_string(f.p));
    unsigned __int128 v = static_cast<unsigned __int128>(mod_of_mpz(num, f.p)) * mod_inv(d, f.p);
    s.v_ = Fp{static_cast<std::uint64_t>(v % f.p), f.p};
  }
  return s;
}

FieldSpec Scalar::field() const {
  if (std::holds_alternative<mpq_class>(v_)) return FieldSpec::rational();
  const Fp& f = std::get<Fp>(v_);
  return {FieldKind::Prime, f.p};
}

bool Scalar::is_zero() const {
  if (auto* q = std::get_if<mpq_class>(&v_)) return *q == 0;
  return std::get<Fp>(v_).v == 0;
}

bool Scalar::is_one() const {
  if (auto* q = std::get_if<mpq_class>(&v_)) return *q == 1;
  return std::get<Fp>(v_).v == 1;
}

void Scalar::check_same(const Scalar& a, const Scalar& b) {
  if (a.field() != b.field())
    throw IntegrityError("scalars of different fields combined: " + a.field().describe() +
                         " with " + b.field().describe());
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_same(*this, o);
  Scalar r;
  if (auto* q = std::get_if<mpq_class>(&v_)) {
    r.v_ = mpq_class(*q + std::get<mpq_class>(o.v_));
  } else {
    const Fp& a = std::get<Fp>(v_);
    const Fp& b = std::get<Fp>(o.v_);
    r.v_ = Fp{(a.v + b.v) % a.p, a.p};
  }
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
  check_same(*this, o);
  Scalar r;
  if (auto* q = std::get_if<mpq_class>(&v_)) {
    r.v_ = mpq_class(*q * std::get<mpq_class>(o.v_));
  } else {
    const Fp& a = std::get<Fp>(v_);
    const Fp& b = std::get<Fp>(o.v_);
    r.v_ = Fp{static_cast<std::uint64_t>(static_cast<unsigned __int128>(a.v) * b.v % a.p), a.p};
  }
  return r;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::operator-() const {
  Scalar r;
  if (auto* q = std::get_if<mpq_class>(&v_)) {
    r.v_ = mpq_class(-*q);
  } else {
    const Fp& a = std::get<Fp>(v_);
    r.v_ = Fp{a.v == 0 ? 0 : a.p - a.v, a.p};
  }
  return r;
}

Scalar Scalar::inverse() const {
  Scalar r;
  if (auto* q = std::get_if<mpq_class>(&v_)) {
    if (*q == 0) throw IntegrityError("division by zero in Q");
    r.v_ = mpq_class(1 / *q);
  } else {
    const Fp& a = std::get<Fp>(v_);
    r.v_ = Fp{mod_inv(a.v, a.p), a.p};
  }
  return r;
}

bool Scalar::operator==(const Scalar& o) const {
  check_same(*this, o);
  if (auto* q = std::get_if<mpq_class>(&v_)) return *q == std::get<mpq_class>(o.v_);
  return std::get<Fp>(v_) == std::get<Fp>(o.v_);
}

const mpq_class& Scalar::rational() const {
  if (auto* q = std::get_if<mpq_class>(&v_)) return *q;
  throw IntegrityError("rational() on a prime-field scalar");
}

std::uint64_t Scalar::residue() const {
  if (auto* f = std::get_if<Fp>(&v_)) return f->v;
  throw IntegrityError("residue() on a rational scalar");
}

std::string Scalar::to_string() const {
  if (auto* q = std::get_if<mpq_class>(&v_)) return q->get_str();
  return std::to_string(std::get<Fp>(v_).v);
}

}  // namespace cykit::exactla
