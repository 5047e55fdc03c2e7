#ifndef FERMATQ_ARITH_HPP
#define FERMATQ_ARITH_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

// Exact integer/rational kernel. All arithmetic in the engine is arbitrary
// precision (GMP); no floating point anywhere.

namespace fermatq {

using BigInt = mpz_class;
using BigRat = mpq_class;

// Engine refuses a computation its configured limits cannot certify.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input is valid but outside what the engine supports (e.g. split primes in S).
struct unsupported_configuration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduced fraction with positive denominator (mpq_class arithmetic keeps
// results canonical; this guards direct num/den construction).
BigRat make_rat(const BigInt& num, const BigInt& den);

inline bool is_integer(const BigRat& r) { return r.get_den() == 1; }

// Kronecker symbol (a|n); Legendre symbol for odd prime n.
int kronecker(const BigInt& a, const BigInt& n);

// Exponent of the prime p in r (negative for denominators).
// r = 0 is a domain error; composite p is rejected.
long val_p(const BigRat& r, const BigInt& p);
long val_p(const BigInt& n, const BigInt& p);

// s with s*s == n, if n is a perfect square.
std::optional<BigInt> perfect_square_root(const BigInt& n);

// Miller-Rabin with the fixed witness battery {2,3,...,37}: deterministic
// for n < 3.3*10^24 (in particular for all 64-bit inputs). Larger n get the
// same battery plus witnesses 41..97; use is_prime_certain to tell whether
// the answer is proven or probabilistic for that magnitude.
bool is_prime(const BigInt& n);
bool is_prime_certain(const BigInt& n);

// Trial-division factorization for desk-scale inputs.
struct Factorization {
    std::vector<std::pair<BigInt, unsigned>> factors;  // prime, exponent
    BigInt cofactor;  // 1 when complete; otherwise unfactored part > bound^2
    bool complete() const { return cofactor == 1; }
};
Factorization factorize(const BigInt& n, unsigned long trial_bound = 1000000);

// Deterministic for inputs whose cofactor past the trial bound is 1, prime,
// or a perfect power; otherwise throws resource_error rather than guess.
bool is_squarefree(const BigInt& n);

BigInt pow_int(const BigInt& base, unsigned long e);
BigRat pow_rat(const BigRat& base, long e);

}  // namespace fermatq

#endif
