#include "fermatq/arith.hpp"

namespace fermatq {

BigRat make_rat(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    BigRat r(num, den);
    r.canonicalize();
    return r;
}

int kronecker(const BigInt& a, const BigInt& n) {
    if (n == 0) throw std::invalid_argument("kronecker: n must be nonzero");
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

long val_p(const BigInt& n, const BigInt& p) {
    if (n == 0) throw std::domain_error("val_p: valuation of zero is not finite");
    if (p < 2 || !is_prime(p)) throw std::invalid_argument("val_p: p is not prime");
    mpz_class rest;
    return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

long val_p(const BigRat& r, const BigInt& p) {
    if (r == 0) throw std::domain_error("val_p: valuation of zero is not finite");
    if (p < 2 || !is_prime(p)) throw std::invalid_argument("val_p: p is not prime");
    mpz_class rest;
    long vnum = static_cast<long>(
        mpz_remove(rest.get_mpz_t(), r.get_num().get_mpz_t(), p.get_mpz_t()));
    long vden = static_cast<long>(
        mpz_remove(rest.get_mpz_t(), r.get_den().get_mpz_t(), p.get_mpz_t()));
    return vnum - vden;
}

std::optional<BigInt> perfect_square_root(const BigInt& n) {
    if (n < 0) throw std::invalid_argument("perfect_square_root: negative input");
    if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return std::nullopt;
    BigInt s;
    mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
    return s;
}

namespace {

// Deterministic for n < 3317044064679887385961981 (Sorenson-Webster);
// covers every 64-bit integer.
constexpr unsigned long kCertainWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
constexpr unsigned long kExtraWitnesses[] = {41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

const BigInt& deterministic_bound() {
    static const BigInt bound("3317044064679887385961981");
    return bound;
}

bool miller_rabin_witness(const BigInt& n, const BigInt& d, unsigned long s,
                          unsigned long a) {
    BigInt base(a);
    if (mpz_divisible_p(base.get_mpz_t(), n.get_mpz_t())) return false;
    BigInt x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return false;
    for (unsigned long i = 1; i < s; ++i) {
        mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
        if (x == n - 1) return false;
    }
    return true;  // a witnesses compositeness
}

}  // namespace

bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    for (unsigned long p : kCertainWitnesses)
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return n == p;
    BigInt d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    for (unsigned long a : kCertainWitnesses)
        if (miller_rabin_witness(n, d, s, a)) return false;
    if (n < deterministic_bound()) return true;
    for (unsigned long a : kExtraWitnesses)
        if (miller_rabin_witness(n, d, s, a)) return false;
    return true;
}

bool is_prime_certain(const BigInt& n) {
    return n < deterministic_bound();
}

Factorization factorize(const BigInt& n, unsigned long trial_bound) {
    if (n < 1) throw std::invalid_argument("factorize: input must be >= 1");
    Factorization out;
    BigInt rest = n;
    auto strip = [&](const BigInt& p) {
        if (!mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) return;
        mpz_class reduced;
        unsigned e = static_cast<unsigned>(
            mpz_remove(reduced.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t()));
        rest = reduced;
        out.factors.emplace_back(p, e);
    };
    strip(2);
    for (BigInt p = 3; p <= trial_bound && p * p <= rest; p += 2) strip(p);
    if (rest > 1 && (rest <= BigInt(trial_bound) * trial_bound || is_prime(rest))) {
        out.factors.emplace_back(rest, 1);  // below bound^2 a survivor is prime
        rest = 1;
    }
    out.cofactor = rest;
    return out;
}

bool is_squarefree(const BigInt& n) {
    if (n < 1) throw std::invalid_argument("is_squarefree: input must be >= 1");
    Factorization f = factorize(n);
    for (const auto& [p, e] : f.factors)
        if (e > 1) return false;
    if (f.complete()) return true;
    if (mpz_perfect_power_p(f.cofactor.get_mpz_t())) return false;
    // Composite non-power cofactor: could be p*q (squarefree) or p^2*q.
    throw resource_error("is_squarefree: cofactor " + f.cofactor.get_str() +
                         " exceeds the trial-division bound and cannot be certified");
}

BigInt pow_int(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

BigRat pow_rat(const BigRat& base, long e) {
    if (e == 0) return BigRat(1);
    if (base == 0) {
        if (e < 0) throw std::domain_error("pow_rat: zero to a negative power");
        return BigRat(0);
    }
    unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
    BigInt num = pow_int(BigInt(base.get_num()), mag);
    BigInt den = pow_int(BigInt(base.get_den()), mag);
    return e < 0 ? make_rat(den, num) : make_rat(num, den);
}

}  // namespace fermatq
