#ifndef FERMATQ_QUADFIELD_HPP
#define FERMATQ_QUADFIELD_HPP

#include <string>
#include <vector>

#include "fermatq/arith.hpp"

// Exact arithmetic in K = Q(sqrt(d)) for squarefree d >= 2: elements,
// ring-of-integers membership, prime splitting, prime-ideal valuations,
// and the fundamental unit.

namespace fermatq {

enum class BasisKind { half_integer, plain };  // half-integer iff d = 1 mod 4

struct QuadField {
    long d = 0;
    long disc = 0;
    BasisKind basis = BasisKind::plain;

    bool operator==(const QuadField&) const = default;
};

// d must be squarefree and >= 2.
QuadField make_field(long d);

// x + y*sqrt(d) with exact rational coordinates.
class QfElem {
   public:
    QfElem() = default;
    QfElem(QuadField field, BigRat x, BigRat y)
        : field_(field), x_(std::move(x)), y_(std::move(y)) {
        x_.canonicalize();
        y_.canonicalize();
    }
    QfElem(QuadField field, long x) : field_(field), x_(x) {}

    const QuadField& field() const { return field_; }
    const BigRat& x() const { return x_; }
    const BigRat& y() const { return y_; }
    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_rational() const { return y_ == 0; }

    QfElem conj() const { return QfElem(field_, x_, -y_); }
    BigRat norm() const { return x_ * x_ - field_.d * y_ * y_; }
    BigRat trace() const { return 2 * x_; }
    bool is_integral() const { return is_integer(trace()) && is_integer(norm()); }

    QfElem inverse() const;
    QfElem pow(long e) const;

    friend QfElem operator+(const QfElem& a, const QfElem& b);
    friend QfElem operator-(const QfElem& a, const QfElem& b);
    friend QfElem operator*(const QfElem& a, const QfElem& b);
    friend QfElem operator/(const QfElem& a, const QfElem& b);
    QfElem operator-() const { return QfElem(field_, -x_, -y_); }
    friend bool operator==(const QfElem& a, const QfElem& b) {
        return a.field_ == b.field_ && a.x_ == b.x_ && a.y_ == b.y_;
    }

   private:
    QuadField field_;
    BigRat x_, y_;
};

QfElem operator+(const QfElem& a, long b);
QfElem operator-(long a, const QfElem& b);
QfElem operator*(const BigRat& a, const QfElem& b);

std::string to_string(const QfElem& v);

enum class SplitType { split, inert, ramified };

std::string to_string(SplitType t);

// One prime of O_K above p. For split p the two primes are told apart by
// root: the approximation of the sqrt(d) embedding (mod p for odd p, mod 16
// for p = 2), so e.g. ord_prime is deterministic per descriptor.
struct PrimeIdeal {
    BigInt p;
    SplitType split_type = SplitType::inert;
    int f = 2;  // residue degree
    int e = 1;  // ramification index
    std::optional<BigInt> root;

    bool operator==(const PrimeIdeal&) const = default;
};

std::string to_string(const PrimeIdeal& P);

// Ordered deterministically: split primes come smaller-root first.
std::vector<PrimeIdeal> splitting_type(const QuadField& F, const BigInt& p);

// P-adic valuation of x (x != 0). Inert and ramified cases go through the
// norm; split primes Hensel-lift root until the valuation stabilizes.
long ord_prime(const QuadField& F, const PrimeIdeal& P, const QfElem& x);

// ord_P(2) for P above 2; equals e(P/2).
long ord_of_two(const PrimeIdeal& P);

// Generator of O_K^* / {±1} with eps > 1 under sqrt(d) > 0, found on the
// continued-fraction expansion of sqrt(d) (resp. (1+sqrt(d))/2).
QfElem fundamental_unit(const QuadField& F);

}  // namespace fermatq

#endif
