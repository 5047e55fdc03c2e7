#pragma once

#include <string>
#include <vector>

#include "fermatq/sunit.hpp"

namespace fermatq {

// y^2 = (x - e1)(x - e2)(x - e3) with the standard invariants; the identity
// 1728*disc = c4^3 - c6^2 is verified at construction.
struct EllipticCurveQF {
    QfElem e1, e2, e3;
    QfElem c4, c6, disc;
};

EllipticCurveQF curve_from_roots(const QfElem& e1, const QfElem& e2, const QfElem& e3);

// j-invariant of the Legendre curve y^2 = x(x-1)(x-lambda), computed through
// both closed forms (they must agree exactly):
//   2^8 (lambda^2 - lambda + 1)^3 / (lambda^2 (1-lambda)^2)
//   2^8 (1 - lambda*mu)^3 / (lambda*mu)^2,  mu = 1 - lambda.
QfElem j_of_lambda(const QfElem& lambda);

// (a3 - a1)/(a2 - a1); arguments must be pairwise distinct.
QfElem cross_ratio(const QfElem& a1, const QfElem& a2, const QfElem& a3);

// Full-2-torsion curve <-> lambda-orbit correspondence.
S3Orbit phi_map(const EllipticCurveQF& curve);
EllipticCurveQF phi_inverse(const QfElem& lambda);

// ord_P(j) >= 0 for every P outside S; pole candidates are found through the
// coordinate denominators of j.
bool pgr_outside_S(const QfElem& j, const std::vector<PrimeIdeal>& S);

// Valuation tests at a prime P over 2 for lambda + mu = 1:
//   cond_i  <=> max(|ord_P lambda|, |ord_P mu|) <= 4 ord_P(2) <=> ord_P(j) >= 0
//   cond_ii <=> ord_P(lambda*mu) = ord_P(2) mod 3            <=> 3 | ord_P(j)
// Both equivalences are asserted on every call; t = max(|ord_P lambda|,
// |ord_P mu|) satisfies ord_j = 8 ord_P(2) - 2t whenever t > 0.
struct JValResult {
    bool cond_i;
    bool cond_ii;
    long ord_j;
    long t;
};
JValResult jval_conditions(const QfElem& lambda, const QfElem& mu, const PrimeIdeal& P);

// Frey curve Y^2 = X(X - A a^p)(X + B b^p) for A a^p + B b^p + C c^p = 0;
// disc = 16 (ABC)^2 (abc)^(2p) is verified exactly.
struct FreyData {
    QfElem A, B, C, a, b, c;
    BigInt p;
    EllipticCurveQF curve;
};

FreyData frey_invariants(const QfElem& A, const QfElem& B, const QfElem& C,
                         const QfElem& a, const QfElem& b, const QfElem& c,
                         const BigInt& p);

// Common divisor data of (a, b, c): exponent min(ord_P a, ord_P b, ord_P c)
// at each prime with positive minimum (zero coordinates count as +infinity).
struct ContentIdeal {
    std::vector<std::pair<PrimeIdeal, long>> factorization;
};

ContentIdeal content_ideal(const QuadField& F, const QfElem& a, const QfElem& b,
                           const QfElem& c);

enum class ReductionType { good, multiplicative };

// Reduction of the Frey curve at an odd prime q outside S and coprime to the
// content: multiplicative iff q divides the discriminant, in which case
// ord_q(c4) = 0 and p | ord_q(disc) are asserted.
ReductionType reduction_type(const FreyData& fd, const PrimeIdeal& q,
                             const std::vector<PrimeIdeal>& S);

// Per-prime conductor exponent data with honest exactness flags.
struct ConductorEntry {
    PrimeIdeal P;
    long exp_min = 0;
    long exp_max = 0;
    bool exact = false;
    bool multiplicative = false;
    bool in_m_odd = false;  // contributes to the exactly-known odd part of M_p
    bool minimality_known = false;
    std::string note;
};

struct ConductorReport {
    std::vector<ConductorEntry> entries;
};

ConductorReport conductor_report(const FreyData& fd, const std::vector<PrimeIdeal>& S);

}  // namespace fermatq
