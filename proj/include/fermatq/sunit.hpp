#pragma once

#include <string>
#include <vector>

#include "fermatq/quadfield.hpp"

namespace fermatq {

// Bounds for the exponent searches.  All searches are exhaustive within these
// ranges and results are labelled complete only up to them.
struct SearchBounds {
    long unit_exp_max = 25;  // |k| in the unit factor eps^k
    long two_exp_max = 25;   // |a| in the factor 2^a
    long q_exp_max = 25;     // |b| in the factor q^b (per odd prime)
    long r1_max = 40;        // r1 range of the parametrized solver
    long s_max = 12;         // s1, s2 range of the parametrized solver
};

// A solution of lambda + mu = 1 in S-units, lambda, mu not in {0, 1}.
struct SUnitSolution {
    QfElem lambda;
    QfElem mu;
    std::string canonical_id;  // printed canonical orbit representative
};

// Orbit of lambda under the six substitutions generated by 1/lambda and
// 1 - lambda; duplicates removed, deterministic order.
struct S3Orbit {
    std::vector<QfElem> elements;
};

S3Orbit s3_orbit(const QfElem& lambda);

// Representative of the orbit of lambda under the S3 action together with
// field conjugation, minimal in a fixed total order on coordinates.
QfElem canonical_lambda(const QfElem& lambda);

// Total order key used by canonical_lambda; exposed for deterministic sorting.
bool canonical_less(const QfElem& a, const QfElem& b);

// Validates lambda (and mu = 1 - lambda) as S-units and builds the solution
// with its canonical id.  Throws invalid_argument if the pair is not a
// solution for this S.
SUnitSolution make_solution(const QuadField& F, const std::vector<PrimeIdeal>& S,
                            const QfElem& lambda);

// True iff the solution lies in the distinguished rational orbit
// {(1/2,1/2), (2,-1), (-1,2)}.
bool is_irrelevant(const SUnitSolution& sol);

SUnitSolution canonicalize(const SUnitSolution& sol);

// Generators of the S-unit group when every prime of S is inert: -1, the
// fundamental unit, and the rational primes below S.  Split or ramified
// members raise unsupported_configuration.
struct SUnitGenerators {
    QfElem fundamental;            // eps
    std::vector<BigInt> rationals;  // p with P = pO_K in S
};
SUnitGenerators sunit_group_generators(const QuadField& F,
                                       const std::vector<PrimeIdeal>& S);

// Exhaustive scan of lambda = +-eps^k * prod p^a within bounds; keeps the
// lambda whose mu = 1 - lambda is again an S-unit.  Output is canonicalized,
// deduplicated and sorted; complete only up to the bounds.
std::vector<SUnitSolution> enumerate_bruteforce(const QuadField& F,
                                                const std::vector<PrimeIdeal>& S,
                                                const SearchBounds& bounds,
                                                unsigned threads = 1);

// One tuple of the parametrized solver for S = {2, q} both inert:
//   lambda = (X + v sqrt(d))/2,  X = eta1*2^(2 r1)*q^(2 s1) - eta2*q^(2 s2) + 1
// subject to X^2 - d v^2 = eta1*2^(2 r1 + 2)*q^(2 s1)
// and (2 - X)^2 - d v^2 = eta2*4*q^(2 s2).
struct ParamSolution {
    int eta1;
    int eta2;
    long r1;
    long s1;
    long s2;
    BigInt v;  // nonzero; v and -v give conjugate solutions, v > 0 is kept
    BigInt X;
    SUnitSolution solution;
};

// All parametrized irrational solutions with r1 <= r1_max, s1, s2 <= s_max,
// s1*s2 = 0.  Requires d >= 13 squarefree, d = 5 mod 8, q >= 29 prime,
// q = 5 mod 8, kronecker(d, q) = -1 (both primes inert).
std::vector<ParamSolution> enumerate_param(long d, const BigInt& q,
                                           const SearchBounds& bounds);

// S3-translate of the solution with both coordinates integral; |S| must be 2.
SUnitSolution integral_representative(const SUnitSolution& sol,
                                      const std::vector<PrimeIdeal>& S);

// Classification of the rational solutions for S = {2, q}: integer casework
// search over +-2^r q^s with mu smooth, orbit-closed.  Same hypotheses as
// enumerate_param.
S3Orbit rational_solutions(long d, const BigInt& q, const SearchBounds& bounds = {});

// Throws invalid_argument naming the first failing hypothesis of the
// d/q setting above; returns the field on success.
QuadField require_dq_setting(long d, const BigInt& q);

}  // namespace fermatq
