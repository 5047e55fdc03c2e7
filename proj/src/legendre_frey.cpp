#include "fermatq/legendre_frey.hpp"

#include <algorithm>

namespace fermatq {

EllipticCurveQF curve_from_roots(const QfElem& e1, const QfElem& e2, const QfElem& e3) {
    if (e1 == e2 || e1 == e3 || e2 == e3)
        throw std::domain_error("curve_from_roots: roots must be pairwise distinct");
    const QuadField& F = e1.field();
    QfElem s1 = e1 + e2 + e3;
    QfElem s2 = e1 * e2 + e1 * e3 + e2 * e3;
    QfElem s3 = e1 * e2 * e3;

    EllipticCurveQF E;
    E.e1 = e1;
    E.e2 = e2;
    E.e3 = e3;
    // b2 = -4 s1, b4 = 2 s2, b6 = -4 s3 for y^2 = x^3 - s1 x^2 + s2 x - s3
    E.c4 = BigRat(16) * (s1 * s1) - BigRat(48) * s2;
    E.c6 = BigRat(64) * (s1 * s1 * s1) - BigRat(288) * (s1 * s2) + BigRat(864) * s3;
    QfElem d12 = e1 - e2, d13 = e1 - e3, d23 = e2 - e3;
    E.disc = BigRat(16) * (d12 * d12 * d13 * d13 * d23 * d23);
    QfElem lhs = BigRat(1728) * E.disc;
    QfElem rhs = E.c4 * E.c4 * E.c4 - E.c6 * E.c6;
    if (!(lhs == rhs))
        throw std::logic_error("curve_from_roots: 1728*disc != c4^3 - c6^2");
    (void)F;
    return E;
}

QfElem j_of_lambda(const QfElem& lambda) {
    const QuadField& F = lambda.field();
    QfElem one(F, 1);
    if (lambda.is_zero() || lambda == one)
        throw std::domain_error("j_of_lambda: lambda must avoid 0 and 1");
    QfElem mu = 1 - lambda;
    QfElem num = lambda * lambda - lambda + one;
    QfElem den = lambda * lambda * (mu * mu);
    QfElem j1 = BigRat(256) * (num * num * num) / den;

    QfElem lm = lambda * mu;
    QfElem j2 = BigRat(256) * ((one - lm) * (one - lm) * (one - lm)) / (lm * lm);
    if (!(j1 == j2)) throw std::logic_error("j_of_lambda: the two forms disagree");
    return j1;
}

QfElem cross_ratio(const QfElem& a1, const QfElem& a2, const QfElem& a3) {
    if (a1 == a2 || a1 == a3 || a2 == a3)
        throw std::domain_error("cross_ratio: arguments must be pairwise distinct");
    return (a3 - a1) / (a2 - a1);
}

S3Orbit phi_map(const EllipticCurveQF& curve) {
    return s3_orbit(cross_ratio(curve.e1, curve.e2, curve.e3));
}

EllipticCurveQF phi_inverse(const QfElem& lambda) {
    const QuadField& F = lambda.field();
    return curve_from_roots(QfElem(F, 0), QfElem(F, 1), lambda);
}

bool pgr_outside_S(const QfElem& j, const std::vector<PrimeIdeal>& S) {
    const QuadField& F = j.field();
    BigInt den;
    mpz_lcm(den.get_mpz_t(), j.x().get_den().get_mpz_t(), j.y().get_den().get_mpz_t());
    if (den == 1) return true;  // integer coordinates: no poles anywhere
    // A rational prime l can appear in a reduced coordinate denominator only
    // when j has a pole at some prime above l (integrality of j and its
    // conjugate forces l-integral coordinates), with the usual caveats at 2
    // and at divisors of d. So strip those characteristics plus the ones S
    // can excuse; anything left certifies a pole outside S without having to
    // factor it.
    std::vector<BigInt> chars = {2};
    for (const auto& [p, e] : factorize(BigInt(F.d)).factors) chars.push_back(p);
    for (const PrimeIdeal& P : S) chars.push_back(P.p);
    std::sort(chars.begin(), chars.end());
    chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
    for (const BigInt& p : chars)
        mpz_remove(den.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
    if (den > 1) return false;
    for (const BigInt& p : chars) {
        for (const PrimeIdeal& P : splitting_type(F, p)) {
            if (std::find(S.begin(), S.end(), P) != S.end()) continue;
            if (ord_prime(F, P, j) < 0) return false;
        }
    }
    return true;
}

JValResult jval_conditions(const QfElem& lambda, const QfElem& mu, const PrimeIdeal& P) {
    if (P.p != 2)
        throw std::invalid_argument("jval_conditions: prime must lie over 2");
    const QuadField& F = lambda.field();
    QfElem one(F, 1);
    if (lambda.is_zero() || lambda == one)
        throw std::invalid_argument("jval_conditions: lambda must avoid 0 and 1");
    if (!(mu == 1 - lambda))
        throw std::invalid_argument("jval_conditions: mu must equal 1 - lambda");

    long e2 = ord_of_two(P);
    long ol = ord_prime(F, P, lambda);
    long om = ord_prime(F, P, mu);
    long t = std::max(ol < 0 ? -ol : ol, om < 0 ? -om : om);

    JValResult r;
    r.t = t;
    r.cond_i = t <= 4 * e2;
    long olm = ol + om;
    r.cond_ii = ((olm - e2) % 3 + 3) % 3 == 0;
    r.ord_j = ord_prime(F, P, j_of_lambda(lambda));

    if (r.cond_i != (r.ord_j >= 0))
        throw std::logic_error("jval_conditions: cond_i <=> ord_j >= 0 violated");
    if (r.cond_ii != (r.ord_j % 3 == 0))
        throw std::logic_error("jval_conditions: cond_ii <=> 3 | ord_j violated");
    if (t > 0 && r.ord_j != 8 * e2 - 2 * t)
        throw std::logic_error("jval_conditions: ord_j != 8 ord_P(2) - 2t");
    return r;
}

FreyData frey_invariants(const QfElem& A, const QfElem& B, const QfElem& C,
                         const QfElem& a, const QfElem& b, const QfElem& c,
                         const BigInt& p) {
    if (p % 2 == 0 || !is_prime(p))
        throw std::invalid_argument("frey_invariants: exponent must be an odd prime");
    if (a.is_zero() || b.is_zero() || c.is_zero())
        throw std::invalid_argument("frey_invariants: trivial solution (abc = 0)");
    if (A.is_zero() || B.is_zero() || C.is_zero())
        throw std::invalid_argument("frey_invariants: zero coefficient");
    long pe = static_cast<long>(p.get_si());
    QfElem Aap = A * a.pow(pe);
    QfElem Bbp = B * b.pow(pe);
    QfElem Ccp = C * c.pow(pe);
    if (!((Aap + Bbp + Ccp).is_zero()))
        throw std::invalid_argument(
            "frey_invariants: A a^p + B b^p + C c^p must vanish");

    const QuadField& F = A.field();
    FreyData fd;
    fd.A = A; fd.B = B; fd.C = C;
    fd.a = a; fd.b = b; fd.c = c;
    fd.p = p;
    fd.curve = curve_from_roots(QfElem(F, 0), Aap, QfElem(F, 0) - Bbp);

    QfElem abc = A * B * C * (a * b * c).pow(pe);
    QfElem expected = BigRat(16) * (abc * abc);
    if (!(fd.curve.disc == expected))
        throw std::logic_error("frey_invariants: disc != 16 (ABC)^2 (abc)^(2p)");
    return fd;
}

ContentIdeal content_ideal(const QuadField& F, const QfElem& a, const QfElem& b,
                           const QfElem& c) {
    if (a.is_zero() && b.is_zero() && c.is_zero())
        throw std::domain_error("content_ideal: all coordinates are zero");
    std::vector<const QfElem*> nz;
    for (const QfElem* e : {&a, &b, &c}) {
        if (!e->is_integral())
            throw std::invalid_argument("content_ideal: coordinates must be integral");
        if (!e->is_zero()) nz.push_back(e);
    }
    BigInt g = 0;
    for (const QfElem* e : nz) {
        BigInt n = BigInt(abs(e->norm().get_num()));
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    ContentIdeal out;
    if (g <= 1) return out;
    auto f = factorize(g);
    if (!f.complete())
        throw resource_error("content_ideal: unfactored norm gcd cofactor");
    for (auto& [pr, e] : f.factors) {
        for (const PrimeIdeal& P : splitting_type(F, pr)) {
            long m = -1;
            for (const QfElem* el : nz) {
                long o = ord_prime(F, P, *el);
                if (m < 0 || o < m) m = o;
            }
            if (m > 0) out.factorization.push_back({P, m});
        }
    }
    return out;
}

namespace {

long content_exponent(const ContentIdeal& ci, const PrimeIdeal& P) {
    for (auto& [Q, e] : ci.factorization)
        if (Q == P) return e;
    return 0;
}

bool in_set(const std::vector<PrimeIdeal>& S, const PrimeIdeal& P) {
    return std::find(S.begin(), S.end(), P) != S.end();
}

}  // namespace

ReductionType reduction_type(const FreyData& fd, const PrimeIdeal& q,
                             const std::vector<PrimeIdeal>& S) {
    if (q.p == 2) throw std::invalid_argument("reduction_type: prime must be odd");
    if (in_set(S, q))
        throw std::invalid_argument("reduction_type: prime must lie outside S");
    const QuadField& F = fd.A.field();
    ContentIdeal ci = content_ideal(F, fd.a, fd.b, fd.c);
    if (content_exponent(ci, q) > 0)
        throw std::invalid_argument("reduction_type: prime divides the content");

    long od = ord_prime(F, q, fd.curve.disc);
    if (od < 0) throw std::logic_error("reduction_type: discriminant has a pole");
    if (od == 0) return ReductionType::good;
    if (ord_prime(F, q, fd.curve.c4) != 0)
        throw std::logic_error("reduction_type: ord(c4) != 0 at a multiplicative prime");
    if (od % fd.p != 0)
        throw std::logic_error("reduction_type: ord(disc) not divisible by p");
    return ReductionType::multiplicative;
}

ConductorReport conductor_report(const FreyData& fd, const std::vector<PrimeIdeal>& S) {
    const QuadField& F = fd.A.field();
    ContentIdeal ci = content_ideal(F, fd.a, fd.b, fd.c);

    // candidate primes: everything over 2, odd members of S, content primes,
    // and odd primes dividing the discriminant
    std::vector<PrimeIdeal> cand;
    auto push = [&cand](const PrimeIdeal& P) {
        if (std::find(cand.begin(), cand.end(), P) == cand.end()) cand.push_back(P);
    };
    for (const PrimeIdeal& P : splitting_type(F, 2)) push(P);
    for (const PrimeIdeal& P : S) push(P);
    for (auto& [P, e] : ci.factorization) push(P);
    BigRat nd = fd.curve.disc.norm();
    BigInt num = BigInt(abs(nd.get_num()));
    auto f = factorize(num);
    if (!f.complete())
        throw resource_error("conductor_report: unfactored discriminant norm");
    for (auto& [pr, e] : f.factors) {
        if (pr == 2) continue;
        for (const PrimeIdeal& P : splitting_type(F, pr))
            if (ord_prime(F, P, fd.curve.disc) > 0) push(P);
    }
    std::sort(cand.begin(), cand.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
        if (a.p != b.p) return a.p < b.p;
        if (a.root && b.root) return *a.root < *b.root;
        return false;
    });

    ConductorReport rep;
    for (const PrimeIdeal& P : cand) {
        ConductorEntry en;
        en.P = P;
        if (P.p == 2) {
            en.exp_min = 0;
            en.exp_max = 2 + 6 * ord_of_two(P);
            en.exact = false;
            en.minimality_known = false;
            en.note = "even prime: interval bound only";
        } else if (in_set(S, P) || content_exponent(ci, P) > 0) {
            en.exp_min = 0;
            en.exp_max = 2;
            en.exact = false;
            en.minimality_known = false;
            en.note = in_set(S, P) ? "odd prime in S" : "odd content prime";
        } else {
            ReductionType rt = reduction_type(fd, P, S);
            if (rt == ReductionType::good) continue;
            en.exp_min = en.exp_max = 1;
            en.exact = true;
            en.multiplicative = true;
            en.in_m_odd = true;  // p | ord(disc) was asserted by reduction_type
            en.minimality_known = true;
            en.note = "multiplicative outside S and content";
        }
        rep.entries.push_back(std::move(en));
    }
    return rep;
}

}  // namespace fermatq
