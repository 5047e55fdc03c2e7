#include "fermatq/sunit.hpp"

#include <algorithm>
#include <map>
#include <thread>

namespace fermatq {

namespace {

void require_not_01(const QfElem& l, const char* who) {
    QfElem one(l.field(), 1);
    if (l.is_zero() || l == one)
        throw std::domain_error(std::string(who) + ": lambda must avoid 0 and 1");
}

int sign_of(const BigRat& r) { return mpq_sgn(r.get_mpq_t()); }

// Total order on elements: compare (|num x|, den x, |num y|, den y,
// sign x, sign y) lexicographically; signs ordered -1 < 0 < 1.
int cmp_elems(const QfElem& a, const QfElem& b) {
    int c = cmp(abs(a.x().get_num()), abs(b.x().get_num()));
    if (c) return c;
    c = cmp(a.x().get_den(), b.x().get_den());
    if (c) return c;
    c = cmp(abs(a.y().get_num()), abs(b.y().get_num()));
    if (c) return c;
    c = cmp(a.y().get_den(), b.y().get_den());
    if (c) return c;
    c = sign_of(a.x()) - sign_of(b.x());
    if (c) return c;
    return sign_of(a.y()) - sign_of(b.y());
}

std::vector<QfElem> six_images(const QfElem& l) {
    QfElem one(l.field(), 1);
    QfElem m = 1 - l;
    return {l, l.inverse(), m, m.inverse(), l / (l - one), (l - one) / l};
}

}  // namespace

bool canonical_less(const QfElem& a, const QfElem& b) { return cmp_elems(a, b) < 0; }

S3Orbit s3_orbit(const QfElem& lambda) {
    require_not_01(lambda, "s3_orbit");
    S3Orbit orbit;
    for (const QfElem& im : six_images(lambda)) {
        bool seen = false;
        for (const QfElem& e : orbit.elements)
            if (e == im) { seen = true; break; }
        if (!seen) orbit.elements.push_back(im);
    }
    std::sort(orbit.elements.begin(), orbit.elements.end(), canonical_less);
    return orbit;
}

QfElem canonical_lambda(const QfElem& lambda) {
    require_not_01(lambda, "canonical_lambda");
    QfElem best = lambda;
    for (const QfElem& im : six_images(lambda)) {
        if (canonical_less(im, best)) best = im;
        QfElem imc = im.conj();
        if (canonical_less(imc, best)) best = imc;
    }
    return best;
}

namespace {

bool contains(const std::vector<PrimeIdeal>& S, const PrimeIdeal& P) {
    return std::find(S.begin(), S.end(), P) != S.end();
}

// ord_P(xi) = 0 for every P outside S among primes dividing norm(xi).
bool is_s_unit(const QuadField& F, const std::vector<PrimeIdeal>& S, const QfElem& xi) {
    BigRat n = xi.norm();
    std::vector<BigInt> ps;
    for (const BigInt& part : {BigInt(abs(n.get_num())), BigInt(n.get_den())}) {
        if (part == 1) continue;
        auto f = factorize(part);
        if (!f.complete())
            throw resource_error("is_s_unit: norm has an unfactored cofactor " +
                                 f.cofactor.get_str());
        for (auto& [p, e] : f.factors) ps.push_back(p);
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (const BigInt& p : ps) {
        for (const PrimeIdeal& P : splitting_type(F, p)) {
            if (contains(S, P)) continue;
            if (ord_prime(F, P, xi) != 0) return false;
        }
    }
    return true;
}

}  // namespace

SUnitSolution make_solution(const QuadField& F, const std::vector<PrimeIdeal>& S,
                            const QfElem& lambda) {
    if (!(lambda.field() == F))
        throw std::invalid_argument("make_solution: element of a different field");
    QfElem one(F, 1);
    if (lambda.is_zero() || lambda == one)
        throw std::invalid_argument("make_solution: lambda must avoid 0 and 1");
    QfElem mu = 1 - lambda;
    if (!is_s_unit(F, S, lambda))
        throw std::invalid_argument("make_solution: lambda is not an S-unit");
    if (!is_s_unit(F, S, mu))
        throw std::invalid_argument("make_solution: mu = 1 - lambda is not an S-unit");
    SUnitSolution sol;
    sol.lambda = lambda;
    sol.mu = mu;
    sol.canonical_id = to_string(canonical_lambda(lambda));
    return sol;
}

bool is_irrelevant(const SUnitSolution& sol) {
    if (!sol.lambda.is_rational()) return false;
    const BigRat& x = sol.lambda.x();
    return x == -1 || x == 2 || x == make_rat(1, 2);
}

SUnitSolution canonicalize(const SUnitSolution& sol) {
    QfElem c = canonical_lambda(sol.lambda);
    SUnitSolution out;
    out.lambda = c;
    out.mu = 1 - c;
    out.canonical_id = to_string(c);
    return out;
}

SUnitGenerators sunit_group_generators(const QuadField& F,
                                       const std::vector<PrimeIdeal>& S) {
    SUnitGenerators g;
    g.fundamental = fundamental_unit(F);
    for (const PrimeIdeal& P : S) {
        if (P.split_type != SplitType::inert)
            throw unsupported_configuration(
                "sunit_group_generators: prime " + to_string(P) + " is " +
                to_string(P.split_type) +
                "; only inert prime sets are supported (principality machinery "
                "not implemented)");
        g.rationals.push_back(P.p);
    }
    std::sort(g.rationals.begin(), g.rationals.end());
    g.rationals.erase(std::unique(g.rationals.begin(), g.rationals.end()),
                      g.rationals.end());
    return g;
}

namespace {

// One exponent assignment a = (a_i) for the prime part prod p_i^{a_i}.
// With D = prod p^{max(0,-a)} clearing denominators, the integer
//   M = D^2 norm(1 - lambda)
//     = prod p^{2 max(0,-a)} - s*tr(eps^k)*prod p^{|a|} + N(eps)^k*prod p^{2 max(0,a)}
// so mu is an S-unit iff M != 0 and M is (up to sign) a product of the p_i.
struct Cell {
    BigInt pm;           // prod p^{|a_i|}
    BigInt sum;          // P1 + P3   (used when N(eps)^k = +1)
    BigInt dif;          // P1 - P3   (used when N(eps)^k = -1)
    std::vector<long> a;
};

struct Hit {
    long k;
    int s;
    size_t cell;
};

void scan_k_range(const std::vector<Cell>& cells, const std::vector<BigInt>& tau,
                  int unit_norm, const std::vector<BigInt>& primes, long kmax,
                  long k0, long stride, std::vector<Hit>& hits) {
    BigInt mid, m, stripped;
    for (long k = k0; k <= kmax; k += stride) {
        for (int kk : {0, 1}) {  // k and -k
            long ksig = kk ? -k : k;
            if (kk && k == 0) continue;
            // tr(eps^-k) = N(eps)^k tr(eps^k); N(eps^k) = N(eps)^|k|
            int nu = (unit_norm == 1 || k % 2 == 0) ? 1 : -1;
            BigInt t = tau[k];
            if (ksig < 0 && nu == -1) t = -t;
            for (size_t ci = 0; ci < cells.size(); ++ci) {
                const Cell& cell = cells[ci];
                mid = t * cell.pm;
                const BigInt& base = (nu == 1) ? cell.sum : cell.dif;
                for (int s : {1, -1}) {
                    if (s == 1)
                        m = base - mid;
                    else
                        m = base + mid;
                    if (m == 0) continue;  // lambda = 1
                    mpz_abs(stripped.get_mpz_t(), m.get_mpz_t());
                    for (const BigInt& p : primes) {
                        if (p == 2) {
                            unsigned long z = mpz_scan1(stripped.get_mpz_t(), 0);
                            mpz_tdiv_q_2exp(stripped.get_mpz_t(), stripped.get_mpz_t(), z);
                        } else {
                            mpz_remove(stripped.get_mpz_t(), stripped.get_mpz_t(),
                                       p.get_mpz_t());
                        }
                    }
                    if (stripped == 1) hits.push_back({ksig, s, ci});
                }
            }
        }
    }
}

}  // namespace

std::vector<SUnitSolution> enumerate_bruteforce(const QuadField& F,
                                                const std::vector<PrimeIdeal>& S,
                                                const SearchBounds& bounds,
                                                unsigned threads) {
    SUnitGenerators gens = sunit_group_generators(F, S);
    const std::vector<BigInt>& primes = gens.rationals;
    const long kmax = bounds.unit_exp_max;

    // exponent ranges per prime
    std::vector<long> emax;
    double cell_estimate = 1.0;
    for (const BigInt& p : primes) {
        long e = (p == 2) ? bounds.two_exp_max : bounds.q_exp_max;
        emax.push_back(e);
        cell_estimate *= 2 * e + 1;
    }
    if (cell_estimate > 4e6)
        throw resource_error(
            "enumerate_bruteforce: exponent grid exceeds 4e6 cells; lower the "
            "bounds");

    // power tables and cells
    std::vector<std::vector<BigInt>> pw(primes.size());
    for (size_t i = 0; i < primes.size(); ++i) {
        pw[i].resize(2 * emax[i] + 1);
        pw[i][0] = 1;
        for (long j = 1; j <= 2 * emax[i]; ++j) pw[i][j] = pw[i][j - 1] * primes[i];
    }
    std::vector<Cell> cells;
    std::vector<long> a(primes.size(), 0);
    for (size_t i = 0; i < primes.size(); ++i) a[i] = -emax[i];
    while (true) {
        Cell c;
        BigInt p1 = 1, p3 = 1;
        c.pm = 1;
        for (size_t i = 0; i < primes.size(); ++i) {
            long ai = a[i];
            c.pm *= pw[i][ai < 0 ? -ai : ai];
            if (ai < 0) p1 *= pw[i][-2 * ai];
            if (ai > 0) p3 *= pw[i][2 * ai];
        }
        c.sum = p1 + p3;
        c.dif = p1 - p3;
        c.a = a;
        cells.push_back(std::move(c));
        size_t i = 0;
        for (; i < primes.size(); ++i) {
            if (a[i] < emax[i]) { ++a[i]; break; }
            a[i] = -emax[i];
        }
        if (i == primes.size()) break;
        if (primes.empty()) break;
    }

    // traces of unit powers: t_{j+1} = tr(eps) t_j - N(eps) t_{j-1}
    QfElem eps = gens.fundamental;
    BigInt T = BigInt(eps.trace());
    int unit_norm = eps.norm() == 1 ? 1 : -1;
    std::vector<BigInt> tau(kmax + 1);
    tau[0] = 2;
    if (kmax >= 1) tau[1] = T;
    for (long j = 2; j <= kmax; ++j) tau[j] = T * tau[j - 1] - unit_norm * tau[j - 2];

    // scan, optionally partitioned over worker threads by k
    std::vector<Hit> hits;
    unsigned nt = std::max(1u, threads);
    if (nt == 1) {
        scan_k_range(cells, tau, unit_norm, primes, kmax, 0, 1, hits);
    } else {
        std::vector<std::vector<Hit>> parts(nt);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back(scan_k_range, std::cref(cells), std::cref(tau),
                              unit_norm, std::cref(primes), kmax, static_cast<long>(t),
                              static_cast<long>(nt), std::ref(parts[t]));
        for (auto& th : pool) th.join();
        for (auto& part : parts)
            hits.insert(hits.end(), part.begin(), part.end());
    }

    // reconstruct, validate, canonicalize, dedupe
    std::map<std::string, SUnitSolution> by_id;
    for (const Hit& h : hits) {
        QfElem lambda = eps.pow(h.k);
        BigRat scale(h.s);
        for (size_t i = 0; i < primes.size(); ++i)
            scale *= pow_rat(BigRat(primes[i]), cells[h.cell].a[i]);
        lambda = scale * lambda;
        SUnitSolution sol = canonicalize(make_solution(F, S, lambda));
        by_id.emplace(sol.canonical_id, std::move(sol));
    }
    std::vector<SUnitSolution> out;
    for (auto& [id, sol] : by_id) out.push_back(std::move(sol));
    std::sort(out.begin(), out.end(), [](const SUnitSolution& u, const SUnitSolution& v) {
        return canonical_less(u.lambda, v.lambda);
    });
    return out;
}

QuadField require_dq_setting(long d, const BigInt& q) {
    if (d < 13) throw std::invalid_argument("require_dq_setting: d must be >= 13");
    if (d % 8 != 5)
        throw std::invalid_argument("require_dq_setting: d must be 5 mod 8");
    if (!is_squarefree(BigInt(d)))
        throw std::invalid_argument("require_dq_setting: d must be squarefree");
    if (q < 29) throw std::invalid_argument("require_dq_setting: q must be >= 29");
    if (!is_prime(q)) throw std::invalid_argument("require_dq_setting: q must be prime");
    if (q % 8 != 5)
        throw std::invalid_argument("require_dq_setting: q must be 5 mod 8");
    if (kronecker(BigInt(d), q) != -1)
        throw std::invalid_argument(
            "require_dq_setting: kronecker(d, q) must be -1 (q inert)");
    return make_field(d);
}

std::vector<ParamSolution> enumerate_param(long d, const BigInt& q,
                                           const SearchBounds& bounds) {
    QuadField F = require_dq_setting(d, q);
    std::vector<PrimeIdeal> S = {splitting_type(F, 2)[0], splitting_type(F, q)[0]};

    std::vector<BigInt> qp(2 * bounds.s_max + 1);
    qp[0] = 1;
    for (long j = 1; j <= 2 * bounds.s_max; ++j) qp[j] = qp[j - 1] * q;

    std::vector<std::pair<long, long>> spairs;  // s1*s2 = 0
    for (long s1 = 0; s1 <= bounds.s_max; ++s1) spairs.push_back({s1, 0});
    for (long s2 = 1; s2 <= bounds.s_max; ++s2) spairs.push_back({0, s2});

    std::vector<ParamSolution> out;
    for (int eta1 : {1, -1}) {
        for (int eta2 : {1, -1}) {
            for (long r1 = 0; r1 <= bounds.r1_max; ++r1) {
                BigInt two_2r1 = BigInt(1) << (2 * r1);
                for (auto [s1, s2] : spairs) {
                    BigInt X = eta1 * two_2r1 * qp[2 * s1] - eta2 * qp[2 * s2] + 1;
                    BigInt W = X * X - eta1 * (two_2r1 << 2) * qp[2 * s1];
                    if (W <= 0) continue;  // v != 0 needs W = d v^2 > 0
                    if (W % d != 0) continue;
                    auto v = perfect_square_root(W / d);
                    if (!v || *v == 0) continue;
                    BigInt check = (2 - X) * (2 - X) - d * *v * *v;
                    if (check != eta2 * 4 * qp[2 * s2])
                        throw std::logic_error(
                            "enumerate_param: second quadratic relation failed");
                    ParamSolution ps;
                    ps.eta1 = eta1;
                    ps.eta2 = eta2;
                    ps.r1 = r1;
                    ps.s1 = s1;
                    ps.s2 = s2;
                    ps.v = *v;
                    ps.X = X;
                    QfElem lambda(F, make_rat(X, 2), make_rat(*v, 2));
                    ps.solution = make_solution(F, S, lambda);
                    out.push_back(std::move(ps));
                }
            }
        }
    }
    return out;
}

SUnitSolution integral_representative(const SUnitSolution& sol,
                                      const std::vector<PrimeIdeal>& S) {
    if (S.size() != 2)
        throw unsupported_configuration(
            "integral_representative: needs exactly two primes in S");
    const QuadField& F = sol.lambda.field();
    long o1 = ord_prime(F, S[0], sol.lambda);
    long o2 = ord_prime(F, S[1], sol.lambda);
    QfElem lp = sol.lambda;
    if (o1 != 0 && o2 != 0) {
        lp = lp / (lp - QfElem(F, 1));
    } else if (o1 == 0) {
        if (o2 < 0) lp = lp.inverse();
    } else {  // o2 == 0
        if (o1 < 0) lp = lp.inverse();
    }
    return make_solution(F, S, lp);
}

S3Orbit rational_solutions(long d, const BigInt& q, const SearchBounds& bounds) {
    QuadField F = require_dq_setting(d, q);
    // Integral rational solutions are +-2^r q^s with 1 minus them again of
    // that shape; scan the exponent box and close up under the S3 action.
    std::vector<QfElem> found;
    BigInt stripped;
    for (long r = 0; r <= bounds.two_exp_max; ++r) {
        for (long s = 0; s <= bounds.q_exp_max; ++s) {
            BigInt mag = (BigInt(1) << r) * pow_int(q, s);
            for (int sg : {1, -1}) {
                BigInt lam = sg * mag;
                BigInt mu = 1 - lam;
                if (mu == 0) continue;
                mpz_abs(stripped.get_mpz_t(), mu.get_mpz_t());
                unsigned long z = mpz_scan1(stripped.get_mpz_t(), 0);
                mpz_tdiv_q_2exp(stripped.get_mpz_t(), stripped.get_mpz_t(), z);
                mpz_remove(stripped.get_mpz_t(), stripped.get_mpz_t(), q.get_mpz_t());
                if (stripped == 1) found.push_back(QfElem(F, BigRat(lam), BigRat(0)));
            }
        }
    }
    S3Orbit orbit;
    for (const QfElem& l : found)
        for (const QfElem& im : s3_orbit(l).elements) {
            bool seen = false;
            for (const QfElem& e : orbit.elements)
                if (e == im) { seen = true; break; }
            if (!seen) orbit.elements.push_back(im);
        }
    std::sort(orbit.elements.begin(), orbit.elements.end(), canonical_less);
    return orbit;
}

}  // namespace fermatq
