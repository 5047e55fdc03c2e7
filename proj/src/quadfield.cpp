#include "fermatq/quadfield.hpp"

#include <algorithm>

namespace fermatq {

QuadField make_field(long d) {
    if (d < 2) throw std::invalid_argument("make_field: d must be >= 2");
    if (!is_squarefree(BigInt(d)))
        throw std::invalid_argument("make_field: d = " + std::to_string(d) +
                                    " is not squarefree");
    QuadField F;
    F.d = d;
    F.basis = (d % 4 == 1) ? BasisKind::half_integer : BasisKind::plain;
    F.disc = (F.basis == BasisKind::half_integer) ? d : 4 * d;
    return F;
}

namespace {

void require_same_field(const QfElem& a, const QfElem& b) {
    if (!(a.field() == b.field()))
        throw std::invalid_argument("mixed-field operation between Q(sqrt(" +
                                    std::to_string(a.field().d) + ")) and Q(sqrt(" +
                                    std::to_string(b.field().d) + "))");
}

}  // namespace

QfElem operator+(const QfElem& a, const QfElem& b) {
    require_same_field(a, b);
    return QfElem(a.field(), a.x() + b.x(), a.y() + b.y());
}

QfElem operator-(const QfElem& a, const QfElem& b) {
    require_same_field(a, b);
    return QfElem(a.field(), a.x() - b.x(), a.y() - b.y());
}

QfElem operator*(const QfElem& a, const QfElem& b) {
    require_same_field(a, b);
    return QfElem(a.field(), a.x() * b.x() + a.field().d * a.y() * b.y(),
                  a.x() * b.y() + a.y() * b.x());
}

QfElem QfElem::inverse() const {
    if (is_zero()) throw std::domain_error("QfElem: inversion of zero");
    BigRat n = norm();  // (x + y sqrt d)^-1 = conj / norm
    return QfElem(field_, x_ / n, -y_ / n);
}

QfElem operator/(const QfElem& a, const QfElem& b) { return a * b.inverse(); }

QfElem QfElem::pow(long e) const {
    if (e == 0) return QfElem(field_, 1);
    QfElem base = e < 0 ? inverse() : *this;
    unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
    QfElem acc(field_, 1);
    while (mag) {
        if (mag & 1) acc = acc * base;
        base = base * base;
        mag >>= 1;
    }
    return acc;
}

QfElem operator+(const QfElem& a, long b) {
    return QfElem(a.field(), a.x() + b, a.y());
}

QfElem operator-(long a, const QfElem& b) {
    return QfElem(b.field(), a - b.x(), -b.y());
}

QfElem operator*(const BigRat& a, const QfElem& b) {
    return QfElem(b.field(), a * b.x(), a * b.y());
}

std::string to_string(const QfElem& v) {
    if (v.y() == 0) return v.x().get_str();
    BigInt den;
    mpz_lcm(den.get_mpz_t(), v.x().get_den().get_mpz_t(), v.y().get_den().get_mpz_t());
    BigInt a = BigInt(v.x() * den);
    BigInt b = BigInt(v.y() * den);
    std::string root = "sqrt(" + std::to_string(v.field().d) + ")";
    std::string s = "(" + a.get_str();
    if (b == 1)
        s += "+" + root;
    else if (b == -1)
        s += "-" + root;
    else
        s += (b > 0 ? "+" : "") + b.get_str() + "*" + root;
    s += ")";
    if (den != 1) s += "/" + den.get_str();
    return s;
}

std::string to_string(SplitType t) {
    switch (t) {
        case SplitType::split: return "split";
        case SplitType::inert: return "inert";
        case SplitType::ramified: return "ramified";
    }
    return "?";
}

std::string to_string(const PrimeIdeal& P) {
    std::string s = P.p.get_str();
    if (P.split_type == SplitType::split) s += "[root " + P.root->get_str() + "]";
    return s;
}

namespace {

// Tonelli-Shanks; p odd prime, (a|p) = 1.
BigInt sqrt_mod_odd_prime(const BigInt& a0, const BigInt& p) {
    BigInt a = a0 % p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (p % 4 == 3) {
        BigInt r;
        BigInt e = (p + 1) / 4;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return r;
    }
    BigInt q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    BigInt z = 2;
    while (kronecker(z, p) != -1) ++z;
    BigInt c, t, r, b;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    BigInt e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    unsigned long m = s;
    while (t != 1) {
        BigInt tt = t;
        unsigned long i = 0;
        while (tt != 1) {
            mpz_powm_ui(tt.get_mpz_t(), tt.get_mpz_t(), 2, p.get_mpz_t());
            ++i;
        }
        b = c;
        for (unsigned long j = 0; j + i + 1 < m; ++j)
            mpz_powm_ui(b.get_mpz_t(), b.get_mpz_t(), 2, p.get_mpz_t());
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

// Root of x^2 = d in Z/32 congruent to `label` mod 16; exists for d = 1 mod 8.
BigInt two_adic_root_mod32(long d, const BigInt& label) {
    for (long r = 1; r < 32; r += 2) {
        if ((r * r - d) % 32 == 0 && BigInt(r % 16) == label) return r;
    }
    throw std::logic_error("two_adic_root_mod32: no root, d mod 8 != 1?");
}

}  // namespace

std::vector<PrimeIdeal> splitting_type(const QuadField& F, const BigInt& p) {
    if (p < 2 || !is_prime(p)) throw std::invalid_argument("splitting_type: p is not prime");
    std::vector<PrimeIdeal> out;
    if (p == 2) {
        long m8 = F.d % 8;
        if (m8 == 1) {
            // two primes, told apart by the 2-adic root of d reduced mod 16
            BigInt r;
            for (long c = 1; c < 32; c += 2)
                if ((c * c - F.d) % 32 == 0) { r = c % 16; break; }
            BigInt r2 = 16 - r;
            if (r2 < r) std::swap(r, r2);
            out.push_back({2, SplitType::split, 1, 1, r});
            out.push_back({2, SplitType::split, 1, 1, r2});
        } else if (m8 == 5) {
            out.push_back({2, SplitType::inert, 2, 1, std::nullopt});
        } else {  // d = 2, 3 mod 4
            out.push_back({2, SplitType::ramified, 1, 2, std::nullopt});
        }
        return out;
    }
    if (F.d % p == 0) {
        out.push_back({p, SplitType::ramified, 1, 2, std::nullopt});
        return out;
    }
    int symbol = kronecker(BigInt(F.d), p);
    if (symbol == 1) {
        BigInt r = sqrt_mod_odd_prime(BigInt(F.d), p);
        BigInt r2 = p - r;
        if (r2 < r) std::swap(r, r2);
        out.push_back({p, SplitType::split, 1, 1, r});
        out.push_back({p, SplitType::split, 1, 1, r2});
    } else {
        out.push_back({p, SplitType::inert, 2, 1, std::nullopt});
    }
    return out;
}

long ord_of_two(const PrimeIdeal& P) {
    if (P.p != 2) throw std::invalid_argument("ord_of_two: prime is not above 2");
    return P.e;
}

namespace {

// Valuation at a split prime: Hensel-lift the root r_k (r_k^2 = d mod p^k)
// and read val_p(x + y*r_k) once it drops below the working precision k.
long ord_split(const QuadField& F, const PrimeIdeal& P, const QfElem& v) {
    const BigInt& p = P.p;
    if (v.y() == 0) return val_p(v.x(), p);
    if (v.x() == 0) return val_p(v.y(), p);  // sqrt(d) is a unit at split p
    long shift = std::min(val_p(v.x(), p), val_p(v.y(), p));
    BigRat scale = pow_rat(BigRat(p), -shift);
    BigRat xs = v.x() * scale, ys = v.y() * scale;  // p-integral, one a p-unit

    BigInt r, pk;
    unsigned long k;
    if (p == 2) {
        r = two_adic_root_mod32(F.d, *P.root);
        k = 5;
        pk = 32;
    } else {
        r = sqrt_mod_odd_prime(BigInt(F.d), p);
        if (r % p != *P.root % p) r = p - r;
        k = 1;
        pk = p;
    }
    const BigInt d(F.d);
    while (true) {
        BigRat approx = xs + ys * BigRat(r);
        if (approx != 0) {
            long w = val_p(approx, p);
            // r agrees with the true root mod p^k for odd p, but only mod
            // 2^(k-1) for p = 2 (r^2 = d mod 2^k pins r mod 2^(k-1) only),
            // so the measured valuation is exact strictly below that level.
            long trusted = static_cast<long>(k) - (p == 2 ? 1 : 0);
            if (w < trusted) return w + shift;
        }
        // lift r to precision 2k (odd p) or k+1 (p = 2)
        if (p == 2) {
            BigInt err = (r * r - d) / pk;
            if (mpz_odd_p(err.get_mpz_t())) r += pk / 2;
            pk *= 2;
            k += 1;
        } else {
            BigInt pk2 = pk * pk;
            BigInt err = (d - r * r) / pk;
            mpz_mod(err.get_mpz_t(), err.get_mpz_t(), pk.get_mpz_t());
            BigInt twor = 2 * r, twor_inv;
            mpz_mod(twor.get_mpz_t(), twor.get_mpz_t(), pk.get_mpz_t());
            if (mpz_invert(twor_inv.get_mpz_t(), twor.get_mpz_t(), pk.get_mpz_t()) == 0)
                throw std::logic_error("ord_split: 2r not invertible");
            BigInt t = err * twor_inv;
            r = r + t * pk;
            mpz_mod(r.get_mpz_t(), r.get_mpz_t(), pk2.get_mpz_t());
            pk = pk2;
            k *= 2;
        }
    }
}

}  // namespace

long ord_prime(const QuadField& F, const PrimeIdeal& P, const QfElem& x) {
    if (!(x.field() == F)) throw std::invalid_argument("ord_prime: element of a different field");
    if (x.is_zero()) throw std::domain_error("ord_prime: valuation of zero is not finite");
    switch (P.split_type) {
        case SplitType::inert: {
            long v = val_p(x.norm(), P.p);
            if (v % 2 != 0) throw std::logic_error("ord_prime: odd norm valuation at inert prime");
            return v / 2;
        }
        case SplitType::ramified:
            return val_p(x.norm(), P.p);
        case SplitType::split:
            return ord_split(F, P, x);
    }
    throw std::logic_error("ord_prime: bad split type");
}

QfElem fundamental_unit(const QuadField& F) {
    // Convergents of theta = sqrt(d), resp. (sqrt(d)-1)/2, pick up every unit
    // x + y*omega of the maximal order; the first with |norm| = 1 is fundamental.
    const bool half = F.basis == BasisKind::half_integer;
    const BigInt D(F.d);
    BigInt s;
    mpz_sqrt(s.get_mpz_t(), D.get_mpz_t());

    BigInt P = half ? BigInt(-1) : BigInt(0);
    BigInt Q = half ? BigInt(2) : BigInt(1);
    BigInt h_prev = 1, h_prev2 = 0;  // h_{-1}, h_{-2}
    BigInt k_prev = 0, k_prev2 = 1;

    auto norm_xy = [&](const BigInt& x, const BigInt& y) -> BigInt {
        if (half) return x * x + x * y + y * y * (1 - D) / 4;
        return x * x - D * y * y;
    };

    constexpr unsigned long kMaxSteps = 1000000;
    for (unsigned long step = 0; step < kMaxSteps; ++step) {
        BigInt a;
        if (Q > 0) {
            mpz_fdiv_q(a.get_mpz_t(), BigInt(P + s).get_mpz_t(), Q.get_mpz_t());
        } else {
            BigInt qa = -Q;
            mpz_fdiv_q(a.get_mpz_t(), BigInt(P + s).get_mpz_t(), qa.get_mpz_t());
            a = -a - 1;
        }
        BigInt h = a * h_prev + h_prev2;
        BigInt k = a * k_prev + k_prev2;
        BigInt n = norm_xy(h, k);
        if (n == 1 || n == -1) {
            if (half)
                return QfElem(F, make_rat(2 * h + k, 2), make_rat(k, 2));
            return QfElem(F, BigRat(h), BigRat(k));
        }
        h_prev2 = h_prev; h_prev = h;
        k_prev2 = k_prev; k_prev = k;
        BigInt Pn = a * Q - P;
        BigInt Qn = (D - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
    }
    throw resource_error("fundamental_unit: no unit found within 1000000 continued-fraction steps");
}

}  // namespace fermatq
