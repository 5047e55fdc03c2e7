#include "fermatq/criterion.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace fermatq {

namespace {

bool prime_less(const PrimeIdeal& a, const PrimeIdeal& b) {
    if (a.p != b.p) return a.p < b.p;
    BigInt ra = a.root ? *a.root : BigInt(-1);
    BigInt rb = b.root ? *b.root : BigInt(-1);
    return ra < rb;
}

bool contains(const std::vector<PrimeIdeal>& v, const PrimeIdeal& P) {
    return std::find(v.begin(), v.end(), P) != v.end();
}

void require_coefficient(const QuadField& F, const QfElem& v, const char* name) {
    if (!(v.field() == F))
        throw std::invalid_argument(std::string("criterion: coefficient ") + name +
                                    " lies in a different field");
    if (v.is_zero())
        throw std::invalid_argument(std::string("criterion: coefficient ") + name +
                                    " is zero");
    if (!v.is_integral())
        throw std::invalid_argument(std::string("criterion: coefficient ") + name +
                                    " is not integral");
}

// Shared body of the two conditions: the valuation bound, plus the mod-3
// congruence for condition (B).
std::optional<PrimeIdeal> condition_scan(const SUnitSolution& sol,
                                         const std::vector<PrimeIdeal>& primes,
                                         bool need_congruence) {
    const QuadField& F = sol.lambda.field();
    for (const PrimeIdeal& P : primes) {
        long e2 = ord_of_two(P);
        long ol = ord_prime(F, P, sol.lambda);
        long om = ord_prime(F, P, sol.mu);
        long t = std::max(ol < 0 ? -ol : ol, om < 0 ? -om : om);
        if (t > 4 * e2) continue;
        if (need_congruence && (((ol + om - e2) % 3) + 3) % 3 != 0) continue;
        return P;
    }
    return std::nullopt;
}

}  // namespace

PrimeSets compute_prime_sets(const QuadField& F, const QfElem& A, const QfElem& B,
                             const QfElem& C) {
    require_coefficient(F, A, "A");
    require_coefficient(F, B, "B");
    require_coefficient(F, C, "C");

    PrimeSets out;
    QfElem prod = A * B * C;
    BigInt n = abs(BigInt(prod.norm().get_num()));
    auto fac = factorize(n);
    if (!fac.complete())
        throw resource_error("compute_prime_sets: norm(ABC) has the unfactored cofactor " +
                             fac.cofactor.get_str());
    for (const auto& [p, e] : fac.factors) {
        for (const PrimeIdeal& P : splitting_type(F, p)) {
            if (ord_prime(F, P, A) > 0 || ord_prime(F, P, B) > 0 ||
                ord_prime(F, P, C) > 0)
                out.R.push_back(P);
        }
    }
    std::sort(out.R.begin(), out.R.end(), prime_less);

    out.T = splitting_type(F, 2);
    out.S = out.R;
    for (const PrimeIdeal& P : out.T)
        if (!contains(out.S, P)) out.S.push_back(P);
    std::sort(out.S.begin(), out.S.end(), prime_less);

    for (const PrimeIdeal& P : out.T) {
        if (P.f == 1) out.U.push_back(P);
        if (ord_of_two(P) % 3 != 0) out.V.push_back(P);
    }
    for (const PrimeIdeal& P : out.U)
        if (!contains(out.V, P))
            throw std::logic_error("compute_prime_sets: U not contained in V");
    return out;
}

bool is_odd_triple(const QuadField& F, const QfElem& A, const QfElem& B,
                   const QfElem& C) {
    require_coefficient(F, A, "A");
    require_coefficient(F, B, "B");
    require_coefficient(F, C, "C");
    QfElem prod = A * B * C;
    for (const PrimeIdeal& P : splitting_type(F, 2))
        if (ord_prime(F, P, prod) != 0) return false;
    return true;
}

std::optional<PrimeIdeal> condition_A(const SUnitSolution& sol, const PrimeSets& sets) {
    return condition_scan(sol, sets.U, false);
}

std::optional<PrimeIdeal> condition_B(const SUnitSolution& sol, const PrimeSets& sets) {
    return condition_scan(sol, sets.V, true);
}

std::string to_string(EsStatus s) {
    switch (s) {
        case EsStatus::odd_degree: return "odd-degree";
        case EsStatus::U_nonempty: return "U-nonempty";
        case EsStatus::conjecture_assumed: return "conjecture-assumed";
        case EsStatus::fails: return "fails";
    }
    throw std::logic_error("to_string(EsStatus): bad value");
}

EsStatus es_status(const QuadField&, const PrimeSets& sets, bool conjecture_flag) {
    // [K:Q] = 2 here, so the odd-degree rung is never available.
    if (!sets.U.empty()) return EsStatus::U_nonempty;
    if (conjecture_flag) return EsStatus::conjecture_assumed;
    return EsStatus::fails;
}

bool not1_check(const QfElem& A, const QfElem& B, const QfElem& C) {
    if (A.is_zero() || B.is_zero() || C.is_zero())
        throw std::invalid_argument("not1_check: coefficients must be nonzero");
    // Each of the eight sign patterns equals one of these four up to a
    // global sign.
    return !(A + B + C).is_zero() && !(A + B - C).is_zero() &&
           !(A - B + C).is_zero() && !(A - B - C).is_zero();
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails_with_witness: return "fails-with-witness";
        case Verdict::inconclusive_bounds: return "inconclusive-bounds";
    }
    throw std::logic_error("to_string(Verdict): bad value");
}

std::string to_string(Completeness c) {
    switch (c) {
        case Completeness::certified: return "certified";
        case Completeness::up_to_bounds: return "up-to-bounds";
    }
    throw std::logic_error("to_string(Completeness): bad value");
}

CriterionReport criterion_run(const QuadField& F, const QfElem& A, const QfElem& B,
                              const QfElem& C, const SolverConfig& config,
                              bool conjecture_flag) {
    if (!is_odd_triple(F, A, B, C))
        throw std::invalid_argument(
            "criterion_run: coefficients must be odd (no prime above 2 may divide ABC)");

    CriterionReport rep;
    rep.bounds = config.bounds;
    rep.sets = compute_prime_sets(F, A, B, C);

    auto sols = enumerate_bruteforce(F, rep.sets.S, config.bounds,
                                     static_cast<unsigned>(config.threads));
    std::map<std::string, SUnitSolution> merged;
    for (const auto& s : sols) merged.emplace(s.canonical_id, s);

    // Parametrized cross-check in the certified (d, q) configuration:
    // S = {2 O_K, q O_K} with both inert. The two auxiliary solvers prove
    // that every solution is irrelevant, independently of the brute-force
    // bounds.
    bool certified = false;
    if (rep.sets.R.size() == 1 && rep.sets.R[0].split_type == SplitType::inert &&
        mpz_fits_slong_p(rep.sets.R[0].p.get_mpz_t())) {
        const BigInt& q = rep.sets.R[0].p;
        bool applicable = true;
        try {
            require_dq_setting(F.d, q);
        } catch (const std::invalid_argument&) {
            applicable = false;
        }
        if (applicable) {
            auto param = enumerate_param(F.d, q, config.bounds);
            auto rats = rational_solutions(F.d, q, config.bounds);
            std::set<std::string> rat_ids;
            for (const QfElem& l : rats.elements)
                rat_ids.insert(make_solution(F, rep.sets.S, l).canonical_id);
            certified = param.empty() && rat_ids == std::set<std::string>{"-1"};
            if (!certified)
                throw std::logic_error(
                    "criterion_run: auxiliary solvers contradict the proved "
                    "classification of solutions");
            for (const QfElem& l : rats.elements) {
                auto s = make_solution(F, rep.sets.S, l);
                merged.emplace(s.canonical_id, s);
            }
            for (const auto& [id, s] : merged)
                if (id != "-1")
                    throw std::logic_error(
                        "criterion_run: brute-force search found a relevant solution "
                        "in a configuration where none can exist");
        }
    }

    std::vector<SUnitSolution> ordered;
    for (const auto& [id, s] : merged) ordered.push_back(s);
    std::sort(ordered.begin(), ordered.end(),
              [](const SUnitSolution& a, const SUnitSolution& b) {
                  return canonical_less(a.lambda, b.lambda);
              });

    bool all_witnessed = true;
    for (const auto& s : ordered) {
        ConditionOutcome o{s, condition_A(s, rep.sets), condition_B(s, rep.sets)};
        if (!o.witnessed()) {
            all_witnessed = false;
            rep.notes.push_back("unwitnessed solution: lambda = " + to_string(s.lambda) +
                                ", mu = " + to_string(s.mu));
        }
        rep.outcomes.push_back(std::move(o));
    }

    rep.es = es_status(F, rep.sets, conjecture_flag);
    if (!all_witnessed) {
        rep.verdict = Verdict::fails_with_witness;
    } else if (rep.es == EsStatus::fails) {
        rep.verdict = Verdict::inconclusive_bounds;
        rep.notes.push_back(
            "every enumerated solution is witnessed, but the hypothesis ladder "
            "fails: the degree is even, U is empty, and the Eichler-Shimura "
            "conjecture was not assumed");
    } else {
        rep.verdict = Verdict::holds;
    }

    if (all_witnessed && !not1_check(A, B, C))
        throw std::logic_error(
            "criterion_run: all solutions witnessed yet (+-1, +-1, +-1) solves the "
            "equation");

    rep.completeness = certified ? Completeness::certified : Completeness::up_to_bounds;
    rep.notes.push_back(certified
                            ? "solution list proved complete by the parametrized and "
                              "rational searches"
                            : "solution list exhaustive only within the search bounds");

    if (rep.sets.U.empty()) {
        for (const auto& o : rep.outcomes) {
            if (is_irrelevant(o.solution) && !o.condA_witness && o.condB_witness) {
                rep.notes.push_back(
                    "the source argument concludes via condition (A) for the "
                    "irrelevant solutions, but U is empty here (2 is inert with "
                    "residue degree 2 when d = 5 mod 8), so condition (A) cannot "
                    "hold; condition (B) is the one satisfied, witnessed at the "
                    "prime above 2");
                break;
            }
        }
    }
    return rep;
}

Theorem2Certificate theorem2_certify(long d, long q, const SearchBounds& bounds) {
    Theorem2Certificate cert;
    cert.d = d;
    cert.q = q;
    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        cert.hypotheses.push_back({name, ok, detail});
    };

    bool sf = d >= 13 && is_squarefree(BigInt(d));
    add("d >= 13 and squarefree", sf,
        d < 13 ? "d = " + std::to_string(d) + " < 13"
               : "d = " + std::to_string(d) + (sf ? " is squarefree" : " is not squarefree"));
    long dm8 = ((d % 8) + 8) % 8;
    add("d = 5 mod 8", dm8 == 5, "d mod 8 = " + std::to_string(dm8));
    bool qp = q >= 29 && is_prime(BigInt(q));
    add("q >= 29 and prime", qp,
        q < 29 ? "q = " + std::to_string(q) + " < 29"
               : "q = " + std::to_string(q) + (qp ? " is prime" : " is composite"));
    long qm8 = ((q % 8) + 8) % 8;
    add("q = 5 mod 8", qm8 == 5, "q mod 8 = " + std::to_string(qm8));
    int kro = kronecker(BigInt(d), BigInt(q));
    add("kronecker(d, q) = -1", kro == -1,
        "kronecker(" + std::to_string(d) + ", " + std::to_string(q) + ") = " +
            std::to_string(kro));

    cert.hypotheses_ok = std::all_of(cert.hypotheses.begin(), cert.hypotheses.end(),
                                     [](const HypothesisCheck& h) { return h.passed; });
    if (!cert.hypotheses_ok) {
        cert.status = "rejected";
        for (const auto& h : cert.hypotheses)
            if (!h.passed) {
                cert.notes.push_back("hypothesis rejected: " + h.name + " (" + h.detail + ")");
                break;
            }
        return cert;
    }

    auto param = enumerate_param(d, BigInt(q), bounds);
    cert.param_solution_count = param.size();
    auto rats = rational_solutions(d, BigInt(q), bounds);
    for (const QfElem& l : rats.elements) cert.rational_lambdas.push_back(to_string(l));
    bool evidence_ok = param.empty() &&
                       cert.rational_lambdas == std::vector<std::string>{"-1", "1/2", "2"};
    if (!evidence_ok)
        throw std::logic_error(
            "theorem2_certify: search evidence contradicts the proved classification "
            "of solutions");

    auto F = make_field(d);
    SolverConfig cfg;
    cfg.bounds = bounds;
    cert.report = criterion_run(F, QfElem(F, 1), QfElem(F, 1), QfElem(F, -q), cfg, true);
    if (cert.report->verdict != Verdict::holds ||
        cert.report->completeness != Completeness::certified)
        throw std::logic_error("theorem2_certify: criterion run disagrees with the "
                               "certified classification");

    cert.status = "certified-holds";
    cert.notes.push_back("verdict conditional on the Eichler-Shimura conjecture");
    cert.notes.push_back(
        "relevant solution set is empty: the parametrized search found nothing and "
        "the rational classification returned exactly the irrelevant orbit");
    for (const auto& n : cert.report->notes) cert.notes.push_back(n);
    return cert;
}

}  // namespace fermatq
