#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cctype>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include "fermatq/criterion.hpp"

using namespace fermatq;
using ojson = nlohmann::ordered_json;

namespace {

// --------------------------------------------------------------------------
// input handling

// Malformed input or violated preconditions: exit code 3.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element expressions: integer | rational | (x+-y*sqrt(d))/k with k in {1, 2}.
class ElemParser {
   public:
    ElemParser(const QuadField& F, const std::string& text) : F_(F), s_(text) {}

    QfElem parse() {
        skip_ws();
        QfElem v = peek() == '(' ? irrational() : rational();
        skip_ws();
        if (i_ != s_.size()) fail("unexpected trailing characters");
        return v;
    }

   private:
    const QuadField& F_;
    const std::string& s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw input_error("at position " + std::to_string(i_ + 1) + ": " + what);
    }
    char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip_ws();
        if (peek() != c) return false;
        ++i_;
        return true;
    }
    void expect(char c, const char* what) {
        if (!eat(c)) fail(std::string("expected ") + what);
    }
    BigInt digits() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) fail("expected a digit");
        return BigInt(s_.substr(start, i_ - start));
    }
    int sign_opt() {
        skip_ws();
        if (peek() == '-') {
            ++i_;
            return -1;
        }
        if (peek() == '+') ++i_;
        return 1;
    }

    QfElem rational() {
        int sg = sign_opt();
        BigInt num = sg * digits();
        BigInt den = 1;
        if (eat('/')) {
            den = digits();
            if (den == 0) fail("denominator must be nonzero");
        }
        return QfElem(F_, make_rat(num, den), BigRat(0));
    }

    QfElem irrational() {
        expect('(', "'('");
        int sgx = sign_opt();
        BigInt x = sgx * digits();
        skip_ws();
        int sgy;
        if (peek() == '+') {
            sgy = 1;
        } else if (peek() == '-') {
            sgy = -1;
        } else {
            fail("expected '+' or '-' before the sqrt term");
        }
        ++i_;
        BigInt y = 1;
        skip_ws();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            y = digits();
            expect('*', "'*' between the coefficient and sqrt");
        }
        skip_ws();
        if (s_.compare(i_, 4, "sqrt") != 0) fail("expected 'sqrt'");
        i_ += 4;
        expect('(', "'(' after sqrt");
        BigInt dd = digits();
        if (dd != F_.d)
            fail("sqrt(" + dd.get_str() + ") does not match the field (d = " +
                 std::to_string(F_.d) + ")");
        expect(')', "')' after the radicand");
        expect(')', "')' closing the element");
        long k = 1;
        if (eat('/')) {
            std::size_t at = i_;
            BigInt kk = digits();
            if (kk != 1 && kk != 2) {
                i_ = at;
                fail("denominator k must be 1 or 2");
            }
            k = kk.get_si();
        }
        return QfElem(F_, make_rat(x, BigInt(k)), make_rat(sgy * y, BigInt(k)));
    }
};

QfElem parse_element(const QuadField& F, const std::string& text, const char* flag) {
    try {
        return ElemParser(F, text).parse();
    } catch (const input_error& e) {
        throw input_error(std::string(flag) + " '" + text + "': " + e.what());
    }
}

QuadField field_for(long d) {
    try {
        return make_field(d);
    } catch (const std::invalid_argument& e) {
        throw input_error(e.what());
    }
}

QfElem parse_integral(const QuadField& F, const std::string& text, const char* flag) {
    QfElem v = parse_element(F, text, flag);
    if (!v.is_integral())
        throw input_error(std::string(flag) + " '" + text + "': element is not integral");
    return v;
}

// --------------------------------------------------------------------------
// serialization

ojson field_json(const QuadField& F) {
    ojson j;
    j["d"] = F.d;
    j["disc"] = F.disc;
    j["basis"] = F.basis == BasisKind::half_integer ? "half-integer" : "plain";
    return j;
}

ojson prime_json(const PrimeIdeal& P) {
    ojson j;
    j["p"] = P.p.get_str();
    j["split_type"] = to_string(P.split_type);
    j["f"] = P.f;
    j["e"] = P.e;
    if (P.root) j["root"] = P.root->get_str();
    return j;
}

ojson primes_json(const std::vector<PrimeIdeal>& v) {
    ojson a = ojson::array();
    for (const auto& P : v) a.push_back(prime_json(P));
    return a;
}

ojson bounds_json(const SearchBounds& b) {
    ojson j;
    j["unit_exp_max"] = b.unit_exp_max;
    j["two_exp_max"] = b.two_exp_max;
    j["q_exp_max"] = b.q_exp_max;
    j["r1_max"] = b.r1_max;
    j["s_max"] = b.s_max;
    return j;
}

ojson sets_json(const PrimeSets& s) {
    ojson j;
    j["R"] = primes_json(s.R);
    j["S"] = primes_json(s.S);
    j["T"] = primes_json(s.T);
    j["U"] = primes_json(s.U);
    j["V"] = primes_json(s.V);
    return j;
}

ojson outcome_json(const ConditionOutcome& o) {
    ojson j;
    j["lambda"] = to_string(o.solution.lambda);
    j["mu"] = to_string(o.solution.mu);
    j["canonical_id"] = o.solution.canonical_id;
    j["condition_A"] = o.condA_witness ? prime_json(*o.condA_witness) : ojson(nullptr);
    j["condition_B"] = o.condB_witness ? prime_json(*o.condB_witness) : ojson(nullptr);
    return j;
}

ojson report_json(const QuadField& F, const QfElem& A, const QfElem& B, const QfElem& C,
                  const CriterionReport& rep) {
    ojson j;
    j["field"] = field_json(F);
    ojson coef;
    coef["A"] = to_string(A);
    coef["B"] = to_string(B);
    coef["C"] = to_string(C);
    j["coefficients"] = coef;
    j["sets"] = sets_json(rep.sets);
    ojson sols = ojson::array();
    for (const auto& o : rep.outcomes) sols.push_back(outcome_json(o));
    j["solutions"] = sols;
    j["es_status"] = to_string(rep.es);
    j["verdict"] = to_string(rep.verdict);
    j["completeness"] = to_string(rep.completeness);
    j["bounds"] = bounds_json(rep.bounds);
    j["notes"] = rep.notes;
    return j;
}

void emit(const ojson& doc) { std::cout << doc.dump(2) << "\n"; }

std::string prime_text(const PrimeIdeal& P) {
    std::string s = P.p.get_str() + " (" + to_string(P.split_type);
    if (P.root) s += ", root " + P.root->get_str();
    return s + ")";
}

std::string primes_text(const std::vector<PrimeIdeal>& v) {
    if (v.empty()) return "(empty)";
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += prime_text(v[i]);
    }
    return s;
}

std::string field_text(const QuadField& F) {
    return "Q(sqrt(" + std::to_string(F.d) + ")), discriminant " +
           std::to_string(F.disc) + ", " +
           (F.basis == BasisKind::half_integer ? "half-integer" : "plain") + " basis";
}

void report_text(const QuadField& F, const QfElem& A, const QfElem& B, const QfElem& C,
                 const CriterionReport& rep) {
    std::cout << "field: " << field_text(F) << "\n";
    std::cout << "coefficients: A = " << to_string(A) << ", B = " << to_string(B)
              << ", C = " << to_string(C) << "\n";
    std::cout << "R: " << primes_text(rep.sets.R) << "\n";
    std::cout << "S: " << primes_text(rep.sets.S) << "\n";
    std::cout << "T: " << primes_text(rep.sets.T) << "\n";
    std::cout << "U: " << primes_text(rep.sets.U) << "\n";
    std::cout << "V: " << primes_text(rep.sets.V) << "\n";
    for (const auto& o : rep.outcomes) {
        std::cout << "solution lambda = " << to_string(o.solution.lambda)
                  << ", mu = " << to_string(o.solution.mu) << " [canonical "
                  << o.solution.canonical_id << "]: condition A: "
                  << (o.condA_witness ? prime_text(*o.condA_witness) : "none")
                  << "; condition B: "
                  << (o.condB_witness ? prime_text(*o.condB_witness) : "none") << "\n";
    }
    std::cout << "es_status: " << to_string(rep.es) << "\n";
    std::cout << "verdict: " << to_string(rep.verdict) << "\n";
    std::cout << "completeness: " << to_string(rep.completeness) << "\n";
    for (const auto& n : rep.notes) std::cout << "note: " << n << "\n";
}

int report_exit_code(const CriterionReport& rep) {
    switch (rep.verdict) {
        case Verdict::holds:
            return rep.completeness == Completeness::certified ? 0 : 2;
        case Verdict::fails_with_witness:
            return 1;
        case Verdict::inconclusive_bounds:
            return 2;
    }
    return 2;
}

// --------------------------------------------------------------------------
// subcommands

struct CommonOpts {
    bool json = false;
    unsigned threads = 1;
    SearchBounds bounds;
};

int cmd_splitting(long d, const std::string& p_str, const CommonOpts& opt) {
    auto F = field_for(d);
    BigInt p;
    try {
        p = BigInt(p_str);
    } catch (const std::invalid_argument&) {
        throw input_error("--p '" + p_str + "': not an integer");
    }
    std::vector<PrimeIdeal> primes;
    try {
        primes = splitting_type(F, p);
    } catch (const std::invalid_argument& e) {
        throw input_error(e.what());
    }
    if (opt.json) {
        ojson j;
        j["schema"] = 1;
        j["command"] = "splitting";
        j["field"] = field_json(F);
        j["p"] = p.get_str();
        j["primes"] = primes_json(primes);
        emit(j);
    } else {
        std::cout << "field: " << field_text(F) << "\n";
        std::cout << p.get_str() << " is " << to_string(primes[0].split_type) << " in Q(sqrt("
                  << d << "))\n";
        for (const auto& P : primes)
            std::cout << "prime: " << prime_text(P) << ", f = " << P.f << ", e = " << P.e
                      << "\n";
    }
    return 0;
}

int cmd_sunit(long d, long q, const std::string& method, const CommonOpts& opt) {
    auto F = field_for(d);
    if (q < 2 || !is_prime(BigInt(q))) throw input_error("--q: " + std::to_string(q) + " is not prime");
    if (q == 2) throw input_error("--q: must be an odd prime (2 is always in S)");

    std::vector<PrimeIdeal> S = splitting_type(F, 2);
    for (const auto& P : splitting_type(F, q)) S.push_back(P);

    std::vector<SUnitSolution> brute;
    std::vector<ParamSolution> param;
    std::vector<std::string> rats;
    bool do_brute = method == "brute" || method == "both";
    bool do_param = method == "param" || method == "both";
    if (do_brute) brute = enumerate_bruteforce(F, S, opt.bounds, opt.threads);
    if (do_param) {
        param = enumerate_param(d, BigInt(q), opt.bounds);
        for (const QfElem& l : rational_solutions(d, BigInt(q), opt.bounds).elements)
            rats.push_back(to_string(l));
    }

    std::optional<bool> agreement;
    if (method == "both") {
        std::set<std::string> b_ids, p_ids;
        for (const auto& s : brute) b_ids.insert(s.canonical_id);
        for (const auto& ps : param) p_ids.insert(ps.solution.canonical_id);
        for (const QfElem& l : rational_solutions(d, BigInt(q), opt.bounds).elements)
            p_ids.insert(make_solution(F, S, l).canonical_id);
        agreement = b_ids == p_ids;
    }

    if (opt.json) {
        ojson j;
        j["schema"] = 1;
        j["command"] = "sunit";
        j["field"] = field_json(F);
        j["q"] = q;
        j["method"] = method;
        j["bounds"] = bounds_json(opt.bounds);
        ojson bs = ojson::array();
        for (const auto& s : brute) {
            ojson e;
            e["lambda"] = to_string(s.lambda);
            e["mu"] = to_string(s.mu);
            e["canonical_id"] = s.canonical_id;
            bs.push_back(e);
        }
        j["brute_solutions"] = do_brute ? bs : ojson(nullptr);
        ojson ps = ojson::array();
        for (const auto& s : param) {
            ojson e;
            e["eta1"] = s.eta1;
            e["eta2"] = s.eta2;
            e["r1"] = s.r1;
            e["s1"] = s.s1;
            e["s2"] = s.s2;
            e["v"] = s.v.get_str();
            e["X"] = s.X.get_str();
            e["lambda"] = to_string(s.solution.lambda);
            e["canonical_id"] = s.solution.canonical_id;
            ps.push_back(e);
        }
        j["param_solutions"] = do_param ? ps : ojson(nullptr);
        j["rational_orbit"] = do_param ? ojson(rats) : ojson(nullptr);
        j["agreement"] = agreement ? ojson(*agreement) : ojson(nullptr);
        j["completeness"] = "up-to-bounds";
        emit(j);
    } else {
        std::cout << "field: " << field_text(F) << ", S = {2, " << q << "}\n";
        if (do_brute) {
            std::cout << "brute-force solutions (complete up to bounds):\n";
            for (const auto& s : brute)
                std::cout << "  lambda = " << to_string(s.lambda) << ", mu = "
                          << to_string(s.mu) << " [canonical " << s.canonical_id << "]\n";
            if (brute.empty()) std::cout << "  (none)\n";
        }
        if (do_param) {
            std::cout << "parametrized irrational solutions: " << param.size() << "\n";
            for (const auto& s : param)
                std::cout << "  lambda = " << to_string(s.solution.lambda) << " (eta1 = "
                          << s.eta1 << ", eta2 = " << s.eta2 << ", r1 = " << s.r1
                          << ", s1 = " << s.s1 << ", s2 = " << s.s2 << ")\n";
            std::cout << "rational classification:";
            for (const auto& l : rats) std::cout << " " << l;
            std::cout << "\n";
        }
        if (agreement)
            std::cout << "agreement: " << (*agreement ? "yes" : "NO") << "\n";
        std::cout << "completeness: up-to-bounds\n";
    }
    if (agreement && !*agreement)
        throw std::logic_error("sunit: the two solvers disagree");
    return 0;
}

int cmd_legendre(long d, const std::string& lambda_str, const CommonOpts& opt) {
    auto F = field_for(d);
    QfElem lambda = parse_element(F, lambda_str, "--lambda");
    if (lambda.is_zero() || lambda == QfElem(F, 1))
        throw input_error("--lambda: must avoid 0 and 1");
    QfElem mu = 1 - lambda;
    QfElem j = j_of_lambda(lambda);
    auto orbit = s3_orbit(lambda);
    auto curve = phi_inverse(lambda);
    std::vector<std::pair<PrimeIdeal, JValResult>> jvals;
    for (const PrimeIdeal& P : splitting_type(F, 2))
        jvals.emplace_back(P, jval_conditions(lambda, mu, P));

    if (opt.json) {
        ojson out;
        out["schema"] = 1;
        out["command"] = "legendre";
        out["field"] = field_json(F);
        out["lambda"] = to_string(lambda);
        out["mu"] = to_string(mu);
        out["canonical_lambda"] = to_string(canonical_lambda(lambda));
        out["j"] = to_string(j);
        ojson orb = ojson::array();
        for (const auto& e : orbit.elements) orb.push_back(to_string(e));
        out["orbit"] = orb;
        ojson cv;
        cv["e1"] = to_string(curve.e1);
        cv["e2"] = to_string(curve.e2);
        cv["e3"] = to_string(curve.e3);
        cv["c4"] = to_string(curve.c4);
        cv["c6"] = to_string(curve.c6);
        cv["disc"] = to_string(curve.disc);
        out["curve"] = cv;
        ojson jv = ojson::array();
        for (const auto& [P, r] : jvals) {
            ojson e;
            e["prime"] = prime_json(P);
            e["cond_i"] = r.cond_i;
            e["cond_ii"] = r.cond_ii;
            e["ord_j"] = r.ord_j;
            e["t"] = r.t;
            jv.push_back(e);
        }
        out["jval"] = jv;
        emit(out);
    } else {
        std::cout << "field: " << field_text(F) << "\n";
        std::cout << "lambda = " << to_string(lambda) << ", mu = " << to_string(mu) << "\n";
        std::cout << "canonical representative: " << to_string(canonical_lambda(lambda))
                  << "\n";
        std::cout << "j = " << to_string(j) << "\n";
        std::cout << "orbit:";
        for (const auto& e : orbit.elements) std::cout << " " << to_string(e);
        std::cout << "\n";
        std::cout << "curve y^2 = x(x - 1)(x - lambda): c4 = " << to_string(curve.c4)
                  << ", c6 = " << to_string(curve.c6) << ", disc = " << to_string(curve.disc)
                  << "\n";
        for (const auto& [P, r] : jvals)
            std::cout << "at " << prime_text(P) << ": t = " << r.t << ", ord(j) = " << r.ord_j
                      << ", cond_i = " << (r.cond_i ? "true" : "false")
                      << ", cond_ii = " << (r.cond_ii ? "true" : "false") << "\n";
    }
    return 0;
}

int cmd_frey(long d, const std::array<std::string, 6>& coef, long p, const CommonOpts& opt) {
    auto F = field_for(d);
    QfElem A = parse_integral(F, coef[0], "--A");
    QfElem B = parse_integral(F, coef[1], "--B");
    QfElem C = parse_integral(F, coef[2], "--C");
    QfElem a = parse_integral(F, coef[3], "--a");
    QfElem b = parse_integral(F, coef[4], "--b");
    QfElem c = parse_integral(F, coef[5], "--c");
    FreyData fd = [&] {
        try {
            return frey_invariants(A, B, C, a, b, c, p);
        } catch (const std::invalid_argument& e) {
            throw input_error(e.what());
        }
    }();
    auto sets = compute_prime_sets(F, A, B, C);
    auto content = content_ideal(F, a, b, c);
    auto rep = conductor_report(fd, sets.S);

    if (opt.json) {
        ojson out;
        out["schema"] = 1;
        out["command"] = "frey";
        out["field"] = field_json(F);
        ojson cj;
        cj["A"] = to_string(A);
        cj["B"] = to_string(B);
        cj["C"] = to_string(C);
        out["coefficients"] = cj;
        ojson sj;
        sj["a"] = to_string(a);
        sj["b"] = to_string(b);
        sj["c"] = to_string(c);
        sj["p"] = p;
        out["solution"] = sj;
        ojson cv;
        cv["e1"] = to_string(fd.curve.e1);
        cv["e2"] = to_string(fd.curve.e2);
        cv["e3"] = to_string(fd.curve.e3);
        cv["c4"] = to_string(fd.curve.c4);
        cv["c6"] = to_string(fd.curve.c6);
        cv["disc"] = to_string(fd.curve.disc);
        out["curve"] = cv;
        ojson ct = ojson::array();
        for (const auto& [P, e] : content.factorization) {
            ojson x;
            x["prime"] = prime_json(P);
            x["exponent"] = e;
            ct.push_back(x);
        }
        out["content"] = ct;
        ojson cond = ojson::array();
        for (const auto& en : rep.entries) {
            ojson x;
            x["prime"] = prime_json(en.P);
            x["exp_min"] = en.exp_min;
            x["exp_max"] = en.exp_max;
            x["exact"] = en.exact;
            x["multiplicative"] = en.multiplicative;
            x["in_m_odd"] = en.in_m_odd;
            x["minimality_known"] = en.minimality_known;
            x["note"] = en.note;
            cond.push_back(x);
        }
        out["conductor"] = cond;
        emit(out);
    } else {
        std::cout << "field: " << field_text(F) << "\n";
        std::cout << "curve y^2 = x(x - A a^p)(x + B b^p) with roots 0, "
                  << to_string(fd.curve.e2) << ", " << to_string(fd.curve.e3) << "\n";
        std::cout << "c4 = " << to_string(fd.curve.c4) << "\n";
        std::cout << "c6 = " << to_string(fd.curve.c6) << "\n";
        std::cout << "disc = " << to_string(fd.curve.disc) << "\n";
        std::cout << "content: ";
        if (content.factorization.empty()) std::cout << "trivial";
        for (const auto& [P, e] : content.factorization)
            std::cout << prime_text(P) << "^" << e << " ";
        std::cout << "\n";
        for (const auto& en : rep.entries) {
            std::cout << "conductor at " << prime_text(en.P) << ": ";
            if (en.exact)
                std::cout << "exponent " << en.exp_min;
            else
                std::cout << "exponent in [" << en.exp_min << ", " << en.exp_max << "]";
            std::cout << " (" << en.note << ")\n";
        }
    }
    return 0;
}

int cmd_criterion(long d, const std::array<std::string, 3>& coef, bool assume_es,
                  const CommonOpts& opt) {
    auto F = field_for(d);
    QfElem A = parse_integral(F, coef[0], "--A");
    QfElem B = parse_integral(F, coef[1], "--B");
    QfElem C = parse_integral(F, coef[2], "--C");
    if (A.is_zero() || B.is_zero() || C.is_zero())
        throw input_error("coefficients must be nonzero");
    if (!is_odd_triple(F, A, B, C))
        throw input_error("coefficients must be odd: no prime above 2 may divide ABC");
    SolverConfig cfg;
    cfg.bounds = opt.bounds;
    cfg.threads = static_cast<int>(opt.threads);
    CriterionReport rep = criterion_run(F, A, B, C, cfg, assume_es);
    if (opt.json) {
        ojson j;
        j["schema"] = 1;
        j["command"] = "criterion";
        ojson body = report_json(F, A, B, C, rep);
        for (auto& [k, v] : body.items()) j[k] = v;
        emit(j);
    } else {
        report_text(F, A, B, C, rep);
    }
    return report_exit_code(rep);
}

ojson certificate_json(const Theorem2Certificate& cert) {
    ojson j;
    j["schema"] = 1;
    j["command"] = "theorem2";
    j["d"] = cert.d;
    j["q"] = cert.q;
    j["status"] = cert.status;
    ojson hy = ojson::array();
    for (const auto& h : cert.hypotheses) {
        ojson e;
        e["name"] = h.name;
        e["passed"] = h.passed;
        e["detail"] = h.detail;
        hy.push_back(e);
    }
    j["hypotheses"] = hy;
    j["param_solution_count"] = cert.param_solution_count;
    j["rational_lambdas"] = cert.rational_lambdas;
    if (cert.report) {
        auto F = make_field(cert.d);
        j["report"] = report_json(F, QfElem(F, 1), QfElem(F, 1), QfElem(F, -cert.q),
                                  *cert.report);
    } else {
        j["report"] = nullptr;
    }
    j["notes"] = cert.notes;
    return j;
}

void certificate_text(const Theorem2Certificate& cert) {
    std::cout << "certificate for d = " << cert.d << ", q = " << cert.q << "\n";
    for (const auto& h : cert.hypotheses)
        std::cout << "hypothesis: " << h.name << " -- " << (h.passed ? "passed" : "FAILED")
                  << " (" << h.detail << ")\n";
    if (cert.hypotheses_ok) {
        std::cout << "parametrized search: " << cert.param_solution_count
                  << " solutions (proved empty)\n";
        std::cout << "rational classification:";
        for (const auto& l : cert.rational_lambdas) std::cout << " " << l;
        std::cout << " (the irrelevant orbit)\n";
        if (cert.report)
            std::cout << "criterion verdict: " << to_string(cert.report->verdict) << " ("
                      << to_string(cert.report->completeness) << ")\n";
    }
    std::cout << "status: " << cert.status << "\n";
    for (const auto& n : cert.notes) std::cout << "note: " << n << "\n";
}

int cmd_theorem2(long d, long q, const CommonOpts& opt) {
    Theorem2Certificate cert = theorem2_certify(d, q, opt.bounds);
    if (opt.json)
        emit(certificate_json(cert));
    else
        certificate_text(cert);
    return cert.status == "certified-holds" ? 0 : 2;
}

int cmd_theorem2_grid(long dmax, long qmax, const CommonOpts& opt) {
    if (dmax < 13 || qmax < 29)
        throw input_error("grid mode needs --dmax >= 13 and --qmax >= 29");
    std::vector<std::pair<long, long>> pairs;
    for (long d = 13; d <= dmax; ++d) {
        if (((d % 8) + 8) % 8 != 5 || !is_squarefree(BigInt(d))) continue;
        for (long q = 29; q <= qmax; ++q) {
            if (((q % 8) + 8) % 8 != 5 || !is_prime(BigInt(q))) continue;
            if (kronecker(BigInt(d), BigInt(q)) != -1) continue;
            pairs.emplace_back(d, q);
        }
    }
    std::vector<Theorem2Certificate> results(pairs.size());
    unsigned n = std::max(1u, opt.threads);
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n);
    for (unsigned w = 0; w < n; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < pairs.size(); i += n)
                    results[i] = theorem2_certify(pairs[i].first, pairs[i].second, opt.bounds);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    if (opt.json) {
        ojson j;
        j["schema"] = 1;
        j["command"] = "theorem2-grid";
        j["dmax"] = dmax;
        j["qmax"] = qmax;
        ojson rs = ojson::array();
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            ojson e;
            e["d"] = pairs[i].first;
            e["q"] = pairs[i].second;
            e["status"] = results[i].status;
            e["solutions"] = results[i].rational_lambdas;
            rs.push_back(e);
        }
        j["results"] = rs;
        emit(j);
    } else {
        std::cout << "admissible pairs with d <= " << dmax << ", q <= " << qmax << ": "
                  << pairs.size() << "\n";
        for (std::size_t i = 0; i < pairs.size(); ++i)
            std::cout << "d = " << pairs[i].first << ", q = " << pairs[i].second << ": "
                      << results[i].status << "\n";
    }
    for (const auto& r : results)
        if (r.status != "certified-holds")
            throw std::logic_error("grid: an admissible pair failed to certify");
    return 0;
}

int cmd_selftest(unsigned long seed, int cases, const CommonOpts& opt) {
    std::mt19937_64 rng(seed);
    long failures = 0;
    auto check = [&](bool ok) {
        if (!ok) ++failures;
    };
    for (long d : {13L, 17L, 21L, 2L}) {
        auto F = make_field(d);
        for (int i = 0; i < cases; ++i) {
            long xn = static_cast<long>(rng() % 41) - 20;
            long yn = static_cast<long>(rng() % 41) - 20;
            long de = static_cast<long>(rng() % 6) + 1;
            QfElem l(F, make_rat(xn, de), make_rat(yn, de));
            if (l.is_zero() || l == QfElem(F, 1)) continue;
            QfElem cl = canonical_lambda(l);
            check(canonical_lambda(cl) == cl);
            QfElem j = j_of_lambda(l);
            for (const auto& im : s3_orbit(l).elements) check(j_of_lambda(im) == j);
            check(phi_map(phi_inverse(l)).elements == s3_orbit(l).elements);
            QfElem mu = 1 - l;
            if (!mu.is_zero())
                for (const PrimeIdeal& P : splitting_type(F, 2))
                    jval_conditions(l, mu, P);  // throws if an identity fails
        }
    }
    if (opt.json) {
        ojson j;
        j["schema"] = 1;
        j["command"] = "selftest";
        j["seed"] = seed;
        j["cases"] = cases;
        j["failures"] = failures;
        emit(j);
    } else {
        std::cout << "selftest: seed = " << seed << ", " << cases
                  << " cases per field, failures = " << failures << "\n";
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact engine for the asymptotic-Fermat criterion over real quadratic fields"};
    app.require_subcommand(1);

    CommonOpts opt;
    app.add_flag("--json", opt.json, "emit JSON instead of text");
    app.add_option("--threads", opt.threads, "worker threads for searches")
        ->check(CLI::Range(1u, 64u));
    app.add_option("--unit-exp-max", opt.bounds.unit_exp_max, "bound on |k| in eps^k");
    app.add_option("--two-exp-max", opt.bounds.two_exp_max, "bound on |a| in 2^a");
    app.add_option("--q-exp-max", opt.bounds.q_exp_max, "bound on |b| in q^b");
    app.add_option("--r1-max", opt.bounds.r1_max, "parametrized solver r1 bound");
    app.add_option("--s-max", opt.bounds.s_max, "parametrized solver s1, s2 bound");

    long d = 0, q = 0, p_exp = 0, dmax = 0, qmax = 0;
    std::string p_str, method = "brute", lambda_str;
    std::array<std::string, 6> coef;
    bool assume_es = false;
    unsigned long seed = 20260815;
    int st_cases = 200;

    auto* sp = app.add_subcommand("splitting", "splitting of a rational prime in Q(sqrt(d))");
    sp->add_option("--d", d)->required();
    sp->add_option("--p", p_str)->required();
    sp->fallthrough();

    auto* su = app.add_subcommand("sunit", "solve the S-unit equation for S = {2, q}");
    su->add_option("--d", d)->required();
    su->add_option("--q", q)->required();
    su->add_option("--method", method)->check(CLI::IsMember({"brute", "param", "both"}));
    su->fallthrough();

    auto* le = app.add_subcommand("legendre", "Legendre curve data for a lambda value");
    le->add_option("--d", d)->required();
    le->add_option("--lambda", lambda_str)->required();
    le->fallthrough();

    auto* fr = app.add_subcommand("frey", "Frey curve invariants and conductor data");
    fr->add_option("--d", d)->required();
    fr->add_option("--A", coef[0])->required();
    fr->add_option("--B", coef[1])->required();
    fr->add_option("--C", coef[2])->required();
    fr->add_option("--a", coef[3])->required();
    fr->add_option("--b", coef[4])->required();
    fr->add_option("--c", coef[5])->required();
    fr->add_option("--p", p_exp)->required();
    fr->fallthrough();

    auto* cr = app.add_subcommand("criterion", "run the asymptotic-Fermat criterion");
    cr->add_option("--d", d)->required();
    cr->add_option("--A", coef[0])->required();
    cr->add_option("--B", coef[1])->required();
    cr->add_option("--C", coef[2])->required();
    cr->add_flag("--assume-es", assume_es, "assume the Eichler-Shimura conjecture");
    cr->fallthrough();

    auto* t2 = app.add_subcommand("theorem2", "certify the x^p + y^p + q^r z^p family");
    t2->add_option("--d", d);
    t2->add_option("--q", q);
    t2->add_option("--dmax", dmax, "grid mode: certify all admissible pairs up to --dmax/--qmax");
    t2->add_option("--qmax", qmax);
    t2->fallthrough();

    auto* st = app.add_subcommand("selftest", "randomized property checks of the engine");
    st->add_option("--seed", seed);
    st->add_option("--cases", st_cases)->check(CLI::Range(1, 100000));
    st->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 3;
    }

    try {
        if (sp->parsed()) return cmd_splitting(d, p_str, opt);
        if (su->parsed()) return cmd_sunit(d, q, method, opt);
        if (le->parsed()) return cmd_legendre(d, lambda_str, opt);
        if (fr->parsed()) return cmd_frey(d, coef, p_exp, opt);
        if (cr->parsed()) return cmd_criterion(d, {coef[0], coef[1], coef[2]}, assume_es, opt);
        if (t2->parsed()) {
            bool grid = t2->count("--dmax") || t2->count("--qmax");
            if (grid) {
                if (t2->count("--d") || t2->count("--q"))
                    throw input_error("grid mode takes --dmax/--qmax instead of --d/--q");
                if (!t2->count("--dmax") || !t2->count("--qmax"))
                    throw input_error("grid mode needs both --dmax and --qmax");
                return cmd_theorem2_grid(dmax, qmax, opt);
            }
            if (!t2->count("--d") || !t2->count("--q"))
                throw input_error("theorem2 needs --d and --q (or --dmax/--qmax)");
            return cmd_theorem2(d, q, opt);
        }
        if (st->parsed()) return cmd_selftest(seed, st_cases, opt);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const unsupported_configuration& e) {
        std::cerr << "unsupported configuration: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "inapplicable: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 3;
}
