// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [criterion numbers...]

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <thread>

#include "oag/coding.hpp"
#include "oag/differential.hpp"
#include "oag/errors.hpp"
#include "oag/typegen.hpp"

using namespace oag;

namespace {

GroupSpec G(const char* s) { return GroupSpec::parse(s); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    unsigned threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::vector<FormulaPtr> unary_corpus(const GroupSpec& g, std::uint64_t seed, std::size_t want, Template t) {
    std::vector<FormulaPtr> out;
    FuzzLimits lim;
    lim.free_vars = 1;
    for (std::uint64_t s = seed; out.size() < want; s += 1000) {
        for (const auto& f : fuzz_corpus(g, s, want, lim, t))
            if (free_vars(f).size() == 1 && out.size() < want) out.push_back(f);
    }
    return out;
}

// ------------------------------------------------------------------ 1
Outcome qe_differential() {
    auto t0 = std::chrono::steady_clock::now();
    struct Job {
        GroupSpec g;
        FormulaPtr f;
    };
    std::vector<Job> jobs;
    for (const char* gs : {"Z", "Z*Z", "Z*Z*Z"}) {
        auto g = G(gs);
        FuzzLimits lim;  // coefficients <= 3, moduli <= 6, depth <= 3
        for (const auto& f : fuzz_corpus(g, 2024, 334, lim, Template::Bounded)) jobs.push_back({g, f});
    }
    std::vector<std::string> bad(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        try {
            if (auto d = differential_check(jobs[i].g, jobs[i].f, Box{8}))
                bad[i] = print(d->formula) + " at " + describe(d->point);
        } catch (const Error& e) {
            bad[i] = std::string(e.what()) + " on " + print(jobs[i].f);
        }
    });
    std::size_t fails = 0;
    std::string first;
    for (const auto& b : bad)
        if (!b.empty() && fails++ == 0) first = b;
    double secs = seconds_since(t0);
    Outcome o{fails == 0 && jobs.size() >= 1000 && secs < 300,
              fmt("%zu formulas over Z, Z^2, Z^3 on [-8,8]^arity, %zu disagreements, %.1fs", jobs.size(), fails, secs)};
    if (fails) o.detail += "; first: " + first;
    return o;
}

// ------------------------------------------------------------------ 2
Outcome interval_parity() {
    auto g = G("Z*Z");
    bool narrow = decide(g, parse(g, "(exists (x) (and (< (c 1 -1) (* 2 x)) (< (* 2 x) (c 1 4))))"));
    bool wide = decide(g, parse(g, "(exists (x) (and (< (c 1 -1) (* 2 x)) (< (* 2 x) (c 2 4))))"));
    return {!narrow && wide, fmt("((1,-1),(1,4)) -> %s, ((1,-1),(2,4)) -> %s", narrow ? "true" : "false",
                                 wide ? "true" : "false")};
}

// ------------------------------------------------------------------ 3
Outcome regular_rank() {
    bool ok = true;
    std::string d;
    for (int n = 1; n <= 4; ++n) {
        std::vector<Kind> kinds(static_cast<std::size_t>(n), Kind::DiscreteZ);
        auto rj = compute_rj(GroupSpec(kinds), 3);
        std::set<int> levels;
        for (const auto& c : rj) levels.insert(c.level);
        std::set<int> want;
        for (int k = 1; k <= n; ++k) want.insert(k);
        ok = ok && rj.size() == static_cast<std::size_t>(n) && levels == want;
        d += fmt("%sZ^%d: %zu", n > 1 ? ", " : "", n, rj.size());
    }
    return {ok, "3-regular rank " + d};
}

// ------------------------------------------------------------------ 4
Outcome halving_codes() {
    auto g = G("Z*Z");
    auto base = code_set(g, parse(g, "(<= (c 1 1) (* 2 z))"));
    bool ok = true;
    for (int b : {-5, 0, 1, 9}) ok = ok && code_set(g, parse(g, "(<= (c 1 " + std::to_string(b) + ") (* 2 z))")) == base;
    int lvl = stabilizer(g, parse(g, "(<= (c 1 1) (* 2 z))")).level;
    return {ok && lvl == 1, fmt("codes identical for beta in {-5,0,1,9}: %s; stabilizer level %d; code %s",
                                ok ? "yes" : "no", lvl, base.str().c_str())};
}

// ------------------------------------------------------------------ 5
Outcome end_segments() {
    auto t0 = std::chrono::steady_clock::now();
    struct Job {
        GroupSpec g;
        FormulaPtr f;
    };
    std::vector<Job> jobs;
    const char* groups[] = {"Z", "Q", "Z*Z", "Z*Q", "Q*Z"};
    for (const char* gs : groups)
        for (const auto& f : unary_corpus(G(gs), 77, 40, Template::EndSegment)) jobs.push_back({G(gs), f});
    std::vector<std::string> bad(jobs.size());
    std::vector<char> kept(jobs.size(), 0);
    parallel_for(jobs.size(), [&](std::size_t i) {
        const auto& [g, f] = jobs[i];
        try {
            if (!is_end_segment(g, f)) return;
            kept[i] = 1;
            auto seg = to_div_segment(g, f);
            auto x = unary_var(f);
            if (!equivalent(g, to_formula(g, seg, x), f)) {
                bad[i] = "not equivalent: " + print(f);
                return;
            }
            if (!seg.is_whole() && !seg.is_empty() && seg.level != stabilizer(g, f).level) {
                bad[i] = "level differs from stabilizer: " + print(f);
                return;
            }
            if (!equivalent(g, reconstruct(g, code_segment(g, seg), x), f)) bad[i] = "code round trip: " + print(f);
        } catch (const Error& e) {
            bad[i] = std::string(e.what()) + " on " + print(f);
        }
    });
    std::size_t fails = 0, n = 0;
    std::string first;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        n += kept[i] ? 1 : 0;
        if (!bad[i].empty() && fails++ == 0) first = bad[i];
    }
    double secs = seconds_since(t0);
    Outcome o{fails == 0 && n >= 200 && secs < 180, fmt("%zu end-segments, %zu failures, %.1fs", n, fails, secs)};
    if (fails) o.detail += "; first: " + first;
    return o;
}

// ------------------------------------------------------------------ 6
FormulaPtr shift_congruences(const GroupSpec& g, const FormulaPtr& f, std::mt19937_64& rng) {
    using Op = Formula::Op;
    switch (f->op) {
        case Op::Atom: {
            const Atom& a = f->atom;
            if (a.kind != Atom::Kind::Congr && a.kind != Atom::Kind::RelCongr) return f;
            Element e = Element::zero(g);
            for (auto& c : e.coords) c = Rational(static_cast<Int>(rng() % 5) - 2);
            Atom b = a;
            b.rhs = a.rhs + Term::constant_of(a.modulus * e);
            return f_atom(b);
        }
        case Op::True:
        case Op::False:
            return f;
        default: {
            auto copy = std::make_shared<Formula>(*f);
            for (auto& k : copy->kids) k = shift_congruences(g, k, rng);
            return copy;
        }
    }
}

Outcome canonical_codes() {
    auto t0 = std::chrono::steady_clock::now();
    struct Pair {
        GroupSpec g;
        FormulaPtr a, b;
        bool rewritten;
    };
    std::vector<Pair> pairs;
    std::mt19937_64 rng(6);
    for (const char* gs : {"Z", "Q", "Z*Z", "Z*Q", "Q*Z"}) {
        auto g = G(gs);
        auto base = unary_corpus(g, 606, 60, Template::Mixed);
        auto pts = box_points(g, Box{3});
        for (std::size_t i = 0; i < base.size(); ++i) {
            const auto& phi = base[i];
            std::string x = unary_var(phi);
            auto other = substitute(base[(i + 1) % base.size()], unary_var(base[(i + 1) % base.size()]), Term::var(g, x));
            FormulaPtr psi;
            bool rewritten = i % 2 == 0;
            if (rewritten) {
                switch ((i / 2) % 3) {
                    case 0: psi = f_or({phi, f_and({phi, other})}); break;
                    case 1: psi = shift_congruences(g, phi, rng); break;
                    default: psi = f_and({shift_congruences(g, phi, rng), f_or({phi, other})}); break;
                }
            } else {
                auto c = Term::constant_of(pts[rng() % pts.size()]);
                switch ((i / 2) % 3) {
                    case 0: psi = f_or({phi, f_eq(Term::var(g, x), c)}); break;
                    case 1: psi = f_and({phi, f_not(f_eq(Term::var(g, x), c))}); break;
                    default: psi = f_or({phi, f_and({other, f_lt(c, Term::var(g, x))})}); break;
                }
            }
            pairs.push_back({g, phi, psi, rewritten});
        }
    }
    std::vector<std::string> bad(pairs.size());
    std::vector<char> same(pairs.size(), 0);
    parallel_for(pairs.size(), [&](std::size_t i) {
        const auto& p = pairs[i];
        try {
            bool eq = equivalent(p.g, p.a, p.b);
            same[i] = eq;
            bool codes = code_set(p.g, p.a) == code_set(p.g, p.b);
            if (eq != codes) bad[i] = "codes " + std::string(codes ? "equal" : "differ") + " for " + print(p.a) + " / " + print(p.b);
            else if (p.rewritten && !eq) bad[i] = "rewrite changed the set: " + print(p.a);
        } catch (const Error& e) {
            bad[i] = std::string(e.what()) + " on " + print(p.a);
        }
    });
    std::size_t fails = 0, eqs = 0;
    std::string first;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        eqs += same[i] ? 1 : 0;
        if (!bad[i].empty() && fails++ == 0) first = bad[i];
    }
    Outcome o{fails == 0 && pairs.size() >= 300,
              fmt("%zu pairs (%zu equivalent), %zu mismatches, %.1fs", pairs.size(), eqs, fails, seconds_since(t0))};
    if (fails) o.detail += "; first: " + first;
    return o;
}

// ------------------------------------------------------------------ 7
Outcome generic_types() {
    auto t0 = std::chrono::steady_clock::now();
    struct Job {
        GroupSpec g;
        FormulaPtr f;
    };
    std::vector<Job> jobs;
    for (const char* gs : {"Z", "Q", "Z*Z", "Z*Q", "Q*Z"}) {
        auto g = G(gs);
        std::size_t taken = 0;
        for (const auto& f : unary_corpus(g, 404, 60, Template::Mixed))
            if (taken < 20 && satisfiable(g, f)) {
                jobs.push_back({g, f});
                ++taken;
            }
    }
    std::vector<std::string> bad(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const auto& [g, f] = jobs[i];
        try {
            auto p = generic_type(g, f, 6);
            if (!(generic_type(g, f, 6) == p)) bad[i] = "nondeterministic: " + print(f);
            else if (!check_descriptor(g, p, f)) bad[i] = "check failed: " + print(f);
        } catch (const Error& e) {
            bad[i] = std::string(e.what()) + " on " + print(f);
        }
    });
    std::size_t fails = 0;
    std::string first;
    for (const auto& b : bad)
        if (!b.empty() && fails++ == 0) first = b;
    double secs = seconds_since(t0);
    Outcome o{fails == 0 && jobs.size() >= 100 && secs < 180,
              fmt("%zu formulas, L=6, %zu failures, %.1fs", jobs.size(), fails, secs)};
    if (fails) o.detail += "; first: " + first;
    return o;
}

// ------------------------------------------------------------------ 8
bool congruent(const GroupSpec& g, const Element& a, const Element& b, int level, Int m) {
    for (int i = 1; i <= level; ++i) {
        if (g.kind(i) != Kind::DiscreteZ) continue;
        Int d = (a.coords[static_cast<std::size_t>(i - 1)] - b.coords[static_cast<std::size_t>(i - 1)]).num();
        if (d % m != 0) return false;
    }
    return true;
}

Outcome finite_quotients() {
    bool ok = true;
    std::size_t cases = 0;
    std::string why;
    for (int r = 1; r <= 3; ++r) {
        GroupSpec g(std::vector<Kind>(static_cast<std::size_t>(r), Kind::DiscreteZ));
        for (int k = 0; k <= r; ++k)
            for (Int m = 2; m <= 6; ++m) {
                ++cases;
                auto reps = representatives_mod(g, k, m);
                Int want = 1;
                for (int i = 0; i < k; ++i) want *= m;
                // classes met by brute force over a box wider than one period
                std::vector<Element> classes;
                for (const auto& e : box_points(g, Box{m})) {
                    bool seen = false;
                    for (const auto& c : classes) seen = seen || congruent(g, c, e, k, m);
                    if (!seen) classes.push_back(e);
                }
                bool distinct = true;
                for (std::size_t i = 0; i < reps.size(); ++i)
                    for (std::size_t j = i + 1; j < reps.size(); ++j) distinct = distinct && !congruent(g, reps[i], reps[j], k, m);
                if (static_cast<Int>(reps.size()) != want || static_cast<Int>(classes.size()) != want || !distinct) {
                    ok = false;
                    why = fmt(" (r=%d k=%d m=%lld)", r, k, static_cast<long long>(m));
                }
            }
    }
    std::mt19937_64 rng(8);
    bool perm = true;
    for (int t = 0; t < 100; ++t) {
        const char* gs[] = {"Z", "Z*Z", "Z*Q", "Z*Z*Z"};
        auto g = G(gs[t % 4]);
        int level = 1 + static_cast<int>(rng() % static_cast<unsigned>(g.rank()));
        std::size_t len = 1 + rng() % 2, count = 1 + rng() % 6;
        std::vector<std::vector<QuotientElement>> tuples;
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<QuotientElement> tup;
            for (std::size_t j = 0; j < len; ++j) {
                QuotientElement q{level, {}};
                for (int c = 1; c <= level; ++c)
                    q.coords.push_back(g.kind(c) == Kind::DiscreteZ ? Rational(static_cast<Int>(rng() % 7) - 3)
                                                                    : Rational(static_cast<Int>(rng() % 7) - 3, 2));
                tup.push_back(q);
            }
            tuples.push_back(tup);
        }
        auto ref = code_finite_set(g, tuples);
        for (int s = 0; s < 5; ++s) {
            std::shuffle(tuples.begin(), tuples.end(), rng);
            perm = perm && code_finite_set(g, tuples) == ref;
        }
    }
    return {ok && perm, fmt("%zu (r,k,m) cases with m^k classes%s; finite-set codes permutation invariant on 100 sets: %s",
                            cases, why.c_str(), perm ? "yes" : "no")};
}

// ------------------------------------------------------------------ 9
Outcome chi_values() {
    bool ok = true;
    std::size_t groups = 0;
    std::string why;
    for (int r = 1; r <= 3; ++r)
        for (int mask = 0; mask < (1 << r); ++mask) {
            std::vector<Kind> kinds;
            for (int i = 0; i < r; ++i) kinds.push_back(mask >> i & 1 ? Kind::DenseQ : Kind::DiscreteZ);
            GroupSpec g(kinds);
            ++groups;
            for (Int p : {2, 3, 5, 7, 11, 13}) {
                auto chi = compute_chi(g, p);
                Int want = 1;
                for (int i = 0; i < g.discrete_count(); ++i) want *= p;
                if (!chi || *chi != want) {
                    ok = false;
                    why = " (" + g.str() + ")";
                }
                if (p > 5) continue;
                std::vector<Element> classes;
                for (const auto& e : box_points(g, Box{p})) {
                    bool seen = false;
                    for (const auto& c : classes) seen = seen || congruent(g, c, e, r, p);
                    if (!seen) classes.push_back(e);
                }
                if (static_cast<Int>(classes.size()) != want) {
                    ok = false;
                    why = " (enumeration, " + g.str() + ")";
                }
            }
        }
    return {ok, fmt("%zu groups of rank <= 3, p <= 13, chi = p^(#Z)%s", groups, why.c_str())};
}

// ------------------------------------------------------------------ 10
// brute-force search for an n-divisible element of [a, b] in Q*Z or Z*Z
bool has_divisible(const GroupSpec& g, const Element& a, const Element& b, Int n) {
    std::vector<Rational> firsts{a.coords[0], b.coords[0], (a.coords[0] + b.coords[0]) / Rational(2)};
    for (Int f = a.coords[0].floor(); f <= b.coords[0].ceil(); ++f) firsts.push_back(Rational(f));
    for (const auto& f : firsts) {
        if (g.kind(1) == Kind::DiscreteZ && (!f.is_integer() || f.num() % n != 0)) continue;
        for (Int t = -40; t <= 40; ++t) {
            if (t % n != 0) continue;
            Element e({f, Rational(t)});
            if (a <= e && e <= b) return true;
        }
    }
    return false;
}

Outcome mixed_regularity() {
    auto qz = G("Q*Z");
    bool reg = is_n_regular_block(qz, 1, 2, 2) && is_n_regular_block(qz, 1, 2, 3);
    std::mt19937_64 rng(10);
    auto pts = box_points(qz, Box{12});
    std::size_t sampled = 0, bad = 0;
    while (sampled < 500) {
        Element a = pts[rng() % pts.size()], b = pts[rng() % pts.size()];
        if (b < a) std::swap(a, b);
        for (Int n : {2, 3}) {
            bool big = a.coords[0] != b.coords[0] || (b.coords[1] - a.coords[1]).num() + 1 >= n;
            if (!big) continue;
            if (!has_divisible(qz, a, b, n)) ++bad;
        }
        ++sampled;
    }
    auto zz = G("Z*Z");
    bool zz_fails = !is_n_regular_block(zz, 1, 2, 2) &&
                    !has_divisible(zz, Element({Rational(1), Rational(0)}), Element({Rational(1), Rational(3)}), 2);
    return {reg && bad == 0 && zz_fails,
            fmt("Q*Z 2- and 3-regular: %s; %zu sampled intervals, %zu without a divisible element; Z*Z not 2-regular: %s",
                reg ? "yes" : "no", sampled, bad, zz_fails ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<const char*, std::function<Outcome()>>> all = {
        {"qe differential", qe_differential},       {"interval parity", interval_parity},
        {"regular rank", regular_rank},             {"end-segment codes under halving", halving_codes},
        {"divisibility end-segments", end_segments}, {"canonical set codes", canonical_codes},
        {"generic types", generic_types},           {"finite quotients", finite_quotients},
        {"chi", chi_values},                        {"mixed regularity", mixed_regularity},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = all[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, all[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
