// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include "tslab/experiments.hpp"
#include "tslab/normengine.hpp"
#include "tslab/setfamilies.hpp"
#include "tslab/spaces.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

using namespace tslab;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

// Runs `body`, which returns true on success and may fill `detail`; a
// positive `limit_s` also fails the criterion when exceeded.
void criterion(int id, const std::string& title, double limit_s, const std::function<bool(std::string&)>& body)
{
    std::string detail;
    auto start = Clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_s > 0 && secs >= limit_s) {
        ok = false;
        detail += " over the " + std::to_string(static_cast<int>(limit_s)) + " s limit";
    }
    if (!ok) ++failures;
    std::printf("%s %2d %-48s %7.1fs  %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs, detail.c_str());
    std::fflush(stdout);
}

FiniteSet from_mask(unsigned mask, int ground)
{
    FiniteSet s;
    for (int i = 0; i < ground; ++i)
        if (mask >> i & 1) s.push_back(i + 1);
    return s;
}

SparseVector random_vector(Rng& rng, int max_points, Index max_index)
{
    std::map<Index, Q> m;
    auto points = static_cast<std::size_t>(rng.between(1, max_points));
    while (m.size() < points) {
        Q v(rng.between(1, 6), rng.between(1, 4));
        v.canonicalize();
        if (rng.coin()) v = -v;
        m[rng.between(1, max_index)] = v;
    }
    return SparseVector(m);
}

SpaceSpec with_variant(SpaceSpec s, Variant v, int bound)
{
    s.variant = v;
    s.bound_s = bound;
    return s;
}

std::string counts(const ExperimentReport& r)
{
    return std::to_string(r.cases.size()) + " cases, pass " + std::to_string(r.count(Verdict::Pass)) + " fail " +
           std::to_string(r.count(Verdict::Fail)) + " indeterminate " + std::to_string(r.count(Verdict::Indeterminate));
}

bool all_pass(const ExperimentReport& r)
{
    return r.count(Verdict::Fail) == 0 && r.count(Verdict::Indeterminate) == 0 && r.count(Verdict::Pass) > 0;
}

} // namespace

int main()
{
    criterion(1, "Schreier membership oracle on [1..10]", 10, [](std::string& d) {
        long checked = 0;
        for (int n = 0; n <= 2; ++n) {
            auto f = schreier(n);
            for (unsigned mask = 0; mask < (1U << 10); ++mask, ++checked) {
                FiniteSet a = from_mask(mask, 10);
                if (member(a, *f) != member_modified(a, n)) {
                    d = "mismatch at " + to_string(a) + " n=" + std::to_string(n);
                    return false;
                }
            }
        }
        d = std::to_string(checked) + " sets";
        return true;
    });

    criterion(2, "bracket identity on [1..12], n+m <= 3", 30, [](std::string& d) {
        long checked = 0;
        for (int n = 0; n <= 3; ++n)
            for (int m = 0; n + m <= 3; ++m) {
                auto lhs = bracket(schreier(n), schreier(m));
                auto rhs = schreier(n + m);
                for (unsigned mask = 0; mask < (1U << 12); ++mask, ++checked) {
                    FiniteSet a = from_mask(mask, 12);
                    if (member(a, *lhs) != member(a, *rhs)) {
                        d = "mismatch at " + to_string(a);
                        return false;
                    }
                }
            }
        d = std::to_string(checked) + " sets";
        return true;
    });

    criterion(3, "norm == brute force on [1..6] vectors", 60, [](std::string& d) {
        long checked = 0;
        for (const char* name : {"tsirelson", "tsirelson_modified"}) {
            SpaceSpec s = preset(name);
            for (int code = 1; code < 729; ++code, ++checked) {
                std::map<Index, Q> m;
                int c = code;
                for (Index i = 1; i <= 6; ++i, c /= 3)
                    if (c % 3) m[i] = c % 3 == 1 ? Q(1, 2) : Q(1);
                SparseVector x(m);
                if (norm(x, s).value != norm_bruteforce(x, s, 4)) {
                    d = std::string(name) + " mismatch at " + to_string(x);
                    return false;
                }
            }
        }
        d = std::to_string(checked) + " vectors";
        return true;
    });

    criterion(4, "certificate soundness on 1000 vectors", 0, [](std::string& d) {
        Rng rng(kDefaultSeed, 4);
        const std::vector<std::pair<std::string, int>> spaces{{"tsirelson", 10},
                                                              {"mixed_fn(1/(n+1))", 10},
                                                              {"schlumprecht", 10},
                                                              {"tsirelson_modified", 12},
                                                              {"xm1u(2)", 12}};
        for (int i = 0; i < 1000; ++i) {
            const auto& [name, points] = spaces[static_cast<std::size_t>(i) % spaces.size()];
            SpaceSpec s = preset(name);
            SparseVector x = random_vector(rng, points, 24);
            auto r = norm(x, s);
            if (!r.exact || evaluate(r.certificate, x) != r.value || !validate(r.certificate, s)) {
                d = name + " unsound at " + to_string(x);
                return false;
            }
        }
        d = "1000 vectors over 5 spaces";
        return true;
    });

    criterion(5, "unconditionality and dominance on 1000 vectors", 0, [](std::string& d) {
        Rng rng(kDefaultSeed, 5);
        for (const char* base : {"tsirelson", "mixed_fn(1/(n+1))"}) {
            SpaceSpec plain = preset(base);
            SpaceSpec bmod = with_variant(plain, Variant::BoundedlyModified, 1);
            SpaceSpec mod = with_variant(plain, Variant::Modified, 0);
            for (int i = 0; i < 500; ++i) {
                SparseVector x = random_vector(rng, 8, 16);
                Q p = norm(x, plain).value, b = norm(x, bmod).value, m = norm(x, mod).value;
                auto pts = x.support();
                SparseVector flipped = x;
                flipped.set(pts.front(), -x.get(pts.front()));
                SparseVector dropped = restrict(x, FiniteSet(pts.begin() + 1, pts.end()));
                bool ok = norm(flipped, plain).value == p && norm(dropped, plain).value <= p && p <= b && b <= m &&
                          x.linf() <= p && m <= x.l1();
                if (!ok) {
                    d = std::string(base) + " violated at " + to_string(x);
                    return false;
                }
            }
        }
        d = "1000 vectors, plain <= bmod(1) <= modified";
        return true;
    });

    criterion(6, "theta_1 disjoint lower bound, 200 families", 0, [](std::string& d) {
        VerifyParams p;
        auto r = verify("theta1_lower", p);
        d = counts(r);
        return r.cases.size() == 200 && all_pass(r);
    });

    ExperimentReport lemma112;
    criterion(7, "basic s.c.c. sandwich, 50 combinations", 300, [&](std::string& d) {
        VerifyParams p;
        lemma112 = verify("lemma112", p);
        std::size_t cases = 0, fails = 0, passes = 0;
        for (const auto& c : lemma112.cases) {
            if (c.id.rfind("claim", 0) == 0) continue;
            ++cases;
            for (const auto& b : c.checks) (b.verdict == Verdict::Pass ? passes : fails)++;
        }
        d = std::to_string(cases) + " cases, " + std::to_string(passes) + " checks pass, " + std::to_string(fails) +
            " not";
        return cases == 50 && fails == 0 && passes > 0;
    });

    criterion(8, "heavy supports lie in F_{r-1}, l <= 6, r <= 2", 0, [&](std::string& d) {
        std::size_t cases = 0, fails = 0;
        for (const auto& c : lemma112.cases) {
            if (c.id.rfind("claim", 0) != 0) continue;
            ++cases;
            for (const auto& b : c.checks) fails += b.verdict == Verdict::Pass ? 0 : 1;
        }
        d = std::to_string(cases) + " (l, r) pairs, " + std::to_string(fails) + " not passing";
        return cases == 12 && fails == 0;
    });

    criterion(9, "interval-family bound, 20 instances (j = 2)", 0, [](std::string& d) {
        VerifyParams p;
        auto r = verify("lemma113", p);
        d = counts(r);
        return r.cases.size() == 20 && all_pass(r);
    });

    criterion(10, "X_{M(1),u} parameters at depth 3", 0, [](std::string& d) {
        auto p = build_xm1u_params(3);
        bool ok = p.m == std::vector<mpz_class>{2, 5, 3126} && p.t.at(1) == 5 && p.t.at(2) == 24 &&
                  p.k == std::vector<mpz_class>{1, 11, 289} && check_xm1u_params(p);
        d = "m=(2,5,3126) t=(-,5,24) k=(1,11,289)";
        return ok;
    });

    criterion(11, "distortion gap > 1 over 20 toy trials", 0, [](std::string& d) {
        DistortParams p;
        auto r = distort(p);
        d = counts(r) + ", gap in [" + r.summary["min_gap"]["decimal"].get<std::string>() + ", " +
            r.summary["max_gap"]["decimal"].get<std::string>() + "]";
        return r.cases.size() == 20 && all_pass(r);
    });

    criterion(12, "byte-identical reports on rerun", 0, [](std::string& d) {
        VerifyParams p;
        for (const char* suite : {"schreier", "theta1_lower", "lemma113", "lemma27"})
            if (to_json(verify(suite, p)).dump() != to_json(verify(suite, p)).dump()) {
                d = std::string(suite) + " differs";
                return false;
            }
        DistortParams dp;
        dp.trials = 5;
        if (to_json(distort(dp)).dump() != to_json(distort(dp)).dump()) {
            d = "distort differs";
            return false;
        }
        d = "schreier, theta1_lower, lemma113, lemma27, distort";
        return true;
    });

    std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
