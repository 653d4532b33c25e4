#include "tslab/normengine.hpp"
#include "tslab/spaces.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace tslab;

namespace {

// Plain Tsirelson norm straight from the implicit equation. Values are built
// bottom-up over subsets of the support; a level-1 functional picks a subset
// and cuts it into consecutive runs, at most min(subset) of them.
Q oracle_tsirelson(const SparseVector& x)
{
    std::vector<std::pair<Index, Q>> pts;
    for (const auto& [i, v] : x.entries()) pts.emplace_back(i, abs(v));
    const std::size_t n = pts.size();
    std::vector<Q> value(std::size_t{1} << n);
    for (unsigned mask = 1; mask < value.size(); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) idx.push_back(i);
        Q best = 0;
        for (auto i : idx) best = std::max(best, pts[i].second);
        for (unsigned sub = mask; sub; sub = (sub - 1) & mask) {
            std::vector<std::size_t> s;
            for (auto i : idx)
                if (sub >> i & 1) s.push_back(i);
            Index bound = pts[s.front()].first;
            // cut points: bit c set means a new run starts after s[c]
            for (unsigned cuts = 0; cuts < (1U << (s.size() - 1)); ++cuts) {
                if (cuts == 0 && sub == mask) continue;
                if (static_cast<Index>(std::popcount(cuts)) + 1 > bound) continue;
                Q sum = 0;
                unsigned run = 0;
                for (std::size_t c = 0; c < s.size(); ++c) {
                    run |= 1U << s[c];
                    if (c + 1 == s.size() || (cuts >> c & 1)) {
                        sum += value[run];
                        run = 0;
                    }
                }
                best = std::max(best, Q(sum / 2));
            }
        }
        value[mask] = best;
    }
    return value.back();
}

SparseVector random_vector(std::mt19937_64& rng, int max_points, Index max_index)
{
    std::map<Index, Q> m;
    int points = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_points));
    while (static_cast<int>(m.size()) < points) {
        Q v(static_cast<long>(1 + rng() % 5), static_cast<long>(1 + rng() % 4));
        v.canonicalize();
        if (rng() & 1) v = -v;
        m[static_cast<Index>(1 + rng() % static_cast<unsigned long>(max_index))] = v;
    }
    return SparseVector(m);
}

SpaceSpec with_variant(SpaceSpec s, Variant v, int bound = 0)
{
    s.variant = v;
    s.bound_s = bound;
    return s;
}

} // namespace

TEST_CASE("engine matches the subset-recursion oracle on plain Tsirelson")
{
    SpaceSpec t = preset("tsirelson");
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        SparseVector x = random_vector(rng, 7, 9);
        CAPTURE(to_string(x));
        CHECK(norm(x, t).value == oracle_tsirelson(x));
    }
}

TEST_CASE("engine matches bounded-depth brute force on {0,1/2,1} vectors")
{
    for (const char* name : {"tsirelson", "tsirelson_modified"}) {
        SpaceSpec s = preset(name);
        int pow3 = 729;
        for (int code = 1; code < pow3; code += 7) {
            std::map<Index, Q> m;
            int c = code;
            for (Index i = 1; i <= 6; ++i, c /= 3)
                if (c % 3) m[i] = c % 3 == 1 ? Q(1, 2) : Q(1);
            SparseVector x(m);
            CAPTURE(name);
            CAPTURE(to_string(x));
            CHECK(norm(x, s).value == norm_bruteforce(x, s, 4));
        }
    }
}

TEST_CASE("small examples")
{
    SpaceSpec t = preset("tsirelson");
    auto r = norm(parse_vector("7:1"), t);
    CHECK(r.value == 1);
    CHECK(to_string(r.certificate) == "+e7");
    CHECK(norm(parse_vector("2:1,3:1"), t).value == 1);
    auto four = norm(parse_vector("2:1,3:1,4:1,5:1"), t);
    CHECK(four.value == Q(3, 2));
    CHECK(to_string(four.certificate) == "1/2[L1,adm](+e3 +e4 +e5)");
    CHECK(norm_level(parse_vector("2:1,3:1"), t, 1).first == 1);
    SpaceSpec mixed = preset("mixed_fn(1/(n+1))");
    for (int k = 1; k <= 4; ++k) CHECK(norm_level(parse_vector("5:1"), mixed, k).first == mixed.level(k).theta);
    auto zero = norm(SparseVector(), t);
    CHECK(zero.value == 0);
    CHECK(zero.degenerate);
    CHECK(norm_level(SparseVector(), t, 1).first == 0);
    CHECK(norm_bruteforce(parse_vector("2:1,3:1"), t, 2) == 1);
    CHECK(norm_bruteforce(parse_vector("7:1"), mixed, 1) == 1);
}

TEST_CASE("distorted and 2-convexified norms")
{
    SpaceSpec t = preset("tsirelson");
    CHECK(distorted_norm(parse_vector("5:1"), t, 1) == 1);
    CHECK(distorted_norm(parse_vector("2:1,3:1"), t, 1) == Q(3, 2));
    CHECK(distorted_norm(SparseVector(), t, 1) == 0);
    CHECK(two_convexified_norm(parse_vector("4:1"), t) == 1);
    CHECK(two_convexified_norm(parse_vector("2:1/2,3:1/2"), t) == Q(1, 4));
    SparseVector ones = parse_vector("3:1,5:1,6:1,9:1");
    CHECK(two_convexified_norm(ones, t) == norm(ones, t).value);
}

TEST_CASE("certificates, unconditionality and dominance on random vectors")
{
    std::mt19937_64 rng(4242);
    SpaceSpec plain = preset("tsirelson");
    SpaceSpec bmod = with_variant(plain, Variant::BoundedlyModified, 1);
    SpaceSpec mod = with_variant(plain, Variant::Modified);
    for (int trial = 0; trial < 150; ++trial) {
        SparseVector x = random_vector(rng, 8, 14);
        CAPTURE(to_string(x));
        auto p = norm(x, plain);
        auto b = norm(x, bmod);
        auto m = norm(x, mod);
        for (const auto* r : {&p, &b, &m}) REQUIRE(r->exact);
        CHECK(evaluate(p.certificate, x) == p.value);
        CHECK(validate(p.certificate, plain));
        CHECK(evaluate(m.certificate, x) == m.value);
        CHECK(validate(m.certificate, mod));
        CHECK(validate(b.certificate, bmod));
        CHECK(p.value <= b.value);
        CHECK(b.value <= m.value);
        CHECK(x.linf() <= p.value);
        CHECK(m.value <= x.l1());
        CHECK(norm(x.abs(), plain).value == p.value);
        auto pts = x.support();
        SparseVector dropped = restrict(x, FiniteSet(pts.begin() + 1, pts.end()));
        CHECK(norm(dropped, plain).value <= p.value);
        // spreading: an order-preserving right shift never decreases the norm
        std::map<Index, Q> shifted;
        Index off = 0;
        for (const auto& [i, v] : x.entries()) shifted[i + (off += static_cast<Index>(rng() % 3))] = v;
        CHECK(norm(SparseVector(shifted), plain).value >= p.value);
    }
}

TEST_CASE("modified norm dominates theta_1 times the sum over disjoint pieces")
{
    SpaceSpec mod = preset("tsirelson_modified");
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        Index n = 2 + static_cast<Index>(rng() % 3);
        std::vector<SparseVector> pieces;
        std::map<Index, Q> sum;
        Index next = n;
        for (Index i = 0; i < n; ++i) {
            std::map<Index, Q> piece;
            for (int k = 0; k < 2; ++k) {
                next += static_cast<Index>(1 + rng() % 2);
                Q v(static_cast<long>(1 + rng() % 3));
                piece[next] = v;
                sum[next] = v;
            }
            pieces.emplace_back(piece);
        }
        Q total = 0;
        for (const auto& p : pieces) total += norm(p, mod).value;
        CHECK(norm(SparseVector(sum), mod).value >= mod.level(1).theta * total);
    }
}

TEST_CASE("interval norms agree with restricted norms")
{
    SpaceSpec s = preset("mixed_fn(1/(n+1))");
    SparseVector x = parse_vector("2:1,3:1/2,5:1,6:-1,8:1/3,9:1");
    auto table = interval_norms(x, s);
    auto pts = x.support();
    REQUIRE(table.size() == pts.size());
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a; b < pts.size(); ++b)
            CHECK(table[a][b] == norm(restrict(x, pts[a], pts[b]), s).value);
}

TEST_CASE("batch evaluation is order-stable and matches serial")
{
    std::mt19937_64 rng(5);
    std::vector<SparseVector> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(random_vector(rng, 8, 16));
    SpaceSpec s = preset("schlumprecht");
    auto a = norm_batch_serial(xs, s);
    auto b = norm_batch(xs, s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].value == b[i].value);
        CHECK(a[i].certificate == b[i].certificate);
    }
}

TEST_CASE("resource limits and relaxed bounds")
{
    std::map<Index, Q> big;
    for (Index i = 1; i <= 63; ++i) big[i] = 1;
    CHECK_THROWS_AS(norm(SparseVector(big), preset("tsirelson")), ResourceLimitError);

    std::map<Index, Q> wide;
    for (Index i = 3; i <= 17; ++i) wide[i] = Q(1 + i % 3, 2);
    SparseVector x(wide);
    SpaceSpec mod = preset("tsirelson_modified");
    auto r = norm(x, mod);
    CHECK_FALSE(r.exact);
    CHECK(r.lower == r.value);
    CHECK(r.lower <= r.upper);
    CHECK(r.upper <= x.l1());
    CHECK(evaluate(r.certificate, x) == r.value);
    CHECK(r.value >= norm(x, preset("tsirelson")).value);
    mod.exact = true;
    CHECK_THROWS_AS(norm(x, mod), ResourceLimitError);

    auto lb = norm_level_bounds(x, preset("tsirelson_modified"), 1);
    CHECK_FALSE(lb.exact);
    CHECK(lb.upper <= Q(1, 2) * x.l1());

    std::map<Index, Q> nine;
    for (Index i = 1; i <= 9; ++i) nine[i] = 1;
    CHECK_THROWS_AS(norm_bruteforce(SparseVector(nine), preset("tsirelson"), 2), ResourceLimitError);
    CHECK_THROWS_AS(norm_bruteforce(parse_vector("1:1"), preset("tsirelson"), 5), ResourceLimitError);
}
