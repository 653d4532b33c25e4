#include "tslab/core.hpp"
#include "tslab/spaces.hpp"
#include "tslab/spacespec.hpp"

#include <doctest.h>

#include <set>

using namespace tslab;

TEST_CASE("rationals parse exactly and print canonically")
{
    CHECK(parse_rational("3/6") == Q(1, 2));
    CHECK(parse_rational("0.25") == Q(1, 4));
    CHECK(parse_rational("-2") == Q(-2));
    CHECK(parse_rational("010") == Q(10)); // decimal, never octal
    CHECK(parse_rational("1.08") == Q(27, 25));
    CHECK(to_string(parse_rational("4/6")) == "2/3");
    CHECK(to_string(Q(5)) == "5");
    CHECK(to_decimal(Q(1, 3)) == "0.333333");
    CHECK(to_decimal(Q(3, 2)) == "1.5");
    CHECK_THROWS_AS(parse_rational("1/0"), BadInputError);
    CHECK_THROWS_AS(parse_rational("abc"), BadInputError);
}

TEST_CASE("sparse vectors")
{
    SparseVector x = parse_vector("3:1/2,1:-2,7:0");
    CHECK(x.size() == 2);
    CHECK(to_string(x) == "1:-2,3:1/2");
    CHECK(x.linf() == 2);
    CHECK(x.l1() == Q(5, 2));
    CHECK(x.get(3) == Q(1, 2));
    CHECK(x.get(4) == 0);
    CHECK(x.support() == FiniteSet{1, 3});
    CHECK(to_string(x.abs()) == "1:2,3:1/2");
    CHECK(to_string(x.scaled(Q(2))) == "1:-4,3:1");
    CHECK(to_string(x + parse_vector("1:2,4:1")) == "3:1/2,4:1");
    CHECK(to_string(restrict(parse_vector("1:1,2:2,5:3"), 2, 5)) == "2:2,5:3");
    CHECK(to_string(restrict(parse_vector("1:1,2:2,5:3"), FiniteSet{1, 5})) == "1:1,5:3");
    CHECK(to_string(SparseVector()) == "0");
    CHECK_THROWS_AS(parse_vector("0:1"), BadInputError);
    CHECK_THROWS_AS(parse_vector("2-1"), BadInputError);
    CHECK(vector_from_json(to_json(x)) == x);
}

TEST_CASE("functional trees evaluate and validate")
{
    SpaceSpec t = preset("tsirelson");
    auto f = FunctionalTree::make_node(Q(1, 2), 1, Mode::Admissible,
                                       {FunctionalTree::make_leaf(1, 3), FunctionalTree::make_leaf(-1, 4),
                                        FunctionalTree::make_leaf(1, 5)});
    SparseVector x = parse_vector("3:1,4:-1,5:1");
    CHECK(evaluate(f, x) == Q(3, 2));
    CHECK(validate(f, t));
    CHECK(f.support() == FiniteSet{3, 4, 5});
    CHECK(f.depth() == 1);
    CHECK(f.coefficients().at(4) == Q(-1, 2));

    // {2,3,4} is not in S(1).
    auto bad = FunctionalTree::make_node(Q(1, 2), 1, Mode::Admissible,
                                         {FunctionalTree::make_leaf(1, 2), FunctionalTree::make_leaf(1, 3),
                                          FunctionalTree::make_leaf(1, 4)});
    CHECK_FALSE(validate(bad, t));
    // Wrong weight for the level.
    auto heavy = FunctionalTree::make_node(Q(2, 3), 1, Mode::Admissible, {FunctionalTree::make_leaf(1, 3)});
    CHECK_FALSE(validate(heavy, t));
    // Allowable nodes need a modified level.
    auto allow = FunctionalTree::make_node(Q(1, 2), 1, Mode::Allowable,
                                           {FunctionalTree::make_node(Q(1, 2), 1, Mode::Admissible,
                                                                      {FunctionalTree::make_leaf(1, 3),
                                                                       FunctionalTree::make_leaf(1, 6)}),
                                            FunctionalTree::make_leaf(1, 4)});
    CHECK_FALSE(validate(allow, t));
    CHECK(validate(allow, preset("tsirelson_modified")));
    CHECK(tree_from_json(to_json(allow)) == allow);
    CHECK(to_string(f) == "1/2[L1,adm](+e3 -e4 +e5)");
}

namespace {

// Nonnegative coefficient vectors of the Tsirelson norming set on [1..l]
// with depth <= d, built directly from the definition.
std::set<std::vector<Q>> tsirelson_functionals(int l, int d)
{
    std::set<std::vector<Q>> all;
    for (int m = 1; m <= l; ++m) {
        std::vector<Q> e(static_cast<std::size_t>(l));
        e[static_cast<std::size_t>(m - 1)] = 1;
        all.insert(e);
    }
    for (int depth = 0; depth < d; ++depth) {
        std::vector<std::vector<Q>> pool(all.begin(), all.end());
        auto lo = [](const std::vector<Q>& v) {
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v[i] != 0) return static_cast<int>(i);
            return -1;
        };
        auto hi = [](const std::vector<Q>& v) {
            for (std::size_t i = v.size(); i-- > 0;)
                if (v[i] != 0) return static_cast<int>(i);
            return -1;
        };
        // successive children whose minima (1-based) form an S(1) set
        std::function<void(std::vector<Q>, int, int, int)> grow = [&](std::vector<Q> acc, int last, int count,
                                                                      int first) {
            if (count > 0) {
                std::vector<Q> f = acc;
                for (auto& v : f) v /= 2;
                all.insert(f);
            }
            for (const auto& g : pool) {
                int a = lo(g);
                if (a <= last) continue;
                int minimum = count == 0 ? a + 1 : first;
                if (count + 1 > minimum) continue;
                std::vector<Q> next = acc;
                for (std::size_t i = 0; i < next.size(); ++i) next[i] += g[i];
                grow(next, hi(g), count + 1, minimum);
            }
        };
        grow(std::vector<Q>(static_cast<std::size_t>(l)), -1, 0, 0);
    }
    return all;
}

} // namespace

TEST_CASE("heavy supports match direct enumeration for Tsirelson")
{
    SpaceSpec t = preset("tsirelson");
    for (int l = 1; l <= 5; ++l)
        for (Q tau : {Q(1, 3), Q(1, 5), Q(1, 9)}) {
            std::set<FiniteSet> expected;
            for (const auto& f : tsirelson_functionals(l, 3)) {
                FiniteSet s;
                bool heavy = true;
                for (int i = 0; i < l; ++i) {
                    const Q& v = f[static_cast<std::size_t>(i)];
                    if (v == 0) continue;
                    s.push_back(i + 1);
                    heavy = heavy && v > tau;
                }
                if (heavy && !s.empty()) expected.insert(s);
            }
            auto hs = enumerate_heavy_supports(t, l, tau);
            CAPTURE(l);
            CAPTURE(to_string(tau));
            CHECK_FALSE(hs.over_approximate);
            CHECK(std::set<FiniteSet>(hs.supports.begin(), hs.supports.end()) == expected);
            CHECK(hs.count >= static_cast<long>(hs.supports.size()));
        }
}

TEST_CASE("heavy supports above the exhaustive range are flagged")
{
    auto hs = enumerate_heavy_supports(preset("tsirelson"), 14, Q(1, 100));
    CHECK(hs.over_approximate);
    CHECK(hs.count > 0);
    CHECK(enumerate_heavy_supports(preset("tsirelson"), 4, Q(1)).supports.empty());
}

TEST_CASE("space config round-trips")
{
    const char* text = "variant = modified\n"
                       "theta = 1/2,1/5\n"
                       "families = S(1),A(3)\n"
                       "budget = 1000\n";
    SpaceSpec s = parse_spec_config(text);
    CHECK(s.variant == Variant::Modified);
    CHECK(s.levels.size() == 2);
    CHECK(s.level(2).theta == Q(1, 5));
    CHECK(to_string(*s.level(2).family) == "A(3)");
    CHECK(s.budget == 1000);
    SpaceSpec back = parse_spec_config(to_config(s));
    CHECK(to_config(back) == to_config(s));

    SpaceSpec r = parse_spec_config("theta = 1/(n+1)\nschreier_seq k_n = 2n+1\n");
    CHECK(r.level(3).theta == Q(1, 4));
    CHECK(to_string(*r.level(3).family) == "S(7)");
    CHECK(parse_spec_config(to_config(r)).level(5).theta == Q(1, 6));

    CHECK_THROWS_AS(parse_spec_config("theta = 3/2\nfamilies = S(1)\n"), BadInputError);
    CHECK_THROWS_AS(parse_spec_config("variant = sideways\n"), BadInputError);
}
