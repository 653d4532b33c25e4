#include "tslab/setfamilies.hpp"

#include <doctest.h>

#include <functional>
#include <map>
#include <random>

using namespace tslab;

namespace {

FiniteSet from_mask(unsigned mask, int ground)
{
    FiniteSet s;
    for (int i = 0; i < ground; ++i)
        if (mask & (1U << i)) s.push_back(i + 1);
    return s;
}

// Textbook recursion: cut A into successive pieces, each in F_{n-1}, with at
// most min A pieces.
bool oracle_schreier(const FiniteSet& a, int n)
{
    if (a.size() <= 1) return true;
    if (n == 0) return false;
    std::function<bool(std::size_t, Index)> cut = [&](std::size_t from, Index pieces) {
        if (from == a.size()) return true;
        if (pieces >= a.front()) return false;
        for (std::size_t to = from + 1; to <= a.size(); ++to) {
            FiniteSet piece(a.begin() + static_cast<long>(from), a.begin() + static_cast<long>(to));
            if (oracle_schreier(piece, n - 1) && cut(to, pieces + 1)) return true;
        }
        return false;
    };
    return cut(0, 0);
}

bool oracle_prime(const FiniteSet& a, const std::function<bool(const FiniteSet&)>& base)
{
    for (unsigned mask = 0; mask < (1U << a.size()); ++mask) {
        FiniteSet b, c;
        for (std::size_t i = 0; i < a.size(); ++i) (mask >> i & 1 ? b : c).push_back(a[i]);
        if (base(b) && base(c)) return true;
    }
    return false;
}

Q brute_weight(const std::map<Index, Q>& a, const FamilyDescriptor& f)
{
    std::vector<std::pair<Index, Q>> items(a.begin(), a.end());
    Q best = 0;
    for (unsigned mask = 0; mask < (1U << items.size()); ++mask) {
        FiniteSet s;
        Q w = 0;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (mask >> i & 1) {
                s.push_back(items[i].first);
                w += items[i].second;
            }
        if (w > best && member(s, f)) best = w;
    }
    return best;
}

std::size_t count_members(const FamilyDescriptor& f, int ground)
{
    std::size_t n = 0;
    for (unsigned mask = 0; mask < (1U << ground); ++mask) n += member(from_mask(mask, ground), f) ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("schreier membership agrees with the piece-cutting recursion on [1..10]")
{
    for (int n = 0; n <= 2; ++n) {
        auto f = schreier(n);
        for (unsigned mask = 0; mask < (1U << 10); ++mask) {
            FiniteSet a = from_mask(mask, 10);
            CHECK(member(a, *f) == oracle_schreier(a, n));
            CHECK(member_modified(a, n) == oracle_schreier(a, n));
        }
    }
}

TEST_CASE("frozen member counts on [1..10]")
{
    CHECK(count_members(*schreier(0), 10) == 11);
    CHECK(count_members(*schreier(1), 10) == 144);
    CHECK(count_members(*schreier(2), 10) == 489);
    CHECK(count_members(*schreier(3), 10) == 513);
    CHECK(count_members(*cardinality(3), 10) == 176);
    CHECK(count_members(*prime(schreier(1)), 10) == 631);
}

TEST_CASE("prime family matches two-part splitting")
{
    auto p = prime(schreier(1));
    auto s1 = schreier(1);
    for (unsigned mask = 0; mask < (1U << 10); ++mask) {
        FiniteSet a = from_mask(mask, 10);
        CHECK(member(a, *p) == oracle_prime(a, [&](const FiniteSet& b) { return member(b, *s1); }));
    }
}

TEST_CASE("bracket of Schreier families is the summed level")
{
    for (int n = 0; n <= 2; ++n)
        for (int m = 0; n + m <= 3; ++m) {
            auto lhs = bracket(schreier(n), schreier(m));
            auto rhs = schreier(n + m);
            for (unsigned mask = 0; mask < (1U << 11); ++mask) {
                FiniteSet a = from_mask(mask, 11);
                CHECK(member(a, *lhs) == member(a, *rhs));
            }
        }
}

TEST_CASE("membership examples")
{
    CHECK(member({}, *schreier(1)));
    CHECK(member({3, 4, 5}, *schreier(1)));
    CHECK_FALSE(member({2, 3, 4}, *schreier(1)));
    // {2,3} < {6,7,8,9} are two S(1) sets with 2 <= min = 2.
    CHECK(member({2, 3, 6, 7, 8, 9}, *schreier(2)));
    CHECK(member({5}, *schreier(0)));
    CHECK_FALSE(member({5, 6}, *schreier(0)));
    CHECK(member({1, 2, 3}, *cardinality(3)));
    CHECK_FALSE(member({1, 2, 3, 4}, *cardinality(3)));
}

TEST_CASE("window enumeration")
{
    auto max1 = maximal_members(*schreier(1), 2, 4);
    CHECK(max1 == std::vector<FiniteSet>{{2, 3}, {2, 4}, {3, 4}});
    auto s0 = members_in_window(*schreier(0), 5, 6);
    CHECK(s0 == std::vector<FiniteSet>{{}, {5}, {6}});
    CHECK(members_in_window(*bracket(schreier(1), schreier(1)), 1, 8).size() == 128);
    CHECK(members_in_window(*schreier(2), 1, 8).size() == 128);
    CHECK(members_in_window(*schreier(1), 1, 9).size() == 89);
}

TEST_CASE("hereditary and spreading on [1..9]")
{
    for (const char* name : {"S(1)", "S(2)", "A(2)", "B(S(1),S(2))", "P(S(1))", "P(A(2))"}) {
        auto f = parse_family(name);
        for (const auto& a : members_in_window(*f, 1, 9))
            for (std::size_t i = 0; i < a.size(); ++i) {
                FiniteSet sub = a;
                sub.erase(sub.begin() + static_cast<long>(i));
                CHECK(member(sub, *f));
                FiniteSet up = a;
                ++up[i];
                if (i + 1 < up.size() && up[i] == up[i + 1]) continue;
                CHECK(member(up, *f));
            }
    }
}

TEST_CASE("max_weight fast paths agree with subset enumeration")
{
    std::mt19937_64 rng(20240611);
    for (const char* name : {"S(0)", "S(1)", "S(2)", "A(1)", "A(3)", "P(S(0))", "P(A(2))", "P(S(1))",
                             "B(S(1),S(1))", "P(S(2))"}) {
        auto f = parse_family(name);
        for (int t = 0; t < 60; ++t) {
            std::map<Index, Q> a;
            std::size_t size = 1 + rng() % 10;
            while (a.size() < size) {
                Q v(static_cast<long>(rng() % 6), static_cast<long>(1 + rng() % 3));
                v.canonicalize();
                a[static_cast<Index>(1 + rng() % 18)] = v;
            }
            CAPTURE(name);
            CHECK(max_weight(a, *f) == brute_weight(a, *f));
        }
    }
}

TEST_CASE("admissible and allowable families")
{
    auto s1 = schreier(1);
    CHECK(is_admissible({{2, 3}, {5, 9}}, *s1));
    CHECK_FALSE(is_admissible({{2, 6}, {5, 9}}, *s1)); // not successive
    CHECK(is_allowable({{2, 6}, {5, 9}}, *s1));
    CHECK_FALSE(is_allowable({{1}, {5}}, *s1));         // minima {1,5} not in S(1)
    CHECK_FALSE(is_allowable({{2, 5}, {5, 9}}, *s1));   // overlapping
}

TEST_CASE("descriptor text round-trips and rejects garbage")
{
    for (const char* text : {"S(0)", "S(3)", "A(4)", "B(S(1),A(2))", "P(S(1))", "P(B(S(1),S(1)))"})
        CHECK(to_string(*parse_family(text)) == text);
    CHECK_THROWS_AS(parse_family("S(-1)"), BadInputError);
    CHECK_THROWS_AS(parse_family("Q(2)"), BadInputError);
    CHECK_THROWS_AS(parse_family("B(S(1))"), BadInputError);
    CHECK_THROWS_AS(make_set({0, 2}), BadInputError);
}

TEST_CASE("automaton caps merge equivalent states")
{
    FamilyAutomaton aut(*schreier(1));
    auto s = aut.initial();
    FamilyAutomaton::State a, b;
    REQUIRE(aut.step(s, 5, a));
    REQUIRE(aut.step(s, 7, b));
    aut.cap(a, 2);
    aut.cap(b, 2);
    CHECK(a == b); // both allow any two more elements
}
