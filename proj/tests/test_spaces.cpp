#include "tslab/normengine.hpp"
#include "tslab/spaces.hpp"

#include <doctest.h>

using namespace tslab;

TEST_CASE("xm1u parameters")
{
    auto p1 = build_xm1u_params(1);
    CHECK(p1.m.at(0) == 2);
    CHECK(p1.k.at(0) == 1);

    auto p2 = build_xm1u_params(2);
    CHECK(p2.m.at(1) == 5);
    CHECK(p2.t.at(1) == 5);
    CHECK(p2.k.at(1) == 11);

    auto p3 = build_xm1u_params(3);
    CHECK(p3.m.at(2) == 3126);
    CHECK(p3.t.at(2) == 24);
    CHECK(p3.k.at(2) == 289);
    CHECK(check_xm1u_params(p3));

    // Depth 4, recomputed from the recurrences.
    auto p4 = build_xm1u_params(4);
    mpz_class m4;
    mpz_pow_ui(m4.get_mpz_t(), mpz_class(3126).get_mpz_t(), 3126);
    m4 += 1;
    CHECK(p4.m.at(3) == m4);
    mpz_class sq = m4 * m4;
    mpz_class t4 = 0, pow = 1;
    while (pow < sq) {
        pow *= 2;
        ++t4;
    }
    CHECK(p4.t.at(3) == t4);
    CHECK(p4.k.at(3) == t4 * (289 + 1) + 1);
    CHECK(check_xm1u_params(p4));

    auto broken = p3;
    broken.k[2] += 1;
    CHECK_FALSE(check_xm1u_params(broken));
    CHECK_THROWS_AS(build_xm1u_params(5), ResourceLimitError);
    CHECK_THROWS_AS(build_xm1u_params(0), BadInputError);
}

TEST_CASE("presets are well formed")
{
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        SpaceSpec s = preset(name);
        CHECK_NOTHROW(check_well_formed(s));
        CHECK(s.level_count() >= 1);
        CHECK(norm(parse_vector("4:1"), s).value == 1);
    }
    CHECK(norm(parse_vector("2:1,3:1"), preset("tsirelson")).value == 1);

    SpaceSpec x2 = preset("xm1u(2)");
    CHECK(x2.variant == Variant::BoundedlyModified);
    CHECK(x2.bound_s == 1);
    REQUIRE(x2.level_count() == 2);
    CHECK(to_string(*x2.level(1).family) == "S(1)");
    CHECK(x2.level(1).theta == Q(1, 2));
    CHECK(to_string(*x2.level(2).family) == "S(11)");
    CHECK(x2.level(2).theta == Q(1, 5));

    SpaceSpec td = preset("t_delta(1/3)");
    CHECK(td.level(1).theta == Q(1, 3));
    CHECK(preset("tsirelson_modified").variant == Variant::Modified);
    CHECK(preset("mixed_fn((1/2)^n)").level(3).theta == Q(1, 8));
    CHECK(preset("xm1u_toy").toy);
    CHECK_THROWS_AS(preset("banach"), BadInputError);
}

TEST_CASE("regular weight sequences")
{
    std::vector<Q> recip, geom;
    for (int n = 1; n <= 12; ++n) {
        recip.push_back(Q(1, n + 1));
        geom.push_back(Q(1, 1L << n));
    }
    CHECK(check_regular(recip));
    CHECK(check_regular(geom));
    CHECK_FALSE(check_regular({Q(9, 10), Q(19, 20)}));
    CHECK_FALSE(check_regular({Q(1, 2), Q(1, 5)})); // 1/5 < 1/4
    CHECK_FALSE(check_regular({Q(1)}));
    CHECK(check_regular(*parse_spec_config("theta = 1/(n+1)\n").rule, 12));
    CHECK(check_regular(*parse_spec_config("theta = (1/2)^n\n").rule, 12));
}

TEST_CASE("primed and truncated specs")
{
    SpaceSpec toy = preset("xm1u_toy");
    SpaceSpec p = primed_spec(toy);
    REQUIRE(p.level_count() == toy.level_count());
    for (int k = 1; k <= toy.level_count(); ++k) {
        CHECK(p.level(k).theta == toy.level(k).theta);
        CHECK(to_string(*p.level(k).family) == "P(" + to_string(*toy.level(k).family) + ")");
    }
    CHECK(p.variant == toy.variant);

    SpaceSpec mixed = preset("mixed_fn(1/(n+1))");
    SpaceSpec pm = primed_spec(mixed);
    CHECK_FALSE(pm.rule);
    CHECK(pm.level_count() == mixed.level_count());

    SpaceSpec t = truncated_spec(mixed, 2);
    CHECK(t.level_count() == 2);
    CHECK(t.level(2).theta == Q(1, 3));
    CHECK_THROWS_AS(t.level(3), BadInputError);
    // Fewer levels can only lower the norm.
    SparseVector x = parse_vector("3:1,4:1,5:1,9:1,10:1");
    CHECK(norm(x, t).value <= norm(x, mixed).value);
    CHECK(norm(x, p).value >= norm(x, toy).value);
}
