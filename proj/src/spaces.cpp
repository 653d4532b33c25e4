#include "tslab/spaces.hpp"

#include <cmath>
#include <regex>

namespace tslab {

Xm1uParams build_xm1u_params(int depth)
{
    if (depth < 1) throw BadInputError("depth must be >= 1");
    if (depth > 4) throw ResourceLimitError("m_5 exceeds the big-integer budget; depth is capped at 4");
    Xm1uParams p;
    p.depth = depth;
    p.m.push_back(2);
    p.t.push_back(0);
    p.k.push_back(1);
    for (int j = 2; j <= depth; ++j) {
        const mpz_class& prev = p.m.back();
        mpz_class mj;
        mpz_pow_ui(mj.get_mpz_t(), prev.get_mpz_t(), prev.get_ui());
        mj += 1;
        // least t with 2^t >= m^2 is the bit length of m^2 - 1
        mpz_class sq = mj * mj - 1;
        mpz_class tj = static_cast<unsigned long>(mpz_sizeinbase(sq.get_mpz_t(), 2));
        mpz_class kj = tj * (p.k.back() + 1) + 1;
        p.m.push_back(mj);
        p.t.push_back(tj);
        p.k.push_back(kj);
    }
    return p;
}

bool check_xm1u_params(const Xm1uParams& p)
{
    if (p.m.empty() || p.m[0] != 2 || p.k[0] != 1) return false;
    for (std::size_t j = 1; j < p.m.size(); ++j) {
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), p.m[j - 1].get_mpz_t(), p.m[j - 1].get_ui());
        if (p.m[j] <= pw) return false;
        mpz_class two_t;
        mpz_ui_pow_ui(two_t.get_mpz_t(), 2, p.t[j].get_ui());
        if (two_t < p.m[j] * p.m[j]) return false;
        if (p.k[j] != p.t[j] * (p.k[j - 1] + 1) + 1) return false;
    }
    return true;
}

namespace {

SpaceSpec single_level(const std::string& name, Variant v, const Q& theta)
{
    SpaceSpec s;
    s.name = name;
    s.variant = v;
    s.levels.push_back(Level{schreier(1), theta});
    return s;
}

SpaceSpec schlumprecht_spec(const std::string& name, Variant v)
{
    // theta for A_k is 1/log2(k+1), k >= 2, rounded up to a multiple of 2^-16.
    SpaceSpec s;
    s.name = name;
    s.variant = v;
    s.approximate_weights = true;
    const long den = 1L << 16;
    for (int k = 2; k <= 63; ++k) {
        long double w = static_cast<long double>(den) / std::log2(static_cast<long double>(k + 1));
        long num = static_cast<long>(std::ceil(w));
        s.levels.push_back(Level{cardinality(k), Q(num, den)});
        s.levels.back().theta.canonicalize();
    }
    return s;
}

SpaceSpec rule_spec(const std::string& name, Variant v, const std::string& rule_text)
{
    SpaceSpec s = parse_spec_config("theta = " + rule_text + "\n");
    s.name = name;
    s.variant = v;
    return s;
}

} // namespace

SpaceSpec xm1u_toy(const std::vector<int>& m, const std::vector<int>& k)
{
    if (m.empty() || m.size() != k.size()) throw BadInputError("xm1u_toy needs equally long m and k lists");
    SpaceSpec s;
    s.name = "xm1u_toy";
    s.variant = Variant::BoundedlyModified;
    s.bound_s = 1;
    s.toy = true;
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] < 2 || k[j] < 0) throw BadInputError("xm1u_toy needs m_j >= 2 and k_j >= 0");
        s.levels.push_back(Level{schreier(k[j]), Q(1, m[j])});
    }
    check_well_formed(s);
    return s;
}

namespace {

std::vector<int> int_list(const std::string& text)
{
    std::vector<int> out;
    std::regex num(R"(\d+)");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), num); it != std::sregex_iterator(); ++it)
        out.push_back(std::stoi(it->str()));
    return out;
}

} // namespace

SpaceSpec preset(const std::string& raw)
{
    std::string name;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) name += c;
    std::smatch m;
    if (name == "tsirelson") return single_level(name, Variant::Plain, Q(1, 2));
    if (name == "tsirelson_modified") return single_level(name, Variant::Modified, Q(1, 2));
    if (std::regex_match(name, m, std::regex(R"(t_delta\((.+)\))"))) {
        Q d = parse_rational(m[1]);
        if (d <= 0 || d >= 1) throw BadInputError("t_delta needs 0 < delta < 1");
        return single_level(name, Variant::Plain, d);
    }
    if (name == "schlumprecht") return schlumprecht_spec(name, Variant::Plain);
    if (name == "schlumprecht_modified") return schlumprecht_spec(name, Variant::Modified);
    if (std::regex_match(name, m, std::regex(R"(mixed_fn\((.+)\))")))
        return rule_spec(name, Variant::Plain, m[1]);
    if (std::regex_match(name, m, std::regex(R"(mixed_fn_modified\((.+)\))")))
        return rule_spec(name, Variant::Modified, m[1]);
    if (std::regex_match(name, m, std::regex(R"(xm1u\((\d+)\))"))) {
        int depth = std::stoi(m[1]);
        if (depth > 3) throw ResourceLimitError("xm1u spaces are built up to depth 3 (k_4 is about 2*10^7)");
        auto p = build_xm1u_params(depth);
        SpaceSpec s;
        s.name = name;
        s.variant = Variant::BoundedlyModified;
        s.bound_s = 1;
        for (int j = 0; j < depth; ++j)
            s.levels.push_back(Level{schreier(static_cast<int>(p.k[static_cast<std::size_t>(j)].get_si())),
                                     Q(mpz_class(1), p.m[static_cast<std::size_t>(j)])});
        return s;
    }
    if (name == "xm1u_toy") return xm1u_toy({2, 2, 3}, {1, 2, 3});
    if (std::regex_match(name, m, std::regex(R"(xm1u_toy\(m=([\d,]+);k=([\d,]+)\))"))) {
        auto s = xm1u_toy(int_list(m[1]), int_list(m[2]));
        s.name = name;
        return s;
    }
    throw BadInputError("unknown space preset: " + raw);
}

SpaceSpec primed_spec(const SpaceSpec& spec)
{
    SpaceSpec s = spec;
    s.name = "primed(" + spec.name + ")";
    s.rule.reset();
    s.levels.clear();
    for (int k = 1; k <= spec.level_count(); ++k) {
        Level l = spec.level(k);
        s.levels.push_back(Level{prime(l.family), l.theta});
    }
    return s;
}

SpaceSpec truncated_spec(const SpaceSpec& spec, int levels)
{
    if (levels < 1) throw BadInputError("a truncated space needs at least one level");
    SpaceSpec s = spec;
    s.name = spec.name + "|" + std::to_string(levels);
    s.rule.reset();
    s.levels.clear();
    for (int k = 1; k <= levels; ++k) s.levels.push_back(spec.level(k));
    return s;
}

std::vector<std::string> preset_names()
{
    return {"tsirelson",        "tsirelson_modified", "t_delta(1/3)",
            "schlumprecht",     "schlumprecht_modified",
            "mixed_fn(1/(n+1))", "mixed_fn_modified(1/(n+1))",
            "xm1u(1)",          "xm1u(2)",            "xm1u(3)",
            "xm1u_toy"};
}

bool check_regular(const std::vector<Q>& th)
{
    for (std::size_t i = 0; i < th.size(); ++i) {
        if (th[i] <= 0 || th[i] >= 1) return false;
        if (i > 0 && th[i] >= th[i - 1]) return false;
    }
    // 1-based: th[n-1] = theta_n
    for (std::size_t n = 1; n <= th.size(); ++n)
        for (std::size_t m = 1; n + m <= th.size(); ++m)
            if (th[n + m - 1] < th[n - 1] * th[m - 1]) return false;
    return true;
}

bool check_regular(const LevelRule& rule, int prefix_length)
{
    std::vector<Q> th;
    for (int n = 1; n <= prefix_length; ++n) th.push_back(rule.theta(n));
    return check_regular(th);
}

} // namespace tslab
