#include "tslab/rational.hpp"

#include <cctype>
#include <cstdio>

namespace tslab {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_integer_literal(const std::string& s)
{
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

} // namespace

Q parse_rational(const std::string& raw)
{
    std::string s = trim(raw);
    if (s.empty()) throw BadInputError("empty rational");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        bool neg = !ip.empty() && ip[0] == '-';
        if (neg || (!ip.empty() && ip[0] == '+')) ip = ip.substr(1);
        if (ip.empty()) ip = "0";
        if (!is_integer_literal(ip) || (!fp.empty() && !is_integer_literal(fp)) ||
            (!fp.empty() && (fp[0] == '-' || fp[0] == '+')))
            throw BadInputError("malformed decimal: " + raw);
        mpz_class num(ip + fp, 10), den(1);
        for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
        Q q(num, den);
        q.canonicalize();
        return neg ? Q(-q) : q;
    }
    auto slash = s.find('/');
    std::string ns = trim(s.substr(0, slash));
    std::string ds = slash == std::string::npos ? "1" : trim(s.substr(slash + 1));
    if (!is_integer_literal(ns) || !is_integer_literal(ds) || ds[0] == '-' || ds[0] == '+')
        throw BadInputError("malformed rational: " + raw);
    if (ns[0] == '+') ns = ns.substr(1);
    mpz_class den(ds, 10);
    if (den == 0) throw BadInputError("zero denominator: " + raw);
    Q q(mpz_class(ns, 10), den);
    q.canonicalize();
    return q;
}

std::string to_string(const Q& q)
{
    return q.get_str();
}

std::string to_decimal(const Q& q)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", q.get_d());
    return buf;
}

} // namespace tslab
