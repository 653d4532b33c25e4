#include "tslab/spacespec.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <sstream>

namespace tslab {

std::uint64_t default_budget()
{
    static const std::uint64_t value = [] {
        const char* env = std::getenv("TSLAB_BUDGET");
        if (env == nullptr || *env == '\0') return kDefaultBudget;
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        return (*end == '\0' && v > 0) ? static_cast<std::uint64_t>(v) : kDefaultBudget;
    }();
    return value;
}


std::string to_string(Variant v)
{
    switch (v) {
    case Variant::Plain: return "plain";
    case Variant::Modified: return "modified";
    case Variant::BoundedlyModified: return "boundedly_modified";
    }
    return "?";
}

std::string to_string(Mode m)
{
    return m == Mode::Admissible ? "adm" : "allow";
}

Q LevelRule::theta(int n) const
{
    if (theta_kind == Theta::Reciprocal) return Q(1) / (Q(n) + param);
    Q out = 1;
    for (int i = 0; i < n; ++i) out *= param;
    return out;
}

FamilyPtr LevelRule::family(int n) const
{
    return schreier(family_a * n + family_b);
}

std::string LevelRule::theta_text() const
{
    if (theta_kind == Theta::Reciprocal) return "1/(n+" + to_string(param) + ")";
    return "(" + to_string(param) + ")^n";
}

std::string LevelRule::family_text() const
{
    std::string out = std::to_string(family_a) + "n";
    if (family_b) out += "+" + std::to_string(family_b);
    return out;
}

bool SpaceSpec::has_level(int k) const
{
    if (k < 1) return false;
    if (k <= static_cast<int>(levels.size())) return true;
    return rule.has_value() && k <= max_levels;
}

Level SpaceSpec::level(int k) const
{
    if (!has_level(k)) throw BadInputError("level " + std::to_string(k) + " not in space " + name);
    if (k <= static_cast<int>(levels.size())) return levels[static_cast<std::size_t>(k - 1)];
    return Level{rule->family(k), rule->theta(k)};
}

Mode SpaceSpec::mode_at(int k) const
{
    switch (variant) {
    case Variant::Plain: return Mode::Admissible;
    case Variant::Modified: return Mode::Allowable;
    case Variant::BoundedlyModified: return k <= bound_s ? Mode::Allowable : Mode::Admissible;
    }
    return Mode::Admissible;
}

int SpaceSpec::level_count() const
{
    return rule ? std::max(max_levels, static_cast<int>(levels.size())) : static_cast<int>(levels.size());
}

bool SpaceSpec::allowable_anywhere() const
{
    return variant == Variant::Modified || (variant == Variant::BoundedlyModified && bound_s >= 1);
}

namespace {

std::string trim(std::string s)
{
    auto ws = [](unsigned char c) { return std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), [&](char c) { return !ws(c); }));
    s.erase(std::find_if(s.rbegin(), s.rend(), [&](char c) { return !ws(c); }).base(), s.end());
    return s;
}

std::vector<std::string> split_top_level(const std::string& s)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

std::string strip_spaces(std::string s)
{
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
}

} // namespace

SpaceSpec parse_spec_config(const std::string& text)
{
    SpaceSpec spec;
    spec.name = "config";
    std::optional<LevelRule> theta_rule;
    std::vector<Q> theta_list;
    std::vector<FamilyPtr> family_list;
    std::optional<std::pair<int, int>> family_rule;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw BadInputError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            spec.name = value;
        } else if (key == "variant") {
            if (value == "plain") spec.variant = Variant::Plain;
            else if (value == "modified") spec.variant = Variant::Modified;
            else if (value == "boundedly_modified") spec.variant = Variant::BoundedlyModified;
            else throw BadInputError("unknown variant: " + value);
        } else if (key == "s") {
            spec.bound_s = std::stoi(value);
        } else if (key == "theta") {
            std::string v = strip_spaces(value);
            std::smatch m;
            if (std::regex_match(v, m, std::regex(R"(1/\(n\+([0-9/]+)\))"))) {
                LevelRule r;
                r.theta_kind = LevelRule::Theta::Reciprocal;
                r.param = parse_rational(m[1]);
                theta_rule = r;
            } else if (std::regex_match(v, m, std::regex(R"(\(([0-9/]+)\)\^n)"))) {
                LevelRule r;
                r.theta_kind = LevelRule::Theta::Geometric;
                r.param = parse_rational(m[1]);
                theta_rule = r;
            } else if (std::regex_match(v, m, std::regex(R"(([0-9]+)\^-n)"))) {
                LevelRule r;
                r.theta_kind = LevelRule::Theta::Geometric;
                r.param = Q(1) / parse_rational(m[1]);
                theta_rule = r;
            } else {
                theta_list.clear();
                for (auto& t : split_top_level(value)) theta_list.push_back(parse_rational(t));
            }
        } else if (key == "schreier_seq k_n") {
            std::string v = strip_spaces(value);
            std::smatch m;
            if (!std::regex_match(v, m, std::regex(R"(([0-9]*)\*?n(?:\+([0-9]+))?)")))
                throw BadInputError("schreier_seq k_n must look like 'a*n+b': " + value);
            int a = m[1].length() ? std::stoi(m[1]) : 1;
            int b = m[2].length() ? std::stoi(m[2]) : 0;
            family_rule = std::make_pair(a, b);
        } else if (key == "schreier_seq k") {
            family_list.clear();
            for (auto& t : split_top_level(value)) family_list.push_back(schreier(std::stoi(t)));
        } else if (key == "families") {
            family_list.clear();
            for (auto& t : split_top_level(value)) family_list.push_back(parse_family(t));
        } else if (key == "max_levels") {
            spec.max_levels = std::stoi(value);
        } else if (key == "budget") {
            spec.budget = std::stoull(value);
        } else if (key == "allowable_cap") {
            spec.allowable_cap = std::stoul(value);
        } else {
            throw BadInputError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }

    if (!theta_list.empty()) {
        for (std::size_t i = 0; i < theta_list.size(); ++i) {
            int n = static_cast<int>(i) + 1;
            FamilyPtr f;
            if (i < family_list.size()) f = family_list[i];
            else if (family_rule) f = schreier(family_rule->first * n + family_rule->second);
            else if (family_list.empty()) f = schreier(n);
            else throw BadInputError("fewer families than theta values");
            spec.levels.push_back(Level{f, theta_list[i]});
        }
    } else if (theta_rule) {
        if (!family_list.empty()) {
            for (std::size_t i = 0; i < family_list.size(); ++i)
                spec.levels.push_back(Level{family_list[i], theta_rule->theta(static_cast<int>(i) + 1)});
        } else {
            LevelRule r = *theta_rule;
            if (family_rule) {
                r.family_a = family_rule->first;
                r.family_b = family_rule->second;
            }
            spec.rule = r;
        }
    } else {
        throw BadInputError("config needs a theta entry");
    }
    check_well_formed(spec);
    return spec;
}

std::string to_config(const SpaceSpec& spec)
{
    std::ostringstream out;
    out << "name = " << spec.name << "\n";
    out << "variant = " << to_string(spec.variant) << "\n";
    if (spec.variant == Variant::BoundedlyModified) out << "s = " << spec.bound_s << "\n";
    if (spec.rule && spec.levels.empty()) {
        out << "theta = " << spec.rule->theta_text() << "\n";
        out << "schreier_seq k_n = " << spec.rule->family_text() << "\n";
        out << "max_levels = " << spec.max_levels << "\n";
    } else {
        out << "theta = ";
        for (std::size_t i = 0; i < spec.levels.size(); ++i)
            out << (i ? "," : "") << to_string(spec.levels[i].theta);
        out << "\nfamilies = ";
        for (std::size_t i = 0; i < spec.levels.size(); ++i)
            out << (i ? "," : "") << to_string(*spec.levels[i].family);
        out << "\n";
    }
    out << "budget = " << spec.budget << "\n";
    return out.str();
}

void check_well_formed(const SpaceSpec& spec)
{
    if (spec.levels.empty() && !spec.rule) throw BadInputError("space " + spec.name + " has no levels");
    if (spec.variant == Variant::BoundedlyModified && spec.bound_s < 1)
        throw BadInputError("boundedly_modified needs s >= 1");
    int n = std::min(spec.level_count(), 64);
    for (int k = 1; k <= n; ++k) {
        Level l = spec.level(k);
        if (!l.family) throw BadInputError("level without family");
        if (l.theta <= 0 || l.theta >= 1) throw BadInputError("theta must lie in (0,1) at level " + std::to_string(k));
    }
    if (spec.rule) {
        for (int k = 1; k < n; ++k)
            if (spec.level(k + 1).theta > spec.level(k).theta)
                throw BadInputError("rule-generated theta must be non-increasing");
    }
}

} // namespace tslab
