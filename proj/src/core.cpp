#include "tslab/core.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace tslab {

// ---------------------------------------------------------------- SparseVector

SparseVector::SparseVector(const std::map<Index, Q>& coeffs)
{
    for (const auto& [i, c] : coeffs) {
        if (i < 1) throw BadInputError("vector indices must be positive");
        Q v = c;
        v.canonicalize();
        if (v != 0) entries_.emplace_back(i, v);
    }
}

SparseVector SparseVector::unit(Index n)
{
    SparseVector v;
    v.set(n, 1);
    return v;
}

void SparseVector::set(Index i, const Q& raw)
{
    if (i < 1) throw BadInputError("vector indices must be positive");
    Q value = raw;
    value.canonicalize();
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, Index k) { return e.first < k; });
    if (it != entries_.end() && it->first == i) {
        if (value == 0) entries_.erase(it);
        else it->second = value;
    } else if (value != 0) {
        entries_.insert(it, Entry{i, value});
    }
}

Q SparseVector::get(Index i) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, Index k) { return e.first < k; });
    return (it != entries_.end() && it->first == i) ? it->second : Q(0);
}

FiniteSet SparseVector::support() const
{
    FiniteSet s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.push_back(e.first);
    return s;
}

Q SparseVector::linf() const
{
    Q m = 0;
    for (const auto& e : entries_) m = std::max<Q>(m, ::abs(e.second));
    return m;
}

Q SparseVector::l1() const
{
    Q s = 0;
    for (const auto& e : entries_) s += ::abs(e.second);
    return s;
}

std::map<Index, Q> SparseVector::as_map() const
{
    return {entries_.begin(), entries_.end()};
}

SparseVector SparseVector::abs() const
{
    SparseVector v = *this;
    for (auto& e : v.entries_) e.second = ::abs(e.second);
    return v;
}

SparseVector SparseVector::scaled(const Q& c) const
{
    if (c == 0) return {};
    SparseVector v = *this;
    for (auto& e : v.entries_) e.second *= c;
    return v;
}

SparseVector SparseVector::operator+(const SparseVector& o) const
{
    auto m = as_map();
    for (const auto& [i, c] : o.entries_) m[i] += c;
    return SparseVector(m);
}

SparseVector parse_vector(const std::string& text)
{
    std::map<Index, Q> m;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) {
            if (item.find_first_not_of(" \t") == std::string::npos) continue;
            throw BadInputError("vector entry '" + item + "' must be index:value");
        }
        Index i = 0;
        try {
            i = std::stoll(item.substr(0, colon));
        } catch (const std::exception&) {
            throw BadInputError("bad vector index in '" + item + "'");
        }
        if (i < 1) throw BadInputError("vector indices must be positive");
        m[i] += parse_rational(item.substr(colon + 1));
    }
    return SparseVector(m);
}

std::string to_string(const SparseVector& x)
{
    std::string out;
    for (const auto& [i, c] : x.entries()) {
        if (!out.empty()) out += ",";
        out += std::to_string(i) + ":" + to_string(c);
    }
    return out.empty() ? "0" : out;
}

SparseVector restrict(const SparseVector& x, const FiniteSet& e)
{
    SparseVector out;
    for (const auto& [i, c] : x.entries())
        if (std::binary_search(e.begin(), e.end(), i)) out.set(i, c);
    return out;
}

SparseVector restrict(const SparseVector& x, Index lo, Index hi)
{
    SparseVector out;
    for (const auto& [i, c] : x.entries())
        if (i >= lo && i <= hi) out.set(i, c);
    return out;
}

// ---------------------------------------------------------------- FunctionalTree

FunctionalTree FunctionalTree::make_leaf(int sign, Index index)
{
    FunctionalTree f;
    f.leaf = true;
    f.sign = sign < 0 ? -1 : 1;
    f.index = index;
    return f;
}

FunctionalTree FunctionalTree::make_node(Q weight, int level, Mode mode, std::vector<FunctionalTree> children)
{
    FunctionalTree f;
    f.leaf = false;
    f.weight = std::move(weight);
    f.level = level;
    f.mode = mode;
    f.children = std::move(children);
    return f;
}

FiniteSet FunctionalTree::support() const
{
    if (leaf) return {index};
    FiniteSet s;
    for (const auto& c : children) {
        auto cs = c.support();
        s.insert(s.end(), cs.begin(), cs.end());
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

Index FunctionalTree::min_support() const
{
    if (leaf) return index;
    Index m = -1;
    for (const auto& c : children) {
        Index cm = c.min_support();
        if (m < 0 || cm < m) m = cm;
    }
    return m;
}

int FunctionalTree::depth() const
{
    int d = 0;
    for (const auto& c : children) d = std::max(d, c.depth());
    return leaf ? 0 : d + 1;
}

std::map<Index, Q> FunctionalTree::coefficients() const
{
    std::map<Index, Q> out;
    if (leaf) {
        out[index] = sign;
        return out;
    }
    for (const auto& c : children)
        for (const auto& [i, v] : c.coefficients()) out[i] += weight * v;
    return out;
}

bool FunctionalTree::operator==(const FunctionalTree& o) const
{
    if (leaf != o.leaf) return false;
    if (leaf) return sign == o.sign && index == o.index;
    return weight == o.weight && level == o.level && mode == o.mode && children == o.children;
}

Q evaluate(const FunctionalTree& f, const SparseVector& x)
{
    if (f.leaf) return f.sign * x.get(f.index);
    Q s = 0;
    for (const auto& c : f.children) s += evaluate(c, x);
    return f.weight * s;
}

bool validate(const FunctionalTree& f, const SpaceSpec& spec)
{
    if (f.leaf) return f.index >= 1 && (f.sign == 1 || f.sign == -1);
    if (f.children.empty() || !spec.has_level(f.level)) return false;
    Level lv = spec.level(f.level);
    if (f.weight != lv.theta) return false;
    // An admissible node is also a legal allowable node; the converse needs the variant.
    if (f.mode == Mode::Allowable && spec.mode_at(f.level) != Mode::Allowable) return false;
    std::vector<FiniteSet> parts;
    for (const auto& c : f.children) {
        if (!validate(c, spec)) return false;
        parts.push_back(c.support());
    }
    if (f.mode == Mode::Admissible) {
        // Children must already be listed in successive order.
        return is_admissible(parts, *lv.family);
    }
    return is_allowable(parts, *lv.family);
}

std::string to_string(const FunctionalTree& f)
{
    if (f.leaf) return std::string(f.sign < 0 ? "-" : "+") + "e" + std::to_string(f.index);
    std::string out = to_string(f.weight) + "[L" + std::to_string(f.level) + "," + to_string(f.mode) + "](";
    for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += " ";
        out += to_string(f.children[i]);
    }
    return out + ")";
}

// ---------------------------------------------------------------- heavy supports

namespace {

struct PosFunctional {
    std::uint64_t mask = 0;
    std::vector<Q> coef; // index m-1 holds f(e_m)
    bool operator<(const PosFunctional& o) const { return coef < o.coef; }
};

// Distinct functionals kept per threshold by the exact enumeration.
constexpr std::size_t kHeavyCap = 200000;
struct TooMany {};

std::vector<Q> level_thetas(const SpaceSpec& spec, const Q& floor)
{
    std::vector<Q> out;
    for (int k = 1; k <= spec.level_count(); ++k) {
        Q t = spec.level(k).theta;
        if (spec.rule && k > static_cast<int>(spec.levels.size()) && t <= floor) break;
        out.push_back(t);
    }
    return out;
}

} // namespace

HeavySupports enumerate_heavy_supports(const SpaceSpec& spec, Index l, const Q& tau)
{
    HeavySupports out;
    out.count = 0;
    if (l < 1 || tau >= 1) return out;
    const Q floor = tau > 0 ? tau : Q(0);
    auto thetas = level_thetas(spec, floor);
    Q theta_max = 0;
    for (const auto& t : thetas) theta_max = std::max(theta_max, t);

    // Longest chain of weights whose product stays above tau.
    int max_depth = 0;
    if (tau > 0) {
        Q p = theta_max;
        while (p > tau && max_depth <= 64) {
            ++max_depth;
            p *= theta_max;
        }
    } else {
        max_depth = 65;
    }

    // Every coordinate is a signed product of weights exceeding tau.
    auto over_approximate = [&] {
        std::set<Q> values{Q(1)};
        std::vector<Q> frontier{Q(1)};
        for (int d = 0; d < std::min(max_depth, 64) && !frontier.empty(); ++d) {
            std::vector<Q> next;
            for (const auto& v : frontier)
                for (const auto& t : thetas) {
                    Q p = v * t;
                    if (p > tau && values.insert(p).second) next.push_back(p);
                }
            frontier.swap(next);
            if (values.size() > 100000) break;
        }
        mpz_class base = 2 * static_cast<long>(values.size()) + 1;
        mpz_pow_ui(out.count.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(l));
        out.count -= 1;
        out.over_approximate = true;
        if (l <= 16)
            for (std::uint64_t m = 1; m < (std::uint64_t{1} << l); ++m) {
                FiniteSet s;
                for (Index i = 0; i < l; ++i)
                    if (m >> i & 1) s.push_back(i + 1);
                out.supports.push_back(s);
            }
        std::sort(out.supports.begin(), out.supports.end());
        return out;
    };
    if (l > 12 || max_depth > 4) return over_approximate();

    std::map<Q, std::vector<PosFunctional>> memo;
    std::size_t steps = 0;
    std::function<const std::vector<PosFunctional>&(const Q&)> heavy = [&](const Q& t) -> const std::vector<PosFunctional>& {
        auto it = memo.find(t);
        if (it != memo.end()) return it->second;
        std::set<PosFunctional> found;
        if (1 > t)
            for (Index m = 1; m <= l; ++m) {
                PosFunctional f;
                f.mask = std::uint64_t{1} << (m - 1);
                f.coef.assign(static_cast<std::size_t>(l), Q(0));
                f.coef[static_cast<std::size_t>(m - 1)] = 1;
                found.insert(f);
            }
        for (int k = 1; k <= static_cast<int>(thetas.size()); ++k) {
            const Q& th = thetas[static_cast<std::size_t>(k - 1)];
            if (th <= t) continue;
            Level lv = spec.level(k);
            Mode mode = spec.mode_at(k);
            std::vector<PosFunctional> kids = heavy(t / th);
            std::sort(kids.begin(), kids.end(), [](const PosFunctional& a, const PosFunctional& b) {
                int ma = std::countr_zero(a.mask), mb = std::countr_zero(b.mask);
                return ma != mb ? ma < mb : a.coef < b.coef;
            });
            FamilyAutomaton aut(*lv.family);
            std::vector<std::size_t> chosen;
            std::function<void(std::size_t, std::uint64_t, int, const FamilyAutomaton::State&)> pick =
                [&](std::size_t from, std::uint64_t used, int last_min, const FamilyAutomaton::State& st) {
                    if (!chosen.empty()) {
                        PosFunctional f;
                        f.mask = used;
                        f.coef.assign(static_cast<std::size_t>(l), Q(0));
                        for (auto c : chosen)
                            for (std::size_t i = 0; i < f.coef.size(); ++i) f.coef[i] += kids[c].coef[i];
                        for (auto& v : f.coef) v *= th;
                        found.insert(std::move(f));
                        if (found.size() > kHeavyCap) throw TooMany{};
                    }
                    if (++steps > 50 * kHeavyCap) throw TooMany{};
                    FamilyAutomaton::State next;
                    for (std::size_t c = from; c < kids.size(); ++c) {
                        const auto& kid = kids[c];
                        int mn = std::countr_zero(kid.mask);
                        if (mn <= last_min || (kid.mask & used)) continue;
                        // Successive children: the new one must start after everything used.
                        if (mode == Mode::Admissible && used && mn <= 63 - std::countl_zero(used)) continue;
                        if (!aut.step(st, mn + 1, next)) continue;
                        chosen.push_back(c);
                        FamilyAutomaton::State held = next;
                        pick(c + 1, used | kid.mask, mn, held);
                        chosen.pop_back();
                    }
                };
            pick(0, 0, -1, aut.initial());
        }
        auto& slot = memo[t];
        slot.assign(found.begin(), found.end());
        return slot;
    };

    const std::vector<PosFunctional>* all = nullptr;
    try {
        all = &heavy(tau);
    } catch (const TooMany&) {
        return over_approximate();
    }
    std::set<FiniteSet> supports;
    for (const auto& f : *all) {
        FiniteSet s;
        for (Index i = 0; i < l; ++i)
            if (f.mask >> i & 1) s.push_back(i + 1);
        out.count += mpz_class(1) << static_cast<unsigned>(s.size());
        supports.insert(std::move(s));
    }
    out.supports.assign(supports.begin(), supports.end());
    return out;
}

// ---------------------------------------------------------------- JSON

nlohmann::json rational_json(const Q& q)
{
    return {{"exact", to_string(q)}, {"decimal", to_decimal(q)}};
}

nlohmann::json to_json(const SparseVector& x)
{
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [i, c] : x.entries()) coeffs[std::to_string(i)] = to_string(c);
    return {{"coeffs", coeffs}};
}

SparseVector vector_from_json(const nlohmann::json& j)
{
    std::map<Index, Q> m;
    for (const auto& [k, v] : j.at("coeffs").items()) m[std::stoll(k)] = parse_rational(v.get<std::string>());
    return SparseVector(m);
}

nlohmann::json to_json(const FunctionalTree& f)
{
    if (f.leaf) return {{"leaf", {{"sign", f.sign}, {"index", f.index}}}};
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : f.children) kids.push_back(to_json(c));
    return {{"node",
             {{"weight", to_string(f.weight)}, {"level", f.level}, {"mode", to_string(f.mode)}, {"children", kids}}}};
}

FunctionalTree tree_from_json(const nlohmann::json& j)
{
    if (j.contains("leaf")) {
        const auto& l = j.at("leaf");
        return FunctionalTree::make_leaf(l.at("sign").get<int>(), l.at("index").get<Index>());
    }
    const auto& n = j.at("node");
    std::vector<FunctionalTree> kids;
    for (const auto& c : n.at("children")) kids.push_back(tree_from_json(c));
    std::string mode = n.at("mode").get<std::string>();
    if (mode != "adm" && mode != "allow") throw BadInputError("unknown node mode: " + mode);
    return FunctionalTree::make_node(parse_rational(n.at("weight").get<std::string>()), n.at("level").get<int>(),
                                     mode == "adm" ? Mode::Admissible : Mode::Allowable, std::move(kids));
}

} // namespace tslab
