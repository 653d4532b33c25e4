#include "tslab/setfamilies.hpp"

#include <algorithm>
#include <numeric>
#include <cctype>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace tslab {

FiniteSet make_set(std::vector<Index> elems)
{
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    if (!elems.empty() && elems.front() < 1)
        throw BadInputError("set elements must be positive integers");
    return elems;
}

std::string to_string(const FiniteSet& s)
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "}";
}

// ---------------------------------------------------------------- descriptors

bool FamilyDescriptor::operator==(const FamilyDescriptor& o) const
{
    if (kind != o.kind || param != o.param) return false;
    auto eq = [](const FamilyPtr& a, const FamilyPtr& b) {
        if (!a || !b) return !a && !b;
        return *a == *b;
    };
    return eq(outer, o.outer) && eq(inner, o.inner);
}

FamilyPtr schreier(int n)
{
    if (n < 0) throw BadInputError("Schreier index must be >= 0");
    auto f = std::make_shared<FamilyDescriptor>();
    f->kind = FamilyDescriptor::Kind::Schreier;
    f->param = n;
    return f;
}

FamilyPtr cardinality(int k)
{
    if (k < 1) throw BadInputError("cardinality bound must be >= 1");
    auto f = std::make_shared<FamilyDescriptor>();
    f->kind = FamilyDescriptor::Kind::Cardinality;
    f->param = k;
    return f;
}

FamilyPtr bracket(FamilyPtr outer, FamilyPtr inner)
{
    auto f = std::make_shared<FamilyDescriptor>();
    f->kind = FamilyDescriptor::Kind::Bracket;
    f->outer = std::move(outer);
    f->inner = std::move(inner);
    return f;
}

FamilyPtr prime(FamilyPtr base)
{
    auto f = std::make_shared<FamilyDescriptor>();
    f->kind = FamilyDescriptor::Kind::Prime;
    f->outer = std::move(base);
    return f;
}

std::string to_string(const FamilyDescriptor& f)
{
    switch (f.kind) {
    case FamilyDescriptor::Kind::Schreier: return "S(" + std::to_string(f.param) + ")";
    case FamilyDescriptor::Kind::Cardinality: return "A(" + std::to_string(f.param) + ")";
    case FamilyDescriptor::Kind::Bracket:
        return "B(" + to_string(*f.outer) + "," + to_string(*f.inner) + ")";
    case FamilyDescriptor::Kind::Prime: return "P(" + to_string(*f.outer) + ")";
    }
    return "?";
}

namespace {

class FamilyParser {
public:
    explicit FamilyParser(const std::string& s) : s_(s) {}

    FamilyPtr parse_all()
    {
        auto f = parse();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return f;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const
    {
        throw BadInputError("family descriptor '" + s_ + "': " + why);
    }
    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    void expect(char c)
    {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    int number()
    {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_ || pos_ - start > 6) fail("expected a small non-negative integer");
        return std::stoi(s_.substr(start, pos_ - start));
    }
    FamilyPtr parse()
    {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s_[pos_++])));
        expect('(');
        FamilyPtr out;
        switch (c) {
        case 'S': out = schreier(number()); break;
        case 'A': out = cardinality(number()); break;
        case 'B': {
            auto o = parse();
            expect(',');
            auto i = parse();
            out = bracket(o, i);
            break;
        }
        case 'P': out = prime(parse()); break;
        default: fail(std::string("unknown family kind '") + c + "'");
        }
        expect(')');
        return out;
    }
};

} // namespace

FamilyPtr parse_family(const std::string& text)
{
    return FamilyParser(text).parse_all();
}

// ---------------------------------------------------------------- automaton
//
// Every node state is encoded as [len, payload...] so composite states can be
// parsed without knowing the depth of their children.

struct FamilyAutomaton::Node {
    enum class Op { Single, Budget, Count, Bracket, Prime } op;
    int k = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = FamilyAutomaton::Node;
using NodePtr = std::shared_ptr<const Node>;
using State = FamilyAutomaton::State;

NodePtr compile(const FamilyDescriptor& f)
{
    auto n = std::make_shared<Node>();
    switch (f.kind) {
    case FamilyDescriptor::Kind::Schreier:
        if (f.param == 0) {
            n->op = Node::Op::Single;
        } else if (f.param == 1) {
            n->op = Node::Op::Budget;
        } else {
            // F_n = F_1[F_{n-1}]
            n->op = Node::Op::Bracket;
            n->a = compile(*schreier(1));
            n->b = compile(*schreier(f.param - 1));
        }
        break;
    case FamilyDescriptor::Kind::Cardinality:
        n->op = Node::Op::Count;
        n->k = f.param;
        break;
    case FamilyDescriptor::Kind::Bracket:
        n->op = Node::Op::Bracket;
        n->a = compile(*f.outer);
        n->b = compile(*f.inner);
        break;
    case FamilyDescriptor::Kind::Prime:
        n->op = Node::Op::Prime;
        n->a = compile(*f.outer);
        break;
    }
    return n;
}

std::size_t enc_size(const std::int64_t* p)
{
    return static_cast<std::size_t>(p[0]) + 1;
}

void init_node(const Node& n, State& out)
{
    switch (n.op) {
    case Node::Op::Single: out.insert(out.end(), {1, 0}); break;
    case Node::Op::Budget: out.insert(out.end(), {1, -1}); break;
    case Node::Op::Count: out.insert(out.end(), {1, n.k}); break;
    case Node::Op::Bracket: {
        std::size_t at = out.size();
        out.push_back(0);
        init_node(*n.a, out);
        out.push_back(0);
        init_node(*n.b, out);
        out[at] = static_cast<std::int64_t>(out.size() - at - 1);
        break;
    }
    case Node::Op::Prime: {
        std::size_t at = out.size();
        out.push_back(0);
        out.push_back(1);
        init_node(*n.a, out);
        init_node(*n.a, out);
        out[at] = static_cast<std::int64_t>(out.size() - at - 1);
        break;
    }
    }
}

using PairList = std::vector<std::pair<State, State>>;

void write_pairs(PairList& pairs, State& out)
{
    for (auto& p : pairs)
        if (p.second < p.first) std::swap(p.first, p.second);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::size_t at = out.size();
    out.push_back(0);
    out.push_back(static_cast<std::int64_t>(pairs.size()));
    for (auto& p : pairs) {
        out.insert(out.end(), p.first.begin(), p.first.end());
        out.insert(out.end(), p.second.begin(), p.second.end());
    }
    out[at] = static_cast<std::int64_t>(out.size() - at - 1);
}

PairList read_pairs(const std::int64_t* p)
{
    PairList pairs;
    std::int64_t count = p[1];
    const std::int64_t* q = p + 2;
    for (std::int64_t i = 0; i < count; ++i) {
        std::size_t sa = enc_size(q);
        State first(q, q + sa);
        q += sa;
        std::size_t sb = enc_size(q);
        State second(q, q + sb);
        q += sb;
        pairs.emplace_back(std::move(first), std::move(second));
    }
    return pairs;
}

bool step_node(const Node& n, const std::int64_t* in, Index x, State& out)
{
    switch (n.op) {
    case Node::Op::Single:
        if (in[1] != 0) return false;
        out.insert(out.end(), {1, 1});
        return true;
    case Node::Op::Budget:
        if (in[1] < 0) {
            out.insert(out.end(), {1, x - 1});
            return true;
        }
        if (in[1] < 1) return false;
        out.insert(out.end(), {1, in[1] - 1});
        return true;
    case Node::Op::Count:
        if (in[1] < 1) return false;
        out.insert(out.end(), {1, in[1] - 1});
        return true;
    case Node::Op::Bracket: {
        const std::int64_t* outer = in + 1;
        const std::int64_t* flag = outer + enc_size(outer);
        const std::int64_t* inner = flag + 1;
        std::size_t at = out.size();
        out.push_back(0);
        if (*flag) {
            // Greedy: keep growing the current inner block while it stays legal.
            State grown;
            if (step_node(*n.b, inner, x, grown)) {
                out.insert(out.end(), outer, outer + enc_size(outer));
                out.push_back(1);
                out.insert(out.end(), grown.begin(), grown.end());
                out[at] = static_cast<std::int64_t>(out.size() - at - 1);
                return true;
            }
        }
        State outer_next, fresh, started;
        if (!step_node(*n.a, outer, x, outer_next)) {
            out.resize(at);
            return false;
        }
        init_node(*n.b, fresh);
        if (!step_node(*n.b, fresh.data(), x, started)) {
            out.resize(at);
            return false;
        }
        out.insert(out.end(), outer_next.begin(), outer_next.end());
        out.push_back(1);
        out.insert(out.end(), started.begin(), started.end());
        out[at] = static_cast<std::int64_t>(out.size() - at - 1);
        return true;
    }
    case Node::Op::Prime: {
        PairList next;
        for (auto& p : read_pairs(in)) {
            State s;
            if (step_node(*n.a, p.first.data(), x, s)) next.emplace_back(s, p.second);
            s.clear();
            if (step_node(*n.a, p.second.data(), x, s)) next.emplace_back(p.first, s);
        }
        if (next.empty()) return false;
        write_pairs(next, out);
        return true;
    }
    }
    return false;
}

void cap_node(const Node& n, const std::int64_t* in, std::int64_t r, State& out)
{
    switch (n.op) {
    case Node::Op::Single: out.insert(out.end(), in, in + 2); break;
    case Node::Op::Budget:
    case Node::Op::Count: out.insert(out.end(), {1, in[1] < 0 ? in[1] : std::min(in[1], r)}); break;
    case Node::Op::Bracket: {
        const std::int64_t* outer = in + 1;
        const std::int64_t* flag = outer + enc_size(outer);
        const std::int64_t* inner = flag + 1;
        std::size_t at = out.size();
        out.push_back(0);
        cap_node(*n.a, outer, r, out);
        out.push_back(*flag);
        cap_node(*n.b, inner, r, out);
        out[at] = static_cast<std::int64_t>(out.size() - at - 1);
        break;
    }
    case Node::Op::Prime: {
        PairList pairs;
        for (auto& p : read_pairs(in)) {
            State a, b;
            cap_node(*n.a, p.first.data(), r, a);
            cap_node(*n.a, p.second.data(), r, b);
            pairs.emplace_back(std::move(a), std::move(b));
        }
        write_pairs(pairs, out);
        break;
    }
    }
}

} // namespace

FamilyAutomaton::FamilyAutomaton(const FamilyDescriptor& f) : root_(compile(f)) {}

FamilyAutomaton::State FamilyAutomaton::initial() const
{
    State s;
    init_node(*root_, s);
    return s;
}

bool FamilyAutomaton::step(const State& s, Index x, State& out) const
{
    out.clear();
    return step_node(*root_, s.data(), x, out);
}

void FamilyAutomaton::cap(State& s, std::int64_t remaining) const
{
    State out;
    cap_node(*root_, s.data(), remaining, out);
    s.swap(out);
}

std::size_t VectorHash::operator()(const std::vector<std::int64_t>& v) const noexcept
{
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------- membership

bool member(const FiniteSet& a, const FamilyDescriptor& f)
{
    FamilyAutomaton aut(f);
    auto s = aut.initial();
    FamilyAutomaton::State next;
    for (Index x : a) {
        if (!aut.step(s, x, next)) return false;
        s.swap(next);
    }
    return true;
}

bool member_modified(const FiniteSet& a, int n)
{
    const int m = static_cast<int>(a.size());
    if (m == 0) return true;
    if (m > 20) throw ResourceLimitError("member_modified supports at most 20 elements");
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    // level[S]: S (as a subset of a) lies in F_l^M for the current l.
    std::vector<char> level(std::size_t{full} + 1, 0);
    for (std::uint32_t s = 0; s <= full; ++s) level[s] = std::popcount(s) <= 1;
    for (int l = 1; l <= n; ++l) {
        // parts[S]: fewest F_{l-1}^M parts partitioning S.
        std::vector<int> parts(std::size_t{full} + 1, 1 << 20);
        parts[0] = 0;
        for (std::uint32_t s = 1; s <= full; ++s) {
            std::uint32_t low = s & (~s + 1);
            std::uint32_t rest = s ^ low;
            // Enumerate the part holding the lowest element of S.
            for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
                std::uint32_t part = sub | low;
                if (level[part] && parts[s ^ part] + 1 < parts[s]) parts[s] = parts[s ^ part] + 1;
                if (sub == 0) break;
            }
        }
        std::vector<char> next(std::size_t{full} + 1, 0);
        for (std::uint32_t s = 0; s <= full; ++s) {
            if (s == 0) {
                next[s] = 1;
                continue;
            }
            Index mn = a[static_cast<std::size_t>(std::countr_zero(s))];
            next[s] = parts[s] <= mn;
        }
        level.swap(next);
    }
    return level[full];
}

bool is_admissible(const std::vector<FiniteSet>& parts, const FamilyDescriptor& f)
{
    FiniteSet mins;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].empty()) return false;
        if (i > 0 && parts[i - 1].back() >= parts[i].front()) return false;
        mins.push_back(parts[i].front());
    }
    return member(mins, f);
}

bool is_allowable(const std::vector<FiniteSet>& parts, const FamilyDescriptor& f)
{
    FiniteSet all, mins;
    for (const auto& p : parts) {
        if (p.empty()) return false;
        all.insert(all.end(), p.begin(), p.end());
        mins.push_back(p.front());
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) return false;
    std::sort(mins.begin(), mins.end());
    return member(mins, f);
}

namespace {

// Sum of the k largest inserted values; values are ranked once up front.
class TopK {
public:
    explicit TopK(const std::vector<Q>& values) : order_(values.size()), rank_(values.size())
    {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
        for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
        count_.assign(order_.size() + 1, 0);
        sum_.assign(order_.size() + 1, Q(0));
        values_ = &values;
    }
    void insert(std::size_t item)
    {
        const Q& v = (*values_)[item];
        for (std::size_t p = rank_[item] + 1; p < count_.size(); p += p & (~p + 1)) {
            ++count_[p];
            sum_[p] += v;
        }
    }
    Q top(std::int64_t k) const
    {
        Q total = 0;
        std::size_t pos = 0;
        std::int64_t left = k;
        std::size_t step = 1;
        while (step * 2 < count_.size()) step *= 2;
        for (; step > 0; step /= 2) {
            std::size_t next = pos + step;
            if (next < count_.size() && count_[next] <= left) {
                pos = next;
                left -= count_[next];
                total += sum_[next];
            }
        }
        return total;
    }

private:
    std::vector<std::size_t> order_, rank_;
    std::vector<std::int64_t> count_;
    std::vector<Q> sum_;
    const std::vector<Q>* values_ = nullptr;
};

} // namespace

Q max_weight(const std::map<Index, Q>& a, const FamilyDescriptor& f)
{
    std::vector<std::pair<Index, Q>> items;
    for (const auto& [i, c] : a) {
        if (c < 0) throw BadInputError("max_weight needs non-negative coefficients");
        if (c > 0) items.emplace_back(i, c);
    }
    const std::int64_t n = static_cast<std::int64_t>(items.size());
    using K = FamilyDescriptor::Kind;
    if ((f.kind == K::Schreier && f.param <= 1) || f.kind == K::Cardinality) {
        std::vector<Q> values;
        for (const auto& it : items) values.push_back(it.second);
        TopK top(values);
        if (f.kind == K::Cardinality || f.param == 0) {
            for (std::size_t t = 0; t < values.size(); ++t) top.insert(t);
            return top.top(f.kind == K::Cardinality ? f.param : 1);
        }
        // S(1): pick the minimum g, then the g-1 heaviest later items.
        Q best = 0;
        for (std::int64_t t = n - 1; t >= 0; --t) {
            const auto& [g, c] = items[static_cast<std::size_t>(t)];
            Q v = c + top.top(g - 1);
            if (v > best) best = v;
            top.insert(static_cast<std::size_t>(t));
        }
        return best;
    }
    if (f.kind == K::Prime && f.outer &&
        ((f.outer->kind == K::Schreier && f.outer->param <= 1) || f.outer->kind == K::Cardinality)) {
        const auto& base = *f.outer;
        if (base.kind == K::Cardinality || base.param == 0) {
            auto doubled = cardinality(base.kind == K::Cardinality ? 2 * base.param : 2);
            return max_weight(a, *doubled);
        }
        // P(S(1)) with minima a < b: items strictly between a and b can only
        // join the a-part, so feasibility is |X in (a,b)| <= a-1 and
        // |X| <= a+b-2, a laminar matroid where greedy is exact.
        std::vector<std::size_t> by_value(items.size());
        std::iota(by_value.begin(), by_value.end(), std::size_t{0});
        std::stable_sort(by_value.begin(), by_value.end(),
                         [&](std::size_t x, std::size_t y) { return items[x].second > items[y].second; });
        Q best = max_weight(a, *schreier(1));
        for (std::size_t i = 0; i < items.size(); ++i) {
            for (std::size_t j = i + 1; j < items.size(); ++j) {
                const Index ma = items[i].first;
                const Index mb = items[j].first;
                Q v = items[i].second + items[j].second;
                std::int64_t inner = 0, total = 0;
                for (std::size_t r : by_value) {
                    if (r <= i || r == j) continue;
                    if (total == ma + mb - 2) break;
                    if (r < j) {
                        if (inner == ma - 1) continue;
                        ++inner;
                    }
                    ++total;
                    v += items[r].second;
                }
                if (v > best) best = v;
            }
        }
        return best;
    }
    FamilyAutomaton aut(f);
    // best[t][state]: largest sum over members extending the current prefix
    // using only items t..n-1.
    std::vector<std::unordered_map<State, Q, VectorHash>> memo(static_cast<std::size_t>(n) + 1);
    std::function<Q(std::int64_t, const State&)> go = [&](std::int64_t t, const State& s) -> Q {
        if (t == n) return Q(0);
        auto& table = memo[static_cast<std::size_t>(t)];
        auto it = table.find(s);
        if (it != table.end()) return it->second;
        Q best = go(t + 1, s);
        State next;
        if (aut.step(s, items[static_cast<std::size_t>(t)].first, next)) {
            aut.cap(next, n - t - 1);
            Q take = items[static_cast<std::size_t>(t)].second + go(t + 1, next);
            if (take > best) best = take;
        }
        table.emplace(s, best);
        return best;
    };
    auto start = aut.initial();
    aut.cap(start, n);
    return go(0, start);
}

// ---------------------------------------------------------------- enumeration

std::vector<FiniteSet> members_in_window(const FamilyDescriptor& f, Index lo, Index hi)
{
    if (lo < 1) lo = 1;
    std::vector<FiniteSet> out;
    if (hi < lo) {
        out.push_back({});
        return out;
    }
    FamilyAutomaton aut(f);
    std::uint64_t visited = 0;
    FiniteSet cur;
    std::function<void(const State&, Index)> dfs = [&](const State& s, Index from) {
        if (++visited > kEnumerationCap)
            throw ResourceLimitError("enumeration exceeded 2^24 candidate sets");
        out.push_back(cur);
        State next;
        for (Index x = from; x <= hi; ++x) {
            // Hereditary: a rejected prefix cannot be completed.
            if (!aut.step(s, x, next)) continue;
            cur.push_back(x);
            State held = next;
            dfs(held, x + 1);
            cur.pop_back();
        }
    };
    dfs(aut.initial(), lo);
    return out;
}

std::vector<FiniteSet> maximal_members(const FamilyDescriptor& f, Index lo, Index hi)
{
    auto all = members_in_window(f, lo, hi);
    std::vector<FiniteSet> out;
    for (const auto& m : all) {
        bool maximal = true;
        for (Index y = std::max<Index>(lo, 1); y <= hi && maximal; ++y) {
            if (std::binary_search(m.begin(), m.end(), y)) continue;
            FiniteSet bigger = m;
            bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), y), y);
            if (member(bigger, f)) maximal = false;
        }
        if (maximal) out.push_back(m);
    }
    return out;
}

} // namespace tslab
