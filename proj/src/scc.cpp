#include "tslab/scc.hpp"

#include "tslab/normengine.hpp"

#include <algorithm>
#include <memory>
#include <regex>

namespace tslab {

IndexStream::IndexStream(Next next, std::string description)
    : next_(std::move(next)), description_(std::move(description))
{
}

IndexStream IndexStream::progression(Index start, Index step)
{
    if (start < 1 || step < 1) throw BadInputError("progression needs start >= 1 and step >= 1");
    auto next = [start, step](Index after) -> std::optional<Index> {
        if (after < start) return start;
        return start + ((after - start) / step + 1) * step;
    };
    return IndexStream(next, std::to_string(start) + "+" + std::to_string(step) + "n");
}

IndexStream IndexStream::list(FiniteSet elements)
{
    auto shared = std::make_shared<FiniteSet>(make_set(std::move(elements)));
    auto next = [shared](Index after) -> std::optional<Index> {
        auto it = std::upper_bound(shared->begin(), shared->end(), after);
        if (it == shared->end()) return std::nullopt;
        return *it;
    };
    std::string desc = "list:";
    for (std::size_t i = 0; i < shared->size(); ++i) desc += (i ? "," : "") + std::to_string((*shared)[i]);
    return IndexStream(next, desc);
}

IndexStream IndexStream::parse(const std::string& raw)
{
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    if (text == "naturals") return progression(1, 1);
    if (text == "evens") return progression(2, 2);
    if (text == "odds") return progression(1, 2);
    std::smatch m;
    if (std::regex_match(text, m, std::regex(R"((\d+)\+(\d+)n)")))
        return progression(std::stoll(m[1]), std::stoll(m[2]));
    if (text.rfind("list:", 0) == 0) {
        FiniteSet elems;
        std::regex num(R"(\d+)");
        for (auto it = std::sregex_iterator(text.begin() + 5, text.end(), num); it != std::sregex_iterator(); ++it)
            elems.push_back(std::stoll(it->str()));
        if (elems.empty()) throw BadInputError("empty index list");
        return list(elems);
    }
    throw BadInputError("bad index stream: " + raw);
}

FiniteSet IndexStream::take_after(Index after, std::size_t count) const
{
    FiniteSet out;
    out.reserve(count);
    Index cur = after;
    for (std::size_t i = 0; i < count; ++i) {
        auto v = next_(cur);
        if (!v) throw BadInputError("index stream " + description_ + " ran out after " + std::to_string(cur));
        out.push_back(*v);
        cur = *v;
    }
    return out;
}

std::string to_string(SccKind k)
{
    switch (k) {
    case SccKind::Basic: return "basic";
    case SccKind::Block: return "block";
    case SccKind::Relative: return "relative";
    }
    return "?";
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

// Least integer strictly greater than r > 0.
Index smallest_above(const Q& r)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    if (!f.fits_slong_p() || f > (Index{1} << 40)) throw ResourceLimitError("s.c.c. parameter too large");
    return static_cast<Index>(f.get_si()) + 1;
}

Q ratio(Index a, Index b)
{
    Q q(a, b);
    q.canonicalize();
    return q;
}

void guard(std::size_t total, Index window)
{
    if (total > kSccSupportCap) throw ResourceLimitError("s.c.c. support exceeds " + std::to_string(kSccSupportCap));
    if (window > (Index{1} << 60)) throw ResourceLimitError("s.c.c. window index overflow");
}

// Uniform combination on the first m0 elements of D above max(after, m0).
void basic_level1(const Q& eps, const IndexStream& d, Index after, const Q& factor,
                  std::map<Index, Q>& out, std::size_t& total)
{
    Index m0 = smallest_above(1 / eps);
    guard(total + static_cast<std::size_t>(m0), m0);
    Q c = factor / m0;
    for (Index i : d.take_after(std::max(after, m0), static_cast<std::size_t>(m0))) out[i] += c;
    total += static_cast<std::size_t>(m0);
}

Index basic_recursive(const Q& eps, int n, const IndexStream& d, Index after, const Q& factor,
                      std::map<Index, Q>& out, std::size_t& total)
{
    if (n == 1) {
        basic_level1(eps, d, after, factor, out, total);
        return out.rbegin()->first;
    }
    Index m0 = smallest_above(2 / eps);
    Index window = std::max(m0, after);
    Q f = factor / m0;
    for (Index k = 0; k < m0; ++k) {
        Index end = basic_recursive(ratio(1, 2 * window), n - 1, d, window, f, out, total);
        window = std::max(2 * window + 1, end);
        guard(total, window);
    }
    return out.rbegin()->first;
}

// s = floor(1/eps)+1 maximal S(1) blocks: each block has as many points as
// its minimum and weight 1/(s c) per point. On an arithmetic progression an
// S(1) set then carries mass at most 1/s.
std::map<Index, Q> basic_compact2(const Q& eps, const IndexStream& d)
{
    Index s = smallest_above(1 / eps);
    std::map<Index, Q> out;
    Index cur = s - 1;
    std::size_t total = 0;
    for (Index b = 0; b < s; ++b) {
        auto first = d.next_after(cur);
        if (!first) throw BadInputError("index stream " + d.description() + " ran out");
        Index c = *first;
        guard(total + static_cast<std::size_t>(c), c);
        FiniteSet block = d.take_after(cur, static_cast<std::size_t>(c));
        Q w = 1 / (Q(s) * c);
        for (Index i : block) out[i] = w;
        total += static_cast<std::size_t>(c);
        cur = block.back();
    }
    return out;
}

SccWitness basic_witness(const std::map<Index, Q>& coeffs, const Q& eps, int n)
{
    SccWitness w;
    w.vector = SparseVector(coeffs);
    w.epsilon = eps;
    w.level = n;
    w.kind = SccKind::Basic;
    for (const auto& [i, a] : w.vector.entries()) {
        w.anchors.push_back(i);
        w.coefficients.push_back(a);
        w.blocks.push_back(SparseVector::unit(i));
    }
    return w;
}

} // namespace

SccWitness make_basic_scc(const Q& eps, int n, const IndexStream& d, SccStrategy strategy)
{
    if (eps <= 0) throw BadInputError("epsilon must be positive");
    if (n < 1) throw BadInputError("basic s.c.c. level must be >= 1");
    if (strategy == SccStrategy::Compact && n == 2) {
        auto coeffs = basic_compact2(eps, d);
        if (check_basic_scc(SparseVector(coeffs), eps, 2)) return basic_witness(coeffs, eps, n);
    }
    std::map<Index, Q> out;
    std::size_t total = 0;
    basic_recursive(eps, n, d, 0, Q(1), out, total);
    return basic_witness(out, eps, n);
}

bool check_basic_scc(const SparseVector& x, const Q& eps, int n, const SpaceSpec* relative_to)
{
    if (x.empty() || n < 1) return false;
    Q sum = 0;
    for (const auto& [i, a] : x.entries()) {
        if (a < 0) return false;
        sum += a;
    }
    if (sum != 1) return false;
    FamilyPtr supp_family;
    FamilyPtr small_family;
    if (!relative_to) {
        supp_family = schreier(n);
        small_family = schreier(n - 1);
    } else {
        if (!relative_to->has_level(n)) return false;
        supp_family = relative_to->level(n).family;
        if (supp_family->kind != FamilyDescriptor::Kind::Schreier || supp_family->param < 1) return false;
        small_family = prime(schreier(supp_family->param - 1));
        const auto& e = x.entries();
        for (std::size_t k = 1; k < e.size(); ++k)
            if (e[k].second > e[k - 1].second) return false;
    }
    if (!member(x.support(), *supp_family)) return false;
    return max_weight(x.as_map(), *small_family) < eps;
}

SccWitness make_relative_scc(const Q& eps, int n, const SpaceSpec& spec, const IndexStream& d)
{
    if (!spec.has_level(n)) throw BadInputError("space has no level " + std::to_string(n));
    FamilyPtr fam = spec.level(n).family;
    if (fam->kind != FamilyDescriptor::Kind::Schreier || fam->param < 1)
        throw BadInputError("relative s.c.c. needs a level family S(k) with k >= 1");
    SccWitness w = make_basic_scc(eps / 2, fam->param, d, SccStrategy::Compact);
    if (!check_basic_scc(w.vector, eps, n, &spec))
        throw ResourceLimitError("relative s.c.c. construction did not certify");
    w.epsilon = eps;
    w.level = n;
    w.kind = SccKind::Relative;
    return w;
}

namespace {

void check_successive(const std::vector<SparseVector>& blocks)
{
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (blocks[k].empty()) throw BadInputError("empty block");
        if (k > 0 && blocks[k - 1].entries().back().first >= blocks[k].entries().front().first)
            throw BadInputError("blocks are not successive");
    }
    if (!blocks.empty() && blocks.front().entries().front().first <= 2)
        throw BadInputError("the first block must start after index 2");
}

SccWitness transplant(const SccWitness& basic, const std::vector<SparseVector>& blocks,
                      const std::map<Index, std::size_t>& by_anchor)
{
    SccWitness w;
    w.epsilon = basic.epsilon;
    w.level = basic.level;
    w.kind = SccKind::Block;
    SparseVector sum;
    for (std::size_t k = 0; k < basic.anchors.size(); ++k) {
        const SparseVector& z = blocks[by_anchor.at(basic.anchors[k])];
        w.anchors.push_back(basic.anchors[k]);
        w.coefficients.push_back(basic.coefficients[k]);
        w.blocks.push_back(z);
        sum = sum + z.scaled(basic.coefficients[k]);
    }
    w.vector = sum;
    return w;
}

} // namespace

SccWitness make_block_scc(const std::vector<SparseVector>& blocks, const Q& eps, int j, SccStrategy strategy)
{
    check_successive(blocks);
    FiniteSet anchors;
    std::map<Index, std::size_t> by_anchor;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        anchors.push_back(blocks[k].entries().back().first);
        by_anchor[anchors.back()] = k;
    }
    SccWitness basic;
    try {
        basic = make_basic_scc(eps, j, IndexStream::list(anchors), strategy);
    } catch (const BadInputError&) {
        throw BadInputError("not enough blocks for an (" + to_string(eps) + "," + std::to_string(j) + ")-s.c.c.");
    }
    return transplant(basic, blocks, by_anchor);
}

SccWitness make_relative_block_scc(const std::vector<SparseVector>& blocks, const Q& eps, int j,
                                   const SpaceSpec& spec)
{
    check_successive(blocks);
    FiniteSet anchors;
    std::map<Index, std::size_t> by_anchor;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        anchors.push_back(blocks[k].entries().back().first);
        by_anchor[anchors.back()] = k;
    }
    SccWitness basic;
    try {
        basic = make_relative_scc(eps, j, spec, IndexStream::list(anchors));
    } catch (const BadInputError&) {
        throw BadInputError("not enough blocks for a relative (" + to_string(eps) + "," + std::to_string(j) +
                            ")-s.c.c.");
    }
    SccWitness w = transplant(basic, blocks, by_anchor);
    w.kind = SccKind::Relative;
    return w;
}

bool check_block_scc(const SccWitness& w, const SpaceSpec* relative_to)
{
    std::size_t n = w.anchors.size();
    if (n == 0 || w.coefficients.size() != n || w.blocks.size() != n) return false;
    SparseVector sum;
    std::map<Index, Q> basic;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& z = w.blocks[k];
        if (z.empty()) return false;
        Index lo = z.entries().front().first;
        Index hi = z.entries().back().first;
        if (k == 0 && lo <= 2) return false;
        if (k > 0 && w.anchors[k - 1] >= lo) return false;
        if (hi > w.anchors[k]) return false;
        basic[w.anchors[k]] = w.coefficients[k];
        sum = sum + z.scaled(w.coefficients[k]);
    }
    if (!(sum == w.vector)) return false;
    return check_basic_scc(SparseVector(basic), w.epsilon, w.level, relative_to);
}

BlockStream unit_blocks(const IndexStream& d)
{
    return [d](Index after) {
        auto v = d.next_after(after);
        if (!v) throw BadInputError("index stream " + d.description() + " ran out");
        return SparseVector::unit(*v);
    };
}

namespace {

// Successive blocks drawn lazily from a stream, exposed through their anchors.
struct LazyBlocks {
    BlockStream source;
    std::vector<SparseVector> made;
    std::map<Index, std::size_t> by_anchor;

    void extend()
    {
        Index after = made.empty() ? 2 : made.back().entries().back().first;
        SparseVector z = source(after);
        if (z.empty() || z.entries().front().first <= after) throw BadInputError("block stream is not successive");
        by_anchor[z.entries().back().first] = made.size();
        made.push_back(std::move(z));
    }
    std::optional<Index> next_anchor(Index after)
    {
        while (made.empty() || made.back().entries().back().first <= after) extend();
        return by_anchor.upper_bound(after)->first;
    }
};

SccWitness scc_of_stream(const BlockStream& source, const Q& eps, int j, Index after)
{
    auto lazy = std::make_shared<LazyBlocks>();
    lazy->source = [source, after](Index a) { return source(std::max(a, after)); };
    IndexStream anchors([lazy](Index a) { return lazy->next_anchor(a); }, "block anchors");
    SccWitness basic = make_basic_scc(eps, j, anchors, SccStrategy::Compact);
    return transplant(basic, lazy->made, lazy->by_anchor);
}

Q exact_norm(const SparseVector& x, const SpaceSpec& spec, int generation)
{
    SpaceSpec s = spec;
    s.exact = true;
    try {
        return norm(x, s).value;
    } catch (const ResourceLimitError& e) {
        throw ResourceLimitError("generation " + std::to_string(generation) + " of the seminormalization: " + e.what());
    }
}

BlockStream normalized(BlockStream source, const SpaceSpec& spec, int generation)
{
    return [source, spec, generation](Index after) {
        SparseVector z = source(after);
        if (z.empty()) throw BadInputError("zero block");
        return z.scaled(1 / exact_norm(z, spec, generation));
    };
}

} // namespace

SccWitness find_seminormalized_scc(const BlockStream& blocks, const Q& eps, int j, const SpaceSpec& spec,
                                   int generation_cap)
{
    BlockStream current = normalized(blocks, spec, 0);
    for (int g = 1; g <= generation_cap; ++g) {
        SccWitness w = scc_of_stream(current, eps, j, 2);
        Q value = exact_norm(w.vector, spec, g);
        w.norm = value;
        w.generations = g;
        if (2 * value >= 1) return w;
        BlockStream prev = current;
        current = normalized([prev, eps, j](Index after) { return scc_of_stream(prev, eps, j, after).vector; },
                             spec, g + 1);
    }
    throw ResourceLimitError("no seminormalized (" + to_string(eps) + "," + std::to_string(j) +
                             ")-s.c.c. within the generation cap of " + std::to_string(generation_cap));
}

SparseVector NestedTrees::vector(int r, int node) const
{
    std::map<Index, Q> out;
    std::vector<std::pair<int, Q>> stack{{node, Q(1)}};
    while (!stack.empty()) {
        auto [id, c] = stack.back();
        stack.pop_back();
        const Node& nd = nodes[static_cast<std::size_t>(id)];
        if (nd.depth == r) {
            out[nd.position] += c;
            continue;
        }
        for (int ch : nd.children) stack.emplace_back(ch, c * nodes[static_cast<std::size_t>(ch)].coefficient);
    }
    return SparseVector(out);
}

namespace {

struct TreeBuilder {
    const IndexStream& l;
    NestedTrees& t;

    Index first_after(Index after)
    {
        auto v = l.next_after(after);
        if (!v) throw BadInputError("index stream " + l.description() + " ran out");
        return *v;
    }

    int add_child(int parent, const Q& coefficient, Index position)
    {
        if (t.nodes.size() >= kSccSupportCap) throw ResourceLimitError("nested trees exceed the node cap");
        NestedTrees::Node nd;
        const auto& p = t.nodes[static_cast<std::size_t>(parent)];
        nd.path = p.path;
        nd.path.push_back(static_cast<int>(p.children.size()));
        nd.depth = p.depth + 1;
        nd.position = position;
        nd.coefficient = coefficient;
        nd.parent = parent;
        t.nodes.push_back(nd);
        int id = static_cast<int>(t.nodes.size()) - 1;
        t.nodes[static_cast<std::size_t>(parent)].children.push_back(id);
        return id;
    }

    // Children of `parent` (depth d) realizing j_{d+1} layers of the doubling
    // induction; returns the largest position used.
    Index layer(int parent, int d, const Q& eps, int j, const Q& factor, Index after)
    {
        bool last = d + 1 == t.height();
        Index maxpos = after;
        if (j == 1) {
            Index m0 = smallest_above((last ? 1 : 2) / eps);
            Index window = std::max(m0, after);
            for (Index k = 0; k < m0; ++k) {
                Index pos = first_after(window);
                int child = add_child(parent, factor / m0, pos);
                Index end = last ? pos : expand(child, d + 1, ratio(1, 2 * window), pos);
                maxpos = std::max(maxpos, end);
                window = last ? pos : std::max(2 * window + 1, end);
                guard(t.nodes.size(), window);
            }
            return maxpos;
        }
        Index m0 = smallest_above(2 / eps);
        Index window = std::max(m0, after);
        for (Index k = 0; k < m0; ++k) {
            Index end = layer(parent, d, ratio(1, 2 * window), j - 1, factor / m0, window);
            maxpos = std::max(maxpos, end);
            window = std::max(2 * window + 1, end);
            guard(t.nodes.size(), window);
        }
        return maxpos;
    }

    Index expand(int node, int d, const Q& eps, Index after)
    {
        return layer(node, d, eps, t.js[static_cast<std::size_t>(d)], Q(1), after);
    }
};

} // namespace

NestedTrees make_nested_trees(const Q& eps, const std::vector<int>& js, const IndexStream& l)
{
    if (eps <= 0) throw BadInputError("epsilon must be positive");
    if (js.empty()) throw BadInputError("need at least one level");
    for (int j : js)
        if (j < 1) throw BadInputError("tree levels must be >= 1");
    NestedTrees t;
    t.epsilon = eps;
    t.js = js;
    t.nodes.push_back(NestedTrees::Node{});
    TreeBuilder b{l, t};
    b.expand(0, 0, eps, 0);
    return t;
}

NestedTreesCheck check_nested_trees(const NestedTrees& t)
{
    NestedTreesCheck out;
    int n = t.height();
    std::vector<std::vector<int>> by_depth(static_cast<std::size_t>(n) + 1);
    for (std::size_t id = 0; id < t.nodes.size(); ++id) by_depth[static_cast<std::size_t>(t.nodes[id].depth)].push_back(static_cast<int>(id));
    std::vector<int> rank(t.nodes.size(), -1);
    for (int r = 1; r <= n; ++r) {
        const auto& ids = by_depth[static_cast<std::size_t>(r)];
        for (std::size_t k = 0; k < ids.size(); ++k) {
            rank[static_cast<std::size_t>(ids[k])] = static_cast<int>(k);
            if (k > 0 && t.nodes[static_cast<std::size_t>(ids[k - 1])].position >= t.nodes[static_cast<std::size_t>(ids[k])].position)
                out.ordered = false;
        }
    }
    for (const auto& nd : t.nodes) {
        if (nd.depth >= n) continue;
        Q sum = 0;
        for (int ch : nd.children) sum += t.nodes[static_cast<std::size_t>(ch)].coefficient;
        if (nd.children.empty() || sum != 1) out.coefficients = false;
    }
    for (std::size_t id = 0; id < t.nodes.size(); ++id) {
        const auto& nd = t.nodes[id];
        int level = 0;
        for (int r = nd.depth + 1; r <= n; ++r) {
            level += t.js[static_cast<std::size_t>(r - 1)];
            if (!check_basic_scc(t.vector(r, static_cast<int>(id)), t.epsilon, level)) out.basic = false;
        }
        if (nd.depth >= 1 && nd.depth < n) {
            const auto& row = by_depth[static_cast<std::size_t>(nd.depth)];
            std::size_t k = static_cast<std::size_t>(rank[id]);
            std::optional<Index> upper;
            if (k + 1 < row.size()) upper = t.nodes[static_cast<std::size_t>(row[k + 1])].position;
            for (int ch : nd.children) {
                Index p = t.nodes[static_cast<std::size_t>(ch)].position;
                if (p <= nd.position || (upper && p >= *upper)) out.interleaving = false;
            }
        }
    }
    return out;
}

Verdict RisReport::overall() const
{
    Verdict v = Verdict::Pass;
    for (const auto& c : clauses) {
        if (c.verdict == Verdict::Fail) return Verdict::Fail;
        if (c.verdict == Verdict::Indeterminate) v = Verdict::Indeterminate;
    }
    return v;
}

namespace {

// Verdict for ||x|| >= 1/2: exact norm when affordable, otherwise a lower
// bound from single-level functionals built on leaves.
Verdict at_least_half(const SccWitness& w, const SpaceSpec& spec, std::string& detail)
{
    if (w.norm) {
        detail = "norm " + to_string(*w.norm);
        return 2 * *w.norm >= 1 ? Verdict::Pass : Verdict::Fail;
    }
    Q lower = w.vector.linf();
    SparseVector a = w.vector.abs();
    for (int k = 1; k <= std::min(spec.level_count(), 16); ++k) {
        Level lv = spec.level(k);
        lower = std::max<Q>(lower, lv.theta * max_weight(a.as_map(), *lv.family));
    }
    if (2 * lower >= 1) {
        detail = "lower bound " + to_string(lower);
        return Verdict::Pass;
    }
    try {
        SpaceSpec s = spec;
        s.exact = true;
        Q value = norm(w.vector, s).value;
        detail = "norm " + to_string(value);
        return 2 * value >= 1 ? Verdict::Pass : Verdict::Fail;
    } catch (const ResourceLimitError&) {
        detail = "lower bound " + to_string(lower) + ", exact norm out of reach";
        return Verdict::Indeterminate;
    }
}

Verdict unit_blocks_verdict(const SccWitness& w, const SpaceSpec& spec)
{
    if (w.kind != SccKind::Block) return Verdict::Pass;
    SpaceSpec s = spec;
    s.exact = true;
    for (const auto& z : w.blocks) {
        try {
            if (norm(z, s).value != 1) return Verdict::Fail;
        } catch (const ResourceLimitError&) {
            return Verdict::Indeterminate;
        }
    }
    return Verdict::Pass;
}

Verdict combine(Verdict a, Verdict b)
{
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Indeterminate || b == Verdict::Indeterminate) return Verdict::Indeterminate;
    return Verdict::Pass;
}

void check_plain(const RisWitness& w, const SpaceSpec& spec, bool strict, RisReport& rep)
{
    const auto& t = w.indices;
    std::size_t n = w.blocks.size();
    std::vector<Q> rho;
    for (std::size_t k = 0; k + 1 < n; ++k) rho.push_back(spec.level(t[k]).theta / spec.level(t[k + 1]).theta);
    for (std::size_t k = 0; k < rho.size(); ++k) {
        ClauseResult c{"a" + std::to_string(k + 1), Verdict::Pass, "ratio " + to_string(rho[k])};
        if (t[k] >= t[k + 1] || rho[k] <= 2) c.verdict = Verdict::Fail;
        if (k > 0 && (strict ? rho[k] <= rho[k - 1] : rho[k] < rho[k - 1])) {
            c.verdict = Verdict::Fail;
            c.detail += " not increasing";
        }
        rep.clauses.push_back(c);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const SccWitness& z = w.blocks[k];
        Q th = spec.level(t[k]).theta;
        ClauseResult c{"b" + std::to_string(k + 1), Verdict::Pass, ""};
        bool structural = z.level == t[k] && z.epsilon <= th * th && check_block_scc(z);
        if (!structural) {
            c.verdict = Verdict::Fail;
            c.detail = "not a (theta^2, t)-s.c.c.";
        } else {
            c.verdict = combine(at_least_half(z, spec, c.detail), unit_blocks_verdict(z, spec));
        }
        rep.clauses.push_back(c);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        Q l1 = w.blocks[k].vector.l1();
        rep.clauses.push_back({"c" + std::to_string(k + 1), l1 <= rho[k] ? Verdict::Pass : Verdict::Fail,
                               "l1 " + to_string(l1) + " vs " + to_string(rho[k])});
    }
}

// m_j = 1 / theta_j, which is an integer for the spaces this context targets.
mpz_class m_of(const SpaceSpec& spec, int j)
{
    Q inv = 1 / spec.level(j).theta;
    return inv.get_num() / inv.get_den();
}

void check_norming(const RisWitness& w, const SpaceSpec& spec, RisReport& rep)
{
    const auto& js = w.indices;
    std::size_t n = w.blocks.size();
    {
        ClauseResult c{"i", Verdict::Pass, ""};
        for (std::size_t k = 0; k < n; ++k)
            if (js[k] < 2 || (k > 0 && js[k] <= js[k - 1])) c.verdict = Verdict::Fail;
        rep.clauses.push_back(c);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const SccWitness& x = w.blocks[k];
        Q m = Q(m_of(spec, js[k]));
        ClauseResult c{"ii" + std::to_string(k + 1), Verdict::Pass, ""};
        bool structural = x.level == js[k] && x.epsilon * m * m * m * m <= 1 && check_block_scc(x, &spec);
        if (!structural) {
            c.verdict = Verdict::Fail;
            c.detail = "not a (1/m^4, j)-s.c.c.";
        } else {
            c.verdict = combine(at_least_half(x, spec, c.detail), unit_blocks_verdict(x, spec));
        }
        rep.clauses.push_back(c);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        ClauseResult c{"iii" + std::to_string(k + 1), Verdict::Pass, ""};
        Index lk = w.blocks[k].vector.entries().back().first;
        Q inv_m = 1 / Q(m_of(spec, js[k]));
        int nk = 0;
        Q tau = 1;
        while (!(Q(lk) * tau < inv_m)) {
            ++nk;
            tau /= 2;
        }
        HeavySupports o = enumerate_heavy_supports(spec, lk, tau);
        mpz_class next_m = m_of(spec, js[k + 1]);
        Index next_min = w.blocks[k + 1].vector.entries().front().first;
        bool ok = next_m > o.count && mpz_class(static_cast<long>(next_min)) > o.count;
        c.detail = "n_k " + std::to_string(nk) + ", #O " + (o.over_approximate ? "<= " : "") + o.count.get_str();
        if (ok) c.verdict = Verdict::Pass;
        else c.verdict = o.over_approximate ? Verdict::Indeterminate : Verdict::Fail;
        rep.clauses.push_back(c);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        Q l1 = w.blocks[k].vector.l1();
        Q bound = Q(m_of(spec, js[k + 1])) / Q(m_of(spec, js[k + 1] - 1));
        rep.clauses.push_back({"iv" + std::to_string(k + 1), l1 <= bound ? Verdict::Pass : Verdict::Fail,
                               "l1 " + to_string(l1) + " vs " + to_string(bound)});
    }
}

} // namespace

RisReport check_ris(const RisWitness& w, const SpaceSpec& spec, bool strict)
{
    RisReport rep;
    if (w.blocks.empty()) return rep;
    if (w.indices.size() != w.blocks.size()) {
        rep.clauses.push_back({"shape", Verdict::Fail, "one index per block is required"});
        return rep;
    }
    if (w.context == RisWitness::Context::Plain) check_plain(w, spec, strict, rep);
    else check_norming(w, spec, rep);
    return rep;
}

nlohmann::json to_json(const SccWitness& w)
{
    nlohmann::json j;
    j["vector"] = to_json(w.vector);
    j["epsilon"] = to_string(w.epsilon);
    j["level"] = w.level;
    j["kind"] = to_string(w.kind);
    j["anchors"] = w.anchors;
    std::vector<std::string> a;
    for (const auto& c : w.coefficients) a.push_back(to_string(c));
    j["coefficients"] = a;
    if (w.kind == SccKind::Block) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& z : w.blocks) blocks.push_back(to_json(z));
        j["blocks"] = blocks;
    }
    if (w.generations) j["generations"] = w.generations;
    if (w.norm) j["norm"] = rational_json(*w.norm);
    return j;
}

nlohmann::json to_json(const RisReport& r)
{
    nlohmann::json j;
    j["overall"] = to_string(r.overall());
    nlohmann::json clauses = nlohmann::json::array();
    for (const auto& c : r.clauses) clauses.push_back({{"clause", c.clause}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}});
    j["clauses"] = clauses;
    return j;
}

} // namespace tslab
