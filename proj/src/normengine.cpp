#include "tslab/normengine.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <functional>
#include <set>
#include <unordered_map>

namespace tslab {

namespace {

using Mask = std::uint64_t;
using State = FamilyAutomaton::State;
using Key = std::vector<std::int64_t>;

struct Entry {
    Q value;
    int level = 0;      // 0: leaf
    int leaf_pos = -1;
    std::vector<Mask> parts;
};

struct Step {
    bool feasible = false;
    Q value;
    Mask part = 0;      // block or part chosen at this step
};

inline Mask bit(int i)
{
    return Mask{1} << i;
}

class Engine {
public:
    Engine(const SparseVector& x, const SpaceSpec& spec, bool relax_allowable)
        : spec_(spec), relax_(relax_allowable), budget_(spec.budget)
    {
        for (const auto& [i, c] : x.entries()) {
            pos_.push_back(i);
            abs_.push_back(::abs(c));
            sign_.push_back(c < 0 ? -1 : 1);
        }
        n_ = static_cast<int>(pos_.size());
        levels_ = spec.level_count();
        // Filled up front: references into these vectors must stay valid across recursion.
        level_cache_.reserve(static_cast<std::size_t>(levels_));
        automata_.reserve(static_cast<std::size_t>(levels_));
        for (int k = 1; k <= levels_; ++k) level(k);
        dense_ = n_ <= 20;
        if (dense_) dense_cache_.assign(std::size_t{1} << n_, nullptr);
    }

    Mask full() const { return n_ == 64 ? ~Mask{0} : bit(n_) - 1; }
    std::uint64_t subproblems() const { return count_; }
    int truncation() const { return trunc_; }
    bool level_cap_hit() const { return cap_hit_; }

    const Entry& norm_of(Mask m)
    {
        if (dense_) {
            if (const Entry* hit = dense_cache_[static_cast<std::size_t>(m)]) return *hit;
        } else {
            auto it = norms_.find(m);
            if (it != norms_.end()) return it->second;
        }
        tick();
        Entry e;
        // Leaf: largest coordinate, smallest index on ties.
        for (int i = 0; i < n_; ++i)
            if ((m & bit(i)) && (e.leaf_pos < 0 || abs_[i] > e.value)) {
                e.value = abs_[i];
                e.leaf_pos = i;
            }
        if (std::popcount(m) >= 2) {
            Q l1 = mass(m);
            for (int k = 1; k <= levels_; ++k) {
                Q theta = level(k).theta;
                if (theta * l1 <= e.value) {
                    if (in_rule_region(k)) break;
                    continue;
                }
                if (k == levels_ && spec_.rule) cap_hit_ = true;
                trunc_ = std::max(trunc_, k);
                Q sum;
                std::vector<Mask> parts;
                if (!best_family(m, k, false, sum, parts)) continue;
                Q v = theta * sum;
                if (v > e.value) {
                    e.value = v;
                    e.level = k;
                    e.leaf_pos = -1;
                    e.parts = std::move(parts);
                }
            }
        }
        const Entry& stored = norms_.emplace(m, std::move(e)).first->second;
        if (dense_) dense_cache_[static_cast<std::size_t>(m)] = &stored;
        return stored;
    }

    // Best sum of part norms over legal level-k families inside m.
    bool best_family(Mask m, int k, bool allow_single, Q& value, std::vector<Mask>& parts)
    {
        return effective_mode(k) == Mode::Admissible ? best_admissible(m, k, allow_single, value, parts)
                                                     : best_allowable(m, k, allow_single, value, parts);
    }

    FunctionalTree build(Mask m)
    {
        const Entry& e = norm_of(m);
        if (e.level == 0) return FunctionalTree::make_leaf(sign_[e.leaf_pos], pos_[e.leaf_pos]);
        return node(e.level, e.parts);
    }

    FunctionalTree node(int k, const std::vector<Mask>& parts)
    {
        std::vector<FunctionalTree> kids;
        for (Mask p : parts) kids.push_back(build(p));
        return FunctionalTree::make_node(level(k).theta, k, effective_mode(k), std::move(kids));
    }

    const Level& level(int k)
    {
        while (static_cast<int>(level_cache_.size()) < k) {
            int j = static_cast<int>(level_cache_.size()) + 1;
            level_cache_.push_back(spec_.level(j));
            automata_.emplace_back(*level_cache_.back().family);
        }
        return level_cache_[static_cast<std::size_t>(k - 1)];
    }

private:
    const SpaceSpec& spec_;
    bool relax_;
    std::uint64_t budget_;
    std::vector<Index> pos_;
    std::vector<Q> abs_;
    std::vector<int> sign_;
    int n_ = 0;
    int levels_ = 0;
    std::vector<Level> level_cache_;
    std::vector<FamilyAutomaton> automata_;
    std::unordered_map<Mask, Entry> norms_;
    bool dense_ = false;
    std::vector<const Entry*> dense_cache_; // mask -> entry, for small supports
    std::unordered_map<Key, Step, VectorHash> adm_, allow_;
    std::uint64_t count_ = 0;
    int trunc_ = 0;
    bool cap_hit_ = false;

    void tick()
    {
        if (++count_ > budget_)
            throw ResourceLimitError("norm DP exceeded the subproblem budget of " + std::to_string(budget_));
    }

    bool in_rule_region(int k) const
    {
        return spec_.rule.has_value() && k > static_cast<int>(spec_.levels.size());
    }

    Mode effective_mode(int k) const
    {
        return relax_ ? Mode::Admissible : spec_.mode_at(k);
    }

    const FamilyAutomaton& automaton(int k)
    {
        level(k);
        return automata_[static_cast<std::size_t>(k - 1)];
    }

    Q mass(Mask m) const
    {
        Q s = 0;
        for (int i = 0; i < n_; ++i)
            if (m & bit(i)) s += abs_[i];
        return s;
    }

    Key make_key(Mask m, int k, const State& st) const
    {
        Key key;
        key.reserve(st.size() + 2);
        key.push_back(static_cast<std::int64_t>(m));
        key.push_back(k);
        key.insert(key.end(), st.begin(), st.end());
        return key;
    }

    // ---- admissible: consecutive blocks of the elements of m

    // Blocks covering all of suffix s (a block starts at its lowest element),
    // given the family state before that start.
    const Step& adm_suffix(Mask s, int k, State st)
    {
        const FamilyAutomaton& aut = automaton(k);
        aut.cap(st, std::popcount(s));
        Key key = make_key(s, k, st);
        auto it = adm_.find(key);
        if (it != adm_.end()) return it->second;
        tick();
        Step out;
        int t = std::countr_zero(s);
        State next;
        if (aut.step(st, pos_[t], next)) {
            Mask block = 0;
            for (int u = t; u < n_; ++u) {
                if (!(s & bit(u))) continue;
                block |= bit(u);
                Mask rest = s & ~block;
                Q v = norm_of(block).value;
                if (rest) {
                    const Step& r = adm_suffix(rest, k, next);
                    if (!r.feasible) continue;
                    v += r.value;
                }
                if (!out.feasible || v > out.value) {
                    out.feasible = true;
                    out.value = v;
                    out.part = block;
                }
            }
        }
        return adm_.emplace(std::move(key), std::move(out)).first->second;
    }

    void adm_unwind(Mask s, int k, State st, std::vector<Mask>& parts)
    {
        while (s) {
            const Step& step = adm_suffix(s, k, st);
            parts.push_back(step.part);
            State next;
            automaton(k).step(st, pos_[std::countr_zero(s)], next);
            st = next;
            s &= ~step.part;
        }
    }

    bool best_admissible(Mask m, int k, bool allow_single, Q& value, std::vector<Mask>& parts)
    {
        const FamilyAutomaton& aut = automaton(k);
        bool found = false;
        Mask best_first = 0;
        State best_state;
        for (int s = 0; s < n_; ++s) {
            if (!(m & bit(s))) continue;
            State st;
            if (!aut.step(aut.initial(), pos_[s], st)) continue;
            Mask suffix = m & ~(bit(s) - 1);
            Mask block = 0;
            for (int u = s; u < n_; ++u) {
                if (!(suffix & bit(u))) continue;
                block |= bit(u);
                Mask rest = suffix & ~block;
                if (!rest && !allow_single) continue;
                Q v = norm_of(block).value;
                if (rest) {
                    const Step& r = adm_suffix(rest, k, st);
                    if (!r.feasible) continue;
                    v += r.value;
                }
                if (!found || v > value) {
                    found = true;
                    value = v;
                    best_first = block;
                    best_state = st;
                }
            }
        }
        if (found) {
            parts.clear();
            parts.push_back(best_first);
            Mask rest = (m & ~(bit(std::countr_zero(best_first)) - 1)) & ~best_first;
            adm_unwind(rest, k, best_state, parts);
        }
        return found;
    }

    // ---- allowable: disjoint parts covering everything from the first minimum on

    // Parts covering all of r; the next part's minimum is the lowest element of r.
    const Step& allow_cover(Mask r, int k, State st)
    {
        const FamilyAutomaton& aut = automaton(k);
        aut.cap(st, std::popcount(r));
        Key key = make_key(r, k, st);
        auto it = allow_.find(key);
        if (it != allow_.end()) return it->second;
        tick();
        Step out;
        int u = std::countr_zero(r);
        State next;
        if (aut.step(st, pos_[u], next)) {
            Mask rest0 = r & ~bit(u);
            Mask sub = 0;
            Q v;
            do {
                Mask part = sub | bit(u);
                Mask rest = rest0 & ~sub;
                const Q& pv = norm_of(part).value;
                bool ok = true;
                if (rest) {
                    const Step& nx = allow_cover(rest, k, next);
                    if (nx.feasible) mpq_add(v.get_mpq_t(), pv.get_mpq_t(), nx.value.get_mpq_t());
                    else ok = false;
                } else {
                    v = pv;
                }
                if (ok && (!out.feasible || v > out.value)) {
                    out.feasible = true;
                    out.value = v;
                    out.part = part;
                }
                sub = (sub - rest0) & rest0;
            } while (sub != 0);
        }
        return allow_.emplace(std::move(key), std::move(out)).first->second;
    }

    void allow_unwind(Mask r, int k, State st, std::vector<Mask>& parts)
    {
        while (r) {
            const Step& step = allow_cover(r, k, st);
            parts.push_back(step.part);
            State next;
            automaton(k).step(st, pos_[std::countr_zero(r)], next);
            st = next;
            r &= ~step.part;
        }
    }

    bool best_allowable(Mask m, int k, bool allow_single, Q& value, std::vector<Mask>& parts)
    {
        const FamilyAutomaton& aut = automaton(k);
        bool found = false;
        Mask best_first = 0, best_rest = 0;
        State best_state;
        for (int s = 0; s < n_; ++s) {
            if (!(m & bit(s))) continue;
            State st;
            if (!aut.step(aut.initial(), pos_[s], st)) continue;
            Mask rest0 = m & ~(bit(s + 1) - 1);
            Mask sub = 0;
            do {
                Mask part = sub | bit(s);
                Mask rest = rest0 & ~sub;
                bool ok = rest || allow_single;
                Q v;
                if (ok) {
                    v = norm_of(part).value;
                    if (rest) {
                        const Step& nx = allow_cover(rest, k, st);
                        if (nx.feasible) v += nx.value;
                        else ok = false;
                    }
                }
                if (ok && (!found || v > value)) {
                    found = true;
                    value = v;
                    best_first = part;
                    best_rest = rest;
                    best_state = st;
                }
                sub = (sub - rest0) & rest0;
            } while (sub != 0);
        }
        if (found) {
            parts.clear();
            parts.push_back(best_first);
            allow_unwind(best_rest, k, best_state, parts);
        }
        return found;
    }
};

Q theta_sup(const SpaceSpec& spec)
{
    Q best = 0;
    int n = std::min(spec.level_count(), 64);
    for (int k = 1; k <= n; ++k) best = std::max(best, spec.level(k).theta);
    return best;
}

void check_support_size(const SparseVector& x)
{
    if (x.size() > 62) throw ResourceLimitError("norm supports at most 62 support points");
}

bool over_cap(const SparseVector& x, const SpaceSpec& spec)
{
    bool over = spec.allowable_anywhere() && x.size() > spec.allowable_cap;
    if (over && spec.exact)
        throw ResourceLimitError("allowable-mode exact search is capped at " + std::to_string(spec.allowable_cap) +
                                 " support points (support has " + std::to_string(x.size()) + ")");
    return over;
}

} // namespace

NormResult norm(const SparseVector& x, const SpaceSpec& spec)
{
    NormResult r;
    if (x.empty()) {
        r.value = r.lower = r.upper = 0;
        r.certificate = FunctionalTree::make_leaf(1, 1);
        r.degenerate = true;
        return r;
    }
    check_support_size(x);
    bool relaxed = over_cap(x, spec);
    Engine e(x, spec, relaxed);
    Mask all = e.full();
    r.value = e.norm_of(all).value;
    r.certificate = e.build(all);
    r.subproblems_evaluated = e.subproblems();
    r.truncation_level = e.truncation();
    r.lower = r.value;
    r.upper = r.value;
    if (relaxed || e.level_cap_hit()) {
        r.exact = false;
        r.upper = std::max<Q>(r.value, std::max<Q>(x.linf(), theta_sup(spec) * x.l1()));
    }
    return r;
}

LevelBounds norm_level_bounds(const SparseVector& x, const SpaceSpec& spec, int k)
{
    if (!spec.has_level(k)) throw BadInputError("level " + std::to_string(k) + " not in space " + spec.name);
    LevelBounds r;
    r.certificate = FunctionalTree::make_leaf(1, 1);
    if (x.empty()) return r;
    check_support_size(x);
    bool relaxed = over_cap(x, spec);
    Engine e(x, spec, relaxed);
    Q sum;
    std::vector<Mask> parts;
    Q theta = e.level(k).theta;
    if (e.best_family(e.full(), k, true, sum, parts)) {
        r.value = theta * sum;
        r.certificate = e.node(k, parts);
    }
    r.lower = r.upper = r.value;
    if (relaxed || e.level_cap_hit()) {
        r.exact = false;
        r.upper = std::max<Q>(r.value, theta * x.l1());
    }
    return r;
}

std::pair<Q, FunctionalTree> norm_level(const SparseVector& x, const SpaceSpec& spec, int k)
{
    auto r = norm_level_bounds(x, spec, k);
    return {r.value, r.certificate};
}

std::vector<std::vector<Q>> interval_norms(const SparseVector& x, const SpaceSpec& spec)
{
    std::vector<std::vector<Q>> out;
    if (x.empty()) return out;
    check_support_size(x);
    SpaceSpec s = spec;
    s.exact = true;
    over_cap(x, s);
    Engine e(x, s, false);
    const int n = static_cast<int>(x.size());
    out.assign(static_cast<std::size_t>(n), std::vector<Q>(static_cast<std::size_t>(n)));
    // Longest intervals first: they populate the memo for the shorter ones.
    for (int len = n; len >= 1; --len)
        for (int a = 0; a + len <= n; ++a) {
            int b = a + len - 1;
            Mask m = (b == 63 ? ~Mask{0} : ((Mask{1} << (b + 1)) - 1)) & ~((Mask{1} << a) - 1);
            out[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = e.norm_of(m).value;
        }
    return out;
}

Q distorted_norm(const SparseVector& x, const SpaceSpec& spec, int i0)
{
    Q theta = spec.level(i0).theta;
    return theta * norm(x, spec).value + norm_level(x, spec, i0).first;
}

Q two_convexified_norm(const SparseVector& x, const SpaceSpec& spec)
{
    SparseVector y;
    for (const auto& [i, c] : x.entries()) y.set(i, c * c);
    return norm(y, spec).value;
}

// ---------------------------------------------------------------- brute force

Q norm_bruteforce(const SparseVector& x, const SpaceSpec& spec, int depth)
{
    if (x.size() > 8) throw ResourceLimitError("norm_bruteforce supports at most 8 support points");
    if (depth > 4) throw ResourceLimitError("norm_bruteforce supports depth <= 4");
    if (x.empty()) return 0;
    const int n = static_cast<int>(x.size());
    std::vector<Index> pos;
    std::vector<Q> a;
    for (const auto& [i, c] : x.entries()) {
        pos.push_back(i);
        a.push_back(::abs(c));
    }
    const Q linf = x.linf(), l1 = x.l1();

    // Functionals are coefficient vectors over the support positions.
    using Coef = std::vector<Q>;
    // per support mask, the coefficient vectors not dominated by another one
    std::map<unsigned, std::vector<Coef>> pool;
    auto dominated = [](const Coef& p, const Coef& q) {
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] > q[i]) return false;
        return true;
    };
    auto insert = [&](std::map<unsigned, std::vector<Coef>>& into, unsigned mask, const Coef& c) {
        auto& list = into[mask];
        for (const auto& d : list)
            if (dominated(c, d)) return false;
        list.erase(std::remove_if(list.begin(), list.end(), [&](const Coef& d) { return dominated(d, c); }),
                   list.end());
        list.push_back(c);
        return true;
    };
    for (int i = 0; i < n; ++i) {
        Coef c(static_cast<std::size_t>(n), Q(0));
        c[static_cast<std::size_t>(i)] = 1;
        insert(pool, 1u << i, c);
    }

    std::vector<int> levels;
    for (int k = 1; k <= spec.level_count(); ++k) {
        Q t = spec.level(k).theta;
        if (t * l1 <= linf) {
            if (spec.rule && k > static_cast<int>(spec.levels.size())) break;
            continue;
        }
        levels.push_back(k);
    }

    for (int d = 1; d <= depth; ++d) {
        std::vector<std::pair<unsigned, Coef>> kids;
        for (const auto& [mask, list] : pool)
            for (const auto& c : list) kids.emplace_back(mask, c);
        std::sort(kids.begin(), kids.end(), [](const auto& p, const auto& q) {
            int mp = std::countr_zero(p.first), mq = std::countr_zero(q.first);
            return mp != mq ? mp < mq : p < q;
        });
        auto next = pool;
        for (int k : levels) {
            Level lv = spec.level(k);
            Mode mode = spec.mode_at(k);
            std::vector<std::size_t> chosen;
            std::function<void(std::size_t, unsigned, int)> pick = [&](std::size_t from, unsigned used, int last_min) {
                if (chosen.size() >= 2) {
                    FiniteSet mins;
                    for (auto c : chosen) mins.push_back(pos[static_cast<std::size_t>(std::countr_zero(kids[c].first))]);
                    if (member(mins, *lv.family)) {
                        Coef f(static_cast<std::size_t>(n), Q(0));
                        for (auto c : chosen)
                            for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] += kids[c].second[static_cast<std::size_t>(i)];
                        for (auto& v : f) v *= lv.theta;
                        insert(next, used, f);
                    }
                }
                for (std::size_t c = from; c < kids.size(); ++c) {
                    unsigned m = kids[c].first;
                    int mn = std::countr_zero(m);
                    if (mn <= last_min || (m & used)) continue;
                    if (mode == Mode::Admissible && used && mn < 32 - std::countl_zero(used)) continue;
                    chosen.push_back(c);
                    FiniteSet mins;
                    for (auto cc : chosen) mins.push_back(pos[static_cast<std::size_t>(std::countr_zero(kids[cc].first))]);
                    if (member(mins, *lv.family)) pick(c + 1, used | m, mn);
                    chosen.pop_back();
                }
            };
            pick(0, 0, -1);
        }
        pool.swap(next);
    }

    Q best = 0;
    for (const auto& [mask, list] : pool)
        for (const auto& c : list) {
            Q v = 0;
            for (int i = 0; i < n; ++i) v += c[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
            best = std::max(best, v);
        }
    return best;
}

// ---------------------------------------------------------------- batches

std::vector<NormResult> norm_batch_serial(const std::vector<SparseVector>& xs, const SpaceSpec& spec)
{
    std::vector<NormResult> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(norm(x, spec));
    return out;
}

std::vector<NormResult> norm_batch(const std::vector<SparseVector>& xs, const SpaceSpec& spec)
{
    std::vector<NormResult> out(xs.size());
    std::vector<std::exception_ptr> errors(xs.size());
    const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = norm(xs[static_cast<std::size_t>(i)], spec);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace tslab
