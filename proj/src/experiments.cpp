#include "tslab/experiments.hpp"

#include "tslab/normengine.hpp"
#include "tslab/setfamilies.hpp"
#include "tslab/spaces.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace tslab {

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    g_.seed(seq);
}

std::string to_string(Relation r)
{
    switch (r) {
    case Relation::Le: return "<=";
    case Relation::Lt: return "<";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
    case Relation::Eq: return "==";
    }
    return "?";
}

namespace {

bool holds(const Q& v, Relation r, const Q& b)
{
    switch (r) {
    case Relation::Le: return v <= b;
    case Relation::Lt: return v < b;
    case Relation::Ge: return v >= b;
    case Relation::Gt: return v > b;
    case Relation::Eq: return v == b;
    }
    return false;
}

} // namespace

BoundCheck make_check(std::string name, const Q& value, Relation rel, const Q& bound)
{
    BoundCheck c;
    c.name = std::move(name);
    c.value = value;
    c.relation = rel;
    c.bound = bound;
    c.verdict = holds(value, rel, bound) ? Verdict::Pass : Verdict::Fail;
    return c;
}

BoundCheck make_check(std::string name, const Q& lower, const Q& upper, Relation rel, const Q& bound)
{
    if (lower == upper) return make_check(std::move(name), lower, rel, bound);
    BoundCheck c;
    c.name = std::move(name);
    c.relation = rel;
    c.bound = bound;
    bool lo = holds(lower, rel, bound), hi = holds(upper, rel, bound);
    // Upper-bound relations are settled by the top of the enclosure, lower-bound
    // relations by the bottom.
    bool upper_kind = rel == Relation::Le || rel == Relation::Lt;
    c.value = upper_kind ? upper : lower;
    if (rel == Relation::Eq) c.verdict = Verdict::Indeterminate;
    else if (lo && hi) c.verdict = Verdict::Pass;
    else if (!lo && !hi) c.verdict = Verdict::Fail;
    else c.verdict = Verdict::Indeterminate;
    c.note = "value enclosed in [" + to_string(lower) + ", " + to_string(upper) + "]";
    return c;
}

std::size_t ExperimentReport::count(Verdict v) const
{
    std::size_t n = 0;
    for (const auto& c : cases)
        for (const auto& b : c.checks) n += b.verdict == v ? 1 : 0;
    return n;
}

int ExperimentReport::exit_code() const { return (!toy && count(Verdict::Fail) > 0) ? 1 : 0; }

nlohmann::json space_echo(const SpaceSpec& spec)
{
    return {{"name", spec.name}, {"config", to_config(spec)}, {"approximate_weights", spec.approximate_weights}};
}

nlohmann::json to_json(const ExperimentReport& r)
{
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["seed"] = r.seed;
    j["toy"] = r.toy;
    if (r.toy) j["banner"] = kToyBanner;
    j["space"] = r.space;
    j["params"] = r.params;
    std::vector<const CaseResult*> order;
    for (const auto& c : r.cases) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
    nlohmann::json cases = nlohmann::json::array();
    std::uint64_t subproblems = 0;
    for (const auto* c : order) {
        nlohmann::json cj;
        cj["id"] = c->id;
        cj["inputs"] = c->inputs;
        cj["values"] = c->values;
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& b : c->checks) {
            nlohmann::json bj{{"name", b.name},
                              {"value", rational_json(b.value)},
                              {"relation", to_string(b.relation)},
                              {"bound", rational_json(b.bound)},
                              {"verdict", to_string(b.verdict)}};
            if (!b.note.empty()) bj["note"] = b.note;
            checks.push_back(bj);
        }
        cj["checks"] = checks;
        if (!c->hypotheses_violated.empty()) cj["hypotheses_violated"] = c->hypotheses_violated;
        cj["subproblems"] = c->subproblems;
        subproblems += c->subproblems;
        cases.push_back(cj);
    }
    j["cases"] = cases;
    nlohmann::json s = r.summary;
    s["cases"] = r.cases.size();
    s["pass"] = r.count(Verdict::Pass);
    s["fail"] = r.count(Verdict::Fail);
    s["indeterminate"] = r.count(Verdict::Indeterminate);
    s["subproblems"] = subproblems;
    j["summary"] = s;
    return j;
}

std::string to_table(const ExperimentReport& r)
{
    std::ostringstream out;
    out << "experiment " << r.experiment << "  seed " << r.seed;
    if (r.space.is_object()) out << "  space " << r.space.value("name", "");
    out << "\n";
    if (r.toy) out << "[" << kToyBanner << "] toy parameters; failures are reported, not fatal\n";
    std::vector<const CaseResult*> order;
    for (const auto& c : r.cases) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::size_t wid = 4, wname = 5;
    for (const auto* c : order) {
        wid = std::max(wid, c->id.size());
        for (const auto& b : c->checks) wname = std::max(wname, b.name.size());
    }
    out << std::left << std::setw(static_cast<int>(wid)) << "case" << "  " << std::setw(static_cast<int>(wname))
        << "check" << "  " << std::setw(14) << "value" << std::setw(4) << "" << std::setw(14) << "bound"
        << "verdict\n";
    for (const auto* c : order) {
        for (const auto& b : c->checks)
            out << std::setw(static_cast<int>(wid)) << c->id << "  " << std::setw(static_cast<int>(wname)) << b.name
                << "  " << std::setw(14) << to_decimal(b.value) << std::setw(4) << to_string(b.relation)
                << std::setw(14) << to_decimal(b.bound) << to_string(b.verdict) << "\n";
        if (!c->hypotheses_violated.empty()) {
            out << std::setw(static_cast<int>(wid)) << c->id << "  hypotheses violated:";
            for (const auto& h : c->hypotheses_violated) out << " " << h << ";";
            out << "\n";
        }
    }
    out << "pass " << r.count(Verdict::Pass) << "  fail " << r.count(Verdict::Fail) << "  indeterminate "
        << r.count(Verdict::Indeterminate) << "\n";
    return out.str();
}

namespace {

// Runs independent cases into fixed slots; the first exception is rethrown
// after the loop.
template <class F>
std::vector<CaseResult> run_cases(std::size_t n, F&& make)
{
    std::vector<CaseResult> out(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = make(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string padded(std::size_t i, int width = 3)
{
    std::ostringstream s;
    s << std::setw(width) << std::setfill('0') << i;
    return s.str();
}

nlohmann::json qj(const Q& q) { return rational_json(q); }

SpaceSpec exact_spec(SpaceSpec s)
{
    s.exact = true;
    return s;
}

Q brute_max_weight(const std::map<Index, Q>& a, const FamilyDescriptor& f)
{
    std::vector<std::pair<Index, Q>> items(a.begin(), a.end());
    Q best = 0;
    for (unsigned mask = 0; mask < (1U << items.size()); ++mask) {
        FiniteSet s;
        Q w = 0;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (mask & (1U << i)) {
                s.push_back(items[i].first);
                w += items[i].second;
            }
        if (w > best && member(s, f)) best = w;
    }
    return best;
}

FiniteSet from_mask(unsigned mask, int ground)
{
    FiniteSet s;
    for (int i = 0; i < ground; ++i)
        if (mask & (1U << i)) s.push_back(i + 1);
    return s;
}

} // namespace

// ------------------------------------------------------------ interval sup

IntervalSup interval_family_sup(const SparseVector& x, const SpaceSpec& spec, const FamilyDescriptor& fi)
{
    IntervalSup out;
    if (x.empty()) return out;
    const auto table = interval_norms(x, spec);
    std::vector<Index> pos;
    for (const auto& [i, c] : x.entries()) pos.push_back(i);
    const std::size_t n = pos.size();
    FamilyAutomaton aut(fi);

    struct Entry {
        Q value;
        int end = -1; // -1: position skipped
    };
    std::vector<std::unordered_map<FamilyAutomaton::State, Entry, VectorHash>> memo(n);

    // Intervals start at support points: moving a minimum right keeps the
    // minima in a spreading family.
    std::function<Q(std::size_t, FamilyAutomaton::State)> best = [&](std::size_t a, FamilyAutomaton::State s) -> Q {
        if (a == n) return 0;
        aut.cap(s, static_cast<std::int64_t>(n - a));
        if (auto it = memo[a].find(s); it != memo[a].end()) return it->second.value;
        Entry e;
        e.value = best(a + 1, s);
        FamilyAutomaton::State next;
        if (aut.step(s, pos[a], next))
            for (std::size_t b = a; b < n; ++b) {
                Q v = table[a][b] + best(b + 1, next);
                if (v > e.value) {
                    e.value = v;
                    e.end = static_cast<int>(b);
                }
            }
        memo[a].emplace(s, e);
        return e.value;
    };
    out.value = best(0, aut.initial());

    FamilyAutomaton::State s = aut.initial();
    for (std::size_t a = 0; a < n;) {
        aut.cap(s, static_cast<std::int64_t>(n - a));
        const Entry& e = memo[a].at(s);
        if (e.end < 0) {
            ++a;
            continue;
        }
        FamilyAutomaton::State next;
        aut.step(s, pos[a], next);
        out.intervals.emplace_back(pos[a], pos[static_cast<std::size_t>(e.end)]);
        s = next;
        a = static_cast<std::size_t>(e.end) + 1;
    }
    return out;
}

// ------------------------------------------------------------ schreier

ExperimentReport verify_schreier(const VerifyParams& p)
{
    if (p.ground < 1 || p.ground > 16) throw BadInputError("--ground must lie in 1..16");
    if (p.bracket_ground < 1 || p.bracket_ground > 16) throw BadInputError("--bracket-ground must lie in 1..16");
    ExperimentReport r;
    r.experiment = "schreier";
    r.seed = p.seed;
    r.params = {{"ground", p.ground}, {"bracket_ground", p.bracket_ground}};

    struct Job {
        std::string id;
        std::function<CaseResult()> run;
    };
    std::vector<Job> jobs;

    for (int n = 0; n <= 2; ++n)
        jobs.push_back({"oracle-S" + std::to_string(n), [n, g = p.ground] {
                            CaseResult c;
                            c.inputs = {{"family", "S(" + std::to_string(n) + ")"}, {"ground", g}};
                            auto f = schreier(n);
                            std::uint64_t members = 0, mismatches = 0;
                            for (unsigned mask = 0; mask < (1U << g); ++mask) {
                                FiniteSet a = from_mask(mask, g);
                                bool m = member(a, *f);
                                members += m ? 1 : 0;
                                mismatches += m != member_modified(a, n) ? 1 : 0;
                            }
                            c.values = {{"members", members}};
                            c.checks.push_back(make_check("member == member_modified mismatches",
                                                          Q(static_cast<long>(mismatches)), Relation::Eq, Q(0)));
                            return c;
                        }});

    for (int n = 0; n <= 3; ++n)
        for (int m = 0; n + m <= 3; ++m)
            jobs.push_back({"bracket-S" + std::to_string(n) + "-S" + std::to_string(m), [n, m, g = p.bracket_ground] {
                                CaseResult c;
                                c.inputs = {{"outer", n}, {"inner", m}, {"ground", g}};
                                auto lhs = bracket(schreier(n), schreier(m));
                                auto rhs = schreier(n + m);
                                std::uint64_t members = 0, mismatches = 0;
                                for (unsigned mask = 0; mask < (1U << g); ++mask) {
                                    FiniteSet a = from_mask(mask, g);
                                    bool x = member(a, *lhs);
                                    members += x ? 1 : 0;
                                    mismatches += x != member(a, *rhs) ? 1 : 0;
                                }
                                c.values = {{"members", members}};
                                c.checks.push_back(make_check("B(S(n),S(m)) vs S(n+m) mismatches",
                                                              Q(static_cast<long>(mismatches)), Relation::Eq, Q(0)));
                                return c;
                            }});

    const std::vector<std::string> families{"S(0)", "S(1)", "S(2)", "S(3)", "A(3)", "B(S(1),S(1))", "P(S(1))"};
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        const std::string name = families[fi];
        jobs.push_back({"closure-" + padded(fi, 2) + "-" + name, [name] {
                            CaseResult c;
                            const Index hi = 9;
                            c.inputs = {{"family", name}, {"window", "1.." + std::to_string(hi)}};
                            auto f = parse_family(name);
                            auto all = members_in_window(*f, 1, hi);
                            std::uint64_t hered = 0, spread = 0;
                            for (const auto& a : all) {
                                for (std::size_t i = 0; i < a.size(); ++i) {
                                    FiniteSet sub = a;
                                    sub.erase(sub.begin() + static_cast<long>(i));
                                    hered += member(sub, *f) ? 0 : 1;
                                    FiniteSet up = a;
                                    ++up[i];
                                    if (i + 1 < up.size() && up[i] == up[i + 1]) continue;
                                    spread += member(up, *f) ? 0 : 1;
                                }
                            }
                            c.values = {{"members", all.size()}};
                            c.checks.push_back(make_check("hereditary violations", Q(static_cast<long>(hered)),
                                                          Relation::Eq, Q(0)));
                            c.checks.push_back(make_check("spreading violations", Q(static_cast<long>(spread)),
                                                          Relation::Eq, Q(0)));
                            return c;
                        }});
        jobs.push_back({"max-weight-" + padded(fi, 2) + "-" + name, [name, fi, seed = p.seed] {
                            CaseResult c;
                            c.inputs = {{"family", name}, {"vectors", 25}, {"stream", fi}};
                            auto f = parse_family(name);
                            Rng rng(seed, 1000 + fi);
                            std::uint64_t mismatches = 0;
                            for (int t = 0; t < 25; ++t) {
                                std::map<Index, Q> a;
                                auto size = rng.between(1, 10);
                                while (static_cast<std::int64_t>(a.size()) < size)
                                    a[rng.between(1, 16)] = Q(rng.between(0, 4), rng.between(1, 3));
                                for (auto& [i, v] : a) v.canonicalize();
                                mismatches += max_weight(a, *f) == brute_max_weight(a, *f) ? 0 : 1;
                            }
                            c.checks.push_back(make_check("max_weight vs subset enumeration mismatches",
                                                          Q(static_cast<long>(mismatches)), Relation::Eq, Q(0)));
                            return c;
                        }});
    }

    r.cases = run_cases(jobs.size(), [&](std::size_t i) {
        CaseResult c = jobs[i].run();
        c.id = jobs[i].id;
        return c;
    });
    return r;
}

// ------------------------------------------------------------ s.c.c. sandwich

namespace {

// An (eps, j)-basic combination on sampled positions from [start, ...) with
// at most 62 support points. Resamples on failure.
SccWitness sampled_basic(Rng& rng, const Q& eps, int j, nlohmann::json& inputs)
{
    for (int attempt = 0; attempt < 64; ++attempt) {
        Index start = rng.between(1, 8);
        if (j == 1) {
            Index step = rng.between(1, 3);
            inputs["D"] = std::to_string(start) + "+" + std::to_string(step) + "n";
            return make_basic_scc(eps, 1, IndexStream::progression(start, step));
        }
        Index step = rng.between(1, 2);
        try {
            SccWitness w = make_basic_scc(eps, j, IndexStream::progression(start, step), SccStrategy::Compact);
            if (w.vector.size() > 62) continue;
            inputs["D"] = std::to_string(start) + "+" + std::to_string(step) + "n";
            return w;
        } catch (const BadInputError&) {
        } catch (const ResourceLimitError&) {
        }
    }
    throw ResourceLimitError("no (" + to_string(eps) + "," + std::to_string(j) +
                             ")-basic combination within 62 support points after 64 samples");
}

} // namespace

ExperimentReport verify_lemma112(const VerifyParams& p)
{
    ExperimentReport r;
    r.experiment = "lemma112";
    r.seed = p.seed;
    SpaceSpec spec = preset(p.space.empty() ? "mixed_fn(" + p.theta + ")" : p.space);
    r.space = space_echo(spec);
    r.toy = spec.toy;
    std::vector<int> js = p.js.empty() ? std::vector<int>{1, 2} : p.js;
    std::vector<Q> eps = p.epsilons.empty() ? std::vector<Q>{Q(1, 2), Q(1, 3)} : p.epsilons;
    for (int j : js)
        if (j < 1 || j > 2) throw BadInputError("lemma112 checks j in {1, 2} at desk scale");
    for (const Q& e : eps)
        if (e <= 0 || e > 1 || e < Q(1, 3)) throw BadInputError("lemma112 needs epsilon in [1/3, 1]");
    const int count = p.count > 0 ? p.count : 50;
    std::vector<std::pair<int, Q>> combos;
    for (int j : js)
        for (const Q& e : eps) combos.emplace_back(j, e);

    nlohmann::json jl = nlohmann::json::array(), el = nlohmann::json::array();
    for (int j : js) jl.push_back(j);
    for (const Q& e : eps) el.push_back(to_string(e));
    r.params = {{"count", count}, {"j", jl}, {"eps", el}, {"claim_l", p.claim_l}, {"claim_r", p.claim_r}};

    std::vector<std::string> hyp;
    if (!check_regular(spec.rule ? *spec.rule : LevelRule{}, 12) && spec.rule) hyp.push_back("theta regular");

    // Instances are drawn serially so the sample does not depend on scheduling.
    struct Instance {
        int j;
        Q eps;
        SccWitness w;
        nlohmann::json inputs;
    };
    std::vector<Instance> inst;
    for (int c = 0; c < count; ++c) {
        auto [j, e] = combos[static_cast<std::size_t>(c) % combos.size()];
        Rng rng(p.seed, static_cast<std::uint64_t>(c));
        nlohmann::json inputs{{"j", j}, {"eps", to_string(e)}};
        SccWitness w = sampled_basic(rng, e, j, inputs);
        inputs["x"] = to_string(w.vector);
        inst.push_back({j, e, std::move(w), std::move(inputs)});
    }
    std::vector<std::pair<Index, int>> claims;
    for (int l = 1; l <= p.claim_l; ++l)
        for (int rr = 1; rr <= p.claim_r; ++rr) claims.emplace_back(l, rr);

    const SpaceSpec es = exact_spec(spec);
    r.cases = run_cases(inst.size() + claims.size(), [&](std::size_t i) {
        CaseResult c;
        if (i < inst.size()) {
            const Instance& in = inst[i];
            c.id = "scc-" + padded(i);
            c.inputs = in.inputs;
            c.hypotheses_violated = hyp;
            Q theta = spec.level(in.j).theta;
            auto nr = norm(in.w.vector, es);
            c.subproblems = nr.subproblems_evaluated;
            c.values = {{"norm", qj(nr.value)}, {"theta_j", qj(theta)}, {"support", in.w.vector.size()}};
            c.checks.push_back(make_check("basic s.c.c. structure", Q(check_basic_scc(in.w.vector, in.eps, in.j) ? 1 : 0),
                                          Relation::Eq, Q(1)));
            c.checks.push_back(make_check("theta_j <= norm", nr.value, Relation::Ge, theta));
            c.checks.push_back(make_check("norm < theta_j + eps", nr.value, Relation::Lt, theta + in.eps));
            return c;
        }
        auto [l, rr] = claims[i - inst.size()];
        c.id = "claim-l" + padded(static_cast<std::size_t>(l), 2) + "-r" + std::to_string(rr);
        Q tau = spec.level(rr).theta;
        c.inputs = {{"l", l}, {"r", rr}, {"tau", to_string(tau)}};
        auto hs = enumerate_heavy_supports(spec, l, tau);
        auto fam = schreier(rr - 1);
        std::uint64_t bad = 0;
        for (const auto& s : hs.supports) bad += member(s, *fam) ? 0 : 1;
        c.values = {{"supports", hs.supports.size()}, {"functionals", hs.count.get_str()},
                    {"over_approximate", hs.over_approximate}};
        c.checks.push_back(make_check("heavy supports outside S(r-1)", Q(static_cast<long>(bad)), Relation::Eq, Q(0)));
        return c;
    });
    return r;
}

// ------------------------------------------------------------ interval-family bound

ExperimentReport verify_lemma113(const VerifyParams& p)
{
    ExperimentReport r;
    r.experiment = "lemma113";
    r.seed = p.seed;
    const int count = p.count > 0 ? p.count : 20;
    // Group A: unit blocks under theta_n = 1/(n+1) (a single 60-point
    // instance exists within the support limit); group B: normalized blocks of
    // one or two points under (3/4)^n; group C: unit blocks under (2/3)^n.
    // All use j = 2, i = 1 and eps < theta_2.
    struct Group {
        std::string name;
        std::string space;
        Q eps;
        bool unit;
    };
    const std::vector<Group> groups{{"A", "mixed_fn(1/(n+1))", Q(3, 10), true},
                                    {"B", "mixed_fn((3/4)^n)", Q(1, 2), false},
                                    {"C", "mixed_fn((2/3)^n)", Q(2, 5), true}};
    const int j = 2, i = 1;
    nlohmann::json gj = nlohmann::json::array();
    for (const auto& g : groups)
        gj.push_back({{"group", g.name}, {"space", g.space}, {"eps", to_string(g.eps)},
                      {"blocks", g.unit ? "unit" : "normalized, one or two points"}});
    r.params = {{"count", count}, {"j", j}, {"i", i}, {"groups", gj}};
    r.space = nullptr;

    struct Instance {
        const Group* g;
        SpaceSpec spec;
        SccWitness w;
        nlohmann::json inputs;
    };
    std::vector<Instance> inst;
    for (int c = 0; c < count; ++c) {
        const Group& g = groups[c == 0 ? 0 : (c % 2 == 1 ? 1 : 2)];
        SpaceSpec spec = exact_spec(preset(g.space));
        Rng rng(p.seed, static_cast<std::uint64_t>(c));
        nlohmann::json inputs{{"group", g.name}, {"space", g.space}, {"eps", to_string(g.eps)}, {"j", j}, {"i", i}};
        std::optional<SccWitness> w;
        for (int attempt = 0; attempt < 256 && !w; ++attempt) {
            try {
                SccWitness cand;
                if (g.unit) {
                    Index start = rng.between(1, 8);
                    cand = make_basic_scc(g.eps, j, IndexStream::progression(start, 1), SccStrategy::Compact);
                    inputs["D"] = std::to_string(start) + "+1n";
                } else {
                    std::vector<SparseVector> blocks;
                    Index at = 3;
                    for (int k = 0; k < 60; ++k) {
                        SparseVector z;
                        z.set(at, Q(rng.between(1, 3)));
                        if (rng.below(4) == 0) z.set(++at, Q(rng.between(1, 3)));
                        ++at;
                        blocks.push_back(z.scaled(1 / norm(z, spec).value));
                    }
                    cand = make_block_scc(blocks, g.eps, j, SccStrategy::Compact);
                }
                if (cand.vector.size() > 62) continue;
                w = std::move(cand);
            } catch (const BadInputError&) {
            } catch (const ResourceLimitError&) {
            }
        }
        if (!w) throw ResourceLimitError("lemma113: no instance within 62 support points after 256 samples");
        inputs["x"] = to_string(w->vector);
        if (!g.unit) {
            nlohmann::json bj = nlohmann::json::array();
            for (const auto& b : w->blocks) bj.push_back(to_string(b));
            inputs["blocks"] = bj;
        }
        inst.push_back({&g, spec, std::move(*w), std::move(inputs)});
    }

    r.cases = run_cases(inst.size(), [&](std::size_t c) {
        const Instance& in = inst[c];
        CaseResult cr;
        cr.id = "scc-" + padded(c);
        cr.inputs = in.inputs;
        Q theta_i = in.spec.level(i).theta, theta_j = in.spec.level(j).theta;
        if (!(in.g->eps < theta_j)) cr.hypotheses_violated.push_back("eps < theta_j");
        Q ymax = 0;
        for (const auto& y : in.w.blocks) ymax = std::max(ymax, norm(y, in.spec).value);
        auto sup = interval_family_sup(in.w.vector, in.spec, *schreier(i));
        nlohmann::json iv = nlohmann::json::array();
        for (auto [a, b] : sup.intervals) iv.push_back({a, b});
        cr.values = {{"interval_sup", qj(sup.value)}, {"maximizer", iv}, {"max_block_norm", qj(ymax)},
                     {"support", in.w.vector.size()}, {"blocks", in.w.blocks.size()}};
        cr.checks.push_back(make_check("s.c.c. structure", Q(check_block_scc([&] {
                                           SccWitness b = in.w;
                                           b.kind = SccKind::Block;
                                           return b;
                                       }()) ? 1 : 0),
                                       Relation::Eq, Q(1)));
        cr.checks.push_back(
            make_check("sum norm(E_r x) <= (1+eps/theta_i) max norm(y_k)", sup.value, Relation::Le,
                       (1 + in.g->eps / theta_i) * ymax));
        return cr;
    });
    return r;
}

// ------------------------------------------------------------ theta_1 lower bound

ExperimentReport verify_theta1_lower(const VerifyParams& p)
{
    ExperimentReport r;
    r.experiment = "theta1_lower";
    r.seed = p.seed;
    SpaceSpec spec = exact_spec(preset(p.space.empty() ? "tsirelson_modified" : p.space));
    r.space = space_echo(spec);
    r.toy = spec.toy;
    const int n = p.pieces;
    if (n < 1 || n > 6) throw BadInputError("--pieces must lie in 1..6");
    const int count = p.count > 0 ? p.count : 200;
    r.params = {{"pieces", n}, {"count", count}, {"max_support", 10}};
    const Q theta1 = spec.level(1).theta;
    const std::vector<Q> values{Q(1), Q(1, 2), Q(3, 2), Q(2), Q(1, 3)};

    std::vector<std::vector<SparseVector>> inst;
    for (int c = 0; c < count; ++c) {
        Rng rng(p.seed, static_cast<std::uint64_t>(c));
        // Distinct positions in [n, n + 11], dealt to the pieces in random order.
        std::vector<Index> pool;
        for (Index k = n; k < n + 12; ++k) pool.push_back(k);
        for (std::size_t k = pool.size(); k > 1; --k) std::swap(pool[k - 1], pool[rng.below(k)]);
        std::vector<SparseVector> xs(static_cast<std::size_t>(n));
        std::size_t used = 0;
        for (auto& x : xs) {
            auto size = static_cast<std::size_t>(rng.between(1, 3));
            for (std::size_t t = 0; t < size && used < 10; ++t) {
                Q v = values[rng.below(values.size())];
                x.set(pool[used++], rng.coin() ? v : Q(-v));
            }
        }
        inst.push_back(std::move(xs));
    }

    r.cases = run_cases(inst.size(), [&](std::size_t c) {
        CaseResult cr;
        cr.id = "family-" + padded(c);
        const auto& xs = inst[c];
        nlohmann::json pieces = nlohmann::json::array();
        SparseVector sum;
        Q total = 0;
        for (const auto& x : xs) {
            pieces.push_back(to_string(x));
            if (x.empty()) continue;
            auto nr = norm(x, spec);
            cr.subproblems += nr.subproblems_evaluated;
            total += nr.value;
            sum = sum + x;
        }
        cr.inputs = {{"pieces", pieces}};
        auto nr = norm(sum, spec);
        cr.subproblems += nr.subproblems_evaluated;
        cr.values = {{"norm_sum", qj(nr.value)}, {"sum_of_norms", qj(total)}};
        cr.checks.push_back(make_check("norm(sum x_i) >= theta_1 sum norm(x_i)", nr.value, Relation::Ge, theta1 * total));
        return cr;
    });
    return r;
}

// ------------------------------------------------------------ toy suites

namespace {

Q m_weight(const SpaceSpec& spec, int k) { return 1 / spec.level(k).theta; }

std::vector<std::string> toy_hypotheses(const SpaceSpec& spec)
{
    std::vector<std::string> out;
    if (!spec.toy) return out;
    for (int k = 2; k <= spec.level_count(); ++k) {
        Q prev = m_weight(spec, k - 1), cur = m_weight(spec, k);
        // m_j > m_{j-1}^{m_{j-1}}, checked only while the power stays small.
        if (prev.get_den() == 1 && prev <= 8) {
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), prev.get_num().get_mpz_t(), prev.get_num().get_ui());
            if (!(cur > Q(pw))) {
                out.push_back("m_" + std::to_string(k) + " > m_" + std::to_string(k - 1) + "^m_" +
                              std::to_string(k - 1));
                break;
            }
        }
    }
    return out;
}

// The first candidate epsilon whose relative combination at level j fits in
// `max_points` anchors; records a violated hypothesis when it is not `wanted`.
Q toy_epsilon(const SpaceSpec& spec, int j, const Q& wanted, std::size_t max_points, std::vector<std::string>& hyp,
              const std::string& label)
{
    std::vector<Q> cands{wanted, Q(1, 9), Q(1, 4), Q(1, 3), Q(1, 2), Q(1)};
    for (const Q& e : cands) {
        if (e < wanted) continue;
        try {
            auto w = make_relative_scc(e, j, spec, IndexStream::progression(1, 1));
            if (w.vector.size() <= max_points) {
                if (e != wanted) hyp.push_back(label + " (used " + to_string(e) + ")");
                return e;
            }
        } catch (const ResourceLimitError&) {
        } catch (const BadInputError&) {
        }
    }
    throw ResourceLimitError("no relative s.c.c. at level " + std::to_string(j) + " within " +
                             std::to_string(max_points) + " points");
}

void level_check(CaseResult& c, const std::string& name, const LevelBounds& lb, const Q& bound)
{
    c.checks.push_back(make_check(name, lb.lower, lb.upper, Relation::Le, bound));
}

} // namespace

ExperimentReport verify_lemma24(const VerifyParams& p)
{
    ExperimentReport r;
    r.experiment = "lemma24";
    r.seed = p.seed;
    SpaceSpec base = preset(p.space.empty() ? "xm1u_toy(m=2,3;k=0,1)" : p.space);
    SpaceSpec primed = primed_spec(base);
    r.space = space_echo(primed);
    r.toy = base.toy;
    const int j = p.j > 0 ? p.j : 2;
    if (j < 2 || !base.has_level(j)) throw BadInputError("lemma24 needs 2 <= j <= number of levels");
    const Q M = p.mass;
    if (M <= 0) throw BadInputError("--mass must be positive");
    const int count = p.count > 0 ? p.count : 6;
    const Q mj = m_weight(base, j);
    std::vector<std::string> hyp = toy_hypotheses(base);
    const Q eps = toy_epsilon(base, j, 1 / (mj * mj), 9, hyp, "eps <= 1/m_j^2");
    r.params = {{"j", j}, {"mass", to_string(M)}, {"eps", to_string(eps)}, {"count", count}};

    struct Instance {
        SparseVector v;
        nlohmann::json inputs;
    };
    std::vector<Instance> inst;
    for (int c = 0; c < count; ++c) {
        Rng rng(p.seed, static_cast<std::uint64_t>(c));
        Index start = rng.between(1, 4);
        auto w = make_relative_scc(eps, j, base, IndexStream::progression(start, 2));
        // Blocks x_k start at n_k and end before n_{k+1}; total support <= 14.
        SparseVector v;
        nlohmann::json blocks = nlohmann::json::array();
        std::size_t budget = 14 - w.anchors.size();
        for (std::size_t k = 0; k < w.anchors.size(); ++k) {
            Index n = w.anchors[k];
            bool two = budget > 0 && rng.coin();
            SparseVector x;
            if (two) {
                --budget;
                Q a = Q(rng.between(1, 3)), b = Q(rng.between(1, 3));
                x.set(n, M * a / (a + b));
                x.set(n + 1, M * b / (a + b));
            } else {
                x.set(n, M);
            }
            blocks.push_back(to_string(x));
            v = v + x.scaled(w.coefficients[k]);
        }
        inst.push_back({v, {{"skeleton", to_string(w.vector)}, {"blocks", blocks}, {"x", to_string(v)}}});
    }

    const SpaceSpec below = truncated_spec(primed, j - 1);
    r.cases = run_cases(inst.size(), [&](std::size_t c) {
        const Instance& in = inst[c];
        CaseResult cr;
        cr.id = "instance-" + padded(c);
        cr.inputs = in.inputs;
        cr.hypotheses_violated = hyp;
        for (int s = 1; s <= primed.level_count(); ++s) {
            Q ms = m_weight(primed, s);
            auto lb = norm_level_bounds(in.v, primed, s);
            Q bound = s >= j ? Q(M / ms) : Q(2 * M / (ms * mj));
            cr.values["level_" + std::to_string(s)] = qj(lb.lower);
            level_check(cr, "level " + std::to_string(s) + (s >= j ? " <= M/m_s" : " <= 2M/(m_s m_j)"), lb, bound);
        }
        auto nr = norm(in.v, below);
        cr.subproblems = nr.subproblems_evaluated;
        cr.values["norm_below_j"] = qj(nr.lower);
        cr.checks.push_back(make_check("norm in K'(j-1) <= 2M/m_j^2", nr.lower, nr.upper, Relation::Le,
                                       2 * M / (mj * mj)));
        return cr;
    });
    return r;
}

namespace {

// Successive normalized blocks of one or two points, the first after 2.
std::vector<SparseVector> toy_blocks(Rng& rng, const SpaceSpec& spec, std::size_t count)
{
    std::vector<SparseVector> out;
    Index at = rng.between(3, 4);
    for (std::size_t k = 0; k < count; ++k) {
        SparseVector z;
        z.set(at, Q(rng.between(1, 3)));
        if (rng.coin()) z.set(++at, Q(rng.between(1, 3)));
        out.push_back(z.scaled(1 / norm(z, spec).value));
        at += rng.between(1, 2);
    }
    return out;
}

} // namespace

ExperimentReport verify_lemma27(const VerifyParams& p)
{
    ExperimentReport r;
    r.experiment = "lemma27";
    r.seed = p.seed;
    SpaceSpec spec = preset(p.space.empty() ? "xm1u_toy(m=2,3,4;k=1,1,1)" : p.space);
    r.space = space_echo(spec);
    r.toy = spec.toy;
    const int j = p.j > 0 ? p.j : 3;
    if (j < 3 || !spec.has_level(j)) throw BadInputError("lemma27 needs 3 <= j <= number of levels");
    const int count = p.count > 0 ? p.count : 6;
    const Q mj = m_weight(spec, j);
    std::vector<std::string> hyp = toy_hypotheses(spec);
    const Q eps = toy_epsilon(spec, j, 1 / (mj * mj * mj * mj), 7, hyp, "eps = 1/m_j^4");
    r.params = {{"j", j}, {"eps", to_string(eps)}, {"count", count}};

    struct Instance {
        SccWitness w;
        nlohmann::json inputs;
    };
    std::vector<Instance> inst;
    const SpaceSpec es = exact_spec(spec);
    for (int c = 0; c < count; ++c) {
        Rng rng(p.seed, static_cast<std::uint64_t>(c));
        auto blocks = toy_blocks(rng, es, 12);
        auto w = make_relative_block_scc(blocks, eps, j, spec);
        nlohmann::json bj = nlohmann::json::array();
        for (const auto& b : w.blocks) bj.push_back(to_string(b));
        inst.push_back({w, {{"blocks", bj}, {"x", to_string(w.vector)}}});
    }

    r.cases = run_cases(inst.size(), [&](std::size_t c) {
        const Instance& in = inst[c];
        CaseResult cr;
        cr.id = "instance-" + padded(c);
        cr.inputs = in.inputs;
        cr.hypotheses_violated = hyp;
        for (int rr = 2; rr < j; ++rr) {
            auto lb = norm_level_bounds(in.w.vector, spec, rr);
            cr.values["level_" + std::to_string(rr)] = qj(lb.lower);
            level_check(cr, "A_" + std::to_string(rr) + " value <= 2/m_r", lb, 2 / m_weight(spec, rr));
        }
        return cr;
    });
    return r;
}

ExperimentReport verify_cor217(const VerifyParams& p)
{
    ExperimentReport r;
    r.experiment = "cor217";
    r.seed = p.seed;
    SpaceSpec spec = preset(p.space.empty() ? "xm1u_toy(m=2,3,4,5,6,7,8;k=1,1,1,1,1,1,1)" : p.space);
    r.space = space_echo(spec);
    r.toy = spec.toy;
    const int j = p.j > 0 ? p.j : 2;
    if (j < 2 || !spec.has_level(j)) throw BadInputError("cor217 needs 2 <= j <= number of levels");
    const int count = p.count > 0 ? p.count : 4;
    const Q mj = m_weight(spec, j);
    std::vector<std::string> hyp = toy_hypotheses(spec);
    const Q eps = toy_epsilon(spec, j, 1 / (mj * mj), 5, hyp, "outer eps = 1/m_j^2");
    r.params = {{"j", j}, {"eps", to_string(eps)}, {"count", count}};

    struct Instance {
        RisWitness ris;
        SccWitness outer;
        nlohmann::json inputs;
    };
    std::vector<Instance> inst;
    const SpaceSpec es = exact_spec(spec);
    for (int c = 0; c < count; ++c) {
        Rng rng(p.seed, static_cast<std::uint64_t>(c));
        // R.I.S. blocks: seminormalized relative combinations of unit vectors at
        // strictly increasing levels j_k >= 2.
        auto outer_size = make_relative_scc(eps, j, spec, IndexStream::progression(1, 1)).anchors.size();
        RisWitness ris;
        ris.context = RisWitness::Context::NormingSubset;
        std::vector<SparseVector> blocks;
        Index after = rng.between(2, 4);
        bool inner_ok = true;
        for (std::size_t k = 0; k < outer_size; ++k) {
            int jk = std::min(2 + static_cast<int>(k), spec.level_count());
            if (2 + static_cast<int>(k) > spec.level_count()) inner_ok = false;
            Q mk = m_weight(spec, jk);
            std::vector<std::string> scratch;
            Q ek = toy_epsilon(spec, jk, 1 / (mk * mk * mk * mk), 5, scratch, "inner eps");
            if (!scratch.empty()) inner_ok = false;
            auto w = make_relative_scc(ek, jk, spec, IndexStream::progression(after + 1, 1));
            w.norm = norm(w.vector, es).value;
            w.generations = 1;
            if (2 * *w.norm < 1) inner_ok = false;
            after = w.vector.entries().back().first + rng.between(0, 1);
            blocks.push_back(w.vector);
            ris.blocks.push_back(std::move(w));
            ris.indices.push_back(jk);
        }
        if (!inner_ok) hyp.push_back("R.I.S. blocks are seminormalized (1/m_{j_k}^4, j_k)-s.c.c.s at increasing levels");
        auto outer = make_relative_block_scc(blocks, eps, j, spec);
        nlohmann::json bj = nlohmann::json::array();
        for (const auto& b : blocks) bj.push_back(to_string(b));
        inst.push_back({std::move(ris), outer, {{"blocks", bj}, {"x", to_string(outer.vector)}}});
    }
    std::sort(hyp.begin(), hyp.end());
    hyp.erase(std::unique(hyp.begin(), hyp.end()), hyp.end());

    r.cases = run_cases(inst.size(), [&](std::size_t c) {
        const Instance& in = inst[c];
        CaseResult cr;
        cr.id = "instance-" + padded(c);
        cr.inputs = in.inputs;
        cr.hypotheses_violated = hyp;
        auto ris = check_ris(in.ris, spec);
        cr.values["ris"] = to_json(ris);
        cr.values["ris_overall"] = to_string(ris.overall());
        auto nr = norm(in.outer.vector, spec);
        cr.subproblems = nr.subproblems_evaluated;
        cr.values["norm_lower"] = qj(nr.lower);
        cr.values["norm_upper"] = qj(nr.upper);
        cr.checks.push_back(make_check("norm >= 1/(4 m_j)", nr.lower, nr.upper, Relation::Ge, 1 / (4 * mj)));
        cr.checks.push_back(make_check("norm <= 17/m_j", nr.lower, nr.upper, Relation::Le, 17 / mj));
        return cr;
    });
    return r;
}

// ------------------------------------------------------------ distortion

Q distortion_ratio(const SparseVector& x, const SpaceSpec& spec, int i0)
{
    if (x.empty()) throw BadInputError("the distortion ratio is undefined for the zero vector");
    Q n = norm(x, spec).value;
    return spec.level(i0).theta + norm_level(x, spec, i0).first / n;
}

ExperimentReport distort(const DistortParams& p)
{
    ExperimentReport r;
    r.experiment = "distort";
    r.seed = p.seed;
    SpaceSpec spec = exact_spec(preset(p.space));
    r.space = space_echo(spec);
    r.toy = spec.toy;
    if (p.i0 < 1 || p.j < p.i0 || !spec.has_level(p.j)) throw BadInputError("distort needs 1 <= i0 <= j <= levels");
    if (p.trials < 1) throw BadInputError("--trials must be positive");
    if (p.support < 1 || p.support > 14) throw BadInputError("--support must lie in 1..14");
    r.params = {{"i0", p.i0}, {"j", p.j}, {"trials", p.trials}, {"support", p.support},
                {"witness", "uniform on the longest prefix in the level family"}};

    auto witness = [&](const FiniteSet& pos, int level) {
        auto fam = spec.level(level).family;
        FiniteSet prefix;
        for (Index k : pos) {
            prefix.push_back(k);
            if (!member(prefix, *fam)) {
                prefix.pop_back();
                break;
            }
        }
        SparseVector x;
        for (Index k : prefix) x.set(k, Q(1, static_cast<long>(prefix.size())));
        return x;
    };

    std::vector<FiniteSet> samples;
    for (int t = 0; t < p.trials; ++t) {
        Rng rng(p.seed, static_cast<std::uint64_t>(t));
        Index start = rng.between(3, 4);
        FiniteSet pos;
        for (Index at = start; pos.size() < p.support; at += rng.between(1, 2)) pos.push_back(at);
        samples.push_back(pos);
    }

    r.cases = run_cases(samples.size(), [&](std::size_t t) {
        CaseResult cr;
        cr.id = "trial-" + padded(t);
        SparseVector z = witness(samples[t], p.i0), y = witness(samples[t], p.j);
        cr.inputs = {{"positions", to_string(samples[t])}, {"z", to_string(z)}, {"y", to_string(y)}};
        Q rz = distortion_ratio(z, spec, p.i0), ry = distortion_ratio(y, spec, p.i0);
        Q gap = rz / ry;
        cr.values = {{"ratio_z", qj(rz)}, {"ratio_y", qj(ry)}, {"gap", qj(gap)}};
        if (p.i0 == p.j) cr.checks.push_back(make_check("gap == 1", gap, Relation::Eq, Q(1)));
        else cr.checks.push_back(make_check("gap > 1", gap, Relation::Gt, Q(1)));
        return cr;
    });
    Q lo = 0, hi = 0;
    for (std::size_t t = 0; t < r.cases.size(); ++t) {
        Q g = r.cases[t].checks.front().value;
        if (t == 0 || g < lo) lo = g;
        if (t == 0 || g > hi) hi = g;
    }
    r.summary = {{"min_gap", qj(lo)}, {"max_gap", qj(hi)}};
    if (r.toy) r.summary["note"] = "directional check only; the constant m_i0/1000 is not asserted";
    return r;
}

// ------------------------------------------------------------ dispatch

std::vector<std::string> suite_names()
{
    return {"schreier", "lemma112", "lemma113", "lemma24", "lemma27", "cor217", "theta1_lower"};
}

ExperimentReport verify(const std::string& suite, const VerifyParams& p)
{
    if (suite == "schreier") return verify_schreier(p);
    if (suite == "lemma112") return verify_lemma112(p);
    if (suite == "lemma113") return verify_lemma113(p);
    if (suite == "lemma24") return verify_lemma24(p);
    if (suite == "lemma27") return verify_lemma27(p);
    if (suite == "cor217") return verify_cor217(p);
    if (suite == "theta1_lower") return verify_theta1_lower(p);
    throw BadInputError("unknown suite: " + suite);
}

} // namespace tslab
