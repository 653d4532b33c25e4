#pragma once

#include "tslab/core.hpp"
#include "tslab/normengine.hpp"
#include "tslab/scc.hpp"
#include "tslab/spacespec.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tslab {

inline constexpr std::uint64_t kDefaultSeed = 0x7a11'5eed'0b5e'55edULL;

/// Seeded generator; draws avoid the library distributions so the streams are
/// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : g_() % n; }
    std::int64_t between(std::int64_t lo, std::int64_t hi) // inclusive
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }
    bool coin() { return (g_() & 1U) != 0; }

private:
    std::mt19937_64 g_;
};

enum class Relation { Le, Lt, Ge, Gt, Eq };
std::string to_string(Relation r);

struct BoundCheck {
    std::string name;
    Q value;          // computed
    Relation relation = Relation::Le;
    Q bound;          // claimed
    Verdict verdict = Verdict::Pass;
    std::string note;
};

// value relation bound, decided exactly.
BoundCheck make_check(std::string name, const Q& value, Relation rel, const Q& bound);
// Decides from an enclosure [lower, upper] of the value; Indeterminate when the
// enclosure straddles the bound.
BoundCheck make_check(std::string name, const Q& lower, const Q& upper, Relation rel, const Q& bound);

struct CaseResult {
    std::string id;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json values = nlohmann::json::object();
    std::vector<BoundCheck> checks;
    std::vector<std::string> hypotheses_violated;
    std::uint64_t subproblems = 0;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = kDefaultSeed;
    bool toy = false;
    nlohmann::json space;  // name and config text, or null for space-free suites
    nlohmann::json params = nlohmann::json::object();
    std::vector<CaseResult> cases;
    nlohmann::json summary = nlohmann::json::object();

    std::size_t count(Verdict v) const;
    // 0 when nothing failed or in toy mode, 1 otherwise.
    int exit_code() const;
};

inline constexpr const char* kToyBanner = "growth-conditions-violated";

// Deterministic rendering: no timings, cases sorted by id.
nlohmann::json to_json(const ExperimentReport& r);
std::string to_table(const ExperimentReport& r);
nlohmann::json space_echo(const SpaceSpec& spec);

struct VerifyParams {
    std::uint64_t seed = kDefaultSeed;
    std::string space;         // empty: the suite default
    int count = 0;             // 0: the suite default
    int ground = 10;           // schreier oracle ground set [1..ground]
    int bracket_ground = 12;   // schreier bracket identity ground set
    std::vector<int> js;       // lemma112; empty: {1, 2}
    std::vector<Q> epsilons;   // lemma112; empty: {1/2, 1/3}
    std::string theta = "1/(n+1)";
    int claim_l = 6;           // lemma112 claim: l <= claim_l
    int claim_r = 2;           // lemma112 claim: r <= claim_r
    int pieces = 3;            // theta1_lower
    int j = 0;                 // toy suites; 0: the suite default
    Q mass = 1;                // lemma24 block l1 mass M
};

std::vector<std::string> suite_names();
// Throws BadInputError for an unknown suite.
ExperimentReport verify(const std::string& suite, const VerifyParams& p);

ExperimentReport verify_schreier(const VerifyParams& p);
ExperimentReport verify_lemma112(const VerifyParams& p);
ExperimentReport verify_lemma113(const VerifyParams& p);
ExperimentReport verify_lemma24(const VerifyParams& p);
ExperimentReport verify_lemma27(const VerifyParams& p);
ExperimentReport verify_cor217(const VerifyParams& p);
ExperimentReport verify_theta1_lower(const VerifyParams& p);

struct DistortParams {
    std::string space = "xm1u_toy";
    int i0 = 1;
    int j = 2;
    int trials = 20;
    std::uint64_t seed = kDefaultSeed;
    std::size_t support = 12;  // sampled block positions per trial
};

// theta_{i0} + norm_level(x, i0) / norm(x); rejects the zero vector.
Q distortion_ratio(const SparseVector& x, const SpaceSpec& spec, int i0);

// Level-L witnesses are uniform combinations on the longest prefix of a
// sampled block sequence whose support lies in the level-L family. The ratio
// r(x) = distorted_norm(x, i0) / norm(x) is computed for the level-i0 witness
// z and the level-j witness y; the gap is r(z) / r(y).
ExperimentReport distort(const DistortParams& p);

// sup over F_i-admissible interval families (E_r) of sum_r norm(E_r x), with
// the maximizing intervals as support-index ranges.
struct IntervalSup {
    Q value;
    std::vector<std::pair<Index, Index>> intervals;
};
IntervalSup interval_family_sup(const SparseVector& x, const SpaceSpec& spec, const FamilyDescriptor& fi);

} // namespace tslab
