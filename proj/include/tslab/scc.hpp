#pragma once

#include "tslab/core.hpp"
#include "tslab/spacespec.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tslab {

/// Strictly increasing source of positive integers, queried by "first element
/// greater than `after`". Progressions are unbounded; lists are finite.
class IndexStream {
public:
    using Next = std::function<std::optional<Index>(Index after)>;

    IndexStream(Next next, std::string description);

    static IndexStream progression(Index start, Index step = 1);
    static IndexStream list(FiniteSet elements);
    // "naturals", "evens", "odds", "a+bn" (a, a+b, ...), or "list:3,5,9".
    static IndexStream parse(const std::string& text);

    std::optional<Index> next_after(Index after) const { return next_(after); }
    // The first `count` elements greater than `after`; throws BadInputError
    // when a finite stream runs out.
    FiniteSet take_after(Index after, std::size_t count) const;
    const std::string& description() const { return description_; }

private:
    Next next_;
    std::string description_;
};

enum class SccKind { Basic, Block, Relative };
std::string to_string(SccKind k);

/// Recursive follows the textbook induction (uniform level-1 pieces inside
/// doubling windows). Compact uses maximal level-1 blocks (block size equal
/// to its minimum) for n = 2 and falls back to Recursive when that does not
/// certify.
enum class SccStrategy { Recursive, Compact };

// Total support size allowed for any generated combination.
inline constexpr std::size_t kSccSupportCap = std::size_t{1} << 20;

struct SccWitness {
    SparseVector vector;              // sum a_k z_k
    Q epsilon;
    int level = 1;
    SccKind kind = SccKind::Basic;
    FiniteSet anchors;                // l_k; for basic kind, the support
    std::vector<Q> coefficients;      // a_k, aligned with anchors
    std::vector<SparseVector> blocks; // z_k (unit vectors for basic kind)
    int generations = 0;              // set by find_seminormalized_scc
    std::optional<Q> norm;            // exact norm when known
};

// (eps, n)-basic special convex combination supported in D.
SccWitness make_basic_scc(const Q& eps, int n, const IndexStream& d,
                          SccStrategy strategy = SccStrategy::Recursive);

// Convexity, support in F_n, mass below eps on every F_{n-1} set. With
// `relative_to`, the support family is level n of that space (a Schreier
// family S(k)), the small-mass family is P(S(k-1)) and the coefficients must
// be non-increasing.
bool check_basic_scc(const SparseVector& x, const Q& eps, int n,
                     const SpaceSpec* relative_to = nullptr);

// Relative-kind construction: an (eps/2)-basic combination on level n of the
// space, which then has mass below eps on the primed family.
SccWitness make_relative_scc(const Q& eps, int n, const SpaceSpec& spec, const IndexStream& d);

// Anchors l_k = max supp z_k; a basic combination on a subset of the anchors
// is transplanted onto the corresponding blocks.
SccWitness make_block_scc(const std::vector<SparseVector>& blocks, const Q& eps, int j,
                          SccStrategy strategy = SccStrategy::Compact);

// Same with the anchor combination of relative kind at level j of `spec`.
SccWitness make_relative_block_scc(const std::vector<SparseVector>& blocks, const Q& eps, int j,
                                   const SpaceSpec& spec);

// Structural check of a block witness: interleaving 2 < z_1 <= l_1 < z_2 <= ...,
// the anchor combination is basic, and vector == sum a_k z_k.
bool check_block_scc(const SccWitness& w, const SpaceSpec* relative_to = nullptr);

// Returns the block with support after `after`.
using BlockStream = std::function<SparseVector(Index after)>;
BlockStream unit_blocks(const IndexStream& d);

inline constexpr int kGenerationCap = 8;

// Repeats "combine, measure, renormalize" until the combination has norm at
// least 1/2. Throws ResourceLimitError naming the cap when it is exceeded, or
// when an exact norm becomes too large to compute.
SccWitness find_seminormalized_scc(const BlockStream& blocks, const Q& eps, int j,
                                   const SpaceSpec& spec, int generation_cap = kGenerationCap);

/// Family of nested trees. Node 0 is the root; a node at depth r >= 1 carries
/// the terminal index l^r of the depth-r tree and its coefficient a_beta.
struct NestedTrees {
    struct Node {
        std::vector<int> path; // child ordinals from the root
        int depth = 0;
        Index position = 0;    // l^depth_alpha, unused at the root
        Q coefficient = 1;
        int parent = -1;
        std::vector<int> children;
    };
    Q epsilon;
    std::vector<int> js;       // j_1..j_n
    std::vector<Node> nodes;   // preorder

    int height() const { return static_cast<int>(js.size()); }
    // u^r_gamma: the depth-r terminal vectors below `node`, weighted by the
    // coefficient products.
    SparseVector vector(int r, int node) const;
};

NestedTrees make_nested_trees(const Q& eps, const std::vector<int>& js, const IndexStream& l);

struct NestedTreesCheck {
    bool ordered = true;       // depth-r terminals increase in lexicographic order
    bool coefficients = true;  // children coefficients sum to 1
    bool basic = true;         // every u^r_gamma is basic at the summed level
    bool interleaving = true;  // l^r_alpha < l^{r+1}_beta < l^r_{alpha+}
    bool ok() const { return ordered && coefficients && basic && interleaving; }
};
NestedTreesCheck check_nested_trees(const NestedTrees& t);

enum class Verdict { Pass, Fail, Indeterminate };
std::string to_string(Verdict v);

struct RisWitness {
    enum class Context { Plain, NormingSubset };
    std::vector<SccWitness> blocks;
    std::vector<int> indices;  // t_k (plain) or j_k (norming subset)
    Context context = Context::Plain;
};

struct ClauseResult {
    std::string clause; // "a", "b", "c" or "i".."iv", suffixed with the block index
    Verdict verdict = Verdict::Pass;
    std::string detail;
};

struct RisReport {
    std::vector<ClauseResult> clauses;
    Verdict overall() const;
};

// Plain context: theta_{t_k}/theta_{t_{k+1}} > 2 and non-decreasing (increasing
// with `strict`), blocks are seminormalized (theta_{t_k}^2, t_k)-s.c.c.s, and
// the l1 growth bound. Norming-subset context uses m_j = 1/theta_j and the
// heavy-functional count for the O-sets.
RisReport check_ris(const RisWitness& w, const SpaceSpec& spec, bool strict = false);

nlohmann::json to_json(const SccWitness& w);
nlohmann::json to_json(const RisReport& r);

} // namespace tslab
