#ifndef TSLAB_SETFAMILIES_HPP
#define TSLAB_SETFAMILIES_HPP

#include "tslab/rational.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tslab {

// Strictly increasing list of positive integers.
using FiniteSet = std::vector<Index>;

// Sorts and removes duplicates; rejects non-positive entries.
FiniteSet make_set(std::vector<Index> elems);

struct FamilyDescriptor;
using FamilyPtr = std::shared_ptr<const FamilyDescriptor>;

/// Symbolic compact, hereditary, spreading family of finite sets.
///
/// Schreier(n) is the n-th Schreier family, Cardinality(k) the sets of size
/// at most k, Bracket(M, N) the unions of successive N-sets whose minima form
/// an M-set, Prime(F) the unions of two disjoint F-sets.
struct FamilyDescriptor {
    enum class Kind { Schreier, Cardinality, Bracket, Prime };
    Kind kind = Kind::Schreier;
    int param = 0;  // n for Schreier, k for Cardinality
    FamilyPtr outer; // Bracket outer, Prime base
    FamilyPtr inner; // Bracket inner

    bool operator==(const FamilyDescriptor& o) const;
};

FamilyPtr schreier(int n);
FamilyPtr cardinality(int k);
FamilyPtr bracket(FamilyPtr outer, FamilyPtr inner);
FamilyPtr prime(FamilyPtr base);

// Text syntax: S(n), A(k), B(outer,inner), P(base).
std::string to_string(const FamilyDescriptor& f);
FamilyPtr parse_family(const std::string& text);

/// Streaming acceptor for a family: feeding the elements of A in increasing
/// order accepts every prefix iff A is a member.
///
/// States are flat integer vectors so they can key hash maps. Schreier and
/// bracket levels run the greedy decomposition (longest admissible inner
/// block first); Prime tracks every split of the elements into two parts.
class FamilyAutomaton {
public:
    using State = std::vector<std::int64_t>;

    explicit FamilyAutomaton(const FamilyDescriptor& f);

    State initial() const;
    // Returns false when the extended set leaves the family.
    bool step(const State& s, Index x, State& out) const;
    // Clamps counting budgets to `remaining`; states with equal capped form
    // accept the same continuations of at most `remaining` further elements.
    void cap(State& s, std::int64_t remaining) const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

struct VectorHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept;
};

bool member(const FiniteSet& a, const FamilyDescriptor& f);

// Independent oracle: the disjoint-parts recursion for Schreier families,
// decided by subset dynamic programming over the elements of A.
bool member_modified(const FiniteSet& a, int n);

bool is_admissible(const std::vector<FiniteSet>& parts, const FamilyDescriptor& f);
bool is_allowable(const std::vector<FiniteSet>& parts, const FamilyDescriptor& f);

// max over G in F of the coefficient sum over G; coefficients must be >= 0.
Q max_weight(const std::map<Index, Q>& a, const FamilyDescriptor& f);

inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 24;

// All members of F inside [lo, hi] in lexicographic order (empty set first).
// Throws ResourceLimitError once more than kEnumerationCap candidates are visited.
std::vector<FiniteSet> members_in_window(const FamilyDescriptor& f, Index lo, Index hi);

// The inclusion-maximal members of F inside [lo, hi], lexicographic order.
std::vector<FiniteSet> maximal_members(const FamilyDescriptor& f, Index lo, Index hi);

std::string to_string(const FiniteSet& s);

} // namespace tslab

#endif
