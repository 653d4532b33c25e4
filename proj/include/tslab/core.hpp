#pragma once

#include "tslab/rational.hpp"
#include "tslab/setfamilies.hpp"
#include "tslab/spacespec.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tslab {

/// Finitely supported vector with exact rational coefficients.
/// Entries are kept sorted by index and zero coefficients are never stored.
class SparseVector {
public:
    using Entry = std::pair<Index, Q>;

    SparseVector() = default;
    explicit SparseVector(const std::map<Index, Q>& coeffs);
    static SparseVector unit(Index n);

    void set(Index i, const Q& value);
    Q get(Index i) const;

    const std::vector<Entry>& entries() const { return entries_; }
    FiniteSet support() const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    Q linf() const;
    Q l1() const;
    std::map<Index, Q> as_map() const;

    SparseVector abs() const;
    SparseVector scaled(const Q& c) const;
    SparseVector operator+(const SparseVector& o) const;
    bool operator==(const SparseVector& o) const { return entries_ == o.entries_; }

private:
    std::vector<Entry> entries_;
};

// "2:1,3:1/2" -> e_2 + (1/2) e_3
SparseVector parse_vector(const std::string& text);
std::string to_string(const SparseVector& x);

SparseVector restrict(const SparseVector& x, const FiniteSet& e);
SparseVector restrict(const SparseVector& x, Index lo, Index hi);

/// Element of the norming set: a signed unit functional or
/// theta_k * (sum of children) for a legal family of children at level k.
struct FunctionalTree {
    bool leaf = true;
    int sign = 1;
    Index index = 1;
    Q weight;
    int level = 0;
    Mode mode = Mode::Admissible;
    std::vector<FunctionalTree> children;

    static FunctionalTree make_leaf(int sign, Index index);
    static FunctionalTree make_node(Q weight, int level, Mode mode, std::vector<FunctionalTree> children);

    FiniteSet support() const;
    Index min_support() const;
    int depth() const;
    // Coordinates as an explicit linear functional.
    std::map<Index, Q> coefficients() const;
    bool operator==(const FunctionalTree& o) const;
};

Q evaluate(const FunctionalTree& f, const SparseVector& x);
bool validate(const FunctionalTree& f, const SpaceSpec& spec);
std::string to_string(const FunctionalTree& f);

struct HeavySupports {
    std::vector<FiniteSet> supports; // sorted, distinct
    mpz_class count;                 // number of functionals (signs included)
    bool over_approximate = false;
};

// Functionals f with supp f in [1, l] and |f(e_m)| > tau on all of supp f.
// Exhaustive when l <= 12, every such functional has depth <= 4 and the
// enumeration stays under a fixed size cap;
// otherwise a certified over-approximation flagged as such.
HeavySupports enumerate_heavy_supports(const SpaceSpec& spec, Index l, const Q& tau);

nlohmann::json to_json(const SparseVector& x);
SparseVector vector_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FunctionalTree& f);
FunctionalTree tree_from_json(const nlohmann::json& j);
nlohmann::json rational_json(const Q& q); // {"exact": "p/q", "decimal": "..."}

} // namespace tslab
