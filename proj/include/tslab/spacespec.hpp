#pragma once

#include "tslab/rational.hpp"
#include "tslab/setfamilies.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tslab {

enum class Variant { Plain, Modified, BoundedlyModified };
enum class Mode { Admissible, Allowable };

std::string to_string(Variant v);
std::string to_string(Mode m);

struct Level {
    FamilyPtr family;
    Q theta;
};

// Generator for levels past the explicit list: level n uses the family
// S(a*n + b) and weight theta_n.
struct LevelRule {
    enum class Theta { Reciprocal, Geometric };
    Theta theta_kind = Theta::Reciprocal;
    Q param = 1;       // Reciprocal: theta_n = 1/(n + param); Geometric: theta_n = param^n
    int family_a = 1;
    int family_b = 0;

    Q theta(int n) const;
    FamilyPtr family(int n) const;
    std::string theta_text() const;
    std::string family_text() const;
};

inline constexpr std::uint64_t kDefaultBudget = 50'000'000;
// TSLAB_BUDGET when set to a positive integer, else kDefaultBudget.
std::uint64_t default_budget();

struct SpaceSpec {
    std::string name = "custom";
    Variant variant = Variant::Plain;
    int bound_s = 0;               // used by BoundedlyModified
    std::vector<Level> levels;     // explicit levels 1..levels.size()
    std::optional<LevelRule> rule; // continues after the explicit list
    int max_levels = 64;           // hard stop for rule-generated levels
    std::uint64_t budget = default_budget(); // DP subproblem budget per query
    std::size_t allowable_cap = 14;    // exact subset DP up to this many support points
    bool exact = false;            // above the cap: error instead of bounds
    bool approximate_weights = false;
    bool toy = false;

    bool has_level(int k) const;
    Level level(int k) const;      // 1-based; throws BadInputError when absent
    Mode mode_at(int k) const;
    // Number of levels: explicit list size, or max_levels when a rule is present.
    int level_count() const;
    bool allowable_anywhere() const;
};

// Key-value config text (one `key = value` per line, '#' comments):
//   variant = plain | modified | boundedly_modified
//   s = 1
//   theta = 1/(n+1) | (1/2)^n | 1/2,1/5
//   schreier_seq k_n = 2n+1 | schreier_seq k = 1,11
//   families = S(1),A(3)
//   max_levels = 64
//   budget = 50000000
SpaceSpec parse_spec_config(const std::string& text);
std::string to_config(const SpaceSpec& spec);

// Well-formedness: theta in (0,1), non-empty levels, consistent variant.
void check_well_formed(const SpaceSpec& spec);

} // namespace tslab
