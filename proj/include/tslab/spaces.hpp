#pragma once

#include "tslab/spacespec.hpp"

#include <string>
#include <vector>

namespace tslab {

// Parameters of the arbitrarily distortable space X_{M(1),u}:
// m_1 = 2, m_j = m_{j-1}^{m_{j-1}} + 1, t_j minimal with 2^{t_j} >= m_j^2,
// k_1 = 1, k_j = t_j (k_{j-1} + 1) + 1.  t[0] is unused and set to 0.
struct Xm1uParams {
    std::vector<mpz_class> m;
    std::vector<mpz_class> t;
    std::vector<mpz_class> k;
    int depth = 0;
};

// depth >= 1; depth > 4 exceeds the big-integer budget and throws ResourceLimitError.
Xm1uParams build_xm1u_params(int depth);

// Re-substitutes the recurrences; true when every invariant holds.
bool check_xm1u_params(const Xm1uParams& p);

// Names: tsirelson, tsirelson_modified, t_delta(d), schlumprecht,
// schlumprecht_modified, mixed_fn(rule), mixed_fn_modified(rule), xm1u(depth),
// xm1u_toy, xm1u_toy(m=..;k=..).  Rules use the config theta syntax.
SpaceSpec preset(const std::string& name);
std::vector<std::string> preset_names();

SpaceSpec xm1u_toy(const std::vector<int>& m, const std::vector<int>& k);

// Same weights and variant, every family F replaced by P(F). Rule-generated
// levels are materialized up to level_count().
SpaceSpec primed_spec(const SpaceSpec& spec);

// Levels 1..levels only.
SpaceSpec truncated_spec(const SpaceSpec& spec, int levels);

// theta_n in (0,1), strictly decreasing, theta_{n+m} >= theta_n theta_m for n+m <= prefix.
bool check_regular(const std::vector<Q>& thetas);
bool check_regular(const LevelRule& rule, int prefix_length);

} // namespace tslab
