#pragma once

#include "tslab/core.hpp"
#include "tslab/spacespec.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace tslab {

struct NormResult {
    Q value;                       // exact norm, or the certified lower bound when !exact
    FunctionalTree certificate;    // evaluate(certificate, x) == value
    std::uint64_t subproblems_evaluated = 0;
    int truncation_level = 0;      // highest level examined by any subproblem
    bool exact = true;
    Q lower;                       // == value
    Q upper;                       // == value when exact
    bool degenerate = false;       // x == 0
};

// Implicit norm max(|x|_inf, sup_k theta_k sup sum_i |E_i x|) with a maximizing
// certificate. Ties resolve to the first optimum in scan order: leaf before
// nodes, lower level first, then lexicographically smaller child minima.
NormResult norm(const SparseVector& x, const SpaceSpec& spec);

// theta_k * sup over legal level-k families (one part allowed); root has level k.
std::pair<Q, FunctionalTree> norm_level(const SparseVector& x, const SpaceSpec& spec, int k);

struct LevelBounds {
    Q value;                       // certified lower bound, exact when `exact`
    FunctionalTree certificate;
    bool exact = true;
    Q lower;
    Q upper;                       // theta_k * l1 bound above the allowable cap
};
LevelBounds norm_level_bounds(const SparseVector& x, const SpaceSpec& spec, int k);

// Norms of the restrictions of x to runs of consecutive support points:
// out[a][b] covers support positions a..b. Exact search only.
std::vector<std::vector<Q>> interval_norms(const SparseVector& x, const SpaceSpec& spec);

// theta_{i0} * norm(x) + norm_level(x, i0).
Q distorted_norm(const SparseVector& x, const SpaceSpec& spec, int i0);

// norm of (x_i^2)_i, i.e. the square of the 2-convexified norm.
Q two_convexified_norm(const SparseVector& x, const SpaceSpec& spec);

// Independent oracle: maximum of f(|x|) over explicitly enumerated functionals
// of depth <= depth supported in supp x. Needs |supp x| <= 8 and depth <= 4.
Q norm_bruteforce(const SparseVector& x, const SpaceSpec& spec, int depth);

// Batch evaluation: the serial reference and the OpenMP version over queries.
std::vector<NormResult> norm_batch_serial(const std::vector<SparseVector>& xs, const SpaceSpec& spec);
std::vector<NormResult> norm_batch(const std::vector<SparseVector>& xs, const SpaceSpec& spec);

} // namespace tslab
