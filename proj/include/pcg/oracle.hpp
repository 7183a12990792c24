#pragma once

#include <functional>
#include <span>

#include "pcg/coarse.hpp"
#include "pcg/group_index.hpp"
#include "pcg/types.hpp"

namespace pcg::oracle {

// Enumeration paths refuse vocabularies above this bound by default; larger
// instances are only checked by sampling.
constexpr uint64_t kDefaultEnumerationBound = 4096;

// Full coarse vector (sum over t in G_k of dist(t) w(k,t)) for every group.
GroupDistribution exact_coarse(const TokenDistribution & dist, const GroupIndex & index,
                               uint64_t enumeration_bound = kDefaultEnumerationBound);

// Per-group accept mass min(Pc, Qc) plus the rejection probability times the
// normalized residual. Equals exact_coarse(target) identically; computing it
// through the accept/reject route keeps the check independent of that fact.
GroupDistribution exact_emitted(const TokenDistribution & draft, const TokenDistribution & target,
                                const GroupIndex & index, uint64_t enumeration_bound = kDefaultEnumerationBound);

// Normalized [Qc - Pc]_+. Throws DegenerateError when every entry is zero.
GroupDistribution exact_residual(const TokenDistribution & draft, const TokenDistribution & target,
                                 const GroupIndex & index, uint64_t enumeration_bound = kDefaultEnumerationBound);

// Total variation distance (1/2) sum |a - b| between equal-length vectors.
double tv_distance(std::span<const double> a, std::span<const double> b);

// Frequency vector plus goodness-of-fit of `trials` draws from `sampler`
// against an exact reference over [0, reference.size()).
struct FitReport {
    GroupDistribution empirical;
    double            tv          = 0.0;
    double            chi_square  = 0.0;
    double            p_value     = 0.0;
    uint64_t          dof         = 0;
    uint64_t          trials      = 0;
};

FitReport empirical_distribution(const std::function<uint32_t()> & sampler, uint64_t trials,
                                 std::span<const double> reference);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_p_value(double statistic, uint64_t dof);

} // namespace pcg::oracle
