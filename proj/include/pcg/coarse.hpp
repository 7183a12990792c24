#pragma once

#include <cstdint>

#include "pcg/group_index.hpp"
#include "pcg/rng.hpp"
#include "pcg/types.hpp"

namespace pcg {

// Result of a residual draw via thinning: the accepted group, the token
// emitted from its target-conditional, and the number of trials consumed.
// `fallback` is set only when the trial cap was exhausted (possible only in
// the numerically degenerate case where the coarse distributions coincide);
// the result then falls back to a direct target draw.
struct ResidualSampleResult {
    GroupId group    = 0;
    TokenId token    = 0;
    int32_t trials   = 0;
    bool    fallback = false;
};

constexpr int32_t kDefaultMaxThinningTrials = 1000;

// Coarse mass of group k: sum over t in G_k of dist(t) * w(k, t). With
// equal-split weights this is sum of dist(t) / N(t). Cost O(|G_k|). Because
// each token's weights sum to one, these masses form a distribution over
// groups with no global normalization.
double coarse_mass(const TokenDistribution & dist, GroupId k, const GroupIndex & index);

// Coarse masses of one group under a draft/target pair.
CoarseMassPair coarse_pair(const TokenDistribution & draft, const TokenDistribution & target, GroupId k,
                           const GroupIndex & index);

// Draw a group label for token x from its membership weights (equal-split:
// uniform over S(x)). Composed with x ~ p this makes the label distribution
// equal the coarse draft distribution P_c.
GroupId sample_group_label(TokenId x, const GroupIndex & index, RngStream & rng);

// Group-level acceptance ratio min(1, Q_c(G_k) / P_c(G_k)). Throws
// DegenerateError when P_c(G_k) == 0, which cannot happen for labels obtained
// through the coupling and therefore flags a caller bug.
double accept_prob(const TokenDistribution & draft, const TokenDistribution & target, GroupId k,
                   const GroupIndex & index);

// Sample a group from the residual [Q_c - P_c]_+ (normalized) without
// enumerating groups: repeat { y ~ target; K ~ w(.,y); accept K with
// probability [1 - P_c(G_K)/Q_c(G_K)]_+ }, then emit a token inside the
// accepted group from the target-conditional q(t) w(K,t) / Q_c(G_K).
ResidualSampleResult residual_sample_thinning(const TokenDistribution & draft, const TokenDistribution & target,
                                              const GroupIndex & index, RngStream & rng,
                                              int32_t max_trials = kDefaultMaxThinningTrials);

// Diagnostic for the single-step exactness identity
//   min(P_c, Q_c) + [Q_c - P_c]_+ = Q_c  (per group);
// returns the max absolute deviation over all groups.
double exact_group_identity_check(const TokenDistribution & draft, const TokenDistribution & target,
                                  const GroupIndex & index);

// One propose/accept-or-residual step at the group level, with disjoint
// streams per draw purpose. The emitted group is an exact sample from Q_c.
struct StepRngs {
    RngStream draft_token;
    RngStream group_label;
    RngStream accept_u;
    RngStream thinning;

    static StepRngs from(uint64_t seed, uint64_t seq, uint64_t step) {
        return StepRngs{
            RngStream::from(seed, seq, step, RngPurpose::DraftToken),
            RngStream::from(seed, seq, step, RngPurpose::GroupLabel),
            RngStream::from(seed, seq, step, RngPurpose::AcceptU),
            RngStream::from(seed, seq, step, RngPurpose::Thinning),
        };
    }
};

struct StepSample {
    TokenId drafted  = 0;
    GroupId label    = 0; // label drawn for the proposal
    double  ratio    = 0.0;
    double  uniform  = 0.0;
    bool    accepted = false;
    GroupId emitted_group = 0;
    TokenId emitted_token = 0;
    int32_t residual_trials = 0;
    bool    residual_fallback = false;
};

StepSample coarse_single_step(const TokenDistribution & draft, const TokenDistribution & target,
                              const GroupIndex & index, StepRngs & rngs,
                              int32_t max_trials = kDefaultMaxThinningTrials);

} // namespace pcg
