#include "pcg/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pcg {

double coarse_mass(const TokenDistribution & dist, GroupId k, const GroupIndex & index) {
    double mass = 0.0;
    for (TokenId t : index.group(k)) {
        mass += dist.probs[t] * index.member_weight(t);
    }
    return mass;
}

CoarseMassPair coarse_pair(const TokenDistribution & draft, const TokenDistribution & target, GroupId k,
                           const GroupIndex & index) {
    double pc = 0.0;
    double qc = 0.0;
    for (TokenId t : index.group(k)) {
        const double w = index.member_weight(t);
        pc += draft.probs[t] * w;
        qc += target.probs[t] * w;
    }
    return CoarseMassPair{k, pc, qc};
}

GroupId sample_group_label(TokenId x, const GroupIndex & index, RngStream & rng) {
    const auto & groups = index.memberships(x);
    if (groups.size() == 1) {
        return groups[0];
    }
    return groups[rng.next_below(groups.size())];
}

double accept_prob(const TokenDistribution & draft, const TokenDistribution & target, GroupId k,
                   const GroupIndex & index) {
    const CoarseMassPair pair = coarse_pair(draft, target, k, index);
    if (pair.pc <= 0.0) {
        throw DegenerateError("accept_prob: P_c(G_k) is zero; group label was not obtained via the coupling");
    }
    return std::min(1.0, pair.qc / pair.pc);
}

namespace {

// Token draw inside group K from q(t) w(K,t) / Q_c(G_K). The cumulative walk
// uses a freshly accumulated total so the last bucket always catches u.
TokenId emit_within_group(const TokenDistribution & target, GroupId k, const GroupIndex & index, RngStream & rng) {
    const auto &        members = index.group(k);
    std::vector<double> mass(members.size());
    double              total = 0.0;
    for (size_t i = 0; i < members.size(); ++i) {
        mass[i] = target.probs[members[i]] * index.member_weight(members[i]);
        total += mass[i];
    }
    const double u   = rng.next_unit() * total;
    double       acc = 0.0;
    for (size_t i = 0; i < members.size(); ++i) {
        acc += mass[i];
        if (u < acc) {
            return members[i];
        }
    }
    for (size_t i = members.size(); i-- > 0;) {
        if (mass[i] > 0.0) {
            return members[i];
        }
    }
    throw DegenerateError("residual emission: group has zero target mass");
}

} // namespace

ResidualSampleResult residual_sample_thinning(const TokenDistribution & draft, const TokenDistribution & target,
                                              const GroupIndex & index, RngStream & rng, int32_t max_trials) {
    if (max_trials < 1) {
        throw InvalidArgError("residual_sample_thinning needs max_trials >= 1");
    }
    ResidualSampleResult result;
    for (int32_t trial = 1; trial <= max_trials; ++trial) {
        const TokenId y = sample_categorical(target.probs, rng);
        const GroupId k = sample_group_label(y, index, rng); // K ~ Q_c
        const CoarseMassPair pair = coarse_pair(draft, target, k, index);
        if (pair.qc <= 0.0) {
            throw DegenerateError("thinning: Q_c(G_K) is zero for a sampled group");
        }
        const double a = std::max(0.0, 1.0 - pair.pc / pair.qc);
        if (rng.next_unit() < a) {
            result.group  = k;
            result.token  = emit_within_group(target, k, index, rng);
            result.trials = trial;
            return result;
        }
    }
    // Trial cap hit: the coarse distributions are numerically indistinguishable,
    // so a direct target draw is the documented safeguard.
    result.fallback = true;
    result.trials   = max_trials;
    result.token    = sample_categorical(target.probs, rng);
    result.group    = sample_group_label(result.token, index, rng);
    return result;
}

double exact_group_identity_check(const TokenDistribution & draft, const TokenDistribution & target,
                                  const GroupIndex & index) {
    double max_dev = 0.0;
    for (GroupId k = 0; k < index.group_count(); ++k) {
        const CoarseMassPair pair = coarse_pair(draft, target, k, index);
        const double lhs = std::min(pair.pc, pair.qc) + std::max(pair.qc - pair.pc, 0.0);
        max_dev          = std::max(max_dev, std::abs(lhs - pair.qc));
    }
    return max_dev;
}

StepSample coarse_single_step(const TokenDistribution & draft, const TokenDistribution & target,
                              const GroupIndex & index, StepRngs & rngs, int32_t max_trials) {
    StepSample s;
    s.drafted = sample_categorical(draft.probs, rngs.draft_token);
    s.label   = sample_group_label(s.drafted, index, rngs.group_label);
    s.ratio   = accept_prob(draft, target, s.label, index);
    s.uniform = rngs.accept_u.next_unit();
    if (s.uniform < s.ratio) {
        s.accepted      = true;
        s.emitted_group = s.label;
        s.emitted_token = s.drafted; // draft token stands in as the group representative
    } else {
        const ResidualSampleResult res = residual_sample_thinning(draft, target, index, rngs.thinning, max_trials);
        s.emitted_group     = res.group;
        s.emitted_token     = res.token;
        s.residual_trials   = res.trials;
        s.residual_fallback = res.fallback;
    }
    return s;
}

} // namespace pcg
