#include "pcg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace pcg::oracle {

namespace {

void check_bound(const GroupIndex & index, uint64_t bound) {
    if (index.vocab_size() > bound) {
        throw InvalidArgError("enumeration path refused: vocabulary exceeds the bound of " + std::to_string(bound));
    }
}

} // namespace

GroupDistribution exact_coarse(const TokenDistribution & dist, const GroupIndex & index, uint64_t enumeration_bound) {
    check_bound(index, enumeration_bound);
    GroupDistribution out;
    out.provenance = dist.role == DistRole::Draft ? GroupDistProvenance::ExactPc : GroupDistProvenance::ExactQc;
    out.mass.resize(index.group_count());
    for (GroupId k = 0; k < index.group_count(); ++k) {
        out.mass[k] = coarse_mass(dist, k, index);
    }
    return out;
}

GroupDistribution exact_emitted(const TokenDistribution & draft, const TokenDistribution & target,
                                const GroupIndex & index, uint64_t enumeration_bound) {
    check_bound(index, enumeration_bound);
    const uint64_t      m = index.group_count();
    std::vector<double> accept_mass(m);
    std::vector<double> residual(m);
    double              accept_total   = 0.0;
    double              residual_total = 0.0;
    for (GroupId k = 0; k < m; ++k) {
        const CoarseMassPair pair = coarse_pair(draft, target, k, index);
        accept_mass[k]            = std::min(pair.pc, pair.qc);
        residual[k]               = std::max(pair.qc - pair.pc, 0.0);
        accept_total += accept_mass[k];
        residual_total += residual[k];
    }
    GroupDistribution out;
    out.provenance = GroupDistProvenance::ExactEmitted;
    out.mass.resize(m);
    const double reject_prob = 1.0 - accept_total;
    for (GroupId k = 0; k < m; ++k) {
        out.mass[k] = accept_mass[k];
        if (residual_total > 0.0) {
            out.mass[k] += reject_prob * (residual[k] / residual_total);
        }
    }
    return out;
}

GroupDistribution exact_residual(const TokenDistribution & draft, const TokenDistribution & target,
                                 const GroupIndex & index, uint64_t enumeration_bound) {
    check_bound(index, enumeration_bound);
    GroupDistribution out;
    out.provenance = GroupDistProvenance::ExactResidual;
    out.mass.resize(index.group_count());
    double total = 0.0;
    for (GroupId k = 0; k < index.group_count(); ++k) {
        const CoarseMassPair pair = coarse_pair(draft, target, k, index);
        out.mass[k]               = std::max(pair.qc - pair.pc, 0.0);
        total += out.mass[k];
    }
    if (total <= 0.0) {
        throw DegenerateError("exact_residual: [Qc - Pc]_+ is identically zero (coarse distributions coincide)");
    }
    for (double & v : out.mass) {
        v /= total;
    }
    return out;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidArgError("tv_distance: vectors have different lengths");
    }
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        sum += std::abs(a[i] - b[i]);
    }
    return 0.5 * sum;
}

double chi_square_p_value(double statistic, uint64_t dof) {
    if (dof == 0) {
        return 1.0;
    }
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

FitReport empirical_distribution(const std::function<uint32_t()> & sampler, uint64_t trials,
                                 std::span<const double> reference) {
    if (trials < 1) {
        throw InvalidArgError("empirical_distribution needs trials >= 1");
    }
    FitReport report;
    report.trials = trials;
    std::vector<uint64_t> counts(reference.size(), 0);
    for (uint64_t i = 0; i < trials; ++i) {
        const uint32_t v = sampler();
        if (v >= counts.size()) {
            throw InvalidArgError("sampler emitted a value outside the reference support");
        }
        ++counts[v];
    }
    report.empirical.provenance = GroupDistProvenance::Empirical;
    report.empirical.mass.resize(reference.size());
    for (size_t i = 0; i < counts.size(); ++i) {
        report.empirical.mass[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
    }
    report.tv = tv_distance(report.empirical.mass, reference);

    // Chi-square over bins with positive expectation; a draw in a zero-mass
    // bin is an outright mismatch.
    double statistic = 0.0;
    uint64_t bins    = 0;
    bool     zero_bin_hit = false;
    for (size_t i = 0; i < counts.size(); ++i) {
        const double expected = reference[i] * static_cast<double>(trials);
        if (expected > 0.0) {
            const double diff = static_cast<double>(counts[i]) - expected;
            statistic += diff * diff / expected;
            ++bins;
        } else if (counts[i] > 0) {
            zero_bin_hit = true;
        }
    }
    report.chi_square = statistic;
    report.dof        = bins > 0 ? bins - 1 : 0;
    report.p_value    = zero_bin_hit ? 0.0 : chi_square_p_value(statistic, report.dof);
    return report;
}

} // namespace pcg::oracle
