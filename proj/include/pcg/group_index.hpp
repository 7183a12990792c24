#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcg/embedding.hpp"
#include "pcg/types.hpp"

namespace pcg {

// Per-token split-weight rule. Only equal-split is a real rule; BrokenOnes
// assigns weight 1 to every containing group (deliberately unnormalized) and
// exists so verification failures can be injected in tests. It is rejected by
// the file format.
enum class WeightRule : uint8_t {
    EqualSplit = 0,
    BrokenOnes = 255,
};

struct IndexStats {
    uint64_t n             = 0;
    uint64_t m             = 0;
    uint64_t total_entries = 0; // sum of group sizes
    uint64_t max_group_size = 0;
    double   mean_group_size = 0.0;
    double   mean_degree     = 0.0; // mean N(t)

    uint64_t storage_bytes(uint32_t id_bytes) const { return total_entries * id_bytes; }
};

// Deduplicated group set {G_k} with per-token membership lists S(t).
// Immutable after construction; safe to share across concurrent decoders.
class GroupIndex {
  public:
    GroupIndex() = default;

    // Validates and adopts an explicit group set: members sorted, unique, in
    // range; groups distinct as member sets; every token covered. Throws
    // ConsistencyError on violation. Memberships and degrees are derived here.
    static GroupIndex from_groups(uint64_t n, std::vector<std::vector<TokenId>> groups, double theta,
                                  WeightRule rule = WeightRule::EqualSplit);

    uint64_t   vocab_size() const { return n_; }
    uint64_t   group_count() const { return groups_.size(); }
    double     theta() const { return theta_; }
    WeightRule weight_rule() const { return rule_; }

    const std::vector<TokenId> & group(GroupId k) const { return groups_[k]; }
    const std::vector<GroupId> & memberships(TokenId t) const { return memberships_[t]; }
    uint32_t                     degree(TokenId t) const { return static_cast<uint32_t>(memberships_[t].size()); }

    // w(k, t) for a token known to be a member of group k.
    double member_weight(TokenId t) const {
        return rule_ == WeightRule::BrokenOnes ? 1.0 : 1.0 / static_cast<double>(degree(t));
    }

    // w(k, t) for arbitrary (k, t); zero when t is not in G_k.
    double weight(GroupId k, TokenId t) const;

    bool contains(GroupId k, TokenId t) const;

  private:
    uint64_t                          n_ = 0;
    std::vector<std::vector<TokenId>> groups_;
    std::vector<std::vector<GroupId>> memberships_;
    double                            theta_ = 1.0;
    WeightRule                        rule_  = WeightRule::EqualSplit;
};

// Build the group set from unit-norm embeddings: G(t) = { t' : cos(e_t, e_t') > theta },
// strict inequality, self always included. Identical member sets collapse to
// one group; ids are assigned in first-seen token order. `threads` > 1 splits
// the pairwise pass over tokens; the result is identical to the serial path.
GroupIndex build_groups(const EmbeddingMatrix & matrix, double theta, uint32_t threads = 1);

IndexStats stats(const GroupIndex & index);

// Index file, little-endian:
//   magic "PCGI", u32 version=1, u64 n, u64 M, f64 theta, u8 weight-rule id,
//   then M member lists, each u32 length + that many u32 token ids (sorted).
// Memberships and degrees are recomputed and verified on load.
void       save_index(const GroupIndex & index, const std::string & path);
GroupIndex load_index(const std::string & path);

} // namespace pcg
