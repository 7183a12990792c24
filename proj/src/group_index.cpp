#include "pcg/group_index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <thread>
#include <unordered_map>

namespace pcg {

namespace {

constexpr char     kMagic[4] = {'P', 'C', 'G', 'I'};
constexpr uint32_t kVersion  = 1;

template <typename T>
void write_pod(std::ofstream & out, const T & value) {
    out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream & in, const char * what) {
    T value;
    in.read(reinterpret_cast<char *>(&value), sizeof(T));
    if (!in) {
        throw FormatError(std::string("truncated index file while reading ") + what);
    }
    return value;
}

struct MemberListHash {
    size_t operator()(const std::vector<TokenId> & v) const {
        size_t h = 0x9E3779B97F4A7C15ull ^ v.size();
        for (TokenId id : v) {
            h ^= id + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace

GroupIndex GroupIndex::from_groups(uint64_t n, std::vector<std::vector<TokenId>> groups, double theta,
                                   WeightRule rule) {
    if (n < 1) {
        throw InvalidArgError("group index needs n >= 1");
    }
    GroupIndex index;
    index.n_     = n;
    index.theta_ = theta;
    index.rule_  = rule;

    std::unordered_map<std::vector<TokenId>, GroupId, MemberListHash> seen;
    seen.reserve(groups.size());
    index.memberships_.assign(n, {});

    for (size_t k = 0; k < groups.size(); ++k) {
        const auto & members = groups[k];
        if (members.empty()) {
            throw ConsistencyError("group " + std::to_string(k) + " is empty");
        }
        for (size_t i = 0; i < members.size(); ++i) {
            if (members[i] >= n) {
                throw ConsistencyError("group " + std::to_string(k) + " has token id out of range");
            }
            if (i > 0 && members[i] <= members[i - 1]) {
                throw ConsistencyError("group " + std::to_string(k) + " is not sorted with unique members");
            }
        }
        if (!seen.emplace(members, static_cast<GroupId>(k)).second) {
            throw ConsistencyError("duplicate group member set at group " + std::to_string(k));
        }
    }

    index.groups_ = std::move(groups);
    for (GroupId k = 0; k < index.groups_.size(); ++k) {
        for (TokenId t : index.groups_[k]) {
            index.memberships_[t].push_back(k);
        }
    }
    for (TokenId t = 0; t < n; ++t) {
        if (index.memberships_[t].empty()) {
            throw ConsistencyError("token " + std::to_string(t) + " belongs to no group");
        }
    }
    return index;
}

bool GroupIndex::contains(GroupId k, TokenId t) const {
    const auto & g = groups_[k];
    return std::binary_search(g.begin(), g.end(), t);
}

double GroupIndex::weight(GroupId k, TokenId t) const {
    return contains(k, t) ? member_weight(t) : 0.0;
}

GroupIndex build_groups(const EmbeddingMatrix & matrix, double theta, uint32_t threads) {
    if (!(theta > -1.0) || !(theta <= 1.0)) {
        throw InvalidArgError("theta must lie in (-1, 1]");
    }
    if (!matrix.is_unit_norm(1e-9)) {
        throw InvalidArgError("build_groups expects unit-norm embeddings; call normalize() first");
    }
    const uint64_t n = matrix.rows();
    const uint64_t d = matrix.dim();

    std::vector<std::vector<TokenId>> per_token(n);
    auto scan = [&](uint64_t begin, uint64_t end) {
        for (uint64_t t = begin; t < end; ++t) {
            auto & members = per_token[t];
            const double * et = matrix.row(t).data();
            for (uint64_t s = 0; s < n; ++s) {
                if (s == t) {
                    members.push_back(static_cast<TokenId>(s)); // self always in G(t)
                    continue;
                }
                const double * es  = matrix.row(s).data();
                double         dot = 0.0;
                for (uint64_t j = 0; j < d; ++j) {
                    dot += et[j] * es[j];
                }
                if (dot > theta) {
                    members.push_back(static_cast<TokenId>(s));
                }
            }
        }
    };

    if (threads <= 1 || n < 2 * threads) {
        scan(0, n);
    } else {
        std::vector<std::thread> pool;
        const uint64_t           chunk = (n + threads - 1) / threads;
        for (uint32_t w = 0; w < threads; ++w) {
            const uint64_t begin = std::min<uint64_t>(w * chunk, n);
            const uint64_t end   = std::min<uint64_t>(begin + chunk, n);
            if (begin < end) {
                pool.emplace_back(scan, begin, end);
            }
        }
        for (auto & th : pool) {
            th.join();
        }
    }

    // Dedup in token order so group ids are deterministic.
    std::unordered_map<std::vector<TokenId>, GroupId, MemberListHash> seen;
    std::vector<std::vector<TokenId>>                                 groups;
    seen.reserve(n);
    for (uint64_t t = 0; t < n; ++t) {
        if (seen.emplace(per_token[t], static_cast<GroupId>(groups.size())).second) {
            groups.push_back(std::move(per_token[t]));
        }
    }
    return GroupIndex::from_groups(n, std::move(groups), theta, WeightRule::EqualSplit);
}

IndexStats stats(const GroupIndex & index) {
    IndexStats st;
    st.n = index.vocab_size();
    st.m = index.group_count();
    for (GroupId k = 0; k < st.m; ++k) {
        const uint64_t size = index.group(k).size();
        st.total_entries += size;
        st.max_group_size = std::max(st.max_group_size, size);
    }
    st.mean_group_size = st.m > 0 ? static_cast<double>(st.total_entries) / static_cast<double>(st.m) : 0.0;
    uint64_t degree_sum = 0;
    for (TokenId t = 0; t < st.n; ++t) {
        degree_sum += index.degree(t);
    }
    st.mean_degree = static_cast<double>(degree_sum) / static_cast<double>(st.n);
    return st;
}

void save_index(const GroupIndex & index, const std::string & path) {
    if (index.weight_rule() != WeightRule::EqualSplit) {
        throw InvalidArgError("only the equal-split weight rule can be serialized");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, index.vocab_size());
    write_pod(out, index.group_count());
    write_pod(out, index.theta());
    write_pod(out, static_cast<uint8_t>(index.weight_rule()));
    for (GroupId k = 0; k < index.group_count(); ++k) {
        const auto & members = index.group(k);
        write_pod(out, static_cast<uint32_t>(members.size()));
        out.write(reinterpret_cast<const char *>(members.data()),
                  static_cast<std::streamsize>(members.size() * sizeof(TokenId)));
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

GroupIndex load_index(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad index magic in " + path);
    }
    const auto version = read_pod<uint32_t>(in, "version");
    if (version != kVersion) {
        throw FormatError("unsupported index version " + std::to_string(version));
    }
    const auto n     = read_pod<uint64_t>(in, "n");
    const auto m     = read_pod<uint64_t>(in, "M");
    const auto theta = read_pod<double>(in, "theta");
    const auto rule  = read_pod<uint8_t>(in, "weight rule");
    if (rule != static_cast<uint8_t>(WeightRule::EqualSplit)) {
        throw FormatError("unknown weight rule id " + std::to_string(rule));
    }

    std::vector<std::vector<TokenId>> groups(m);
    for (uint64_t k = 0; k < m; ++k) {
        const auto len = read_pod<uint32_t>(in, "group length");
        groups[k].resize(len);
        in.read(reinterpret_cast<char *>(groups[k].data()), static_cast<std::streamsize>(len * sizeof(TokenId)));
        if (!in) {
            throw FormatError("truncated member list in " + path);
        }
    }
    return GroupIndex::from_groups(n, std::move(groups), theta, WeightRule::EqualSplit);
}

} // namespace pcg
