#pragma once

#include <cstdint>
#include <limits>

namespace qtl {

// Counter-based generator: the k-th output of stream `key` is
// splitmix64(key + k * golden). Any draw can be addressed directly, so
// datasets of different sizes drawn from one stream are prefixes of each other.
class SplitMixStream {
public:
    using result_type = std::uint64_t;

    explicit SplitMixStream(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Output at an arbitrary position of the stream.
    std::uint64_t at(std::uint64_t counter) const noexcept {
        return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
    }

    result_type operator()() noexcept { return at(counter_++); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform_at(std::uint64_t counter) const noexcept {
        return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Roles that get their own derived stream inside one replication.
enum class StreamRole : std::uint64_t {
    source_data = 1,
    target_data = 2,
    rademacher = 3,
    validation = 4,
    rademacher_signs = 5,
};

/// Stream key = hash(master_seed, replication_index, role).
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t replication,
                                   std::uint64_t role) noexcept {
    std::uint64_t h = SplitMixStream::mix(master_seed ^ 0x6a09e667f3bcc908ULL);
    h = SplitMixStream::mix(h ^ (replication + 0x3c6ef372fe94f82bULL));
    h = SplitMixStream::mix(h ^ (role * 0xa54ff53a5f1d36f1ULL));
    return h;
}

inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t replication,
                                   StreamRole role) noexcept {
    return derive_stream(master_seed, replication, static_cast<std::uint64_t>(role));
}

}  // namespace qtl
