#ifndef PSEUDOENT_SEED_HPP
#define PSEUDOENT_SEED_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace pseudoent {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Keyed 64-bit hash of (key, x, domain). Well mixed, not cryptographic.
inline std::uint64_t keyed_hash(std::uint64_t key, std::uint64_t x, std::uint64_t domain = 0) {
    std::uint64_t h = mix64(key ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h ^ mix64(domain + 0x3c6ef372fe94f82bULL));
    return mix64(h ^ x);
}

/// A node in a deterministic tree of random streams. Distinct paths give
/// unrelated streams; the same path always gives the same stream.
class SeedTree {
public:
    explicit SeedTree(std::uint64_t master) : master_(master), state_(mix64(master)) {}

    SeedTree child(std::uint64_t k) const {
        SeedTree c = *this;
        c.path_.push_back(k);
        c.state_ = mix64(state_ ^ mix64(k + 0x632be59bd9b4e019ULL * (path_.size() + 1)));
        return c;
    }

    SeedTree child(std::initializer_list<std::uint64_t> ks) const {
        SeedTree c = *this;
        for (auto k : ks) c = c.child(k);
        return c;
    }

    std::uint64_t master() const { return master_; }
    const std::vector<std::uint64_t>& path() const { return path_; }
    std::uint64_t seed() const { return state_; }
    std::mt19937_64 engine() const { return std::mt19937_64(state_); }

private:
    std::uint64_t master_;
    std::uint64_t state_;
    std::vector<std::uint64_t> path_;
};

}  // namespace pseudoent

#endif  // PSEUDOENT_SEED_HPP
