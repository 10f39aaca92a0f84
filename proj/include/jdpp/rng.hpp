#pragma once

#include <cstdint>

namespace jdpp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream keyed by (seed, index): draw k is a hash of (key, k), so
// stream i never depends on how many other streams exist or who consumed them.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index)
        : key_(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
    // Uniform on [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace jdpp
