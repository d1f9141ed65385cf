#include "firecast/rng.hpp"

namespace firecast {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

// FNV-1a over the stream name, mixed into the seed.
uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

uint64_t derive_seed(uint64_t seed, std::string_view name) {
    return splitmix64(seed ^ fnv1a(name));
}

uint64_t derive_seed(uint64_t seed, std::string_view name, uint64_t index) {
    return splitmix64(derive_seed(seed, name) ^ splitmix64(index));
}

}  // namespace firecast
