#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "msra/errors.hpp"

namespace msra {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Deterministic labeled random stream. A (seed, label) pair fully determines
/// every value drawn, independent of draw order elsewhere; labels are stable
/// strings like "A/1/3/2" (coding-matrix entries) or "w/1/2" (repair vectors).
class SeededRng {
public:
    SeededRng(u64 seed, std::string_view label) {
        // FNV-1a over the label bytes, folded into the seed, then finalized
        // with splitmix64 so short labels still diffuse into the whole state.
        u64 h = 1469598103934665603ULL ^ seed;
        for (unsigned char c : label) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        state_ = mix(h);
    }

    u64 next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

private:
    static u64 mix(u64 z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    u64 state_;
};

namespace detail {

inline u64 mulmod_u64(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

inline u64 powmod_u64(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e > 0) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs with this witness set.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace detail

inline constexpr u64 kMersenne61 = (u64{1} << 61) - 1;

/// Arithmetic context for the prime field GF(q). Elements are plain u64
/// values kept canonical in [0, q); all operations assume and preserve that.
/// The default modulus 2^61 - 1 gets a fast folding reduction.
class PrimeField {
public:
    explicit PrimeField(u64 q) : q_(q), mersenne61_(q == kMersenne61) {
        if (q < 3) throw ParamError("field modulus must be >= 3, got " + std::to_string(q));
        if (!detail::is_prime_u64(q)) {
            throw ParamError("field modulus must be prime, got " + std::to_string(q));
        }
    }

    u64 modulus() const { return q_; }

    u64 reduce(u64 x) const {
        if (mersenne61_) {
            u64 r = (x & kMersenne61) + (x >> 61);
            if (r >= kMersenne61) r -= kMersenne61;
            return r;
        }
        return x % q_;
    }

    u64 add(u64 a, u64 b) const {
        u64 r = a + b;  // q < 2^63, cannot overflow for canonical inputs
        if (r >= q_) r -= q_;
        return r;
    }

    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (q_ - b); }

    u64 neg(u64 a) const { return a == 0 ? 0 : q_ - a; }

    u64 mul(u64 a, u64 b) const {
        u128 t = static_cast<u128>(a) * b;
        if (mersenne61_) {
            u64 r = static_cast<u64>(t & kMersenne61) + static_cast<u64>(t >> 61);
            r = (r & kMersenne61) + (r >> 61);
            if (r >= kMersenne61) r -= kMersenne61;
            return r;
        }
        return static_cast<u64>(t % q_);
    }

    /// a^e with 0^0 = 1.
    u64 pow(u64 a, u64 e) const {
        u64 r = 1;
        while (e > 0) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    /// Multiplicative inverse via Fermat: a^(q-2).
    u64 inv(u64 a) const {
        if (a == 0) throw std::domain_error("inverse of zero in GF(q)");
        return pow(a, q_ - 2);
    }

    /// Uniform over {1, ..., q-1} by rejection; unbiased and deterministic
    /// given the rng stream.
    u64 sample_nonzero(SeededRng& rng) const {
        const u64 range = q_ - 1;
        const u64 accept = (~u64{0} / range) * range;
        for (;;) {
            u64 r = rng.next_u64();
            if (r < accept) return 1 + r % range;
        }
    }

    bool operator==(const PrimeField& other) const { return q_ == other.q_; }

private:
    u64 q_;
    bool mersenne61_;
};

}  // namespace msra
