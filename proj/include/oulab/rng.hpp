#pragma once

#include <array>
#include <cstdint>

namespace oulab {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
///
/// Stateless: the output block is a pure function of (counter, key), which is
/// what makes path generation independent of scheduling.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

/// Identifies one independent random stream: (experiment seed, path, component).
struct StreamId {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    std::uint32_t component = 0;

    friend bool operator==(StreamId const&, StreamId const&) = default;
};

/// Sequential reader over a Philox substream.
///
/// Draw k of stream (seed, path, component) lives in counter block k/2 with
/// counter words {block, component, path_lo, path_hi} and key {seed_lo,
/// seed_hi}; each block yields two 64-bit words, one per draw.
class Substream {
  public:
    explicit Substream(StreamId id) noexcept;

    StreamId id() const noexcept { return id_; }
    std::uint64_t draws() const noexcept { return next_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform() noexcept;

    /// Standard normal by inversion, consuming exactly one uniform.
    double normal() noexcept;

    /// Reposition to absolute draw index `k`.
    void seek(std::uint64_t k) noexcept;

  private:
    StreamId id_;
    std::uint64_t next_ = 0;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    Philox4x32::Counter out_{};
};

/// Inverse of the standard normal CDF (Wichura, AS241 PPND16).
/// Relative accuracy about 1e-16 over (0, 1); returns +-inf at the endpoints.
double normal_quantile(double p) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

}  // namespace oulab
