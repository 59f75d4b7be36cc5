#pragma once

#include <array>
#include <cstdint>

namespace labandit {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Stateless: output depends only on (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// A reproducible random stream keyed by (seed, stream id). Distinct stream
/// ids never share counter space, so replication r of a run always draws the
/// same numbers regardless of thread scheduling.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; pairs are consumed in order.
  double normal();

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_words_ = 0;  // 32-bit words left in buffer_
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace labandit
