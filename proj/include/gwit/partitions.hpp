#ifndef GWIT_PARTITIONS_HPP
#define GWIT_PARTITIONS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gwit {

/// Stirling number of the second kind S(n, k); overflow-checked 64-bit.
std::uint64_t stirling2(int n, int k);

/// Bell number B(n) = sum_k S(n, k); overflow-checked 64-bit.
std::uint64_t bell(int n);

/// A partition of modes {0..n-1} into disjoint non-empty blocks, held in
/// canonical form: each block ascending, blocks ordered by smallest element.
class Partition {
 public:
  /// Canonicalizes; throws InputError if blocks are empty, overlap, or fail
  /// to cover {0..n_modes-1}.
  Partition(int n_modes, std::vector<std::vector<int>> blocks);

  /// The single-block partition {0..n-1}.
  static Partition trivial(int n_modes);

  /// Parse "1,2:3,5:4,6"-style text (1-based, ':' between blocks).
  static Partition parse(std::string_view text, int n_modes);

  /// Canonical 1-based text form; parse(format()) round-trips.
  std::string format() const;

  int n_modes() const { return n_modes_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

  /// Bitmask of modes in block j (bit i <=> mode i); n_modes <= 20 keeps
  /// these comfortably in 32 bits.
  std::uint32_t block_mask(int j) const;

  bool operator==(const Partition& other) const;
  bool operator!=(const Partition& other) const { return !(*this == other); }

 private:
  int n_modes_ = 0;
  std::vector<std::vector<int>> blocks_;
};

/// Streams all partitions of {0..n-1} into exactly k blocks, in lexicographic
/// order of their restricted-growth strings (which is also canonical-form
/// order).  Memory is O(n) regardless of the count.
///
/// Throws InputError unless 1 <= k <= n and n <= 20 (Bell(20) ~ 5e13 is the
/// enumeration ceiling; beyond that a full scan is hopeless anyway).
class KPartitionEnumerator {
 public:
  KPartitionEnumerator(int n_modes, int k);

  /// Next partition, or nullopt when exhausted.
  std::optional<Partition> next();

  /// Lighter-weight variant of next(): writes the block bitmasks of the next
  /// partition into `masks` (resized to k) and returns true, or returns
  /// false when exhausted.  Used by the bound-minimization scan, which needs
  /// only masks; current_rgs() identifies the partition just produced.
  bool next_masks(std::vector<std::uint32_t>& masks);

  /// Restricted-growth string of the most recent partition.
  const std::vector<std::uint8_t>& current_rgs() const { return rgs_; }

  /// Rebuild a full Partition from a restricted-growth string.
  static Partition from_rgs(int n_modes, const std::vector<std::uint8_t>& rgs);

 private:
  bool advance();
  int n_ = 0;
  int k_ = 0;
  bool fresh_ = true;
  bool done_ = false;
  std::vector<std::uint8_t> rgs_;         // rgs_[i] = block index of mode i
  std::vector<std::uint8_t> prefix_max_;  // prefix_max_[i] = max(rgs_[0..i])
};

/// Convenience: materialize the whole list (small n only).
std::vector<Partition> enumerate_k_partitions(int n_modes, int k);

}  // namespace gwit

#endif  // GWIT_PARTITIONS_HPP
