#include "gwit/partitions.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "gwit/errors.hpp"

namespace gwit {
namespace {

constexpr int kMaxEnumerationModes = 20;

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw InputError("partition count overflows 64 bits");
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw InputError("partition count overflows 64 bits");
  return out;
}

}  // namespace

std::uint64_t stirling2(int n, int k) {
  if (n < 0 || k < 0) throw InputError("stirling2: negative argument");
  if (k > n) return 0;
  if (n == 0) return 1;  // k == 0 here
  if (k == 0) return 0;
  // S(n,k) = k S(n-1,k) + S(n-1,k-1), one rolling row.
  std::vector<std::uint64_t> row(static_cast<size_t>(k) + 1, 0);
  row[0] = 1;  // S(0,0)
  for (int i = 1; i <= n; ++i) {
    const int top = std::min(i, k);
    for (int j = top; j >= 1; --j)
      row[j] = checked_add(checked_mul(static_cast<std::uint64_t>(j), row[j]),
                           row[j - 1]);
    row[0] = 0;
  }
  return row[k];
}

std::uint64_t bell(int n) {
  if (n < 0) throw InputError("bell: negative argument");
  std::uint64_t total = n == 0 ? 1 : 0;
  for (int k = 1; k <= n; ++k) total = checked_add(total, stirling2(n, k));
  return total;
}

Partition::Partition(int n_modes, std::vector<std::vector<int>> blocks)
    : n_modes_(n_modes), blocks_(std::move(blocks)) {
  if (n_modes_ < 1) throw InputError("partition: need at least one mode");
  std::set<int> seen;
  for (auto& block : blocks_) {
    if (block.empty()) throw InputError("partition: empty block");
    std::sort(block.begin(), block.end());
    for (int mode : block) {
      if (mode < 0 || mode >= n_modes_)
        throw InputError("partition: mode index " + std::to_string(mode + 1) +
                         " out of range for " + std::to_string(n_modes_) +
                         " modes");
      if (!seen.insert(mode).second)
        throw InputError("partition: mode " + std::to_string(mode + 1) +
                         " appears twice");
    }
  }
  if (static_cast<int>(seen.size()) != n_modes_)
    throw InputError("partition: does not cover all modes");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Partition Partition::trivial(int n_modes) {
  std::vector<int> all(static_cast<size_t>(n_modes));
  for (int i = 0; i < n_modes; ++i) all[static_cast<size_t>(i)] = i;
  return Partition(n_modes, {all});
}

Partition Partition::parse(std::string_view text, int n_modes) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> current;
  int value = 0;
  bool in_number = false;
  auto flush_number = [&] {
    if (!in_number) throw InputError("partition: expected a mode index");
    current.push_back(value - 1);  // to 0-based
    value = 0;
    in_number = false;
  };
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      value = value * 10 + (c - '0');
      if (value > 1000000) throw InputError("partition: index too large");
      in_number = true;
    } else if (c == ',') {
      flush_number();
    } else if (c == ':') {
      flush_number();
      blocks.push_back(std::move(current));
      current.clear();
    } else if (c == ' ') {
      continue;
    } else {
      throw InputError(std::string("partition: unexpected character '") + c +
                       "'");
    }
  }
  flush_number();
  blocks.push_back(std::move(current));
  for (const auto& block : blocks)
    for (int mode : block)
      if (mode < 0) throw InputError("partition: mode indices are 1-based");
  return Partition(n_modes, std::move(blocks));
}

std::string Partition::format() const {
  std::string out;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    if (b) out += ':';
    for (size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(blocks_[b][i] + 1);
    }
  }
  return out;
}

std::uint32_t Partition::block_mask(int j) const {
  std::uint32_t mask = 0;
  for (int mode : blocks_[static_cast<size_t>(j)])
    mask |= (std::uint32_t{1} << mode);
  return mask;
}

bool Partition::operator==(const Partition& other) const {
  return n_modes_ == other.n_modes_ && blocks_ == other.blocks_;
}

KPartitionEnumerator::KPartitionEnumerator(int n_modes, int k)
    : n_(n_modes), k_(k) {
  if (n_ < 1 || n_ > kMaxEnumerationModes)
    throw InputError("partition enumeration supports 1.." +
                     std::to_string(kMaxEnumerationModes) + " modes, got " +
                     std::to_string(n_));
  if (k_ < 1 || k_ > n_)
    throw InputError("partition enumeration: need 1 <= k <= n, got k = " +
                     std::to_string(k_));
  // Lexicographically first restricted-growth string with exactly k classes:
  // zeros, then one first occurrence of each remaining class.
  rgs_.assign(static_cast<size_t>(n_), 0);
  prefix_max_.assign(static_cast<size_t>(n_), 0);
  for (int i = 0; i < k_ - 1; ++i) {
    rgs_[static_cast<size_t>(n_ - 1 - i)] = static_cast<std::uint8_t>(k_ - 1 - i);
  }
  for (int i = 1; i < n_; ++i)
    prefix_max_[static_cast<size_t>(i)] =
        std::max(prefix_max_[static_cast<size_t>(i - 1)],
                 rgs_[static_cast<size_t>(i)]);
}

bool KPartitionEnumerator::advance() {
  // Find the rightmost position whose class index can grow while a suffix
  // can still realize exactly k classes; fill the suffix minimally.
  for (int i = n_ - 1; i >= 1; --i) {
    const std::uint8_t before = prefix_max_[static_cast<size_t>(i - 1)];
    const int cap = std::min<int>(before + 1, k_ - 1);
    for (int v = rgs_[static_cast<size_t>(i)] + 1; v <= cap; ++v) {
      const int new_max = std::max<int>(before, v);
      const int deficit = (k_ - 1) - new_max;  // classes still unseen
      const int suffix = n_ - 1 - i;
      if (deficit > suffix) continue;
      rgs_[static_cast<size_t>(i)] = static_cast<std::uint8_t>(v);
      prefix_max_[static_cast<size_t>(i)] = static_cast<std::uint8_t>(new_max);
      for (int j = i + 1; j < n_; ++j) {
        const int tail = n_ - 1 - j;  // positions after j
        const int need = (k_ - 1) - prefix_max_[static_cast<size_t>(j - 1)];
        const std::uint8_t value =
            (need > tail)
                ? static_cast<std::uint8_t>(
                      prefix_max_[static_cast<size_t>(j - 1)] + 1)
                : std::uint8_t{0};
        rgs_[static_cast<size_t>(j)] = value;
        prefix_max_[static_cast<size_t>(j)] =
            std::max(prefix_max_[static_cast<size_t>(j - 1)], value);
      }
      return true;
    }
  }
  return false;
}

bool KPartitionEnumerator::next_masks(std::vector<std::uint32_t>& masks) {
  if (done_) return false;
  if (fresh_) {
    fresh_ = false;
  } else if (!advance()) {
    done_ = true;
    return false;
  }
  masks.assign(static_cast<size_t>(k_), 0);
  for (int i = 0; i < n_; ++i)
    masks[rgs_[static_cast<size_t>(i)]] |= (std::uint32_t{1} << i);
  return true;
}

std::optional<Partition> KPartitionEnumerator::next() {
  std::vector<std::uint32_t> masks;
  if (!next_masks(masks)) return std::nullopt;
  return from_rgs(n_, rgs_);
}

Partition KPartitionEnumerator::from_rgs(int n_modes,
                                         const std::vector<std::uint8_t>& rgs) {
  std::uint8_t k = 0;
  for (std::uint8_t c : rgs) k = std::max<std::uint8_t>(k, c);
  std::vector<std::vector<int>> blocks(static_cast<size_t>(k) + 1);
  for (int i = 0; i < n_modes; ++i)
    blocks[rgs[static_cast<size_t>(i)]].push_back(i);
  return Partition(n_modes, std::move(blocks));
}

std::vector<Partition> enumerate_k_partitions(int n_modes, int k) {
  std::vector<Partition> out;
  KPartitionEnumerator it(n_modes, k);
  while (auto p = it.next()) out.push_back(std::move(*p));
  return out;
}

}  // namespace gwit
