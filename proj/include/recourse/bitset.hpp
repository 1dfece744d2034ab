#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace recourse {

// Runtime-sized bitset. Capacity is fixed at construction; binary operations
// require operands of equal capacity. Bits beyond size() are kept zero.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n_bits) : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

  static Bitset full(std::size_t n_bits) {
    Bitset b(n_bits);
    for (std::size_t i = 0; i < b.words_.size(); ++i) b.words_[i] = ~std::uint64_t{0};
    b.trim();
    return b;
  }

  std::size_t size() const { return n_bits_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }

  Bitset and_with(const Bitset& o) const {
    Bitset r(n_bits_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
  }

  // this & ~other
  Bitset and_not(const Bitset& o) const {
    Bitset r(n_bits_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & ~o.words_[i];
    return r;
  }

  std::size_t count_and(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return c;
  }

  // fn(index) for every set bit, ascending.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::uint32_t> to_indices() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
    return out;
  }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint64_t w : words_) {
      h ^= w;
      h *= 1099511628211ULL;
    }
    h ^= n_bits_;
    h *= 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }

  friend bool operator==(const Bitset& a, const Bitset& b) {
    return a.n_bits_ == b.n_bits_ && a.words_ == b.words_;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void trim() {
    if (n_bits_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (n_bits_ % 64)) - 1;
  }

  std::size_t n_bits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace recourse
