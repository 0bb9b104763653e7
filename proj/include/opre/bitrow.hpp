#pragma once

#include <cstdint>
#include <vector>

namespace opre {

// One word-packed row of lattice bits (one row per time layer).
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::int64_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::int64_t size() const { return nbits_; }

  void set(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] |= (1ull << (i & 63)); }
  void reset(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] &= ~(1ull << (i & 63)); }
  bool test(std::int64_t i) const {
    return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1ull;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  std::int64_t count() const {
    std::int64_t c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }

  BitRow& operator&=(const BitRow& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  BitRow& operator|=(const BitRow& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  friend BitRow operator&(BitRow a, const BitRow& b) { return a &= b; }
  friend BitRow operator|(BitRow a, const BitRow& b) { return a |= b; }

  bool operator==(const BitRow& o) const { return nbits_ == o.nbits_ && words_ == o.words_; }

  // shift towards higher column index, dropping overflow
  BitRow shifted_up() const {
    BitRow r(nbits_);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      r.words_[i] = (words_[i] << 1) | carry;
      carry = words_[i] >> 63;
    }
    r.mask_tail();
    return r;
  }

  // shift towards lower column index
  BitRow shifted_down() const {
    BitRow r(nbits_);
    std::uint64_t carry = 0;
    for (std::size_t i = words_.size(); i-- > 0;) {
      r.words_[i] = (words_[i] >> 1) | (carry << 63);
      carry = words_[i] & 1ull;
    }
    return r;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

 private:
  void mask_tail() {
    const int rem = static_cast<int>(nbits_ & 63);
    if (rem != 0 && !words_.empty()) words_.back() &= (~0ull >> (64 - rem));
  }

  std::int64_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace opre
