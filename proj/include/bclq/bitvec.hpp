#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bclq {

/// Fixed-width bit vector over F2. Used for linear forms, adjacency slices
/// and survivor masks alike.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(uint32_t nbits, bool fill = false)
      : nbits_(nbits), w_((nbits + 63) / 64, fill ? ~0ull : 0ull) {
    trim();
  }

  static BitVec unit(uint32_t nbits, uint32_t i) {
    BitVec v(nbits);
    v.set(i, true);
    return v;
  }

  uint32_t size() const { return nbits_; }

  bool get(uint32_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  void set(uint32_t i, bool b) {
    if (i >= nbits_) throw std::out_of_range("BitVec::set");
    uint64_t m = 1ull << (i & 63);
    if (b) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
  }

  void flip(uint32_t i) { w_[i >> 6] ^= 1ull << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    check_same(o);
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  BitVec& operator&=(const BitVec& o) {
    check_same(o);
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  BitVec& operator|=(const BitVec& o) {
    check_same(o);
    for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
  friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }
  BitVec operator~() const {
    BitVec r = *this;
    for (auto& x : r.w_) x = ~x;
    r.trim();
    return r;
  }

  bool any() const {
    for (uint64_t x : w_) if (x) return true;
    return false;
  }
  bool none() const { return !any(); }

  uint32_t count() const {
    uint32_t c = 0;
    for (uint64_t x : w_) c += std::popcount(x);
    return c;
  }

  // index of the lowest set bit, or -1
  int lowest_set() const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return int(i * 64 + std::countr_zero(w_[i]));
    return -1;
  }

  // parity of |this AND other|; the F2 inner product
  bool dot(const BitVec& o) const {
    check_same(o);
    uint64_t acc = 0;
    for (size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
    return std::popcount(acc) & 1;
  }

  bool subset_of(const BitVec& o) const {
    check_same(o);
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }

  template <class F>
  void for_each_set(F f) const {
    for (size_t i = 0; i < w_.size(); ++i) {
      uint64_t x = w_[i];
      while (x) {
        f(uint32_t(i * 64 + std::countr_zero(x)));
        x &= x - 1;
      }
    }
  }

  std::vector<uint32_t> set_bits() const {
    std::vector<uint32_t> out;
    for_each_set([&](uint32_t i) { out.push_back(i); });
    return out;
  }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.nbits_ == b.nbits_ && a.w_ == b.w_;
  }

  // lexicographic by bit index 0,1,2,... (for canonical orderings)
  friend std::strong_ordering operator<=>(const BitVec& a, const BitVec& b) {
    if (auto c = a.nbits_ <=> b.nbits_; c != 0) return c;
    for (size_t i = 0; i < a.w_.size(); ++i) {
      // reverse bits so that bit 0 is most significant in the comparison
      uint64_t x = bitrev(a.w_[i]), y = bitrev(b.w_[i]);
      if (auto c = x <=> y; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  std::string to_string01() const {
    std::string s(nbits_, '0');
    for (uint32_t i = 0; i < nbits_; ++i) if (get(i)) s[i] = '1';
    return s;
  }

  static BitVec from_string01(const std::string& s) {
    BitVec v(uint32_t(s.size()));
    for (uint32_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') v.set(i, true);
      else if (s[i] != '0') throw std::invalid_argument("BitVec: bad digit");
    }
    return v;
  }

 private:
  static uint64_t bitrev(uint64_t x) {
    x = ((x & 0x5555555555555555ull) << 1) | ((x >> 1) & 0x5555555555555555ull);
    x = ((x & 0x3333333333333333ull) << 2) | ((x >> 2) & 0x3333333333333333ull);
    x = ((x & 0x0f0f0f0f0f0f0f0full) << 4) | ((x >> 4) & 0x0f0f0f0f0f0f0f0full);
    x = ((x & 0x00ff00ff00ff00ffull) << 8) | ((x >> 8) & 0x00ff00ff00ff00ffull);
    x = ((x & 0x0000ffff0000ffffull) << 16) | ((x >> 16) & 0x0000ffff0000ffffull);
    return (x << 32) | (x >> 32);
  }

  void check_same(const BitVec& o) const {
    if (nbits_ != o.nbits_) throw std::invalid_argument("BitVec: width mismatch");
  }
  void trim() {
    if (nbits_ & 63) w_.back() &= (1ull << (nbits_ & 63)) - 1;
  }

  uint32_t nbits_ = 0;
  std::vector<uint64_t> w_;
};

}  // namespace bclq
