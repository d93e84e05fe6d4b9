#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace entrolab {

/// Fixed-width bitset over point indices [0, size).
///
/// Word-level access is exposed because the exact solvers do their bound
/// computations directly on words.
class PointSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  PointSet() = default;
  explicit PointSet(std::size_t size) : size_(size), words_((size + kWordBits - 1) / kWordBits, 0) {}

  PointSet(std::size_t size, std::initializer_list<std::size_t> members) : PointSet(size) {
    for (auto m : members) set(m);
  }

  static PointSet full(std::size_t size) {
    PointSet s(size);
    std::fill(s.words_.begin(), s.words_.end(), ~Word{0});
    s.trim();
    return s;
  }

  static PointSet from_indices(std::size_t size, const std::vector<std::size_t>& members) {
    PointSet s(size);
    for (auto m : members) s.set(m);
    return s;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  const Word* words() const noexcept { return words_.data(); }
  Word* words() noexcept { return words_.data(); }

  bool test(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::size_t i) noexcept { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::size_t i) noexcept { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
  }
  bool any() const noexcept { return !none(); }
  bool all() const noexcept { return count() == size_; }

  bool is_subset_of(const PointSet& other) const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~other.words_[w]) return false;
    return true;
  }

  bool intersects(const PointSet& other) const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & other.words_[w]) return true;
    return false;
  }

  std::size_t intersection_count(const PointSet& other) const noexcept {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_.size(); ++w)
      c += static_cast<std::size_t>(std::popcount(words_[w] & other.words_[w]));
    return c;
  }

  PointSet& operator&=(const PointSet& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }
  PointSet& operator|=(const PointSet& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  PointSet& subtract(const PointSet& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
    return *this;
  }

  friend PointSet operator&(PointSet a, const PointSet& b) noexcept { return a &= b; }
  friend PointSet operator|(PointSet a, const PointSet& b) noexcept { return a |= b; }

  PointSet complement() const {
    PointSet c(size_);
    for (std::size_t w = 0; w < words_.size(); ++w) c.words_[w] = ~words_[w];
    c.trim();
    return c;
  }

  /// First member at or after `from`; returns size() when there is none.
  std::size_t next(std::size_t from) const noexcept {
    if (from >= size_) return size_;
    std::size_t w = from / kWordBits;
    Word word = words_[w] & (~Word{0} << (from % kWordBits));
    while (true) {
      if (word) return std::min(size_, w * kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
      if (++w >= words_.size()) return size_;
      word = words_[w];
    }
  }
  std::size_t first() const noexcept { return next(0); }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word word = words_[w];
      while (word) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(word));
        f(w * kWordBits + bit);
        word &= word - 1;
      }
    }
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  friend bool operator==(const PointSet& a, const PointSet& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  /// Lexicographic on words; only used to obtain deterministic orderings.
  friend bool operator<(const PointSet& a, const PointSet& b) noexcept {
    if (a.size_ != b.size_) return a.size_ < b.size_;
    return a.words_ < b.words_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 1469598103934665603ULL ^ size_;
    for (auto w : words_) {
      h ^= std::hash<Word>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

 private:
  void trim() noexcept {
    if (size_ % kWordBits != 0 && !words_.empty())
      words_.back() &= (Word{1} << (size_ % kWordBits)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

struct PointSetHash {
  std::size_t operator()(const PointSet& s) const noexcept { return s.hash(); }
};

}  // namespace entrolab
