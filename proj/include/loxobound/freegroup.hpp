#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace loxobound {

/// Signed generator index: +i stands for xi_i, -i for xi_i^{-1} (1-based).
using Letter = int;

/// Position of a letter in the canonical order (index ascending, +1 before -1).
constexpr int letter_key(Letter l) noexcept {
  return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1;
}

/// A freely reduced word in the free group of rank n >= 2.
///
/// Words are immutable values. Every operation that combines words checks
/// that the ranks agree and throws InputError otherwise.
class Word {
 public:
  /// The identity of the free group of the given rank.
  explicit Word(int rank);

  /// Freely reduces an arbitrary letter sequence.
  static Word reduce(int rank, std::span<const Letter> raw);
  static Word reduce(int rank, std::initializer_list<Letter> raw);

  /// xi_index^exponent with exponent in {-1, +1}.
  static Word generator(int rank, int index, int exponent = 1);

  int rank() const noexcept { return rank_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool is_identity() const noexcept { return letters_.empty(); }
  std::span<const Letter> letters() const noexcept { return letters_; }
  Letter operator[](std::size_t i) const { return letters_.at(i); }

  Word inverse() const;
  /// First `len` letters (clamped to the word length).
  Word prefix(std::size_t len) const;

  friend bool operator==(const Word& a, const Word& b) = default;
  /// Lexicographic in letter_key order; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  Word(int rank, std::vector<Letter> letters) : rank_(rank), letters_(std::move(letters)) {}

  int rank_;
  std::vector<Letter> letters_;
};

/// Reduced concatenation u*v.
Word multiply(const Word& u, const Word& v);
inline Word operator*(const Word& u, const Word& v) { return multiply(u, v); }

/// True iff `prefix` is an initial segment of `w` (both are reduced, so no
/// cancellation across the boundary is possible).
bool starts_with(const Word& w, const Word& prefix);

/// "x1 x2^-1 x3"; the identity prints as "1".
std::string to_string(const Word& w);
std::ostream& operator<<(std::ostream& os, const Word& w);

enum class PsiType { T1 = 1, T2, T3, T4, T5 };

/// Type of a word in Psi, or nullopt when the word is not an element of Psi.
///   T1 xi_i^{2t}, T2 xi_i^t xi_j^{2s}, T3 xi_i^t xi_j^s xi_i^t,
///   T4 xi_i^t xi_j^s xi_i^{-t}, T5 xi_i^t xi_j^s xi_k^p with i, j, k distinct.
std::optional<PsiType> classify_psi(const Word& w);

struct PsiElement {
  Word word;
  PsiType type;
};

/// Psi in canonical (lexicographic) order.
std::vector<PsiElement> enumerate_psi(int rank);

/// Per-type counts 2n, 4n(n-1), 4n(n-1), 4n(n-1), 8n(n-1)(n-2).
std::array<std::size_t, 5> psi_type_count_formula(int rank);
/// 2n + 4n(n-1) + 8n(n-1)^2.
std::size_t psi_size_formula(int rank);

/// Psi with constant-time positional access and prefix-class lookup.
class PsiTable {
 public:
  explicit PsiTable(int rank);

  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const PsiElement& operator[](std::size_t i) const { return elements_.at(i); }
  auto begin() const noexcept { return elements_.begin(); }
  auto end() const noexcept { return elements_.end(); }

  std::optional<std::size_t> index_of(const Word& w) const;
  /// Index of the unique psi with w in J_psi, or nullopt when w is in
  /// Gamma_1 or is a length-2 word xi_i^t xi_j^s with i != j.
  std::optional<std::size_t> prefix_class(const Word& w) const;
  std::array<std::size_t, 5> type_counts() const;

 private:
  int rank_;
  std::vector<PsiElement> elements_;
};

/// Where a reduced word falls in Gamma = {1} + Xi + Xi^{-1} + (disjoint union of J_psi).
///
/// The length-2 words xi_i^t xi_j^s (i != j) start with no element of Psi; they
/// are a finite set and carry no boundary measure, so they are reported
/// separately rather than silently folded into one of the other parts.
enum class DecompositionPart { Gamma1, MixedPair, Prefix };

DecompositionPart decomposition_part(const Word& w);
bool in_gamma1(const Word& w);
bool is_mixed_pair(const Word& w);

/// A signed permutation of the generators, extended letterwise to words.
/// It is an automorphism of the free group that maps Psi onto itself
/// preserving types.
class GeneratorPermutation {
 public:
  static GeneratorPermutation identity(int rank);
  /// Exchanges the letters a and b (and so a^-1 and b^-1), fixing all others.
  /// With a = b^-1 this inverts one generator.
  static GeneratorPermutation swap(int rank, Letter a, Letter b);

  int rank() const noexcept { return rank_; }
  Letter operator()(Letter l) const;
  Word operator()(const Word& w) const;
  /// image[i] = position of the image of psi[i].
  std::vector<std::size_t> psi_map(const PsiTable& psi) const;

 private:
  GeneratorPermutation(int rank, std::vector<Letter> image) : rank_(rank), image_(std::move(image)) {}

  int rank_;
  std::vector<Letter> image_;  // image_[i - 1] is the image of +i
};

/// All reduced words of length <= max_length, by length then lexicographically.
std::vector<Word> enumerate_ball(int rank, int max_length);
/// 1 + 2n((2n-1)^L - 1)/(2n-2).
std::size_t ball_size_formula(int rank, int max_length);
/// 6: the smallest length covering |gamma_r| + |psi_r| for every relation.
int default_ball_length(int rank);

}  // namespace loxobound
