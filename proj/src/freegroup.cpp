#include "loxobound/freegroup.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "loxobound/errors.hpp"

namespace loxobound {
namespace {

void check_rank(int rank) {
  if (rank < 2) throw InputError("free group rank must be >= 2, got " + std::to_string(rank));
}

void check_same_rank(const Word& u, const Word& v) {
  if (u.rank() != v.rank())
    throw InputError("rank mismatch: " + std::to_string(u.rank()) + " vs " + std::to_string(v.rank()));
}

std::vector<Letter> all_letters(int rank) {
  std::vector<Letter> out;
  out.reserve(2 * static_cast<std::size_t>(rank));
  for (int i = 1; i <= rank; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

}  // namespace

Word::Word(int rank) : rank_(rank) { check_rank(rank); }

Word Word::reduce(int rank, std::span<const Letter> raw) {
  check_rank(rank);
  std::vector<Letter> stack;
  stack.reserve(raw.size());
  for (Letter l : raw) {
    if (l == 0 || l > rank || -l > rank)
      throw InputError("generator index " + std::to_string(l) + " out of range for rank " + std::to_string(rank));
    if (!stack.empty() && stack.back() == -l)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(rank, std::move(stack));
}

Word Word::reduce(int rank, std::initializer_list<Letter> raw) {
  return reduce(rank, std::span<const Letter>(raw.begin(), raw.size()));
}

Word Word::generator(int rank, int index, int exponent) {
  if (exponent != 1 && exponent != -1) throw InputError("generator exponent must be +1 or -1");
  return reduce(rank, {exponent * index});
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (Letter& l : out) l = -l;
  return Word(rank_, std::move(out));
}

Word Word::prefix(std::size_t len) const {
  len = std::min(len, letters_.size());
  return Word(rank_, std::vector<Letter>(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(len)));
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
  return std::lexicographical_compare_three_way(
      a.letters_.begin(), a.letters_.end(), b.letters_.begin(), b.letters_.end(),
      [](Letter x, Letter y) { return letter_key(x) <=> letter_key(y); });
}

Word multiply(const Word& u, const Word& v) {
  check_same_rank(u, v);
  auto lu = u.letters();
  auto lv = v.letters();
  std::size_t cancel = 0;
  while (cancel < lu.size() && cancel < lv.size() && lu[lu.size() - 1 - cancel] == -lv[cancel]) ++cancel;
  std::vector<Letter> out;
  out.reserve(lu.size() + lv.size() - 2 * cancel);
  out.insert(out.end(), lu.begin(), lu.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), lv.begin() + static_cast<std::ptrdiff_t>(cancel), lv.end());
  // Both inputs are reduced, so cancellation only happens at the seam.
  return Word::reduce(u.rank(), out);
}

bool starts_with(const Word& w, const Word& prefix) {
  check_same_rank(w, prefix);
  auto lw = w.letters();
  auto lp = prefix.letters();
  return lp.size() <= lw.size() && std::equal(lp.begin(), lp.end(), lw.begin());
}

std::string to_string(const Word& w) {
  if (w.is_identity()) return "1";
  std::ostringstream os;
  bool first = true;
  for (Letter l : w.letters()) {
    if (!first) os << ' ';
    first = false;
    os << 'x' << (l > 0 ? l : -l);
    if (l < 0) os << "^-1";
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Word& w) { return os << to_string(w); }

std::optional<PsiType> classify_psi(const Word& w) {
  auto l = w.letters();
  auto idx = [](Letter x) { return x > 0 ? x : -x; };
  if (l.size() == 2) {
    if (l[0] == l[1]) return PsiType::T1;
    return std::nullopt;
  }
  if (l.size() != 3) return std::nullopt;
  if (idx(l[0]) == idx(l[1])) return std::nullopt;
  if (l[2] == l[1]) return PsiType::T2;
  if (idx(l[2]) == idx(l[1])) return std::nullopt;
  if (l[2] == l[0]) return PsiType::T3;
  if (l[2] == -l[0]) return PsiType::T4;
  return PsiType::T5;
}

std::vector<PsiElement> enumerate_psi(int rank) {
  check_rank(rank);
  const auto letters = all_letters(rank);
  std::vector<PsiElement> out;
  out.reserve(psi_size_formula(rank));
  for (Letter x : letters) {
    out.push_back({Word::reduce(rank, {x, x}), PsiType::T1});
    for (Letter y : letters) {
      if (y == x || y == -x) continue;
      for (Letter z : letters) {
        if (z == -y) continue;
        Word w = Word::reduce(rank, {x, y, z});
        auto type = classify_psi(w);
        if (!type) throw InternalError("enumerated word outside Psi: " + to_string(w));
        out.push_back({std::move(w), *type});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PsiElement& a, const PsiElement& b) { return a.word < b.word; });
  return out;
}

std::array<std::size_t, 5> psi_type_count_formula(int rank) {
  check_rank(rank);
  const std::size_t n = static_cast<std::size_t>(rank);
  return {2 * n, 4 * n * (n - 1), 4 * n * (n - 1), 4 * n * (n - 1), 8 * n * (n - 1) * (n - 2)};
}

std::size_t psi_size_formula(int rank) {
  check_rank(rank);
  const std::size_t n = static_cast<std::size_t>(rank);
  return 2 * n + 4 * n * (n - 1) + 8 * n * (n - 1) * (n - 1);
}

PsiTable::PsiTable(int rank) : rank_(rank), elements_(enumerate_psi(rank)) {}

std::optional<std::size_t> PsiTable::index_of(const Word& w) const {
  if (w.rank() != rank_) return std::nullopt;
  auto it = std::lower_bound(elements_.begin(), elements_.end(), w,
                             [](const PsiElement& e, const Word& key) { return e.word < key; });
  if (it == elements_.end() || it->word != w) return std::nullopt;
  return static_cast<std::size_t>(it - elements_.begin());
}

std::optional<std::size_t> PsiTable::prefix_class(const Word& w) const {
  if (w.rank() != rank_) throw InputError("rank mismatch in prefix_class");
  auto l = w.letters();
  if (l.size() >= 2 && l[0] == l[1]) return index_of(w.prefix(2));
  if (l.size() >= 3) return index_of(w.prefix(3));
  return std::nullopt;
}

std::array<std::size_t, 5> PsiTable::type_counts() const {
  std::array<std::size_t, 5> counts{};
  for (const auto& e : elements_) ++counts[static_cast<std::size_t>(e.type) - 1];
  return counts;
}

bool in_gamma1(const Word& w) { return w.length() <= 1; }

bool is_mixed_pair(const Word& w) {
  auto l = w.letters();
  return l.size() == 2 && l[0] != l[1];
}

DecompositionPart decomposition_part(const Word& w) {
  if (in_gamma1(w)) return DecompositionPart::Gamma1;
  if (is_mixed_pair(w)) return DecompositionPart::MixedPair;
  return DecompositionPart::Prefix;
}

GeneratorPermutation GeneratorPermutation::identity(int rank) {
  check_rank(rank);
  std::vector<Letter> image(static_cast<std::size_t>(rank));
  for (int i = 1; i <= rank; ++i) image[static_cast<std::size_t>(i - 1)] = i;
  return GeneratorPermutation(rank, std::move(image));
}

GeneratorPermutation GeneratorPermutation::swap(int rank, Letter a, Letter b) {
  check_rank(rank);
  for (Letter l : {a, b})
    if (l == 0 || l > rank || -l > rank) throw InputError("letter out of range: " + std::to_string(l));
  GeneratorPermutation out = identity(rank);
  auto set = [&](Letter from, Letter to) {
    if (from > 0)
      out.image_[static_cast<std::size_t>(from - 1)] = to;
    else
      out.image_[static_cast<std::size_t>(-from - 1)] = -to;
  };
  if (a == b) return out;
  if (a == -b) {
    set(a, -a);
    return out;
  }
  set(a, b);
  set(b, a);
  return out;
}

Letter GeneratorPermutation::operator()(Letter l) const {
  if (l == 0 || l > rank_ || -l > rank_) throw InputError("letter out of range: " + std::to_string(l));
  return l > 0 ? image_[static_cast<std::size_t>(l - 1)] : -image_[static_cast<std::size_t>(-l - 1)];
}

Word GeneratorPermutation::operator()(const Word& w) const {
  if (w.rank() != rank_) throw InputError("rank mismatch in generator permutation");
  std::vector<Letter> out;
  out.reserve(w.length());
  for (Letter l : w.letters()) out.push_back((*this)(l));
  return Word::reduce(rank_, out);
}

std::vector<std::size_t> GeneratorPermutation::psi_map(const PsiTable& psi) const {
  if (psi.rank() != rank_) throw InputError("rank mismatch in generator permutation");
  std::vector<std::size_t> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    auto idx = psi.index_of((*this)(psi[i].word));
    if (!idx) throw InternalError("generator permutation left Psi");
    out[i] = *idx;
  }
  return out;
}

std::vector<Word> enumerate_ball(int rank, int max_length) {
  check_rank(rank);
  if (max_length < 0) throw InputError("ball length must be >= 0");
  const auto letters = all_letters(rank);
  std::vector<Word> out;
  out.reserve(ball_size_formula(rank, max_length));
  out.emplace_back(rank);
  std::size_t level_begin = 0;
  for (int len = 1; len <= max_length; ++len) {
    const std::size_t level_end = out.size();
    for (std::size_t k = level_begin; k < level_end; ++k) {
      for (Letter l : letters) {
        auto base = out[k].letters();
        if (!base.empty() && base.back() == -l) continue;
        std::vector<Letter> next(base.begin(), base.end());
        next.push_back(l);
        out.push_back(Word::reduce(rank, next));
      }
    }
    level_begin = level_end;
  }
  return out;
}

std::size_t ball_size_formula(int rank, int max_length) {
  check_rank(rank);
  const std::size_t n = static_cast<std::size_t>(rank);
  std::size_t power = 1;
  for (int i = 0; i < max_length; ++i) power *= 2 * n - 1;
  return 1 + 2 * n * (power - 1) / (2 * n - 2);
}

int default_ball_length(int rank) {
  check_rank(rank);
  return 6;
}

}  // namespace loxobound
