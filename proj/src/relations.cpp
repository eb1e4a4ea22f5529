#include "loxobound/relations.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "loxobound/errors.hpp"
#include "loxobound/parallel.hpp"

namespace loxobound {
namespace {

constexpr std::size_t kMaxSamples = 8;

int index_of_letter(Letter l) { return l > 0 ? l : -l; }

std::vector<Letter> all_letters(int rank) {
  std::vector<Letter> out;
  for (int i = 1; i <= rank; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

int letters_used(Family f) {
  switch (f) {
    case Family::R1a:
      return 1;
    case Family::R5a:
    case Family::R5b:
      return 3;
    default:
      return 2;
  }
}

class SetBuilder {
 public:
  explicit SetBuilder(const PsiTable& psi) : psi_(psi) {}

  std::size_t position(std::initializer_list<Letter> letters) const {
    Word w = Word::reduce(psi_.rank(), letters);
    auto idx = psi_.index_of(w);
    if (!idx) throw InternalError("set expression produced a word outside Psi: " + to_string(w));
    return *idx;
  }

  // {x^2} u {x y^2} u {x y z}: every element of Psi whose first letter is x.
  std::vector<std::size_t> starting_with(Letter x) const {
    std::vector<std::size_t> out{position({x, x})};
    for (Letter y : all_letters(psi_.rank())) {
      if (index_of_letter(y) == index_of_letter(x)) continue;
      for (Letter z : all_letters(psi_.rank())) {
        if (z == -y) continue;
        out.push_back(position({x, y, z}));
      }
    }
    return out;
  }

  // {x y^2} u {x y z}: every element of Psi whose first two letters are x y.
  std::vector<std::size_t> starting_with(Letter x, Letter y) const {
    std::vector<std::size_t> out;
    for (Letter z : all_letters(psi_.rank())) {
      if (z == -y) continue;
      out.push_back(position({x, y, z}));
    }
    return out;
  }

  std::vector<std::size_t> complement(std::vector<std::size_t> removed) const {
    std::sort(removed.begin(), removed.end());
    std::vector<std::size_t> out;
    out.reserve(psi_.size() - std::min(removed.size(), psi_.size()));
    for (std::size_t i = 0; i < psi_.size(); ++i)
      if (!std::binary_search(removed.begin(), removed.end(), i)) out.push_back(i);
    return out;
  }

 private:
  const PsiTable& psi_;
};

std::vector<Word> gamma_one(int rank) {
  std::vector<Word> out{Word(rank)};
  for (Letter l : all_letters(rank)) out.push_back(Word::reduce(rank, {l}));
  return out;
}

void check_family_letters(int rank, Family family, std::span<const Letter> letters) {
  const int used = letters_used(family);
  if (static_cast<int>(letters.size()) < used) throw InputError("too few letters for family " + std::string(family_name(family)));
  for (int k = 0; k < used; ++k) {
    const Letter l = letters[static_cast<std::size_t>(k)];
    if (l == 0 || index_of_letter(l) > rank) throw InputError("letter out of range: " + std::to_string(l));
    for (int m = 0; m < k; ++m)
      if (index_of_letter(letters[static_cast<std::size_t>(m)]) == index_of_letter(l))
        throw InputError("relation indices must be pairwise distinct");
  }
}

}  // namespace

std::string_view family_name(Family f) {
  static constexpr std::array<std::string_view, 10> names = {"1a", "1b", "2a", "2b", "3a",
                                                             "3b", "4a", "4b", "5a", "5b"};
  return names[static_cast<std::size_t>(f)];
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  return std::nullopt;
}

bool in_collection_F(Family f) {
  return std::find(kFamiliesF.begin(), kFamiliesF.end(), f) != kFamiliesF.end();
}

bool Relation::in_psi_set(std::size_t index) const {
  return std::binary_search(psi_set.begin(), psi_set.end(), index);
}

bool Relation::contains_own_psi() const { return in_psi_set(psi_index); }

Relation make_relation(const PsiTable& psi, Family family, std::span<const Letter> letters) {
  const int n = psi.rank();
  check_family_letters(n, family, letters);
  const Letter a = letters[0];
  const Letter b = letters_used(family) >= 2 ? letters[1] : 0;
  const Letter c = letters_used(family) >= 3 ? letters[2] : 0;
  const SetBuilder sets(psi);

  Word gamma(n);
  std::vector<Letter> psi_letters;
  std::vector<std::size_t> set;
  std::vector<Word> dot = gamma_one(n);

  const Word a_inv = Word::reduce(n, {-a});
  const Word conj_b_inv = b != 0 ? Word::reduce(n, {a, -b, -a}) : Word(n);

  switch (family) {
    case Family::R1a:
      gamma = a_inv;
      psi_letters = {a, a};
      set = sets.complement(sets.starting_with(a));
      std::erase(dot, Word::reduce(n, {a}));
      break;
    case Family::R1b:
      gamma = Word::reduce(n, {a, b, -a});
      psi_letters = {a, a};
      set = sets.complement({sets.position({a, b, a})});
      break;
    case Family::R2a:
      gamma = a_inv;
      psi_letters = {a, b, b};
      set = sets.complement({sets.position({b, b})});
      break;
    case Family::R2b:
      gamma = conj_b_inv;
      psi_letters = {a, b, b};
      set = sets.complement(sets.starting_with(a, b));
      break;
    case Family::R3a:
      gamma = a_inv;
      psi_letters = {a, b, a};
      set = sets.complement(sets.starting_with(b, a));
      break;
    case Family::R3b:
      gamma = conj_b_inv;
      psi_letters = {a, b, a};
      set = sets.complement({sets.position({a, a})});
      break;
    case Family::R4a:
      gamma = a_inv;
      psi_letters = {a, b, -a};
      set = sets.complement(sets.starting_with(b, -a));
      break;
    case Family::R4b:
      gamma = conj_b_inv;
      psi_letters = {a, b, -a};
      set = sets.starting_with(a);
      std::sort(set.begin(), set.end());
      dot = {Word::reduce(n, {a})};
      break;
    case Family::R5a:
      gamma = a_inv;
      psi_letters = {a, b, c};
      set = sets.complement(sets.starting_with(b, c));
      break;
    case Family::R5b:
      gamma = conj_b_inv;
      psi_letters = {a, b, c};
      set = sets.complement(sets.starting_with(a, c));
      break;
  }

  const Word psi_word = Word::reduce(n, psi_letters);
  const auto psi_index = psi.index_of(psi_word);
  if (!psi_index) throw InternalError("psi_r outside Psi: " + to_string(psi_word));
  return Relation{family, std::move(gamma), psi[*psi_index], *psi_index, std::move(set), std::move(dot)};
}

namespace {

std::vector<Relation> build_families(const PsiTable& psi, bool only_F) {
  const int n = psi.rank();
  const auto letters = all_letters(n);
  std::vector<Relation> out;
  out.reserve(only_F ? psi.size() : g_size_row_sum(n));
  for (Family f : kAllFamilies) {
    if (only_F && !in_collection_F(f)) continue;
    const int used = letters_used(f);
    for (Letter a : letters) {
      if (used == 1) {
        const std::array<Letter, 1> tuple{a};
        out.push_back(make_relation(psi, f, tuple));
        continue;
      }
      for (Letter b : letters) {
        if (index_of_letter(b) == index_of_letter(a)) continue;
        if (used == 2) {
          const std::array<Letter, 2> tuple{a, b};
          out.push_back(make_relation(psi, f, tuple));
          continue;
        }
        for (Letter c : letters) {
          if (index_of_letter(c) == index_of_letter(a) || index_of_letter(c) == index_of_letter(b)) continue;
          const std::array<Letter, 3> tuple{a, b, c};
          out.push_back(make_relation(psi, f, tuple));
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Relation> build_G(const PsiTable& psi) { return build_families(psi, false); }

std::vector<Relation> build_F(const PsiTable& psi) { return build_families(psi, true); }

std::array<std::size_t, 10> family_count_formula(int rank) {
  if (rank < 2) throw InputError("rank must be >= 2");
  const std::size_t n = static_cast<std::size_t>(rank);
  const std::size_t pair = 4 * n * (n - 1);
  const std::size_t triple = 8 * n * (n - 1) * (n - 2);
  return {2 * n, pair, pair, pair, pair, pair, pair, pair, triple, triple};
}

std::size_t g_size_row_sum(int rank) {
  const auto counts = family_count_formula(rank);
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

std::size_t g_size_bottom_row(int rank) {
  if (rank < 2) throw InputError("rank must be >= 2");
  const std::size_t n = static_cast<std::size_t>(rank);
  return 2 * psi_size_formula(rank) + 2 * n * (2 * n - 3);
}

std::size_t psi_set_size_formula(Family f, int rank) {
  const std::size_t total = psi_size_formula(rank);
  const std::size_t n = static_cast<std::size_t>(rank);
  const std::size_t first_letter = 1 + 6 * (n - 1) + 4 * (n - 1) * (n - 2);
  const std::size_t first_two = 2 * n - 1;
  switch (f) {
    case Family::R1a:
      return total - first_letter;
    case Family::R4b:
      return first_letter;
    case Family::R1b:
    case Family::R2a:
    case Family::R3b:
      return total - 1;
    default:
      return total - first_two;
  }
}

VerificationReport verify_relation(const Relation& r, const PsiTable& psi, const std::vector<Word>& ball,
                                   int max_length) {
  const int n = psi.rank();
  if (r.gamma.rank() != n) throw InputError("relation rank does not match Psi table rank");
  const int margin = static_cast<int>(r.gamma.length() + r.psi.word.length());
  if (max_length < margin)
    throw InputError("ball length " + std::to_string(max_length) + " is below |gamma_r| + |psi_r| = " +
                     std::to_string(margin));
  if (ball.size() < ball_size_formula(n, max_length)) throw InputError("ball is smaller than its stated length");

  auto excluded = [&](const Word& v) {
    if (std::find(r.dot_set.begin(), r.dot_set.end(), v) != r.dot_set.end()) return true;
    const auto cls = psi.prefix_class(v);
    return cls && r.in_psi_set(*cls);
  };

  VerificationReport rep;
  rep.max_length = max_length;
  const Word gamma_inv = r.gamma.inverse();
  const auto backward_limit = static_cast<std::size_t>(max_length - margin);
  for (const Word& w : ball) {
    if (w.length() > static_cast<std::size_t>(max_length)) continue;
    if (starts_with(w, r.psi.word)) {
      ++rep.forward_checked;
      Word image = r.gamma * w;
      if (excluded(image)) {
        ++rep.forward_violations;
        if (rep.samples.size() < kMaxSamples) rep.samples.push_back({1, w, std::move(image)});
      }
    }
    if (w.length() <= backward_limit && !excluded(w)) {
      if (is_mixed_pair(w)) {
        ++rep.mixed_pair_exempt;
        continue;
      }
      ++rep.backward_checked;
      Word pre = gamma_inv * w;
      if (!starts_with(pre, r.psi.word)) {
        ++rep.backward_violations;
        if (rep.samples.size() < kMaxSamples) rep.samples.push_back({2, w, std::move(pre)});
      }
    }
  }
  return rep;
}

VerificationReport verify_relation(const Relation& r, const PsiTable& psi, int max_length) {
  if (max_length < 0) throw InputError("ball length must be >= 0");
  return verify_relation(r, psi, enumerate_ball(psi.rank(), max_length), max_length);
}

std::vector<VerificationReport> verify_relations(const std::vector<Relation>& rs, const PsiTable& psi,
                                                 int max_length) {
  const auto ball = enumerate_ball(psi.rank(), max_length);
  std::vector<VerificationReport> out(rs.size());
  parallel_for(rs.size(), [&](std::size_t i) { out[i] = verify_relation(rs[i], psi, ball, max_length); });
  return out;
}

std::vector<Relation> partition_T(const PsiTable& psi, int i0, int t0, int j0, int s0) {
  const int n = psi.rank();
  auto valid_index = [n](int i) { return i >= 1 && i <= n; };
  auto valid_sign = [](int t) { return t == 1 || t == -1; };
  if (!valid_index(i0) || !valid_index(j0) || !valid_sign(t0) || !valid_sign(s0) || i0 == j0)
    throw InputError("partition_T needs 1 <= i0 != j0 <= n and t0, s0 in {-1, +1}");

  std::vector<Relation> out;
  const Letter pivot = s0 * j0;
  for (Letter a : all_letters(n)) {
    if (index_of_letter(a) == j0) continue;
    const std::array<Letter, 2> tuple{a, pivot};
    out.push_back(make_relation(psi, Family::R4b, tuple));
  }
  for (int s : {1, -1}) {
    const std::array<Letter, 2> tuple{s * j0, t0 * i0};
    out.push_back(make_relation(psi, Family::R4b, tuple));
  }
  return out;
}

std::string serialize_relation(const Relation& r, const PsiTable& psi) {
  std::ostringstream os;
  os << family_name(r.family) << '\t' << r.gamma << '\t' << r.psi.word << '\t' << r.psi_set.size() << '\t';
  for (std::size_t k = 0; k < r.psi_set.size(); ++k) {
    if (k > 0) os << ", ";
    os << psi[r.psi_set[k]].word;
  }
  return os.str();
}

void write_relations(std::ostream& os, const std::vector<Relation>& rs, const PsiTable& psi) {
  for (const auto& r : rs) os << serialize_relation(r, psi) << '\n';
}

}  // namespace loxobound
