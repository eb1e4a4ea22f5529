#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "loxobound/errors.hpp"
#include "loxobound/freegroup.hpp"
#include "oracles.hpp"

using namespace loxobound;

TEST_CASE("reduce cancels adjacent inverse pairs") {
  CHECK(Word::reduce(2, {1, -1}).is_identity());
  CHECK(oracle::letters_of(Word::reduce(3, {1, 2, -2, 3})) == std::vector<int>{1, 3});
  const Word w = Word::reduce(3, {1, 2, 3});
  CHECK(oracle::letters_of(w) == std::vector<int>{1, 2, 3});
  CHECK(Word::reduce(3, w.letters()) == w);
  CHECK_THROWS_AS(Word::reduce(2, {3}), InputError);
  CHECK_THROWS_AS(Word::reduce(2, {0}), InputError);
  CHECK_THROWS_AS(Word(1), InputError);
}

TEST_CASE("reduce agrees with a stack oracle and never lengthens") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 2000; ++k) {
    const int rank = 2 + k % 3;
    const auto raw = oracle::random_raw(rng, rank, 12);
    const Word w = Word::reduce(rank, raw);
    CHECK(oracle::letters_of(w) == oracle::stack_reduce(raw));
    CHECK(w.length() <= raw.size());
  }
}

TEST_CASE("multiply examples") {
  const Word a = Word::reduce(3, {-1});
  const Word b = Word::reduce(3, {1, 2, 3});
  CHECK(oracle::letters_of(a * b) == std::vector<int>{2, 3});
  CHECK(Word(3) * b == b);
  CHECK((Word::reduce(3, {1, 2}) * Word::reduce(3, {-2, -1})).is_identity());
  CHECK((b * b.inverse()).is_identity());
  CHECK_THROWS_AS(Word(2) * Word(3), InputError);
}

TEST_CASE("multiply is associative on random triples") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const int rank = 2 + k % 3;
    const Word u = Word::reduce(rank, oracle::random_raw(rng, rank, 8));
    const Word v = Word::reduce(rank, oracle::random_raw(rng, rank, 8));
    const Word w = Word::reduce(rank, oracle::random_raw(rng, rank, 8));
    CHECK((u * v) * w == u * (v * w));
  }
}

TEST_CASE("to_string formatting") {
  CHECK(to_string(Word(2)) == "1");
  CHECK(to_string(Word::reduce(2, {1, -2})) == "x1 x2^-1");
}

TEST_CASE("starts_with") {
  CHECK(starts_with(Word::reduce(3, {1, 2, 3, 1}), Word::reduce(3, {1, 2})));
  CHECK_FALSE(starts_with(Word::reduce(3, {2, 3}), Word::reduce(3, {1, 2})));
  CHECK(starts_with(Word::reduce(3, {2, 3}), Word(3)));
}

namespace {

std::array<std::size_t, 5> table_counts(std::size_t n) {
  return {2 * n, 4 * n * (n - 1), 4 * n * (n - 1), 4 * n * (n - 1), 8 * n * (n - 1) * (n - 2)};
}

/// Type by direct pattern match on the letter list.
int pattern_type(const std::vector<int>& w) {
  if (w.size() == 2) return w[0] == w[1] ? 1 : 0;
  if (w.size() != 3) return 0;
  if (std::abs(w[0]) == std::abs(w[1]) || std::abs(w[1]) == std::abs(w[2])) return w[1] == w[2] && w[0] != w[1] && w[0] != -w[1] ? 2 : 0;
  if (w[2] == w[0]) return 3;
  if (w[2] == -w[0]) return 4;
  return 5;
}

}  // namespace

TEST_CASE("enumerate_psi matches the type-count formulas") {
  for (int n = 2; n <= 8; ++n) {
    const auto psi = enumerate_psi(n);
    const auto expected = table_counts(static_cast<std::size_t>(n));
    std::array<std::size_t, 5> counts{};
    std::set<std::vector<int>> seen;
    for (const auto& e : psi) {
      ++counts[static_cast<std::size_t>(e.type) - 1];
      seen.insert(oracle::letters_of(e.word));
      CHECK(pattern_type(oracle::letters_of(e.word)) == static_cast<int>(e.type));
    }
    CHECK(counts == expected);
    CHECK(psi_type_count_formula(n) == expected);
    CHECK(seen.size() == psi.size());
    const std::size_t un = static_cast<std::size_t>(n);
    CHECK(psi.size() == 2 * un + 4 * un * (un - 1) + 8 * un * (un - 1) * (un - 1));
    CHECK(psi_size_formula(n) == psi.size());
  }
  CHECK(enumerate_psi(2).size() == 28);
  CHECK(enumerate_psi(3).size() == 126);
  CHECK_THROWS_AS(enumerate_psi(1), InputError);
}

TEST_CASE("enumerate_psi is ordered and classifies type 4") {
  const auto psi = enumerate_psi(2);
  for (std::size_t k = 1; k < psi.size(); ++k) CHECK(psi[k - 1].word < psi[k].word);
  const Word t4 = Word::reduce(2, {1, 2, -1});
  const auto it = std::find_if(psi.begin(), psi.end(), [&](const PsiElement& e) { return e.word == t4; });
  REQUIRE(it != psi.end());
  CHECK(it->type == PsiType::T4);
  CHECK(classify_psi(Word::reduce(2, {1, 2})) == std::nullopt);
}

TEST_CASE("enumerate_ball sizes against exhaustive raw generation") {
  CHECK(enumerate_ball(2, 1).size() == 5);
  for (auto [n, L] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{2, 4}}) {
    std::set<std::vector<int>> reduced;
    std::vector<int> raw;
    const auto rec = [&](auto&& self, int depth) -> void {
      reduced.insert(oracle::stack_reduce(raw));
      if (depth == L) return;
      for (int g = 1; g <= n; ++g)
        for (int s : {1, -1}) {
          raw.push_back(s * g);
          self(self, depth + 1);
          raw.pop_back();
        }
    };
    rec(rec, 0);
    const auto ball = enumerate_ball(n, L);
    CHECK(ball.size() == reduced.size());
    CHECK(ball_size_formula(n, L) == reduced.size());
    std::set<std::vector<int>> got;
    for (const Word& w : ball) got.insert(oracle::letters_of(w));
    CHECK(got == reduced);
  }
  CHECK(enumerate_ball(3, 3).size() == 187);
}

TEST_CASE("prefix decomposition partitions every ball word") {
  for (auto [n, L] : {std::pair{2, 5}, std::pair{3, 5}}) {
    const auto psi = enumerate_psi(n);
    std::size_t mixed = 0;
    for (const Word& w : enumerate_ball(n, L)) {
      std::size_t hits = 0;
      for (const auto& e : psi)
        if (starts_with(w, e.word)) ++hits;
      if (is_mixed_pair(w)) {
        ++mixed;
        CHECK(hits == 0);
        CHECK_FALSE(in_gamma1(w));
        continue;
      }
      CHECK(hits + (in_gamma1(w) ? 1 : 0) == 1);
    }
    CHECK(mixed == static_cast<std::size_t>(4 * n * (n - 1)));
  }
}

TEST_CASE("PsiTable lookups") {
  const PsiTable table(3);
  for (std::size_t i = 0; i < table.size(); ++i) CHECK(table.index_of(table[i].word) == i);
  const Word w = Word::reduce(3, {1, 2, 3, 1, 1});
  const auto cls = table.prefix_class(w);
  REQUIRE(cls.has_value());
  CHECK(table[*cls].word == Word::reduce(3, {1, 2, 3}));
  CHECK_FALSE(table.prefix_class(Word::reduce(3, {1})).has_value());
}

TEST_CASE("generator permutations act on Psi") {
  const PsiTable table(3);
  const auto swap = GeneratorPermutation::swap(3, 1, 2);
  CHECK(swap(Word::reduce(3, {1, -2, 3})) == Word::reduce(3, {2, -1, 3}));
  const auto inv = GeneratorPermutation::swap(3, 1, -1);
  CHECK(inv(Word::reduce(3, {1, 2})) == Word::reduce(3, {-1, 2}));
  for (const auto& tau : {swap, inv}) {
    const auto map = tau.psi_map(table);
    std::set<std::size_t> image(map.begin(), map.end());
    CHECK(image.size() == table.size());
    for (std::size_t i = 0; i < map.size(); ++i) CHECK(table[map[i]].type == table[i].type);
  }
}
