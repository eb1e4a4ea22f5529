#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loxobound/freegroup.hpp"

namespace loxobound {

/// Row labels of the large relation collection G.
enum class Family { R1a, R1b, R2a, R2b, R3a, R3b, R4a, R4b, R5a, R5b };

inline constexpr std::array<Family, 10> kAllFamilies = {
    Family::R1a, Family::R1b, Family::R2a, Family::R2b, Family::R3a,
    Family::R3b, Family::R4a, Family::R4b, Family::R5a, Family::R5b};

/// Families kept in the midsize collection F.
inline constexpr std::array<Family, 5> kFamiliesF = {Family::R1a, Family::R2b, Family::R3a, Family::R4b,
                                                     Family::R5a};

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);
bool in_collection_F(Family f);

/// A group-theoretical relation (gamma_r, psi_r, Psi_r) of the decomposition,
/// meaning gamma_r J_{psi_r} = Gamma - ({.} u J_{Psi_r}).
struct Relation {
  Family family;
  Word gamma;
  PsiElement psi;
  std::size_t psi_index;
  /// Sorted positions in the PsiTable the relation was built against.
  std::vector<std::size_t> psi_set;
  /// The finite exceptional set {.}; a subset of Gamma_1.
  std::vector<Word> dot_set;

  bool contains_own_psi() const;
  bool in_psi_set(std::size_t index) const;
};

/// Every family instance over all admissible index tuples,
/// family-major, tuples in canonical letter order.
std::vector<Relation> build_G(const PsiTable& psi);
/// The rows of build_G with families 1a, 2b, 3a, 4b, 5a.
std::vector<Relation> build_F(const PsiTable& psi);

/// Builds the single relation of `family` for the given index tuple.
/// `letters` holds (xi_i0^t0, xi_j0^s0, xi_k0^p0) as signed letters; only as
/// many entries as the family uses are read.
Relation make_relation(const PsiTable& psi, Family family, std::span<const Letter> letters);

/// Number of relations of each family in G.
std::array<std::size_t, 10> family_count_formula(int rank);
/// Sum of the per-row counts: 2n + 28n(n-1) + 16n(n-1)(n-2).
std::size_t g_size_row_sum(int rank);
/// Bottom-row formula 2(2n + 4n(n-1) + 8n(n-1)^2) + 2n(2n-3).
std::size_t g_size_bottom_row(int rank);
/// |Psi_r| predicted by counting the set expression of the family.
std::size_t psi_set_size_formula(Family f, int rank);

struct RelationViolation {
  int direction;  // 1: gamma*w lands in {.} u J_{Psi_r}; 2: gamma^{-1}*v misses J_{psi_r}
  Word word;
  Word image;
};

/// Outcome of the two-sided bounded check of a relation identity.
struct VerificationReport {
  int max_length = 0;
  std::size_t forward_checked = 0;
  std::size_t backward_checked = 0;
  std::size_t forward_violations = 0;
  std::size_t backward_violations = 0;
  /// Backward-direction words skipped because they are length-2 mixed
  /// words xi_i^t xi_j^s, which the decomposition leaves unassigned.
  std::size_t mixed_pair_exempt = 0;
  std::vector<RelationViolation> samples;

  bool passed() const { return forward_violations == 0 && backward_violations == 0; }
};

/// Checks the relation identity on the ball of radius `max_length`:
///   (1) every w in J_{psi_r} with |w| <= L has gamma_r w outside {.} u J_{Psi_r};
///   (2) every v outside {.} u J_{Psi_r} with |v| <= L - |gamma_r| - |psi_r|
///       (and not a length-2 mixed word) has gamma_r^{-1} v in J_{psi_r}.
/// A pass at finite L is evidence, not proof.
/// Throws InputError when L < |gamma_r| + |psi_r|.
VerificationReport verify_relation(const Relation& r, const PsiTable& psi, int max_length);
VerificationReport verify_relation(const Relation& r, const PsiTable& psi, const std::vector<Word>& ball,
                                   int max_length);

/// Runs verify_relation over a list, in parallel, results in input order.
std::vector<VerificationReport> verify_relations(const std::vector<Relation>& rs, const PsiTable& psi,
                                                 int max_length);

/// The type-4b relations with psi_r = xi_i^t xi_j0^s0 xi_i^-t (i != j0) and
/// psi_r = xi_j0^s xi_i0^t0 xi_j0^-s; their Psi_r partition Psi.
std::vector<Relation> partition_T(const PsiTable& psi, int i0, int t0, int j0, int s0);

/// One line per relation: family, gamma_r, psi_r, |Psi_r|, Psi_r members
/// (tab separated, members joined by ", ").
void write_relations(std::ostream& os, const std::vector<Relation>& rs, const PsiTable& psi);
std::string serialize_relation(const Relation& r, const PsiTable& psi);

}  // namespace loxobound
