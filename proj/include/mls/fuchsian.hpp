// Genus-2 surface group on the Poincare disk: the symmetric (Bolza) octagon
// group, conjugacy-class enumeration and the exact marked length spectrum.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mls/mobius.hpp"

namespace mls {

// Letters: +1..+4 are the four octagon side-pairing translations t0..t3,
// negative letters their inverses.
using Word = std::vector<int8_t>;

std::string word_string(const Word& w);
Word word_from_string(const std::string& s);
Word word_inverse(const Word& w);
Word word_free_reduce(const Word& w);
Word word_cyclic_reduce(Word w);
bool word_is_power(const Word& w);  // proper power as a cyclic word

struct GroupElement {
  Mat2 m = Mat2::Identity();
  Word word;

  static GroupElement identity() { return {}; }
};

// 2x2 product in long double with unit-determinant renormalization.
Mat2 mul_renorm(const Mat2& a, const Mat2& b);
GroupElement group_mul(const GroupElement& a, const GroupElement& b);
GroupElement group_inv(const GroupElement& a);

double translation_length(const GroupElement& g);
double translation_length(const DiskMapd& g);

// Attracting / repelling ideal fixed points of a hyperbolic element.
std::pair<std::complex<double>, std::complex<double>> axis_endpoints(const GroupElement& g);

struct ConjClass {
  GroupElement rep;    // rebuilt from the canonical word
  std::string canon;   // canonical cyclic word
  double l0 = 0.0;     // translation length w.r.t. the hyperbolic base metric
  bool primitive = true;
};

class SurfaceGroup {
 public:
  static SurfaceGroup bolza();

  // Octagon side-pairing translations t0..t3 (single-letter words).
  const std::array<GroupElement, 4>& translations() const { return trans_; }
  // Standard symplectic generators a1,b1,a2,b2 and their inverses; the
  // genus-2 relator [a1,b1][a2,b2] evaluates to +-identity.
  const std::array<GroupElement, 8>& generators() const { return sympl_; }
  double relator_residual() const { return relator_residual_; }

  // Fundamental octagon (Dirichlet domain of the origin).
  const std::array<std::complex<double>, 8>& vertices() const { return vertices_; }
  double side_circle_center() const { return side_m_; }
  double side_circle_radius() const { return side_r_; }
  double inradius() const { return inradius_; }
  double circumradius() const { return circumradius_; }

  bool in_domain(std::complex<double> z) const;
  // First violated side in the fixed scan order, or -1 if z is inside.
  int exit_side(std::complex<double> z) const;
  // Map across side k (0..7): the tile beyond side k is side_map(k) * domain.
  const DiskMapd& side_map(int k) const { return sides_[k]; }
  int8_t side_letter(int k) const { return side_letter_[k]; }

  // Reduce z into the fundamental domain. Appends the deck letters (the word
  // W with  z_original = W * z_reduced) to `letters` if non-null.
  std::complex<double> reduce(std::complex<double> z, Word* letters = nullptr) const;

  DiskMapd disk_map(const Word& w) const;
  Mat2 sl2(const Word& w) const;

  // Geometric conjugacy-class canonicalization (axis-orbit reduction).
  struct Canonical {
    Word word;        // canonical cyclic word (lex-min rotation, inverse included)
    DiskMapd rep;     // built from `word`
    double l0 = 0.0;
  };
  Canonical canonicalize(const DiskMapd& g) const;
  Canonical canonicalize(const Word& w) const;

  // Words whose tiles share at least a boundary point with the domain, and
  // the closure of that set under one more touching step.
  const std::vector<Word>& star_words() const { return star1_; }
  const std::vector<Word>& star2_words() const { return star2_; }

 private:
  std::array<GroupElement, 4> trans_;
  std::array<DiskMapd, 4> trans_disk_;
  std::array<GroupElement, 8> sympl_;
  double relator_residual_ = 0.0;
  std::array<std::complex<double>, 8> vertices_;
  std::array<DiskMapd, 8> sides_;  // map across side k
  std::array<int8_t, 8> side_letter_;
  double side_m_ = 0.0, side_r_ = 0.0, inradius_ = 0.0, circumradius_ = 0.0;
  std::vector<Word> star1_, star2_;
  std::vector<DiskMapd> star2_disk_;

  void build_star();
};

struct EnumerateOptions {
  std::size_t max_classes = 200000;
  std::size_t max_elements = 30000000;
  bool include_powers = false;
  // Permutes the BFS neighbor scan order; the class list must not depend on it.
  int neighbor_order = 0;
};

// Every primitive conjugacy class with translation length <= length_cap,
// exactly once (c and c^{-1} identified), sorted by (l0, canonical word).
std::vector<ConjClass> enumerate_classes(const SurfaceGroup& group, double length_cap,
                                         const EnumerateOptions& opts = {});

void write_spectrum_csv(const std::string& path, const std::vector<ConjClass>& classes);

}  // namespace mls
