#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kleinian/lorentz.hpp"

namespace kleinian {

// Letters are signed generator indices: +i is g_i, -i is g_i^{-1} (i >= 1).
using Word = std::vector<int>;

struct Disk {
  BoundaryPoint center;
  double radius = 0.0;  // angular radius on the sphere
  int pairs_with = -1;
};

// disks[2i] contains the attracting fixed point of generator i (it is the
// image of the exterior of disks[2i+1] under g_i); disks[2i+1] belongs to g_i^{-1}.
struct SchottkyGroup {
  int n = 2;
  std::vector<GroupElement> generators;
  std::vector<Disk> disks;

  int rank() const { return static_cast<int>(generators.size()); }
  GroupElement letter(int s) const;
  const Disk& disk(int s) const { return disks[static_cast<std::size_t>(disk_index(s))]; }
  static int disk_index(int s) { return 2 * (std::abs(s) - 1) + (s < 0 ? 1 : 0); }
};

// The same generators block-embedded in SO(1, m)_0; caps keep center and radius.
SchottkyGroup embed_group(const SchottkyGroup& g, int m);

struct ValidationReport {
  double q = 0.0;               // maximal contraction ratio of letters on admissible disks
  double min_separation = 0.0;  // smallest gap between two disks (radians)
  int samples_per_disk = 0;
};

// Throws precondition_error on overlapping disks or a failed mapping condition.
ValidationReport validate(const SchottkyGroup& g, int samples = 256);

// Word utilities.
Word reduce(const Word& w);
Word inverse(const Word& w);
bool is_reduced(const Word& w);
bool is_cyclically_reduced(const Word& w);
// Letter order used for canonical forms: a < a^{-1} < b < b^{-1} < ...
int letter_key(int s);
bool word_less(const Word& a, const Word& b);
Word canonical_rotation(const Word& w);
// (root, multiplicity) with w = root^multiplicity and root primitive.
std::pair<Word, int> primitive_root(const Word& w);
std::string word_to_string(const Word& w);

GroupElement evaluate(const SchottkyGroup& g, const Word& w);

struct ConjugacyClass {
  Word cyclic_word;
  Word primitive_root;
  int multiplicity = 1;
  std::optional<ElementClassData> class_data;
};

// Every class of cyclic length <= max_len once, ordered by (length, lex).
std::vector<ConjugacyClass> enumerate_conjugacy_classes(const SchottkyGroup& g, int max_len);

// Classifies the representative and caches the result in c.
ElementClassData class_geometry(const SchottkyGroup& g, ConjugacyClass& c);

// Depth-first walk over all reduced words of length <= max_len, identity
// included. The visitor returns false to skip the subtree below a word.
using WordVisitor = std::function<bool(const Word&, const GroupElement&)>;
void walk_words(const SchottkyGroup& g, int max_len, const WordVisitor& visit);

std::vector<std::pair<Word, double>> orbit_points(const SchottkyGroup& g, int max_len);
// Radii only, sorted ascending.
std::vector<double> orbit_radii(const SchottkyGroup& g, int max_len);

}  // namespace kleinian
