#include "doctest.h"
#include "test_util.hpp"

#include <map>
#include <set>

#include "kleinian/fixtures.hpp"
#include "kleinian/schottky.hpp"

using namespace kleinian;

namespace {

// Brute force: every reduced word, cyclically reduced, all rotations, keep the
// minimum under a plain integer encoding.
std::set<std::vector<int>> brute_force_necklaces(int rank, int max_len) {
  std::set<std::vector<int>> out;
  std::vector<int> letters;
  for (int i = 1; i <= rank; ++i) {
    letters.push_back(i);
    letters.push_back(-i);
  }
  std::vector<std::vector<int>> frontier = {{}};
  for (int m = 1; m <= max_len; ++m) {
    std::vector<std::vector<int>> next;
    for (const auto& w : frontier)
      for (int s : letters) {
        if (!w.empty() && w.back() == -s) continue;
        auto x = w;
        x.push_back(s);
        next.push_back(x);
      }
    for (auto w : next) {
      while (w.size() >= 2 && w.front() == -w.back()) w = std::vector<int>(w.begin() + 1, w.end() - 1);
      if (w.empty()) continue;
      std::vector<int> best;
      for (std::size_t r = 0; r < w.size(); ++r) {
        std::vector<int> rot(w.begin() + static_cast<long>(r), w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(r));
        std::vector<int> enc;
        for (int s : rot) enc.push_back(s > 0 ? 2 * s : 2 * (-s) + 1);
        if (best.empty() || enc < best) best = enc;
      }
      out.insert(best);
    }
    frontier = std::move(next);
  }
  return out;
}

// Translation length from a point on the axis: acosh(-<p, g p>).
double axis_length(const GroupElement& g) {
  Eigen::EigenSolver<Mat> es(g.matrix());
  int imax = 0, imin = 0;
  const auto ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > std::abs(ev(imax))) imax = i;
    if (std::abs(ev(i)) < std::abs(ev(imin))) imin = i;
  }
  Vec vp = es.eigenvectors().col(imax).real(), vm = es.eigenvectors().col(imin).real();
  vp /= vp(0);
  vm /= vm(0);
  Vec p = vp + vm;
  p /= std::sqrt(-minkowski_dot(p, p));
  const Vec gp = g.matrix() * p;
  return std::acosh(-minkowski_dot(p, gp));
}

}  // namespace

TEST_SUITE("schottky") {

TEST_CASE("validate fixtures") {
  const ValidationReport a = validate(pants_group(5.0, 1.0));
  CHECK(a.q > 0.0);
  CHECK(a.q < 1.0);
  CHECK(a.min_separation > 0.0);
  CHECK(validate(cyclic_group(2, 1.5)).q < 1.0);
  CHECK(validate(cyclic_group(3, 1.5)).q < 1.0);
  CHECK(validate(embed_group(pants_group(5.0, 1.0), 3)).q < 1.0);
}

TEST_CASE("validate rejects bad data") {
  SchottkyGroup g = pants_group(5.0, 1.0);
  SchottkyGroup big = g;
  for (auto& d : big.disks) d.radius = 0.8;
  CHECK_THROWS_AS(validate(big), Error);

  // swapping the disks of a generator breaks the mapping condition
  SchottkyGroup swapped = g;
  std::swap(swapped.disks[0].center, swapped.disks[1].center);
  CHECK_THROWS_AS(validate(swapped), Error);

  // disks that are too small to receive the exterior
  SchottkyGroup small = g;
  for (auto& d : small.disks) d.radius *= 0.5;
  CHECK_THROWS_AS(validate(small), Error);
}

TEST_CASE("word utilities") {
  CHECK(reduce({1, 2, -2, -1, 1}) == Word{1});
  CHECK(inverse({1, -2}) == Word{2, -1});
  CHECK(is_cyclically_reduced({1, 2}));
  CHECK_FALSE(is_cyclically_reduced({1, 2, -1}));
  CHECK(canonical_rotation({2, 1, 1}) == Word{1, 1, 2});
  const auto [root, mult] = primitive_root({1, 2, 1, 2, 1, 2});
  CHECK(root == Word{1, 2});
  CHECK(mult == 3);
}

TEST_CASE("conjugacy class enumeration") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  const auto one = enumerate_conjugacy_classes(g, 1);
  REQUIRE(one.size() == 4);
  CHECK(one[0].cyclic_word == Word{1});
  CHECK(one[1].cyclic_word == Word{-1});
  CHECK(one[2].cyclic_word == Word{2});
  CHECK(one[3].cyclic_word == Word{-2});

  for (int L = 1; L <= 6; ++L) {
    const auto classes = enumerate_conjugacy_classes(g, L);
    CHECK(classes.size() == brute_force_necklaces(2, L).size());
  }

  const auto classes = enumerate_conjugacy_classes(g, 6);
  bool found_a2 = false;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    CHECK(c.multiplicity * c.primitive_root.size() == c.cyclic_word.size());
    if (c.cyclic_word == Word{1, 1}) {
      found_a2 = true;
      CHECK(c.multiplicity == 2);
      CHECK(c.primitive_root == Word{1});
    }
    if (i > 0) CHECK(word_less(classes[i - 1].cyclic_word, c.cyclic_word));
  }
  CHECK(found_a2);
  // idempotent and order-stable
  const auto again = enumerate_conjugacy_classes(g, 6);
  REQUIRE(again.size() == classes.size());
  for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].cyclic_word == classes[i].cyclic_word);
}

TEST_CASE("class geometry") {
  const double t = 1.5;
  const SchottkyGroup cyc = cyclic_group(2, t);
  for (auto c : enumerate_conjugacy_classes(cyc, 5)) {
    const auto d = class_geometry(cyc, c);
    CHECK(d.length == doctest::Approx(t * c.cyclic_word.size()).epsilon(1e-12));
  }

  const SchottkyGroup g = pants_group(5.0, 1.0);
  const SchottkyGroup up = embed_group(g, 3);
  auto classes = enumerate_conjugacy_classes(g, 5);
  auto classes_up = enumerate_conjugacy_classes(up, 5);
  REQUIRE(classes.size() == classes_up.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    auto& c = classes[i];
    const auto d = class_geometry(g, c);
    CHECK(d.kind == ElementKind::hyperbolic);
    ConjugacyClass inv;
    inv.cyclic_word = inverse(c.cyclic_word);
    CHECK(std::abs(class_geometry(g, inv).length - d.length) < 1e-9);
    if (c.cyclic_word.size() <= 3)
      CHECK(std::abs(axis_length(evaluate(g, c.cyclic_word)) - d.length) < 1e-8);
    CHECK(std::abs(class_geometry(up, classes_up[i]).length - d.length) < 1e-9);
    // cyclic rotations give the same geometry
    Word rot = c.cyclic_word;
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    CHECK(std::abs(classify(evaluate(g, rot)).length - d.length) < 1e-9);
  }
}

TEST_CASE("orbit points") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  const int L = 5;
  const auto pts = orbit_points(g, L);
  std::size_t expected = 1;
  for (int m = 1; m <= L; ++m) expected += 4 * static_cast<std::size_t>(std::pow(3, m - 1));
  CHECK(pts.size() == expected);
  std::map<Word, double> by_word(pts.begin(), pts.end());
  for (const auto& [w, d] : pts) {
    CHECK(d >= 0.0);
    CHECK(std::abs(by_word.at(inverse(w)) - d) < 1e-9);
  }

  const double t = 1.5;
  const auto cyc = orbit_points(cyclic_group(2, t), 7);
  CHECK(cyc.size() == 15);
  for (const auto& [w, d] : cyc) CHECK(std::abs(d - t * w.size()) < 1e-12);
}

}
