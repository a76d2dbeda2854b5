#include "kleinian/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace kleinian {

GroupElement SchottkyGroup::letter(int s) const {
  const auto& g = generators.at(static_cast<std::size_t>(std::abs(s) - 1));
  return s > 0 ? g : g.inverse();
}

SchottkyGroup embed_group(const SchottkyGroup& g, int m) {
  SchottkyGroup e;
  e.n = m;
  for (const auto& x : g.generators) e.generators.push_back(embed(x, m));
  for (const auto& d : g.disks) {
    Disk c = d;
    Vec x = Vec::Zero(m);
    x.head(d.center.n()) = d.center.coords;
    c.center = BoundaryPoint(x);
    e.disks.push_back(c);
  }
  return e;
}

namespace {

// Points on the boundary sphere of the cap (c, r).
std::vector<Vec> cap_boundary(const Disk& d, int count) {
  const int n = d.center.n();
  const Mat k = rotation_to(d.center).matrix().bottomRightCorner(n, n);
  std::vector<Vec> pts;
  if (n == 2) {
    for (int s : {-1, 1}) pts.push_back(std::cos(d.radius) * d.center.coords + s * std::sin(d.radius) * k.col(1));
    return pts;
  }
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < count; ++i) {
    Vec u(n - 1);
    if (n == 3) {
      const double phi = 2.0 * kPi * i / count;
      u << std::cos(phi), std::sin(phi);
    } else {
      for (int j = 0; j < n - 1; ++j) u(j) = gauss(rng);
      u.normalize();
    }
    Vec x = std::cos(d.radius) * d.center.coords;
    for (int j = 0; j < n - 1; ++j) x += std::sin(d.radius) * u(j) * k.col(j + 1);
    pts.push_back(x);
  }
  return pts;
}

// Samples of the complement of the cap: the whole exterior arc on S^1,
// the boundary sphere plus the antipode otherwise.
std::vector<Vec> exterior_samples(const Disk& d, int count) {
  const int n = d.center.n();
  if (n == 2) {
    std::vector<Vec> pts;
    const double c = std::atan2(d.center.coords(1), d.center.coords(0));
    for (int i = 0; i < count; ++i) {
      const double a = c + d.radius + (2.0 * kPi - 2.0 * d.radius) * i / (count - 1);
      Vec x(2);
      x << std::cos(a), std::sin(a);
      pts.push_back(x);
    }
    return pts;
  }
  auto pts = cap_boundary(d, count);
  pts.push_back(-d.center.coords);
  return pts;
}

// sup of the conformal factor of h over the cap (c, r), in closed form:
// the factor is 1 / (h00 + w.x) with w the spatial part of the first row.
double sup_factor_on_cap(const GroupElement& h, const Disk& d) {
  const int n = h.n();
  const Vec w = h.matrix().row(0).tail(n).transpose();
  const double W = w.norm();
  if (W == 0.0) return 1.0 / h(0, 0);
  const double beta = sphere_distance(-w / W, d.center.coords);
  const double lmin = beta <= d.radius ? h(0, 0) - W : h(0, 0) - W * std::cos(beta - d.radius);
  return 1.0 / lmin;
}

}  // namespace

ValidationReport validate(const SchottkyGroup& g, int samples) {
  const int r = g.rank();
  if (r < 1) throw precondition_error("validate: group has no generators");
  if (static_cast<int>(g.disks.size()) != 2 * r)
    throw precondition_error("validate: expected " + std::to_string(2 * r) + " disks");
  for (const auto& x : g.generators)
    if (x.n() != g.n) throw precondition_error("validate: generator dimension mismatch");
  for (int i = 0; i < 2 * r; ++i) {
    const auto& d = g.disks[static_cast<std::size_t>(i)];
    if (d.center.n() != g.n) throw precondition_error("validate: disk center dimension mismatch");
    if (d.pairs_with != (i ^ 1))
      throw precondition_error("validate: disk " + std::to_string(i) + " must pair with disk " +
                               std::to_string(i ^ 1));
    if (!(d.radius > 0.0 && d.radius < kPi / 2))
      throw precondition_error("validate: disk radius out of range");
  }

  ValidationReport rep;
  rep.samples_per_disk = samples;
  rep.min_separation = 2.0 * kPi;
  for (int i = 0; i < 2 * r; ++i)
    for (int j = i + 1; j < 2 * r; ++j) {
      const auto& a = g.disks[static_cast<std::size_t>(i)];
      const auto& b = g.disks[static_cast<std::size_t>(j)];
      const double gap = sphere_distance(a.center.coords, b.center.coords) - a.radius - b.radius;
      if (gap <= 1e-12)
        throw precondition_error("validate: disks " + std::to_string(i) + " and " +
                                 std::to_string(j) + " overlap");
      rep.min_separation = std::min(rep.min_separation, gap);
    }

  for (int i = 1; i <= r; ++i)
    for (int s : {i, -i}) {
      const GroupElement h = g.letter(s);
      const Disk& src = g.disk(-s);
      const Disk& dst = g.disk(s);
      for (const Vec& x : exterior_samples(src, samples)) {
        const Vec y = act(h, BoundaryPoint(x)).coords;
        if (sphere_distance(y, dst.center.coords) > dst.radius + 1e-9)
          throw precondition_error("validate: generator " + std::to_string(i) +
                                   (s < 0 ? " (inverse)" : "") + " fails the mapping condition");
      }
    }

  for (int s = -r; s <= r; ++s) {
    if (s == 0) continue;
    const GroupElement h = g.letter(s);
    for (int t = -r; t <= r; ++t) {
      if (t == 0 || t == -s) continue;
      rep.q = std::max(rep.q, sup_factor_on_cap(h, g.disk(t)));
    }
  }
  return rep;
}

Word reduce(const Word& w) {
  Word out;
  for (int s : w) {
    if (s == 0) throw precondition_error("word contains letter 0");
    if (!out.empty() && out.back() == -s)
      out.pop_back();
    else
      out.push_back(s);
  }
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& s : out) s = -s;
  return out;
}

bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == -w[i - 1]) return false;
  return true;
}

bool is_cyclically_reduced(const Word& w) {
  return is_reduced(w) && (w.size() < 2 || w.front() != -w.back());
}

int letter_key(int s) { return 2 * (std::abs(s) - 1) + (s < 0 ? 1 : 0); }

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return letter_key(a[i]) < letter_key(b[i]);
  return false;
}

Word canonical_rotation(const Word& w) {
  Word best = w;
  Word r = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::rotate(r.begin(), r.begin() + 1, r.end());
    if (word_less(r, best)) best = r;
  }
  return best;
}

std::pair<Word, int> primitive_root(const Word& w) {
  const std::size_t m = w.size();
  for (std::size_t d = 1; d <= m; ++d) {
    if (m % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < m && periodic; ++i) periodic = w[i] == w[i - d];
    if (periodic) return {Word(w.begin(), w.begin() + static_cast<long>(d)), static_cast<int>(m / d)};
  }
  return {w, 1};
}

std::string word_to_string(const Word& w) {
  if (w.empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const int s = w[i];
    const int idx = std::abs(s) - 1;
    if (idx < 26)
      os << static_cast<char>('a' + idx);
    else
      os << 'g' << idx;
    if (s < 0) os << "^-1";
    if (i + 1 < w.size()) os << ' ';
  }
  return os.str();
}

GroupElement evaluate(const SchottkyGroup& g, const Word& w) {
  Mat m = Mat::Identity(g.n + 1, g.n + 1);
  int count = 0;
  for (int s : w) {
    m = m * g.letter(s).matrix();
    if (++count % kReprojectEvery == 0) m = reproject(m);
  }
  return GroupElement(std::move(m), false);
}

std::vector<ConjugacyClass> enumerate_conjugacy_classes(const SchottkyGroup& g, int max_len) {
  if (max_len < 1) throw precondition_error("enumerate: max_len must be >= 1");
  const int r = g.rank();
  std::vector<int> letters;  // in key order
  for (int i = 1; i <= r; ++i) {
    letters.push_back(i);
    letters.push_back(-i);
  }
  std::vector<ConjugacyClass> out;
  for (int m = 1; m <= max_len; ++m) {
    Word w;
    std::function<void()> rec = [&] {
      if (static_cast<int>(w.size()) == m) {
        if (!is_cyclically_reduced(w)) return;
        if (canonical_rotation(w) != w) return;
        ConjugacyClass c;
        c.cyclic_word = w;
        auto [root, mult] = primitive_root(w);
        c.primitive_root = root;
        c.multiplicity = mult;
        out.push_back(std::move(c));
        return;
      }
      for (int s : letters) {
        if (!w.empty() && s == -w.back()) continue;
        // a canonical necklace never starts above its later letters
        if (!w.empty() && letter_key(s) < letter_key(w.front())) continue;
        w.push_back(s);
        rec();
        w.pop_back();
      }
    };
    rec();
  }
  return out;
}

ElementClassData class_geometry(const SchottkyGroup& g, ConjugacyClass& c) {
  if (c.class_data) return *c.class_data;
  const ElementClassData d = classify(evaluate(g, c.cyclic_word));
  if (d.kind != ElementKind::hyperbolic)
    throw precondition_error("class " + word_to_string(c.cyclic_word) +
                             " is not hyperbolic; group data invalid");
  c.class_data = d;
  return d;
}

void walk_words(const SchottkyGroup& g, int max_len, const WordVisitor& visit) {
  const int r = g.rank();
  std::vector<GroupElement> gen;
  std::vector<int> letters;
  for (int i = 1; i <= r; ++i)
    for (int s : {i, -i}) {
      letters.push_back(s);
      gen.push_back(g.letter(s));
    }
  Word w;
  std::function<void(const GroupElement&)> rec = [&](const GroupElement& x) {
    if (!visit(w, x)) return;
    if (static_cast<int>(w.size()) == max_len) return;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const int s = letters[i];
      if (!w.empty() && s == -w.back()) continue;
      Mat m = x.matrix() * gen[i].matrix();
      w.push_back(s);
      if (w.size() % kReprojectEvery == 0) m = reproject(m);
      rec(GroupElement(std::move(m), false));
      w.pop_back();
    }
  };
  rec(GroupElement::identity(g.n));
}

std::vector<std::pair<Word, double>> orbit_points(const SchottkyGroup& g, int max_len) {
  std::vector<std::pair<Word, double>> out;
  walk_words(g, max_len, [&](const Word& w, const GroupElement& x) {
    out.emplace_back(w, cartan_radial(x));
    return true;
  });
  return out;
}

std::vector<double> orbit_radii(const SchottkyGroup& g, int max_len) {
  std::vector<double> out;
  walk_words(g, max_len, [&](const Word&, const GroupElement& x) {
    out.push_back(cartan_radial(x));
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kleinian
