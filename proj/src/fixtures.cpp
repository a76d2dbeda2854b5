#include "kleinian/fixtures.hpp"

#include <cmath>

namespace kleinian {

Disk image_disk(const GroupElement& g, const Disk& d) {
  // cap = { x : <(1,x), N> >= 0 } with the spacelike normal N = (cos r, c)
  const int n = g.n();
  Vec N(n + 1);
  N(0) = std::cos(d.radius);
  N.tail(n) = d.center.coords;
  const Vec M = g.matrix() * N;
  const double s = M.tail(n).norm();
  Disk out;
  out.center = BoundaryPoint(M.tail(n) / s);
  out.radius = std::acos(std::max(-1.0, std::min(1.0, M(0) / s)));
  out.pairs_with = d.pairs_with;
  return out;
}

SchottkyGroup cyclic_group(int n, double t) {
  SchottkyGroup g;
  g.n = n;
  g.generators.push_back(boost(n, t));
  const double r = 2.0 * std::atan(std::exp(-0.5 * t));
  Vec e = Vec::Zero(n);
  e(0) = 1.0;
  g.disks.push_back({BoundaryPoint(e), r, 1});
  g.disks.push_back({BoundaryPoint(-e), r, 0});
  return g;
}

SchottkyGroup pants_group(double t, double s) {
  SchottkyGroup g;
  g.n = 2;
  const GroupElement shift = boost(2, s, 1);
  const GroupElement a = shift * boost(2, t, 2) * shift.inverse();
  const GroupElement half = rotation(2, 1, 2, kPi);
  const GroupElement b = half * a * half.inverse();
  g.generators = {a, b};
  const double r = 2.0 * std::atan(std::exp(-0.5 * t));
  Vec e2(2);
  e2 << 0.0, 1.0;
  const Disk up{BoundaryPoint(e2), r, 1}, down{BoundaryPoint(-e2), r, 0};
  const Disk da = image_disk(shift, up), dai = image_disk(shift, down);
  Disk db = image_disk(half, da), dbi = image_disk(half, dai);
  db.pairs_with = 3;
  dbi.pairs_with = 2;
  g.disks = {da, dai, db, dbi};
  return g;
}

}  // namespace kleinian
