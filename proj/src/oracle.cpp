#include "polyvar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "polyvar/error.hpp"

namespace polyvar {
namespace {

constexpr double kDedupTol = 1e-10;
constexpr double kSpanTol = 1e-9;
constexpr double kMemberTol = 1e-9;

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

std::vector<std::vector<double>> dedup(const std::vector<std::vector<double>>& points) {
  std::vector<std::vector<double>> out;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : out)
      if (sq_dist(p, q) <= kDedupTol * kDedupTol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  return out;
}

double coordinate_scale(const std::vector<std::vector<double>>& points) {
  double s = 1.0;
  for (const auto& p : points)
    for (double x : p) s = std::max(s, std::abs(x));
  return s;
}

HullModel hull_1d(const std::vector<std::vector<double>>& pts) {
  double lo = pts[0][0], hi = pts[0][0];
  for (const auto& p : pts) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  if (hi - lo < kSpanTol)
    throw Error(errc::degenerate_input, "points do not span a 1-D hull");

  HullModel hull;
  hull.dim = 1;
  hull.vertices = {{lo}, {hi}};
  hull.facets.push_back({{0}, {-1.0}, -lo});
  hull.facets.push_back({{1}, {1.0}, hi});
  hull.simplices.push_back({0, 1, 0, 0});
  hull.simplex_volumes.push_back(hi - lo);
  hull.volume = hi - lo;
  return hull;
}

// Signed doubled area of (a, b, c); positive when c lies left of a->b.
long double cross2(std::span<const double> a, std::span<const double> b,
                   std::span<const double> c) {
  const long double abx = static_cast<long double>(b[0]) - a[0];
  const long double aby = static_cast<long double>(b[1]) - a[1];
  const long double acx = static_cast<long double>(c[0]) - a[0];
  const long double acy = static_cast<long double>(c[1]) - a[1];
  return abx * acy - aby * acx;
}

HullModel hull_2d(const std::vector<std::vector<double>>& pts) {
  const int m = static_cast<int>(pts.size());
  const double scale = coordinate_scale(pts);
  const long double eps = 1e-12L * scale * scale;

  int start = 0;
  for (int i = 1; i < m; ++i)
    if (pts[i][0] < pts[start][0] ||
        (pts[i][0] == pts[start][0] && pts[i][1] < pts[start][1]))
      start = i;

  // Jarvis march, counterclockwise; collinear ties resolve to the
  // farthest point so interior collinear points are skipped.
  std::vector<int> ring;
  int current = start;
  do {
    ring.push_back(current);
    int next = (current + 1) % m;
    for (int r = 0; r < m; ++r) {
      if (r == current || r == next) continue;
      const long double c = cross2(pts[current], pts[next], pts[r]);
      if (c < -eps ||
          (c <= eps && sq_dist(pts[current], pts[r]) > sq_dist(pts[current], pts[next])))
        next = r;
    }
    current = next;
    if (static_cast<int>(ring.size()) > m)
      throw Error(errc::degenerate_input, "hull walk failed to close");
  } while (current != start);

  if (ring.size() < 3)
    throw Error(errc::degenerate_input, "points do not span a 2-D hull");

  HullModel hull;
  hull.dim = 2;
  for (int id : ring) hull.vertices.push_back(pts[id]);
  const int k = static_cast<int>(ring.size());

  for (int i = 0; i < k; ++i) {
    const auto& a = hull.vertices[i];
    const auto& b = hull.vertices[(i + 1) % k];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    // For a counterclockwise ring the outward normal is the edge
    // rotated clockwise by 90 degrees.
    HullFacet f;
    f.vertex_ids = {i, (i + 1) % k};
    f.normal = {ey / len, -ex / len};
    f.offset = f.normal[0] * a[0] + f.normal[1] * a[1];
    hull.facets.push_back(std::move(f));
  }

  hull.volume = 0.0;
  for (int i = 1; i + 1 < k; ++i) {
    const double area =
        0.5 * std::abs(static_cast<double>(cross2(hull.vertices[0], hull.vertices[i],
                                                  hull.vertices[i + 1])));
    hull.simplices.push_back({0, i, i + 1, 0});
    hull.simplex_volumes.push_back(area);
    hull.volume += area;
  }
  return hull;
}

struct Tri {
  int a, b, c;
  double nx, ny, nz, off, nlen;
  bool alive = true;
};

Tri make_tri(const std::vector<std::vector<double>>& pts, int a, int b, int c,
             std::span<const double> interior) {
  Tri t{a, b, c, 0, 0, 0, 0, 0, true};
  const auto &pa = pts[a], &pb = pts[b], &pc = pts[c];
  const double ux = pb[0] - pa[0], uy = pb[1] - pa[1], uz = pb[2] - pa[2];
  const double vx = pc[0] - pa[0], vy = pc[1] - pa[1], vz = pc[2] - pa[2];
  t.nx = uy * vz - uz * vy;
  t.ny = uz * vx - ux * vz;
  t.nz = ux * vy - uy * vx;
  const double side = t.nx * (interior[0] - pa[0]) + t.ny * (interior[1] - pa[1]) +
                      t.nz * (interior[2] - pa[2]);
  if (side > 0.0) {
    std::swap(t.b, t.c);
    t.nx = -t.nx;
    t.ny = -t.ny;
    t.nz = -t.nz;
  }
  t.off = t.nx * pa[0] + t.ny * pa[1] + t.nz * pa[2];
  t.nlen = std::sqrt(t.nx * t.nx + t.ny * t.ny + t.nz * t.nz);
  return t;
}

double tri_dist(const Tri& t, std::span<const double> p) {
  return t.nx * p[0] + t.ny * p[1] + t.nz * p[2] - t.off;
}

double det3(std::span<const double> u, std::span<const double> v, std::span<const double> w) {
  return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
         u[2] * (v[0] * w[1] - v[1] * w[0]);
}

HullModel hull_3d(const std::vector<std::vector<double>>& pts) {
  const int m = static_cast<int>(pts.size());
  const double scale = coordinate_scale(pts);
  const double eps_len = 1e-12 * scale;

  // Seed tetrahedron from extreme points; every max below must clear
  // the span tolerance or the cloud is flat in some direction.
  int i0 = 0;
  for (int i = 1; i < m; ++i)
    if (pts[i] < pts[i0]) i0 = i;

  int i1 = -1;
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    const double d = sq_dist(pts[i], pts[i0]);
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  if (i1 < 0 || std::sqrt(best) < kSpanTol)
    throw Error(errc::degenerate_input, "points do not span a 3-D hull");

  std::vector<double> axis(3);
  for (int k = 0; k < 3; ++k) axis[k] = pts[i1][k] - pts[i0][k];
  const double axis_len = norm2(axis);

  int i2 = -1;
  best = 0.0;
  for (int i = 0; i < m; ++i) {
    std::vector<double> r(3);
    for (int k = 0; k < 3; ++k) r[k] = pts[i][k] - pts[i0][k];
    const double cx = axis[1] * r[2] - axis[2] * r[1];
    const double cy = axis[2] * r[0] - axis[0] * r[2];
    const double cz = axis[0] * r[1] - axis[1] * r[0];
    const double d = std::sqrt(cx * cx + cy * cy + cz * cz) / axis_len;
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0 || best < kSpanTol)
    throw Error(errc::degenerate_input, "points do not span a 3-D hull");

  std::vector<double> u(3), v(3), nrm(3);
  for (int k = 0; k < 3; ++k) {
    u[k] = pts[i1][k] - pts[i0][k];
    v[k] = pts[i2][k] - pts[i0][k];
  }
  nrm[0] = u[1] * v[2] - u[2] * v[1];
  nrm[1] = u[2] * v[0] - u[0] * v[2];
  nrm[2] = u[0] * v[1] - u[1] * v[0];
  const double nrm_len = norm2(nrm);

  int i3 = -1;
  best = 0.0;
  for (int i = 0; i < m; ++i) {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d += nrm[k] * (pts[i][k] - pts[i0][k]);
    d = std::abs(d) / nrm_len;
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0 || best < kSpanTol)
    throw Error(errc::degenerate_input, "points do not span a 3-D hull");

  std::vector<double> interior(3, 0.0);
  for (int k = 0; k < 3; ++k)
    interior[k] = (pts[i0][k] + pts[i1][k] + pts[i2][k] + pts[i3][k]) / 4.0;

  std::vector<Tri> faces;
  faces.push_back(make_tri(pts, i0, i1, i2, interior));
  faces.push_back(make_tri(pts, i0, i1, i3, interior));
  faces.push_back(make_tri(pts, i0, i2, i3, interior));
  faces.push_back(make_tri(pts, i1, i2, i3, interior));

  for (int q = 0; q < m; ++q) {
    if (q == i0 || q == i1 || q == i2 || q == i3) continue;

    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && tri_dist(faces[f], pts[q]) > eps_len * faces[f].nlen)
        visible.push_back(f);
    if (visible.empty()) continue;

    // Horizon edges are those that belong to exactly one visible face.
    std::map<std::pair<int, int>, int> edge_count;
    for (int f : visible) {
      const int e[3][2] = {{faces[f].a, faces[f].b}, {faces[f].b, faces[f].c}, {faces[f].c, faces[f].a}};
      for (const auto& ed : e)
        edge_count[{std::min(ed[0], ed[1]), std::max(ed[0], ed[1])}] += 1;
    }
    for (int f : visible) faces[f].alive = false;
    for (const auto& [edge, count] : edge_count)
      if (count == 1) faces.push_back(make_tri(pts, edge.first, edge.second, q, interior));
  }

  // Compact the vertex set to the points still referenced by faces.
  std::vector<int> remap(m, -1);
  HullModel hull;
  hull.dim = 3;
  for (const Tri& t : faces) {
    if (!t.alive) continue;
    for (int id : {t.a, t.b, t.c})
      if (remap[id] < 0) {
        remap[id] = static_cast<int>(hull.vertices.size());
        hull.vertices.push_back(pts[id]);
      }
  }

  for (const Tri& t : faces) {
    if (!t.alive) continue;
    HullFacet f;
    f.vertex_ids = {remap[t.a], remap[t.b], remap[t.c]};
    f.normal = {t.nx / t.nlen, t.ny / t.nlen, t.nz / t.nlen};
    f.offset = t.off / t.nlen;
    hull.facets.push_back(std::move(f));
  }

  // Cone fan from vertex 0 over the facets that do not touch it.
  hull.volume = 0.0;
  const auto& apex = hull.vertices[0];
  for (const HullFacet& f : hull.facets) {
    const auto& ids = f.vertex_ids;
    if (ids[0] == 0 || ids[1] == 0 || ids[2] == 0) continue;
    std::vector<double> e1(3), e2(3), e3(3);
    for (int k = 0; k < 3; ++k) {
      e1[k] = hull.vertices[ids[0]][k] - apex[k];
      e2[k] = hull.vertices[ids[1]][k] - apex[k];
      e3[k] = hull.vertices[ids[2]][k] - apex[k];
    }
    const double vol = std::abs(det3(e1, e2, e3)) / 6.0;
    if (vol == 0.0) continue;
    hull.simplices.push_back({0, ids[0], ids[1], ids[2]});
    hull.simplex_volumes.push_back(vol);
    hull.volume += vol;
  }
  return hull;
}

constexpr double kFactorial[8] = {1, 1, 2, 6, 24, 120, 720, 5040};

}  // namespace

std::vector<std::vector<double>> projected_vertices(ProjectedBody body,
                                                    const UnitDirection& theta,
                                                    const HyperplaneFrame& frame) {
  const int n = theta.n;
  std::vector<std::vector<double>> images;

  if (body == ProjectedBody::cube) {
    if (n > 4)
      throw Error(errc::dimension_too_large, "cube vertex enumeration capped at n = 4");
    std::vector<double> corner(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (int i = 0; i < n; ++i) corner[i] = (mask >> i & 1) ? 1.0 : -1.0;
      images.push_back(project_to_frame(corner, frame));
    }
  } else {
    if (n > 6)
      throw Error(errc::dimension_too_large, "cross vertex enumeration capped at n = 6");
    std::vector<double> tip(n, 0.0);
    for (int i = 0; i < n; ++i) {
      tip[i] = 1.0;
      images.push_back(project_to_frame(tip, frame));
      tip[i] = -1.0;
      images.push_back(project_to_frame(tip, frame));
      tip[i] = 0.0;
    }
  }
  return images;
}

HullModel convex_hull(const std::vector<std::vector<double>>& points, int dim) {
  if (dim < 1) throw Error(errc::dimension_too_small, "hull dimension must be >= 1");
  if (dim > 3) throw Error(errc::dimension_too_large, "hulls supported up to dimension 3");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != dim)
      throw Error(errc::dimension_mismatch, "point dimension does not match hull dimension");

  const auto pts = dedup(points);
  if (static_cast<int>(pts.size()) < dim + 1)
    throw Error(errc::degenerate_input, "too few distinct points for this dimension");

  switch (dim) {
    case 1:
      return hull_1d(pts);
    case 2:
      return hull_2d(pts);
    default:
      return hull_3d(pts);
  }
}

double exact_monomial_moment(const HullModel& hull, const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != hull.dim)
    throw Error(errc::dimension_mismatch, "exponent count does not match hull dimension");
  for (int a : alpha)
    if (a < 0) throw Error(errc::index_out_of_range, "negative exponent");
  const int degree = total_degree(alpha);
  if (degree > 4) throw Error(errc::unsupported_degree, "monomial degree capped at 4");

  const int d = hull.dim;
  double total = 0.0;

  for (std::size_t s = 0; s < hull.simplices.size(); ++s) {
    const double vol = hull.simplex_volumes[s];
    if (vol == 0.0) continue;
    const auto& ids = hull.simplices[s];

    // Expand x^alpha in barycentric coordinates: each ambient
    // coordinate is a linear form in lambda, so the monomial becomes a
    // homogeneous polynomial of degree |alpha| in lambda.
    std::map<std::array<int, 4>, double> terms;
    terms[{0, 0, 0, 0}] = 1.0;
    for (int c = 0; c < d; ++c) {
      for (int rep = 0; rep < alpha[c]; ++rep) {
        std::map<std::array<int, 4>, double> next;
        for (const auto& [expo, coef] : terms) {
          for (int i = 0; i <= d; ++i) {
            const double vc = hull.vertices[ids[i]][c];
            if (vc == 0.0) continue;
            std::array<int, 4> e = expo;
            e[i] += 1;
            next[e] += coef * vc;
          }
        }
        terms = std::move(next);
      }
    }

    // int_S lambda^a dx = vol * d! * prod a_i! / (d + |a|)! and every
    // term has total degree |alpha|.
    double acc = 0.0;
    for (const auto& [expo, coef] : terms) {
      double f = 1.0;
      for (int i = 0; i <= d; ++i) f *= kFactorial[expo[i]];
      acc += coef * f;
    }
    total += vol * kFactorial[d] / kFactorial[d + degree] * acc;
  }
  return total;
}

OracleMoments::OracleMoments(ProjectedBody body, const UnitDirection& theta,
                             const HyperplaneFrame& frame) {
  if (theta.n - 1 > 3)
    throw Error(errc::dimension_too_large, "moment oracle supports hull dimensions up to 3");
  hull_ = convex_hull(projected_vertices(body, theta, frame), theta.n - 1);

  const int d = hull_.dim;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c) {
        if ((d < 2 && b > 0) || (d < 3 && c > 0)) continue;
        MultiIndex alpha(d, 0);
        alpha[0] = a;
        if (d > 1) alpha[1] = b;
        if (d > 2) alpha[2] = c;
        table_[(a * 5 + b) * 5 + c] = exact_monomial_moment(hull_, alpha) / hull_.volume;
      }

  second_ = SymmetricMatrix(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      MultiIndex alpha(d, 0);
      alpha[i] += 1;
      alpha[j] += 1;
      second_.at(i, j) = normalized(alpha);
    }

  e_x2_ = 0.0;
  e_x4_ = 0.0;
  for (int i = 0; i < d; ++i) {
    MultiIndex alpha(d, 0);
    alpha[i] = 2;
    e_x2_ += normalized(alpha);
    alpha[i] = 4;
    e_x4_ += normalized(alpha);
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      MultiIndex mixed(d, 0);
      mixed[i] = 2;
      mixed[j] = 2;
      e_x4_ += normalized(mixed);
    }
  }
  var_x2_ = e_x4_ - e_x2_ * e_x2_;
}

double OracleMoments::normalized(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != hull_.dim)
    throw Error(errc::dimension_mismatch, "exponent count does not match hull dimension");
  if (total_degree(alpha) > 4)
    throw Error(errc::unsupported_degree, "monomial degree capped at 4");
  const int a = alpha[0];
  const int b = hull_.dim > 1 ? alpha[1] : 0;
  const int c = hull_.dim > 2 ? alpha[2] : 0;
  return table_[(a * 5 + b) * 5 + c];
}

double OracleMoments::directional_second(std::span<const double> eta) const {
  const int d = hull_.dim;
  if (static_cast<int>(eta.size()) != d)
    throw Error(errc::dimension_mismatch, "direction does not match hull dimension");
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) acc += eta[i] * eta[j] * second_.at(i, j);
  return acc;
}

double OracleMoments::directional_mixed_fourth(std::span<const double> eta1,
                                               std::span<const double> eta2) const {
  const int d = hull_.dim;
  if (static_cast<int>(eta1.size()) != d || static_cast<int>(eta2.size()) != d)
    throw Error(errc::dimension_mismatch, "direction does not match hull dimension");
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          MultiIndex alpha(d, 0);
          alpha[i] += 1;
          alpha[j] += 1;
          alpha[k] += 1;
          alpha[l] += 1;
          acc += eta1[i] * eta1[j] * eta2[k] * eta2[l] * normalized(alpha);
        }
  return acc;
}

bool hull_contains(const HullModel& hull, std::span<const double> point) {
  if (static_cast<int>(point.size()) != hull.dim)
    throw Error(errc::dimension_mismatch, "point dimension does not match hull");
  for (const HullFacet& f : hull.facets) {
    double acc = 0.0;
    for (int k = 0; k < hull.dim; ++k) acc += f.normal[k] * point[k];
    if (acc > f.offset + kMemberTol) return false;
  }
  return true;
}

std::vector<double> oracle_uniform_sample(const HullModel& hull, RngStream& rng) {
  if (hull.simplices.empty() || hull.volume <= 0.0)
    throw Error(errc::degenerate_input, "hull has no positive-volume triangulation");

  const double target = rng.uniform01() * hull.volume;
  std::size_t pick = hull.simplices.size() - 1;
  double running = 0.0;
  for (std::size_t s = 0; s < hull.simplices.size(); ++s) {
    running += hull.simplex_volumes[s];
    if (target <= running) {
      pick = s;
      break;
    }
  }

  const int d = hull.dim;
  std::array<double, 4> lambda{};
  double sum = 0.0;
  for (int i = 0; i <= d; ++i) {
    lambda[i] = rng.exponential();
    sum += lambda[i];
  }

  std::vector<double> x(d, 0.0);
  for (int i = 0; i <= d; ++i) {
    const auto& v = hull.vertices[hull.simplices[pick][i]];
    for (int k = 0; k < d; ++k) x[k] += lambda[i] / sum * v[k];
  }
  return x;
}

}  // namespace polyvar
