#include "ivi/mesh.hpp"

#include "ivi/errors.hpp"

namespace ivi {

bool Mesh::is_boundary(int node) const {
  if (dimension == 1) return node == 0 || node == n - 1;
  const int ix = node % n;
  const int iy = node / n;
  return ix == 0 || ix == n - 1 || iy == 0 || iy == n - 1;
}

std::array<int, 4> Mesh::element_nodes(int e) const {
  if (dimension == 1) return {e, e + 1, -1, -1};
  const int ex = e % (n - 1);
  const int ey = e / (n - 1);
  return {index(ex, ey), index(ex + 1, ey), index(ex, ey + 1),
          index(ex + 1, ey + 1)};
}

std::vector<int> Mesh::interior_nodes() const {
  std::vector<int> out;
  out.reserve(node_count());
  for (int i = 0; i < node_count(); ++i)
    if (!is_boundary(i)) out.push_back(i);
  return out;
}

Mesh build_mesh(int dimension, int n) {
  if (dimension != 1 && dimension != 2)
    throw ValidationError("build_mesh: dimension must be 1 or 2");
  if (n < 3) throw ValidationError("build_mesh: n must be at least 3");
  Mesh mesh;
  mesh.dimension = dimension;
  mesh.n = n;
  mesh.h = 1.0 / (n - 1);
  mesh.axis.resize(n);
  for (int i = 0; i < n; ++i) mesh.axis[i] = static_cast<double>(i) / (n - 1);
  return mesh;
}

}  // namespace ivi
