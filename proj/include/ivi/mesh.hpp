#pragma once

#include <array>
#include <vector>

namespace ivi {

// Observation / evaluation point. y is ignored on 1-D meshes.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Uniform grid on (0,1) or (0,1)^2 with n nodes per axis.
// 2-D node numbering is x-fastest: index = iy*n + ix.
struct Mesh {
  int dimension = 1;
  int n = 0;
  double h = 0.0;
  std::vector<double> axis;  // axis coordinates, size n

  int node_count() const { return dimension == 1 ? n : n * n; }
  int element_count() const {
    return dimension == 1 ? n - 1 : (n - 1) * (n - 1);
  }
  int index(int ix, int iy = 0) const { return iy * n + ix; }
  bool is_boundary(int node) const;
  // Nodes of element e, ordered (left,right) in 1-D and
  // (sw, se, nw, ne) in 2-D.
  std::array<int, 4> element_nodes(int e) const;
  std::vector<int> interior_nodes() const;
};

Mesh build_mesh(int dimension, int n);

}  // namespace ivi
