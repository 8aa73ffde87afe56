#include "stokeshape/mesh.hpp"

#include <cmath>
#include <fstream>

namespace stokeshape {

double Mesh::h() const { return std::sqrt(2.0) / n; }

double Mesh::total_area() const {
  double s = 0.0;
  for (const auto& t : triangles) {
    const Vec2 e1 = vertices[t[1]] - vertices[t[0]];
    const Vec2 e2 = vertices[t[2]] - vertices[t[0]];
    s += 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }
  return s;
}

Mesh build_mesh(int n) {
  if (n < 1) throw InvalidInput("mesh resolution must be >= 1");
  Mesh m;
  m.n = n;
  m.vertices.reserve((n + 1) * (n + 1));
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix <= n; ++ix)
      m.vertices.emplace_back(static_cast<double>(ix) / n,
                              static_cast<double>(iy) / n);

  m.triangles.reserve(2 * n * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int v00 = m.vertex_index(ix, iy);
      const int v10 = m.vertex_index(ix + 1, iy);
      const int v01 = m.vertex_index(ix, iy + 1);
      const int v11 = m.vertex_index(ix + 1, iy + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }

  for (int ix = 0; ix < n; ++ix)
    m.boundary_edges.push_back(
        {m.vertex_index(ix, 0), m.vertex_index(ix + 1, 0), Gamma0});
  for (int iy = 0; iy < n; ++iy)
    m.boundary_edges.push_back(
        {m.vertex_index(n, iy), m.vertex_index(n, iy + 1), Gamma1});
  for (int ix = 0; ix < n; ++ix)
    m.boundary_edges.push_back(
        {m.vertex_index(ix, n), m.vertex_index(ix + 1, n), Gamma2});
  for (int iy = 0; iy < n; ++iy)
    m.boundary_edges.push_back(
        {m.vertex_index(0, iy), m.vertex_index(0, iy + 1), Gamma3});
  return m;
}

void export_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericalFailure("cannot open mesh file for writing: " + path);
  out.precision(17);
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << e.a << " " << e.b << " " << e.tag << "\n";
}

}  // namespace stokeshape
