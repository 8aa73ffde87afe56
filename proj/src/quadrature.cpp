#include "stokeshape/quadrature.hpp"

namespace stokeshape {

const TriangleRule& triangle_rule_deg4() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    // Dunavant degree-4 rule: two orbits of three points.
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      r.points.push_back({1.0 - 2.0 * a, a, w});
      r.points.push_back({a, 1.0 - 2.0 * a, w});
      r.points.push_back({a, a, w});
    }
    return r;
  }();
  return rule;
}

const EdgeRule& edge_rule_deg7() {
  static const EdgeRule rule = [] {
    EdgeRule r;
    const double x1 = 0.3399810435848563, w1 = 0.6521451548625461;
    const double x2 = 0.8611363115940526, w2 = 0.3478548451374538;
    r.points.push_back({0.5 * (1.0 - x2), 0.5 * w2});
    r.points.push_back({0.5 * (1.0 - x1), 0.5 * w1});
    r.points.push_back({0.5 * (1.0 + x1), 0.5 * w1});
    r.points.push_back({0.5 * (1.0 + x2), 0.5 * w2});
    return r;
  }();
  return rule;
}

}  // namespace stokeshape
