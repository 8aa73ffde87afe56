#include "stokeshape/control.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stokeshape {

namespace {

constexpr double kCoordTol = 1e-12;

// 5-point Gauss-Legendre rule on [0,1]; exact through degree 9.
struct Gauss1D {
  static constexpr int n = 5;
  static const double pts[5];
  static const double wts[5];
};
const double Gauss1D::pts[5] = {0.046910077030668, 0.230765344947158, 0.5,
                                0.769234655052841, 0.953089922969332};
const double Gauss1D::wts[5] = {0.118463442528095, 0.239314335249683,
                                0.284444444444444, 0.239314335249683,
                                0.118463442528095};

void check_grid(const ControlGrid& grid) {
  if (grid.nodes.size() < 2) throw InvalidInput("control grid needs >= 2 nodes");
  if (std::abs(grid.nodes.front()) > kCoordTol ||
      std::abs(grid.nodes.back() - 1.0) > kCoordTol)
    throw InvalidInput("control grid must span [0,1]");
  for (size_t i = 1; i < grid.nodes.size(); ++i)
    if (grid.nodes[i] <= grid.nodes[i - 1])
      throw InvalidInput("control grid nodes must be strictly increasing");
}

bool same_grid(const ControlGrid& a, const ControlGrid& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (size_t i = 0; i < a.nodes.size(); ++i)
    if (std::abs(a.nodes[i] - b.nodes[i]) > kCoordTol) return false;
  return true;
}

// Lagrange basis through the 5 equispaced nodes tau_k = k/4 on [0,1],
// evaluated with value and first two derivatives at tau.
void lagrange5(double tau, double* val, double* d1, double* d2) {
  static const double tk[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int k = 0; k < 5; ++k) {
    double denom = 1.0;
    for (int m = 0; m < 5; ++m)
      if (m != k) denom *= (tk[k] - tk[m]);
    // value
    double v = 1.0;
    for (int m = 0; m < 5; ++m)
      if (m != k) v *= (tau - tk[m]);
    val[k] = v / denom;
    // first derivative: sum over dropped factor
    double s1 = 0.0;
    for (int d = 0; d < 5; ++d) {
      if (d == k) continue;
      double prod = 1.0;
      for (int m = 0; m < 5; ++m)
        if (m != k && m != d) prod *= (tau - tk[m]);
      s1 += prod;
    }
    d1[k] = s1 / denom;
    // second derivative: sum over two dropped factors
    double s2 = 0.0;
    for (int d = 0; d < 5; ++d) {
      if (d == k) continue;
      for (int e = 0; e < 5; ++e) {
        if (e == k || e == d) continue;
        double prod = 1.0;
        for (int m = 0; m < 5; ++m)
          if (m != k && m != d && m != e) prod *= (tau - tk[m]);
        s2 += prod;
      }
    }
    d2[k] = s2 / denom;
  }
}

}  // namespace

double inf_sup_reference_bound() { return 1.0 / (4.0 * std::sqrt(2.0)); }

double ControlGrid::spacing() const {
  double h = 0.0;
  for (size_t i = 1; i < nodes.size(); ++i) h = std::max(h, nodes[i] - nodes[i - 1]);
  return h;
}

ControlGrid make_uniform_grid(int num_cells) {
  if (num_cells < 1) throw InvalidInput("need at least one control cell");
  ControlGrid g;
  g.nodes.resize(num_cells + 1);
  for (int i = 0; i <= num_cells; ++i)
    g.nodes[i] = static_cast<double>(i) / num_cells;
  g.nodes.front() = 0.0;
  g.nodes.back() = 1.0;
  return g;
}

ControlFunction::ControlFunction(ControlGrid grid, int degree,
                                 std::vector<double> values)
    : grid_(std::move(grid)), degree_(degree), values_(std::move(values)) {
  check_grid(grid_);
  if (degree_ != 1 && degree_ != 4)
    throw InvalidInput("control degree must be 1 or 4");
  const size_t expected = static_cast<size_t>(grid_.num_cells()) * degree_ + 1;
  if (values_.size() != expected)
    throw InvalidInput("control value count does not match grid and degree");
}

double ControlFunction::value_coordinate(int k) const {
  const int cell = std::min(k / degree_, grid_.num_cells() - 1);
  const int local = k - cell * degree_;
  const double a = grid_.nodes[cell], b = grid_.nodes[cell + 1];
  return a + (b - a) * static_cast<double>(local) / degree_;
}

int ControlFunction::locate_cell(double x) const {
  if (x < -kCoordTol || x > 1.0 + kCoordTol)
    throw InvalidInput("control evaluation outside [0,1]");
  x = std::clamp(x, 0.0, 1.0);
  const auto& nds = grid_.nodes;
  auto it = std::upper_bound(nds.begin(), nds.end(), x);
  int cell = static_cast<int>(it - nds.begin()) - 1;
  return std::clamp(cell, 0, grid_.num_cells() - 1);
}

double ControlFunction::eval(double x) const {
  const int c = locate_cell(x);
  const double a = grid_.nodes[c], b = grid_.nodes[c + 1];
  const double tau = (std::clamp(x, 0.0, 1.0) - a) / (b - a);
  if (degree_ == 1) {
    return (1.0 - tau) * values_[c] + tau * values_[c + 1];
  }
  double val[5], d1[5], d2[5];
  lagrange5(tau, val, d1, d2);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += val[k] * values_[4 * c + k];
  return s;
}

double ControlFunction::deriv(double x) const {
  const int c = locate_cell(x);
  const double a = grid_.nodes[c], b = grid_.nodes[c + 1];
  const double w = b - a;
  if (degree_ == 1) return (values_[c + 1] - values_[c]) / w;
  const double tau = (std::clamp(x, 0.0, 1.0) - a) / w;
  double val[5], d1[5], d2[5];
  lagrange5(tau, val, d1, d2);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += d1[k] * values_[4 * c + k];
  return s / w;
}

double ControlFunction::second_deriv(double x) const {
  if (degree_ == 1) return 0.0;
  const int c = locate_cell(x);
  const double a = grid_.nodes[c], b = grid_.nodes[c + 1];
  const double w = b - a;
  const double tau = (std::clamp(x, 0.0, 1.0) - a) / w;
  double val[5], d1[5], d2[5];
  lagrange5(tau, val, d1, d2);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += d2[k] * values_[4 * c + k];
  return s / (w * w);
}

std::vector<double> ControlFunction::second_difference_quotients() const {
  const int nv = num_values();
  std::vector<double> d2(nv, 0.0);
  for (int i = 1; i + 1 < nv; ++i) {
    const double xm = value_coordinate(i - 1), x0 = value_coordinate(i),
                 xp = value_coordinate(i + 1);
    const double hl = x0 - xm, hr = xp - x0;
    d2[i] = 2.0 * ((values_[i + 1] - values_[i]) / hr -
                   (values_[i] - values_[i - 1]) / hl) /
            (hl + hr);
  }
  return d2;
}

double ControlFunction::integral() const {
  double s = 0.0;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const double a = grid_.nodes[c], b = grid_.nodes[c + 1];
    if (degree_ == 1) {
      s += 0.5 * (values_[c] + values_[c + 1]) * (b - a);
    } else {
      for (int g = 0; g < Gauss1D::n; ++g)
        s += Gauss1D::wts[g] * (b - a) * eval(a + Gauss1D::pts[g] * (b - a));
    }
  }
  return s;
}

double ControlFunction::max_abs() const {
  double m = 0.0;
  if (degree_ == 1) {
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const double a = grid_.nodes[c], b = grid_.nodes[c + 1];
    for (int k = 0; k <= 32; ++k)
      m = std::max(m, std::abs(eval(a + (b - a) * k / 32.0)));
  }
  return m;
}

double ControlFunction::max_abs_deriv() const {
  double m = 0.0;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const double a = grid_.nodes[c], b = grid_.nodes[c + 1];
    if (degree_ == 1) {
      m = std::max(m, std::abs((values_[c + 1] - values_[c]) / (b - a)));
    } else {
      for (int k = 0; k <= 32; ++k)
        m = std::max(m, std::abs(deriv(a + (b - a) * (k + 0.001) / 32.016)));
    }
  }
  return m;
}

ControlFunction ControlFunction::operator+(const ControlFunction& o) const {
  if (!same_grid(grid_, o.grid_) || degree_ != o.degree_)
    throw InvalidInput("control arithmetic requires matching grid and degree");
  std::vector<double> v(values_);
  for (size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
  return ControlFunction(grid_, degree_, std::move(v));
}

ControlFunction ControlFunction::operator-(const ControlFunction& o) const {
  return *this + o.scaled(-1.0);
}

ControlFunction ControlFunction::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return ControlFunction(grid_, degree_, std::move(v));
}

double ControlFunction::max_nodal_difference(const ControlFunction& o) const {
  if (!same_grid(grid_, o.grid_) || degree_ != o.degree_)
    throw InvalidInput("control comparison requires matching grid and degree");
  double m = 0.0;
  for (size_t i = 0; i < values_.size(); ++i)
    m = std::max(m, std::abs(values_[i] - o.values_[i]));
  return m;
}

ControlFunction interpolate_control(const std::function<double(double)>& f,
                                    const ControlGrid& grid, int degree) {
  check_grid(grid);
  const int nv = grid.num_cells() * degree + 1;
  std::vector<double> vals(nv);
  ControlFunction probe(grid, degree, std::vector<double>(nv, 0.0));
  for (int k = 0; k < nv; ++k) vals[k] = f(probe.value_coordinate(k));
  return ControlFunction(grid, degree, std::move(vals));
}

std::function<double(double)> preset_formula(ControlPreset preset) {
  using std::numbers::pi;
  switch (preset) {
    case ControlPreset::Flat:
      return [](double) { return 0.0; };
    case ControlPreset::Parabolic:
      return [](double x) { return 0.2 * (1.0 - 4.0 * (x - 0.5) * (x - 0.5)); };
    case ControlPreset::Sinusoidal:
      return [](double x) {
        const double s = std::sin(2.0 * pi * x);
        return 0.1 * s * s;
      };
    case ControlPreset::CosineBump:
      return [](double x) { return 0.1 + 0.1 * std::cos(2.0 * pi * (x - 0.5)); };
  }
  throw InvalidInput("unknown control preset");
}

ControlFunction make_preset(ControlPreset preset, const ControlGrid& grid,
                            int degree) {
  auto q = interpolate_control(preset_formula(preset), grid, degree);
  // presets vanish at the endpoints by construction; pin them exactly
  q.values().front() = 0.0;
  q.values().back() = 0.0;
  return q;
}

AdmissibilityReport check_admissible(const ControlFunction& q,
                                     const AdmissibilityParams& params) {
  if (params.epsilon <= 0.0 || params.epsilon >= 1.0)
    throw InvalidInput("admissibility epsilon must lie in (0,1)");
  if (params.xi <= 0.0 || params.xi >= 1.0)
    throw InvalidInput("admissibility xi must lie in (0,1)");
  AdmissibilityReport r;
  r.endpoints_ok = std::abs(q.eval(0.0)) <= 1e-12 && std::abs(q.eval(1.0)) <= 1e-12;

  // signed maximum height
  double hmax = -1e300;
  const int cells = q.grid().num_cells();
  for (int c = 0; c < cells; ++c) {
    const double a = q.grid().nodes[c], b = q.grid().nodes[c + 1];
    const int samples = q.degree() == 1 ? 1 : 32;
    for (int k = 0; k <= samples; ++k)
      hmax = std::max(hmax, q.eval(a + (b - a) * k / samples));
  }
  r.max_height = hmax;
  r.height_ok = hmax <= 1.0 - params.epsilon + 1e-14;

  // discrete H^3 proxy: L2 norms of q, q', and the second-derivative proxy
  double l2q = control_l2_norm(q);
  double l2dq = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double a = q.grid().nodes[c], b = q.grid().nodes[c + 1];
    for (int g = 0; g < Gauss1D::n; ++g) {
      const double x = a + Gauss1D::pts[g] * (b - a);
      const double d = q.deriv(x);
      l2dq += Gauss1D::wts[g] * (b - a) * d * d;
    }
  }
  const double curv = curvature_inner(q, q);
  r.h3_proxy = std::sqrt(l2q * l2q + l2dq + curv);
  r.h3_ok = r.h3_proxy <= params.norm_bound;

  // W^{1,inf} proxy sup(|q| + |q'|): sample cell endpoints and interiors
  double w1 = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double a = q.grid().nodes[c], b = q.grid().nodes[c + 1];
    for (int k = 0; k <= 8; ++k) {
      const double x = a + (b - a) * (k + 0.01) / 8.02;
      w1 = std::max(w1, std::abs(q.eval(x)) + std::abs(q.deriv(x)));
    }
  }
  r.w1inf_proxy = w1;
  r.w1inf_within_margin = w1 <= params.xi * inf_sup_reference_bound();

  double w3 = w1;
  if (q.degree() == 1) {
    for (double d2 : q.second_difference_quotients())
      w3 = std::max(w3, std::abs(d2));
  } else {
    for (int c = 0; c < cells; ++c) {
      const double a = q.grid().nodes[c], b = q.grid().nodes[c + 1];
      for (int k = 0; k <= 8; ++k)
        w3 = std::max(w3, std::abs(q.second_deriv(a + (b - a) * (k + 0.01) / 8.02)));
    }
  }
  r.w3inf_proxy = w3;
  r.w3inf_ok = w3 <= params.c_infinity;
  return r;
}

void serialize_control(const ControlFunction& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericalFailure("cannot open control file for writing: " + path);
  out << "x,q\n";
  out.precision(17);
  for (int k = 0; k < q.num_values(); ++k)
    out << q.value_coordinate(k) << "," << q.values()[k] << "\n";
}

ControlFunction deserialize_control(const std::string& path,
                                    const ControlGrid& grid, int degree) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open control file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,q", 0) != 0)
    throw InvalidInput("control file must start with header 'x,q': " + path);
  std::vector<double> xs, qs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string xfield, qfield;
    if (!std::getline(ss, xfield, ',') || !std::getline(ss, qfield, ','))
      throw InvalidInput("malformed control row: " + line);
    xs.push_back(std::stod(xfield));
    qs.push_back(std::stod(qfield));
  }
  if (xs.size() < 2) throw InvalidInput("control file has fewer than 2 rows");
  // re-interpolate the stored polyline onto the requested grid
  auto polyline = [&xs, &qs](double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    int i = std::clamp(static_cast<int>(it - xs.begin()) - 1, 0,
                       static_cast<int>(xs.size()) - 2);
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - t) * qs[i] + t * qs[i + 1];
  };
  return interpolate_control(polyline, grid, degree);
}

double control_l2_inner(const ControlFunction& a, const ControlFunction& b) {
  // integrate on the union of both grids so each Gauss panel is smooth
  std::vector<double> cuts;
  cuts.reserve(a.grid().nodes.size() + b.grid().nodes.size());
  cuts.insert(cuts.end(), a.grid().nodes.begin(), a.grid().nodes.end());
  cuts.insert(cuts.end(), b.grid().nodes.begin(), b.grid().nodes.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < kCoordTol; }),
             cuts.end());
  double s = 0.0;
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    for (int g = 0; g < Gauss1D::n; ++g) {
      const double x = lo + Gauss1D::pts[g] * (hi - lo);
      s += Gauss1D::wts[g] * (hi - lo) * a.eval(x) * b.eval(x);
    }
  }
  return s;
}

double control_l2_norm(const ControlFunction& a) {
  return std::sqrt(std::max(0.0, control_l2_inner(a, a)));
}

double curvature_inner(const ControlFunction& a, const ControlFunction& b) {
  if (!same_grid(a.grid(), b.grid()) || a.degree() != b.degree())
    throw InvalidInput("curvature form requires matching grid and degree");
  if (a.degree() == 4) {
    double s = 0.0;
    for (int c = 0; c < a.grid().num_cells(); ++c) {
      const double lo = a.grid().nodes[c], hi = a.grid().nodes[c + 1];
      for (int g = 0; g < Gauss1D::n; ++g) {
        const double x = lo + Gauss1D::pts[g] * (hi - lo);
        s += Gauss1D::wts[g] * (hi - lo) * a.second_deriv(x) * b.second_deriv(x);
      }
    }
    return s;
  }
  const auto d2a = a.second_difference_quotients();
  const auto d2b = b.second_difference_quotients();
  double s = 0.0;
  for (int i = 1; i + 1 < a.num_values(); ++i) {
    const double w =
        0.5 * (a.value_coordinate(i + 1) - a.value_coordinate(i - 1));
    s += w * d2a[i] * d2b[i];
  }
  return s;
}

}  // namespace stokeshape
