#include "graphent/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "graphent/kernels.hpp"
#include "graphent/special.hpp"

namespace graphent {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

// Piecewise-linear value of a uniform grid (endpoints included) at x.
double interp1(const std::vector<double>& v, double x) {
  const std::size_t m = v.size();
  const double t = x * static_cast<double>(m - 1);
  std::size_t i = static_cast<std::size_t>(t);
  if (i > m - 2) i = m - 2;
  const double w = t - static_cast<double>(i);
  return (1.0 - w) * v[i] + w * v[i + 1];
}

// Block index of x under the given widths; x == 1 lands in the last block.
std::size_t block_index(const std::vector<double>& fractions, double x) {
  double acc = 0.0;
  const std::size_t k = fractions.size();
  for (std::size_t a = 0; a + 1 < k; ++a) {
    acc += fractions[a];
    if (x < acc) return a;
  }
  return k - 1;
}

double bilinear(const std::vector<std::vector<double>>& g, double x, double y) {
  const std::size_t m = g.size();
  const double tx = x * static_cast<double>(m - 1);
  const double ty = y * static_cast<double>(m - 1);
  std::size_t ix = static_cast<std::size_t>(tx);
  std::size_t iy = static_cast<std::size_t>(ty);
  if (ix > m - 2) ix = m - 2;
  if (iy > m - 2) iy = m - 2;
  const double wx = tx - static_cast<double>(ix);
  const double wy = ty - static_cast<double>(iy);
  const double r0 = (1.0 - wx) * g[ix][iy] + wx * g[ix + 1][iy];
  const double r1 = (1.0 - wx) * g[ix][iy + 1] + wx * g[ix + 1][iy + 1];
  return (1.0 - wy) * r0 + wy * r1;
}

void check_common(const GraphonSpec& s) {
  require(s.rho_n > 0.0 && s.rho_n <= 1.0, "graphon: rho_n must lie in (0,1]");
  require(s.rho_n * s.max_f() <= 1.0,
          "graphon: rho_n * max f exceeds 1, edge probabilities would leave [0,1]");
}

void check_symmetric(const std::vector<std::vector<double>>& m, const char* what) {
  const std::size_t k = m.size();
  for (const auto& row : m)
    require(row.size() == k, "graphon: matrix is not square");
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      require(m[a][b] == m[b][a], what);
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string format_number_list(const std::vector<double>& v) {
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out.push_back(',');
    out += buf;
  }
  return out;
}

}  // namespace

double GraphonSpec::max_f() const {
  switch (kind) {
    case GraphonKind::constant:
      return constant_level;
    case GraphonKind::separable: {
      double g = 0.0;
      for (double v : g_values) g = std::max(g, v);
      return g * g;
    }
    case GraphonKind::block_constant: {
      double t = 0.0;
      for (const auto& row : theta)
        for (double v : row) t = std::max(t, v);
      return t;
    }
    case GraphonKind::low_rank: {
      // f is bilinear on each lattice cell, so the maximum is on a node.
      std::size_t m = 0;
      for (const auto& c : component_grids) m = std::max(m, c.size());
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(m - 1);
        for (std::size_t j = i; j < m; ++j) {
          const double y = static_cast<double>(j) / static_cast<double>(m - 1);
          double f = 0.0;
          for (std::size_t c = 0; c < lambdas.size(); ++c)
            f += lambdas[c] * interp1(component_grids[c], x) *
                 interp1(component_grids[c], y);
          best = std::max(best, f);
        }
      }
      return best;
    }
    case GraphonKind::analytic_grid: {
      double g = 0.0;
      for (const auto& row : grid)
        for (double v : row) g = std::max(g, v);
      return g;
    }
  }
  return 0.0;
}

GraphonSpec GraphonSpec::constant(double level, double rho) {
  require(level > 0.0 && level < 1.0, "graphon: constant level must lie in (0,1)");
  GraphonSpec s;
  s.kind = GraphonKind::constant;
  s.constant_level = level;
  s.rho_n = rho;
  char buf[48];
  std::snprintf(buf, sizeof buf, "constant(%g)", level);
  s.id = buf;
  check_common(s);
  return s;
}

GraphonSpec GraphonSpec::separable(std::vector<double> g, double rho) {
  require(g.size() >= 2, "graphon: separable factor needs at least 2 grid values");
  for (double v : g)
    require(v >= 0.0 && std::isfinite(v), "graphon: separable factor must be nonnegative");
  GraphonSpec s;
  s.kind = GraphonKind::separable;
  s.g_values = std::move(g);
  s.rho_n = rho;
  s.id = "separable";
  check_common(s);
  return s;
}

GraphonSpec GraphonSpec::block(std::vector<std::vector<double>> theta,
                               std::vector<double> fractions, double rho) {
  require(!theta.empty(), "graphon: block matrix is empty");
  check_symmetric(theta, "graphon: block matrix must be symmetric");
  require(fractions.size() == theta.size(),
          "graphon: block fractions and matrix size disagree");
  double sum = 0.0;
  for (double f : fractions) {
    require(f > 0.0, "graphon: block fractions must be positive");
    sum += f;
  }
  require(std::fabs(sum - 1.0) <= 1e-12, "graphon: block fractions must sum to 1");
  for (const auto& row : theta)
    for (double v : row)
      require(v >= 0.0 && v <= 1.0, "graphon: block values must lie in [0,1]");
  GraphonSpec s;
  s.kind = GraphonKind::block_constant;
  s.theta = std::move(theta);
  s.block_fractions = std::move(fractions);
  s.rho_n = rho;
  s.id = "block";
  check_common(s);
  return s;
}

GraphonSpec GraphonSpec::low_rank(std::vector<double> lambdas,
                                  std::vector<std::vector<double>> comps,
                                  double rho) {
  require(!lambdas.empty() && lambdas.size() == comps.size(),
          "graphon: low-rank weights and components disagree");
  for (double l : lambdas)
    require(l >= 0.0, "graphon: low-rank weights must be nonnegative");
  for (const auto& c : comps) {
    require(c.size() >= 2, "graphon: low-rank component needs at least 2 grid values");
    for (double v : c)
      require(v >= 0.0, "graphon: low-rank components must be nonnegative");
  }
  GraphonSpec s;
  s.kind = GraphonKind::low_rank;
  s.lambdas = std::move(lambdas);
  s.component_grids = std::move(comps);
  s.rho_n = rho;
  s.id = "lowrank";
  check_common(s);
  return s;
}

GraphonSpec GraphonSpec::analytic_grid(std::vector<std::vector<double>> grid,
                                       double rho, double holder) {
  require(grid.size() >= 2, "graphon: grid needs at least 2 lattice points per axis");
  check_symmetric(grid, "graphon: grid must be symmetric");
  for (const auto& row : grid)
    for (double v : row)
      require(v >= 0.0 && std::isfinite(v), "graphon: grid values must be nonnegative");
  require(holder > 0.0 && holder <= 1.0, "graphon: holder exponent must lie in (0,1]");
  GraphonSpec s;
  s.kind = GraphonKind::analytic_grid;
  s.grid = std::move(grid);
  s.holder_exponent = holder;
  s.rho_n = rho;
  s.id = "grid";
  check_common(s);
  return s;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

double eval_graphon(const GraphonSpec& spec, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
    throw std::domain_error("eval_graphon: coordinates outside [0,1]");
  switch (spec.kind) {
    case GraphonKind::constant:
      return spec.rho_n * spec.constant_level;
    case GraphonKind::separable:
      return spec.rho_n * (interp1(spec.g_values, x) * interp1(spec.g_values, y));
    case GraphonKind::block_constant: {
      const std::size_t a = block_index(spec.block_fractions, x);
      const std::size_t b = block_index(spec.block_fractions, y);
      return spec.rho_n * spec.theta[a][b];
    }
    case GraphonKind::low_rank: {
      double f = 0.0;
      for (std::size_t c = 0; c < spec.lambdas.size(); ++c)
        f += spec.lambdas[c] * (interp1(spec.component_grids[c], x) *
                                interp1(spec.component_grids[c], y));
      return spec.rho_n * f;
    }
    case GraphonKind::analytic_grid: {
      // Canonical argument order keeps evaluation symmetric bit for bit.
      if (y < x) std::swap(x, y);
      return spec.rho_n * bilinear(spec.grid, x, y);
    }
  }
  return 0.0;
}

double graphon_entropy_quadrature(const GraphonSpec& spec, int quad_points) {
  if (quad_points < 2)
    throw std::domain_error("graphon_entropy: quad_points must be at least 2");
  const std::size_t m = static_cast<std::size_t>(quad_points);
  const auto& ops = kernels::active();

  std::vector<double> mid(m);
  for (std::size_t i = 0; i < m; ++i)
    mid[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(m);

  std::vector<double> row(m), row_sums(m);

  // Per-axis profiles avoid re-interpolating inside the inner loop.
  switch (spec.kind) {
    case GraphonKind::constant: {
      const double h = binary_entropy(spec.rho_n * spec.constant_level);
      return h;
    }
    case GraphonKind::separable: {
      std::vector<double> g(m);
      for (std::size_t i = 0; i < m; ++i) g[i] = interp1(spec.g_values, mid[i]);
      for (std::size_t i = 0; i < m; ++i) {
        const double gx = spec.rho_n * g[i];
        for (std::size_t j = 0; j < m; ++j) row[j] = gx * g[j];
        row_sums[i] = ops.entropy_sum(row.data(), m, 0.0);
      }
      break;
    }
    case GraphonKind::block_constant: {
      std::vector<std::size_t> idx(m);
      for (std::size_t i = 0; i < m; ++i)
        idx[i] = block_index(spec.block_fractions, mid[i]);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& trow = spec.theta[idx[i]];
        for (std::size_t j = 0; j < m; ++j) row[j] = spec.rho_n * trow[idx[j]];
        row_sums[i] = ops.entropy_sum(row.data(), m, 0.0);
      }
      break;
    }
    case GraphonKind::low_rank: {
      const std::size_t J = spec.lambdas.size();
      std::vector<std::vector<double>> c(J, std::vector<double>(m));
      for (std::size_t q = 0; q < J; ++q)
        for (std::size_t i = 0; i < m; ++i)
          c[q][i] = interp1(spec.component_grids[q], mid[i]);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          double f = 0.0;
          for (std::size_t q = 0; q < J; ++q) f += spec.lambdas[q] * c[q][i] * c[q][j];
          row[j] = spec.rho_n * f;
        }
        row_sums[i] = ops.entropy_sum(row.data(), m, 0.0);
      }
      break;
    }
    case GraphonKind::analytic_grid: {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
          row[j] = eval_graphon(spec, mid[i], mid[j]);
        row_sums[i] = ops.entropy_sum(row.data(), m, 0.0);
      }
      break;
    }
  }
  const double total = ops.sum(row_sums.data(), m);
  return total / (static_cast<double>(m) * static_cast<double>(m));
}

double graphon_entropy(const GraphonSpec& spec, int quad_points) {
  if (quad_points < 2)
    throw std::domain_error("graphon_entropy: quad_points must be at least 2");
  if (spec.kind == GraphonKind::block_constant) {
    // Exact: the integrand is constant on each block rectangle.
    const std::size_t k = spec.theta.size();
    double acc = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        acc += spec.block_fractions[a] * spec.block_fractions[b] *
               binary_entropy(spec.rho_n * spec.theta[a][b]);
    return acc;
  }
  return graphon_entropy_quadrature(spec, quad_points);
}

double block_entropy(const std::vector<std::vector<double>>& theta,
                     const std::vector<long long>& block_sizes, long long n) {
  const std::size_t k = theta.size();
  if (block_sizes.size() != k)
    throw std::domain_error("block_entropy: sizes and matrix disagree");
  long long total = 0;
  for (long long h : block_sizes) {
    if (h <= 0) throw std::domain_error("block_entropy: block sizes must be positive");
    total += h;
  }
  if (total != n) throw std::domain_error("block_entropy: block sizes must sum to n");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    if (theta[a].size() != k)
      throw std::domain_error("block_entropy: matrix is not square");
    for (std::size_t b = 0; b < k; ++b) {
      const double w = static_cast<double>(block_sizes[a]) *
                       static_cast<double>(block_sizes[b]) / n2;
      acc += w * binary_entropy(theta[a][b]);
    }
  }
  return acc;
}

GraphonSpec make_f1(double rho, int m) {
  std::vector<std::vector<double>> g(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(m - 1);
    for (int j = 0; j < m; ++j) {
      const double y = static_cast<double>(j) / static_cast<double>(m - 1);
      g[i][j] = 4.0 * x * y;
    }
  }
  GraphonSpec s = GraphonSpec::analytic_grid(std::move(g), rho, 1.0);
  s.id = "f1";
  return s;
}

GraphonSpec make_f2(double a0, double a1, double alpha1, double rho, int m) {
  if (!(a0 > 0.0)) throw std::domain_error("make_f2: a0 must be positive");
  if (!(a1 >= 0.0)) throw std::domain_error("make_f2: a1 must be nonnegative");
  if (!(alpha1 > 0.0)) throw std::domain_error("make_f2: alpha1 must be positive");
  if (m < 2) throw std::domain_error("make_f2: grid needs at least 2 points");
  if ((a0 + 4.0 * a1) * rho > 1.0)
    throw std::domain_error("make_f2: a0 + 4 a1 exceeds 1/rho, probabilities would leave [0,1]");

  // Quantiles mirrored around 1/2 so the symmetry f2(x,y) = f2(1-x,1-y)
  // holds bit for bit on the lattice.
  std::vector<double> q(m);
  for (int i = 0; i <= (m - 1) / 2; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(m - 1);
    q[i] = special::beta_quantile(p, alpha1, alpha1);
    q[m - 1 - i] = 1.0 - q[i];
  }
  if (m % 2 == 1) q[(m - 1) / 2] = 0.5;

  std::vector<std::vector<double>> g(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g[i][j] = a0 + 4.0 * a1 * (q[i] * q[j] + (1.0 - q[i]) * (1.0 - q[j]));
  GraphonSpec s = GraphonSpec::analytic_grid(std::move(g), rho, 1.0);
  s.id = "f2";
  return s;
}

// ---------------------------------------------------------------------------
// Config round trip
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graphon config: cannot read grid file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

void save_matrix_file(const std::vector<std::vector<double>>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("graphon config: cannot write grid file " + path);
  char buf[40];
  for (const auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

GraphonSpec load_graphon_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graphon config: cannot read " + path);
  const auto dir = std::filesystem::path(path).parent_path();

  std::string kind, id;
  double rho = 1.0, level = 0.0, a0 = 0.25, a1 = 0.15, alpha1 = 3.0, holder = 1.0;
  int m = 0;
  std::vector<double> g, fractions, lambdas;
  std::vector<std::vector<double>> theta, comps;
  std::string grid_file;

  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("graphon config: expected key=value, got: " + line);
    std::string key = line.substr(first, eq - first);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string val = line.substr(eq + 1);
    const auto vfirst = val.find_first_not_of(" \t");
    val = (vfirst == std::string::npos) ? std::string() : val.substr(vfirst);
    while (!val.empty() && (val.back() == ' ' || val.back() == '\t' || val.back() == '\r'))
      val.pop_back();

    if (key == "kind") kind = val;
    else if (key == "rho") rho = std::stod(val);
    else if (key == "level") level = std::stod(val);
    else if (key == "g") g = parse_number_list(val);
    else if (key == "fractions") fractions = parse_number_list(val);
    else if (key == "lambdas") lambdas = parse_number_list(val);
    else if (key == "component") comps.push_back(parse_number_list(val));
    else if (key == "grid_file") grid_file = val;
    else if (key == "a0") a0 = std::stod(val);
    else if (key == "a1") a1 = std::stod(val);
    else if (key == "alpha1") alpha1 = std::stod(val);
    else if (key == "m") m = std::stoi(val);
    else if (key == "holder") holder = std::stod(val);
    else if (key == "id") id = val;
    else if (key == "theta") {
      theta.clear();
      std::stringstream ss(val);
      std::string rowtext;
      while (std::getline(ss, rowtext, ';')) theta.push_back(parse_number_list(rowtext));
    } else {
      throw std::domain_error("graphon config: unknown key " + key);
    }
  }

  GraphonSpec s;
  if (kind == "constant") s = GraphonSpec::constant(level, rho);
  else if (kind == "separable") s = GraphonSpec::separable(std::move(g), rho);
  else if (kind == "block") s = GraphonSpec::block(std::move(theta), std::move(fractions), rho);
  else if (kind == "lowrank") s = GraphonSpec::low_rank(std::move(lambdas), std::move(comps), rho);
  else if (kind == "grid") {
    if (grid_file.empty())
      throw std::domain_error("graphon config: kind=grid requires grid_file=");
    auto matrix = load_matrix_file((dir / grid_file).string());
    s = GraphonSpec::analytic_grid(std::move(matrix), rho, holder);
  } else if (kind == "f1") {
    s = make_f1(rho, m > 0 ? m : 129);
  } else if (kind == "f2") {
    s = make_f2(a0, a1, alpha1, rho, m > 0 ? m : 1024);
  } else {
    throw std::domain_error("graphon config: unknown kind '" + kind + "'");
  }
  if (!id.empty()) s.id = id;
  return s;
}

void save_graphon_config(const GraphonSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("graphon config: cannot write " + path);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", spec.rho_n);
  const std::string rho = buf;

  switch (spec.kind) {
    case GraphonKind::constant:
      std::snprintf(buf, sizeof buf, "%.17g", spec.constant_level);
      out << "kind=constant\nrho=" << rho << "\nlevel=" << buf << "\n";
      break;
    case GraphonKind::separable:
      out << "kind=separable\nrho=" << rho << "\ng=" << format_number_list(spec.g_values)
          << "\n";
      break;
    case GraphonKind::block_constant: {
      out << "kind=block\nrho=" << rho << "\ntheta=";
      for (std::size_t a = 0; a < spec.theta.size(); ++a) {
        if (a) out << ';';
        out << format_number_list(spec.theta[a]);
      }
      out << "\nfractions=" << format_number_list(spec.block_fractions) << "\n";
      break;
    }
    case GraphonKind::low_rank:
      out << "kind=lowrank\nrho=" << rho
          << "\nlambdas=" << format_number_list(spec.lambdas) << "\n";
      for (const auto& c : spec.component_grids)
        out << "component=" << format_number_list(c) << "\n";
      break;
    case GraphonKind::analytic_grid: {
      const std::string grid_name = std::filesystem::path(path).filename().string() + ".grid";
      const auto grid_path = std::filesystem::path(path).parent_path() / grid_name;
      save_matrix_file(spec.grid, grid_path.string());
      std::snprintf(buf, sizeof buf, "%.17g", spec.holder_exponent);
      out << "kind=grid\nrho=" << rho << "\ngrid_file=" << grid_name
          << "\nholder=" << buf << "\n";
      break;
    }
  }
  if (!spec.id.empty()) out << "id=" << spec.id << "\n";
}

}  // namespace graphent
