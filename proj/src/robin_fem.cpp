#include "fk/robin_fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <utility>

#include "fk/errors.hpp"

namespace fk {

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::pair<int, int> undirected(int i, int j) { return i < j ? std::pair{i, j} : std::pair{j, i}; }

}  // namespace

TriangleMesh mesh_star_domain(const StarDomain& d, int n_rings, int n_sectors) {
  if (n_rings < 2) throw PreconditionError("mesh_star_domain: n_rings must be >= 2");
  if (n_sectors < 8) throw PreconditionError("mesh_star_domain: n_sectors must be >= 8");

  const Eigen::Index n_nodes = 1 + Eigen::Index(n_rings) * n_sectors;
  TriangleMesh mesh;
  mesh.nodes.resize(2, n_nodes);
  mesh.nodes.col(0) = d.center();
  auto index = [&](int ring, int sector) { return 1 + (ring - 1) * n_sectors + (sector % n_sectors); };
  for (int j = 0; j < n_sectors; ++j) {
    const double theta = 2 * std::numbers::pi * j / n_sectors;
    const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
    const double r = d.radius(theta);
    for (int i = 1; i <= n_rings; ++i) mesh.nodes.col(index(i, j)) = d.center() + (double(i) / n_rings) * r * dir;
  }

  mesh.triangles.resize(3, Eigen::Index(n_sectors) * (2 * n_rings - 1));
  Eigen::Index t = 0;
  for (int j = 0; j < n_sectors; ++j) mesh.triangles.col(t++) << 0, index(1, j), index(1, j + 1);
  for (int i = 1; i < n_rings; ++i) {
    for (int j = 0; j < n_sectors; ++j) {
      const int a = index(i, j), b = index(i, j + 1), c = index(i + 1, j + 1), e = index(i + 1, j);
      mesh.triangles.col(t++) << a, e, c;
      mesh.triangles.col(t++) << a, c, b;
    }
  }

  mesh.boundary_edges.resize(2, n_sectors);
  for (int j = 0; j < n_sectors; ++j) mesh.boundary_edges.col(j) << index(n_rings, j), index(n_rings, j + 1);

  for (Eigen::Index k = 0; k < mesh.triangles.cols(); ++k) {
    const auto tri = mesh.triangles.col(k);
    for (int e = 0; e < 3; ++e) {
      const double len = (mesh.nodes.col(tri[(e + 1) % 3]) - mesh.nodes.col(tri[e])).norm();
      mesh.h = std::max(mesh.h, len);
    }
  }
  check_mesh(mesh);
  return mesh;
}

void check_mesh(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (Eigen::Index k = 0; k < mesh.triangles.cols(); ++k) {
    const auto tri = mesh.triangles.col(k);
    for (int e = 0; e < 3; ++e) {
      if (tri[e] < 0 || tri[e] >= mesh.num_nodes()) throw MeshError("mesh: triangle index out of range");
    }
    const double a = signed_area(mesh.nodes.col(tri[0]), mesh.nodes.col(tri[1]), mesh.nodes.col(tri[2]));
    if (!(a > 1e-14)) throw MeshError("mesh: degenerate or inverted triangle " + std::to_string(k));
    for (int e = 0; e < 3; ++e) ++edge_count[undirected(tri[e], tri[(e + 1) % 3])];
  }

  const Eigen::Index nb = mesh.boundary_edges.cols();
  if (nb < 3) throw MeshError("mesh: boundary has fewer than 3 edges");
  std::map<int, int> next;
  for (Eigen::Index k = 0; k < nb; ++k) {
    const int i = mesh.boundary_edges(0, k), j = mesh.boundary_edges(1, k);
    const auto it = edge_count.find(undirected(i, j));
    if (it == edge_count.end() || it->second != 1) throw MeshError("mesh: boundary edge not on exactly one triangle");
    if (!next.emplace(i, j).second) throw MeshError("mesh: boundary is not a simple cycle");
  }
  int steps = 0;
  const int start = mesh.boundary_edges(0, 0);
  int cur = start;
  do {
    const auto it = next.find(cur);
    if (it == next.end()) throw MeshError("mesh: boundary loop is open");
    cur = it->second;
    ++steps;
  } while (cur != start && steps <= nb);
  if (cur != start || steps != nb) throw MeshError("mesh: boundary edges do not form a single closed cycle");
}

double mesh_area(const TriangleMesh& mesh) {
  double total = 0;
  for (Eigen::Index k = 0; k < mesh.triangles.cols(); ++k) {
    const auto tri = mesh.triangles.col(k);
    total += signed_area(mesh.nodes.col(tri[0]), mesh.nodes.col(tri[1]), mesh.nodes.col(tri[2]));
  }
  return total;
}

double boundary_length(const TriangleMesh& mesh) {
  double total = 0;
  for (Eigen::Index k = 0; k < mesh.boundary_edges.cols(); ++k) {
    total += (mesh.nodes.col(mesh.boundary_edges(1, k)) - mesh.nodes.col(mesh.boundary_edges(0, k))).norm();
  }
  return total;
}

void write_mesh(std::ostream& os, const TriangleMesh& mesh) {
  const auto old_precision = os.precision(17);
  os << mesh.nodes.cols() << '\n';
  for (Eigen::Index k = 0; k < mesh.nodes.cols(); ++k) os << mesh.nodes(0, k) << ' ' << mesh.nodes(1, k) << '\n';
  os << mesh.triangles.cols() << '\n';
  for (Eigen::Index k = 0; k < mesh.triangles.cols(); ++k)
    os << mesh.triangles(0, k) << ' ' << mesh.triangles(1, k) << ' ' << mesh.triangles(2, k) << '\n';
  os << mesh.boundary_edges.cols() << '\n';
  for (Eigen::Index k = 0; k < mesh.boundary_edges.cols(); ++k)
    os << mesh.boundary_edges(0, k) << ' ' << mesh.boundary_edges(1, k) << '\n';
  os.precision(old_precision);
}

TriangleMesh read_mesh(std::istream& is) {
  TriangleMesh mesh;
  auto count = [&](const char* what) {
    long long n = -1;
    if (!(is >> n) || n < 0) throw MeshError(std::string("read_mesh: bad ") + what + " count");
    return static_cast<Eigen::Index>(n);
  };
  mesh.nodes.resize(2, count("node"));
  for (Eigen::Index k = 0; k < mesh.nodes.cols(); ++k) {
    if (!(is >> mesh.nodes(0, k) >> mesh.nodes(1, k))) throw MeshError("read_mesh: truncated node list");
  }
  mesh.triangles.resize(3, count("triangle"));
  for (Eigen::Index k = 0; k < mesh.triangles.cols(); ++k) {
    if (!(is >> mesh.triangles(0, k) >> mesh.triangles(1, k) >> mesh.triangles(2, k)))
      throw MeshError("read_mesh: truncated triangle list");
  }
  mesh.boundary_edges.resize(2, count("boundary edge"));
  for (Eigen::Index k = 0; k < mesh.boundary_edges.cols(); ++k) {
    if (!(is >> mesh.boundary_edges(0, k) >> mesh.boundary_edges(1, k)))
      throw MeshError("read_mesh: truncated boundary list");
  }
  for (Eigen::Index k = 0; k < mesh.triangles.cols(); ++k) {
    const auto tri = mesh.triangles.col(k);
    for (int e = 0; e < 3; ++e) {
      if (tri[e] < 0 || tri[e] >= mesh.num_nodes()) throw MeshError("read_mesh: triangle index out of range");
      mesh.h = std::max(mesh.h, (mesh.nodes.col(tri[(e + 1) % 3]) - mesh.nodes.col(tri[e])).norm());
    }
  }
  check_mesh(mesh);
  return mesh;
}

FemMatrices assemble(const TriangleMesh& mesh) {
  using Triplet = Eigen::Triplet<double>;
  const Eigen::Index n = mesh.num_nodes();
  std::vector<Triplet> k_entries, m_entries, b_entries;
  k_entries.reserve(9 * mesh.triangles.cols());
  m_entries.reserve(9 * mesh.triangles.cols());
  b_entries.reserve(4 * mesh.boundary_edges.cols());

  for (Eigen::Index t = 0; t < mesh.triangles.cols(); ++t) {
    const Eigen::Vector3i tri = mesh.triangles.col(t);
    const Eigen::Vector2d p0 = mesh.nodes.col(tri[0]), p1 = mesh.nodes.col(tri[1]), p2 = mesh.nodes.col(tri[2]);
    const double a = signed_area(p0, p1, p2);
    // Barycentric gradients: grad phi_i = perp(opposite edge) / (2 area).
    Eigen::Matrix<double, 2, 3> grad;
    grad.col(0) << p1.y() - p2.y(), p2.x() - p1.x();
    grad.col(1) << p2.y() - p0.y(), p0.x() - p2.x();
    grad.col(2) << p0.y() - p1.y(), p1.x() - p0.x();
    grad /= 2 * a;
    const Eigen::Matrix3d local_k = a * grad.transpose() * grad;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        k_entries.emplace_back(tri[i], tri[j], local_k(i, j));
        m_entries.emplace_back(tri[i], tri[j], a / 12 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  for (Eigen::Index e = 0; e < mesh.boundary_edges.cols(); ++e) {
    const int i = mesh.boundary_edges(0, e), j = mesh.boundary_edges(1, e);
    const double len = (mesh.nodes.col(j) - mesh.nodes.col(i)).norm();
    b_entries.emplace_back(i, i, len / 3);
    b_entries.emplace_back(j, j, len / 3);
    b_entries.emplace_back(i, j, len / 6);
    b_entries.emplace_back(j, i, len / 6);
  }

  FemMatrices mats{SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n)};
  mats.stiffness.setFromTriplets(k_entries.begin(), k_entries.end());
  mats.mass.setFromTriplets(m_entries.begin(), m_entries.end());
  mats.boundary.setFromTriplets(b_entries.begin(), b_entries.end());
  return mats;
}

double rayleigh_quotient(const FemMatrices& mats, double beta, const Vector& v) {
  if (v.size() != mats.mass.rows()) throw PreconditionError("rayleigh_quotient: size mismatch");
  const double denom = v.dot(mats.mass * v);
  if (!(denom > 0)) throw PreconditionError("rayleigh_quotient: zero vector");
  return (v.dot(mats.stiffness * v) + beta * v.dot(mats.boundary * v)) / denom;
}

namespace {

template <typename Solver>
EigenSolution inverse_iteration(Solver& solve, const SparseMatrix& op, const FemMatrices& mats, double beta,
                                const EigenOptions& options) {
  EigenSolution sol;
  Vector u = Vector::Ones(op.rows());
  u /= std::sqrt(u.dot(mats.mass * u));
  double lambda = rayleigh_quotient(mats, beta, u);
  bool converged = false;
  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    Vector x = solve(mats.mass * u, u);
    const double norm = std::sqrt(x.dot(mats.mass * x));
    if (!(norm > 0) || !std::isfinite(norm)) throw NumericError("inverse iteration: linear solve failed", lambda);
    x /= norm;
    const Vector diff = x - u;
    const double vector_change = std::sqrt(diff.dot(mats.mass * diff));
    u = std::move(x);
    const double next = u.dot(op * u);
    const double change = std::abs(next - lambda);
    lambda = next;
    // The second test catches tiny eigenvalues where the relative change sits below roundoff.
    if (it >= 3 && (change <= options.tol * std::abs(lambda) || vector_change <= 1e-13)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("inverse iteration: no convergence within the iteration cap", lambda);
  if (u.sum() < 0) u = -u;
  sol.lambda = lambda;
  sol.u_min = u.minCoeff();
  sol.u = std::move(u);
  sol.iterations = it;
  return sol;
}

}  // namespace

EigenSolution smallest_robin_eigenpair(const TriangleMesh& mesh, const FemMatrices& mats, double beta,
                                       const EigenOptions& options) {
  if (!(beta > 0)) throw PreconditionError("smallest_robin_eigenpair: beta must be positive");
  SparseMatrix op = mats.stiffness + beta * mats.boundary;
  op.makeCompressed();

  EigenSolution sol;
  if (options.solver == LinearSolver::Cholesky) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(op);
    if (ldlt.info() != Eigen::Success) throw NumericError("smallest_robin_eigenpair: factorization failed");
    auto solve = [&](const Vector& rhs, const Vector&) -> Vector { return ldlt.solve(rhs); };
    sol = inverse_iteration(solve, op, mats, beta, options);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg(op);
    cg.setTolerance(1e-12);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * op.rows()));
    auto solve = [&](const Vector& rhs, const Vector& guess) -> Vector {
      Vector x = cg.solveWithGuess(rhs, guess);
      if (cg.info() != Eigen::Success) throw NumericError("smallest_robin_eigenpair: CG did not converge");
      return x;
    };
    sol = inverse_iteration(solve, op, mats, beta, options);
  }
  sol.mesh_h = mesh.h;
  return sol;
}

EigenSolution smallest_robin_eigenpair(const TriangleMesh& mesh, double beta, const EigenOptions& options) {
  return smallest_robin_eigenpair(mesh, assemble(mesh), beta, options);
}

std::vector<Extrapolation> refine_and_extrapolate(const StarDomain& d, const std::vector<double>& betas,
                                                  const RefinementOptions& options) {
  if (options.levels < 3) throw PreconditionError("refine_and_extrapolate: need at least 3 levels");
  int sectors = std::max(options.base_sectors, 8);
  const int kinks = static_cast<int>(d.kink_angles().size());
  if (kinks > 0) sectors = ((sectors + kinks - 1) / kinks) * kinks;

  std::vector<Extrapolation> out(betas.size());
  for (std::size_t b = 0; b < betas.size(); ++b) out[b].beta = betas[b];

  for (int level = 0; level < options.levels; ++level) {
    const int rings = options.base_rings << level;
    const int secs = sectors << level;
    const TriangleMesh mesh = mesh_star_domain(d, rings, secs);
    const FemMatrices mats = assemble(mesh);
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const EigenSolution sol = smallest_robin_eigenpair(mesh, mats, betas[b], options.eigen);
      out[b].levels.push_back({rings, secs, mesh.h, sol.lambda, sol.u_min, sol.u.maxCoeff(), sol.iterations});
    }
  }

  for (Extrapolation& ex : out) {
    const auto& lv = ex.levels;
    const std::size_t n = lv.size();
    const double fine = lv[n - 1].lambda, coarse = lv[n - 2].lambda;
    ex.lambda_extrapolated = fine + (fine - coarse) / 3.0;
    ex.error_estimate = std::abs(fine - ex.lambda_extrapolated);
    ex.u_min_finest = lv[n - 1].u_min;
    const double d1 = lv[n - 3].lambda - coarse, d2 = coarse - fine;
    ex.observed_order = (d1 != 0 && d2 != 0) ? std::log2(std::abs(d1 / d2)) : 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) {
      const double a = lv[i].lambda - lv[i + 1].lambda, c = lv[i + 1].lambda - lv[i + 2].lambda;
      if ((a > 0) != (c > 0) || std::abs(c) >= std::abs(a)) ex.monotone = false;
    }
  }
  return out;
}

Extrapolation refine_and_extrapolate(const StarDomain& d, double beta, const RefinementOptions& options) {
  return refine_and_extrapolate(d, std::vector<double>{beta}, options).front();
}

}  // namespace fk
