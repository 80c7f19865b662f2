#pragma once

// P1 finite elements for the first Robin eigenpair on star-shaped domains.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <vector>

#include "fk/geometry.hpp"

namespace fk {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

struct TriangleMesh {
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix3Xi triangles;       // counterclockwise
  Eigen::Matrix2Xi boundary_edges;  // one closed counterclockwise loop
  double h = 0;                     // longest edge

  Eigen::Index num_nodes() const { return nodes.cols(); }
};

/// Structured mesh: the center node, then n_rings rings of n_sectors nodes at
/// rho_i = (i / n_rings) r(theta_j), theta_j = 2 pi j / n_sectors.
TriangleMesh mesh_star_domain(const StarDomain& d, int n_rings, int n_sectors);

/// Throws MeshError unless every triangle has positive area, the boundary
/// edges form a single cycle and each boundary edge lies on exactly one triangle.
void check_mesh(const TriangleMesh& mesh);

double mesh_area(const TriangleMesh& mesh);
double boundary_length(const TriangleMesh& mesh);

/// Writes the plain-text dump: node count, "x y" lines, triangle count,
/// "i j k" lines, boundary edge count, "i j" lines.
void write_mesh(std::ostream& os, const TriangleMesh& mesh);
TriangleMesh read_mesh(std::istream& is);

/// Stiffness, boundary mass and consistent mass. None depends on beta;
/// the Robin operator is stiffness + beta * boundary.
struct FemMatrices {
  SparseMatrix stiffness;
  SparseMatrix boundary;
  SparseMatrix mass;
};

FemMatrices assemble(const TriangleMesh& mesh);

enum class LinearSolver { Cholesky, ConjugateGradient };

struct EigenOptions {
  double tol = 1e-13;  // relative change of the Rayleigh quotient
  int max_iterations = 10000;
  LinearSolver solver = LinearSolver::Cholesky;
};

struct EigenSolution {
  double lambda = 0;
  Vector u;  // nodal values, u^T M u = 1, u >= 0
  double u_min = 0;
  int iterations = 0;
  double mesh_h = 0;
};

/// (v^T K v + beta v^T B v) / (v^T M v).
double rayleigh_quotient(const FemMatrices& mats, double beta, const Vector& v);

/// Smallest eigenpair of (K + beta B) u = lambda M u by inverse iteration.
EigenSolution smallest_robin_eigenpair(const TriangleMesh& mesh, const FemMatrices& mats, double beta,
                                       const EigenOptions& options = {});
EigenSolution smallest_robin_eigenpair(const TriangleMesh& mesh, double beta, const EigenOptions& options = {});

struct RefinementOptions {
  int levels = 4;
  int base_rings = 4;
  int base_sectors = 24;  // rounded up to a multiple of the polygon vertex count
  EigenOptions eigen;
};

struct RefinementLevel {
  int n_rings;
  int n_sectors;
  double h;
  double lambda;
  double u_min;
  double linf_over_l2;
  int iterations;
};

struct Extrapolation {
  double beta = 0;
  std::vector<RefinementLevel> levels;
  double lambda_extrapolated = 0;  // Richardson with an h^2 error model
  double u_min_finest = 0;
  double error_estimate = 0;       // |lambda_finest - lambda_extrapolated|
  double observed_order = 0;       // from the last three levels
  bool monotone = true;
};

/// Solves on levels with n_rings and n_sectors doubling each time and
/// Richardson-extrapolates lambda from the two finest levels. Meshes and
/// matrices are shared between all requested betas.
std::vector<Extrapolation> refine_and_extrapolate(const StarDomain& d, const std::vector<double>& betas,
                                                  const RefinementOptions& options = {});
Extrapolation refine_and_extrapolate(const StarDomain& d, double beta, const RefinementOptions& options = {});

}  // namespace fk
