#include "fvlab/reduced.hpp"

namespace fvlab {

Vec ReducedBasis::restrict_measure(const Vec& xi) const {
  if (xi.size() != full_dim()) throw DimensionMismatch("restrict_measure: size mismatch");
  return xi.tail(dim());
}

Vec ReducedBasis::lift_measure(const Vec& coords) const {
  if (coords.size() != dim()) throw DimensionMismatch("lift_measure: size mismatch");
  Vec xi(full_dim());
  xi(0) = -coords.sum();
  xi.tail(dim()) = coords;
  return xi;
}

Vec ReducedBasis::restrict_function(const Vec& f) const {
  if (f.size() != full_dim()) throw DimensionMismatch("restrict_function: size mismatch");
  return f.tail(dim()) - Vec::Constant(dim(), f(0));
}

Vec ReducedBasis::lift_function(const Vec& coords) const {
  if (coords.size() != dim()) throw DimensionMismatch("lift_function: size mismatch");
  Vec raw = Vec::Zero(full_dim());
  raw.tail(dim()) = coords;
  return raw - Vec::Constant(full_dim(), pi.dot(raw));
}

OperatorOnZeroSum drift_operator(const PiReturnProcess& pr) {
  ReducedBasis basis(pr.spectral.pi);
  const int d = basis.dim();
  OperatorOnZeroSum op{Mat(d, d), BasisKind::measure_side, 0};
  const Mat adjoint = pr.p_pi.transpose();
  const double perron = 1.0 - pr.spectral.lambda;
  for (int j = 0; j < d; ++j) {
    Vec xi = basis.lift_measure(Vec::Unit(d, j));
    op.reduced.col(j) = basis.restrict_measure(adjoint * xi - perron * xi);
  }
  return op;
}

OperatorOnZeroSum diffusion_operator(const PiReturnProcess& pr) {
  ReducedBasis basis(pr.spectral.pi);
  const int d = basis.dim();
  OperatorOnZeroSum op{Mat(d, d), BasisKind::measure_side, 0};
  std::vector<Vec> dual(d);
  for (int j = 0; j < d; ++j) dual[j] = basis.lift_function(Vec::Unit(d, j));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      double a = dirichlet_bilinear(pr, dual[i], dual[j]);
      op.reduced(i, j) = a;
      op.reduced(j, i) = a;
    }
  return op;
}

}  // namespace fvlab
