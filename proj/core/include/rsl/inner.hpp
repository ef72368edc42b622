#pragma once

#include "rsl/field.hpp"

namespace rsl {

/// Discrete volume measure of a metric: per-node weight sqrt(det g) * prod dx,
/// together with the pointwise inverse metric used to contract tensor indices.
struct InnerProductWeight {
  ScalarField dV;
  SymTensorField inv_metric;
  double total = 0.0;  // discrete Vol(g)
};

InnerProductWeight volume_weight(const MetricField& g);

// Weighted L2 pairings; tensor indices are raised with w.inv_metric.
double inner_product(const ScalarField& a, const ScalarField& b,
                     const InnerProductWeight& w);
double inner_product(const VectorField& a, const VectorField& b,
                     const InnerProductWeight& w);
double inner_product(const SymTensorField& a, const SymTensorField& b,
                     const InnerProductWeight& w);

double l2_norm(const ScalarField& a, const InnerProductWeight& w);
double l2_norm(const VectorField& a, const InnerProductWeight& w);
double l2_norm(const SymTensorField& a, const InnerProductWeight& w);

/// dV-weighted mean of a scalar field.
double mean(const ScalarField& a, const InnerProductWeight& w);

}  // namespace rsl
