#pragma once

#include <string>

#include "rsl/field.hpp"

namespace rsl {

/// Field snapshot format "RSL1":
///   one ASCII header line `RSL1 dim N L_1..L_n rank\n` (rank 0|1|2),
///   then node_count * components little-endian float64 values, node-major,
///   components in the documented order (vector: j ascending; symmetric
///   tensor: (i,j) i<=j lexicographic).  Node order: axis 0 fastest.
void save_snapshot(const std::string& path, const ScalarField& f);
void save_snapshot(const std::string& path, const VectorField& f);
void save_snapshot(const std::string& path, const SymTensorField& f);

ScalarField load_scalar_snapshot(const std::string& path,
                                 DiffScheme scheme = DiffScheme::CentralO2);
VectorField load_vector_snapshot(const std::string& path,
                                 DiffScheme scheme = DiffScheme::CentralO2);
SymTensorField load_sym_snapshot(const std::string& path,
                                 DiffScheme scheme = DiffScheme::CentralO2);
MetricField load_metric_snapshot(const std::string& path,
                                 DiffScheme scheme = DiffScheme::CentralO2);

/// Debug CSV: one node per row, coordinates then components, %.17g.
void write_csv(const std::string& path, const ScalarField& f);
void write_csv(const std::string& path, const VectorField& f);
void write_csv(const std::string& path, const SymTensorField& f);

}  // namespace rsl
