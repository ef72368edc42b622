#include "rsl/snapshot.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

namespace rsl {

static_assert(std::endian::native == std::endian::little,
              "RSL1 snapshots are defined little-endian; big-endian hosts are "
              "not supported");

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_header(std::FILE* f, const GridSpec& g, int rank) {
  std::fprintf(f, "RSL1 %d %d", g.dim, g.points_per_axis);
  for (int a = 0; a < g.dim; ++a)
    std::fprintf(f, " %.17g", g.side_lengths[a]);
  std::fprintf(f, " %d\n", rank);
}

void save_impl(const std::string& path, const detail::FieldBase& field,
               int rank) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_header(f.get(), field.grid(), rank);
  const auto data = field.data();
  if (std::fwrite(data.data(), sizeof(double), data.size(), f.get()) !=
      data.size())
    throw std::runtime_error("short write to " + path);
}

GridSpec read_header(std::FILE* f, const std::string& path, int expected_rank) {
  char magic[8] = {};
  int dim = 0, n = 0;
  if (std::fscanf(f, "%7s %d %d", magic, &dim, &n) != 3 ||
      std::strcmp(magic, "RSL1") != 0)
    throw std::runtime_error(path + ": not an RSL1 snapshot");
  if (dim != 2 && dim != 3) throw std::runtime_error(path + ": bad dim");
  std::vector<double> lengths(dim);
  for (int a = 0; a < dim; ++a)
    if (std::fscanf(f, "%lg", &lengths[a]) != 1)
      throw std::runtime_error(path + ": truncated header");
  int rank = -1;
  if (std::fscanf(f, "%d", &rank) != 1 || rank != expected_rank)
    throw std::runtime_error(path + ": rank mismatch");
  int c = std::fgetc(f);
  if (c != '\n') throw std::runtime_error(path + ": malformed header");
  return GridSpec::torus(dim, n, lengths);
}

void read_values(std::FILE* f, const std::string& path,
                 detail::FieldBase& field) {
  auto data = field.data();
  if (std::fread(data.data(), sizeof(double), data.size(), f) != data.size())
    throw std::runtime_error(path + ": truncated data");
}

}  // namespace

void save_snapshot(const std::string& path, const ScalarField& f) {
  save_impl(path, f, 0);
}
void save_snapshot(const std::string& path, const VectorField& f) {
  save_impl(path, f, 1);
}
void save_snapshot(const std::string& path, const SymTensorField& f) {
  save_impl(path, f, 2);
}

ScalarField load_scalar_snapshot(const std::string& path, DiffScheme scheme) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  GridSpec g = read_header(f.get(), path, 0);
  g.scheme = scheme;
  ScalarField out(g);
  read_values(f.get(), path, out);
  return out;
}

VectorField load_vector_snapshot(const std::string& path, DiffScheme scheme) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  GridSpec g = read_header(f.get(), path, 1);
  g.scheme = scheme;
  VectorField out(g);
  read_values(f.get(), path, out);
  return out;
}

SymTensorField load_sym_snapshot(const std::string& path, DiffScheme scheme) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  GridSpec g = read_header(f.get(), path, 2);
  g.scheme = scheme;
  SymTensorField out(g);
  read_values(f.get(), path, out);
  return out;
}

MetricField load_metric_snapshot(const std::string& path, DiffScheme scheme) {
  return MetricField::from_tensor(load_sym_snapshot(path, scheme));
}

namespace {

void write_csv_impl(const std::string& path, const detail::FieldBase& field,
                    const char* const* comp_names) {
  FilePtr f(std::fopen(path.c_str(), "w"));
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  const GridSpec& g = field.grid();
  std::fprintf(f.get(), "x");
  for (int a = 1; a < g.dim; ++a) std::fprintf(f.get(), ",%c", 'x' + a);
  for (int c = 0; c < field.components(); ++c)
    std::fprintf(f.get(), ",%s", comp_names[c]);
  std::fprintf(f.get(), "\n");
  const std::size_t nodes = g.node_count();
  const auto data = field.data();
  for (std::size_t n = 0; n < nodes; ++n) {
    const auto c = g.node_coords(n);
    std::fprintf(f.get(), "%.17g", g.coord(0, c[0]));
    for (int a = 1; a < g.dim; ++a)
      std::fprintf(f.get(), ",%.17g", g.coord(a, c[a]));
    for (int k = 0; k < field.components(); ++k)
      std::fprintf(f.get(), ",%.17g", data[n * field.components() + k]);
    std::fprintf(f.get(), "\n");
  }
}

}  // namespace

void write_csv(const std::string& path, const ScalarField& f) {
  static const char* names[] = {"value"};
  write_csv_impl(path, f, names);
}

void write_csv(const std::string& path, const VectorField& f) {
  static const char* names[] = {"v0", "v1", "v2"};
  write_csv_impl(path, f, names);
}

void write_csv(const std::string& path, const SymTensorField& f) {
  static const char* names2[] = {"h00", "h01", "h11"};
  static const char* names3[] = {"h00", "h01", "h02", "h11", "h12", "h22"};
  write_csv_impl(path, f, f.grid().dim == 2 ? names2 : names3);
}

}  // namespace rsl
