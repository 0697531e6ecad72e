#include "bgklr/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>

namespace bgklr {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'L', 'R', 'K'};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  }

  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), std::streamsize(n)); }

  template <class UInt>
  void uint(UInt v) {
    unsigned char buf[sizeof(UInt)];
    for (std::size_t i = 0; i < sizeof(UInt); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf, sizeof buf);
  }

  void real(double x) { uint(std::bit_cast<std::uint64_t>(x)); }

  template <class Derived>
  void matrix(const Eigen::MatrixBase<Derived>& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) real(m(i, j));
  }

  void header(FileKind kind, const std::vector<std::uint64_t>& shape) {
    bytes(kMagic.data(), kMagic.size());
    uint<std::uint32_t>(kFormatVersion);
    uint<std::uint8_t>(static_cast<std::uint8_t>(kind));
    uint<std::uint8_t>(static_cast<std::uint8_t>(shape.size()));
    for (auto s : shape) uint<std::uint64_t>(s);
  }

  void close() {
    out_.close();
    if (!out_) throw Error("write to '" + path_.string() + "' failed");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    in_.open(path, std::ios::binary);
    if (!in_) throw Error("cannot open '" + path.string() + "'");
  }

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), std::streamsize(n));
    if (!in_) throw Error("'" + path_.string() + "': unexpected end of file");
  }

  template <class UInt>
  UInt uint() {
    unsigned char buf[sizeof(UInt)];
    bytes(buf, sizeof buf);
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= UInt(buf[i]) << (8 * i);
    return v;
  }

  double real() { return std::bit_cast<double>(uint<std::uint64_t>()); }

  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = real();
    return m;
  }

  FileHeader header() {
    std::array<char, 4> magic{};
    bytes(magic.data(), magic.size());
    if (magic != kMagic) throw Error("'" + path_.string() + "': not a DLRK file");
    FileHeader h;
    h.version = uint<std::uint32_t>();
    if (h.version != kFormatVersion)
      throw Error("'" + path_.string() + "': unsupported format version " + std::to_string(h.version));
    const auto kind = uint<std::uint8_t>();
    if (kind != 1 && kind != 2) throw Error("'" + path_.string() + "': unknown kind " + std::to_string(kind));
    h.kind = static_cast<FileKind>(kind);
    const auto dims = uint<std::uint8_t>();
    for (unsigned i = 0; i < dims; ++i) h.shape.push_back(uint<std::uint64_t>());
    return h;
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

void write_axes(Writer& w, const ProductGrid& grid) {
  for (const auto& a : grid.axes()) {
    w.real(a.lower);
    w.real(a.upper);
    w.uint<std::uint64_t>(static_cast<std::uint64_t>(a.n));
  }
}

std::vector<AxisSpec> read_axes(Reader& r, std::uint64_t count) {
  std::vector<AxisSpec> axes;
  for (std::uint64_t i = 0; i < count; ++i) {
    AxisSpec a;
    a.lower = r.real();
    a.upper = r.real();
    a.n = static_cast<Index>(r.uint<std::uint64_t>());
    axes.push_back(a);
  }
  return axes;
}

}  // namespace

void write_field(const std::filesystem::path& path, const FieldSnapshot& field) {
  std::uint64_t count = 1;
  std::vector<std::uint64_t> shape;
  for (auto s : field.shape) {
    shape.push_back(static_cast<std::uint64_t>(s));
    count *= static_cast<std::uint64_t>(s);
  }
  if (count != field.values.size()) throw DimensionError("write_field: shape does not match values");
  Writer w(path);
  w.header(FileKind::field, shape);
  for (double x : field.values) w.real(x);
  w.close();
}

FieldSnapshot read_field(const std::filesystem::path& path) {
  Reader r(path);
  const auto h = r.header();
  if (h.kind != FileKind::field) throw Error("'" + path.string() + "': not a field file");
  FieldSnapshot field;
  field.name = path.stem().string();
  std::uint64_t count = 1;
  for (auto s : h.shape) {
    field.shape.push_back(static_cast<Index>(s));
    count *= s;
  }
  field.values.resize(count);
  for (auto& x : field.values) x = r.real();
  return field;
}

void write_checkpoint(const std::filesystem::path& path, const State& s, const ProductGrid& x_grid,
                      const ProductGrid& v_grid) {
  if (s.X.rows() != x_grid.size() || s.V.rows() != v_grid.size() || s.S.rows() != s.X.cols() ||
      s.S.cols() != s.V.cols())
    throw DimensionError("write_checkpoint: factors do not match the grids");
  Writer w(path);
  w.header(FileKind::factors, {std::uint64_t(s.nx()), std::uint64_t(s.rank()), std::uint64_t(s.nv())});
  w.uint<std::uint64_t>(std::uint64_t(x_grid.dims()));
  w.uint<std::uint64_t>(std::uint64_t(v_grid.dims()));
  write_axes(w, x_grid);
  write_axes(w, v_grid);
  w.real(s.time);
  w.matrix(s.X);
  w.matrix(s.S);
  w.matrix(s.V);
  w.close();
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  const auto h = r.header();
  if (h.kind != FileKind::factors || h.shape.size() != 3)
    throw Error("'" + path.string() + "': not a checkpoint file");
  Checkpoint c;
  const auto dx = r.uint<std::uint64_t>();
  const auto dv = r.uint<std::uint64_t>();
  if (dx == 0 || dv == 0 || dx > 8 || dv > 8) throw Error("'" + path.string() + "': bad axis table");
  c.x_axes = read_axes(r, dx);
  c.v_axes = read_axes(r, dv);
  std::uint64_t nx = 1, nv = 1;
  for (const auto& a : c.x_axes) nx *= std::uint64_t(a.n);
  for (const auto& a : c.v_axes) nv *= std::uint64_t(a.n);
  if (nx != h.shape[0] || nv != h.shape[2]) throw Error("'" + path.string() + "': shape does not match axes");
  c.state.time = r.real();
  const auto rank = static_cast<Index>(h.shape[1]);
  c.state.X = r.matrix(Index(nx), rank);
  c.state.S = r.matrix(rank, rank);
  c.state.V = r.matrix(Index(nv), rank);
  c.state.x_orthonormal = orthonormality_defect(c.state.X) <= 1e-10;
  c.state.v_orthonormal = orthonormality_defect(c.state.V) <= 1e-10;
  return c;
}

FileHeader read_header(const std::filesystem::path& path) {
  Reader r(path);
  return r.header();
}

DiagnosticsCsv::DiagnosticsCsv(const std::filesystem::path& path, Index velocity_dims)
    : dims_(velocity_dims) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  out_ << "step,time,rank,mass";
  for (Index i = 0; i < dims_; ++i) out_ << ",momentum_" << (i + 1);
  out_ << ",energy,trunc_tail,wall_ms\n";
  out_.flush();
}

void DiagnosticsCsv::write(const StepReport& r, const MomentumEnergy& me, bool record_wall_time) {
  char buf[64];
  auto real = [&](double x) {
    std::snprintf(buf, sizeof buf, ",%.17g", x);
    out_ << buf;
  };
  out_ << r.step;
  real(r.time);
  out_ << ',' << r.rank;
  real(r.mass);
  for (Index i = 0; i < dims_; ++i) real(i < Index(me.momentum.size()) ? me.momentum[std::size_t(i)] : 0.0);
  real(me.energy);
  real(r.trunc_tail);
  real(record_wall_time ? r.wall_ms : 0.0);
  out_ << '\n';
  out_.flush();
}

}  // namespace bgklr
