#include "ds1/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ds1 {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), tmp_(path.string() + ".part") {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open " + tmp_.string() + " for writing");
  }

  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  template <class T>
  void put(T v) {
    v = byteswap_if_big(v);
    bytes(&v, sizeof(T));
  }
  void doubles(const double* p, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(p, n * sizeof(double));
    } else {
      for (std::size_t i = 0; i < n; ++i) put(p[i]);
    }
  }

  // Written to a temporary name and renamed so readers never see half files.
  void commit() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed: " + tmp_.string());
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }

  void bytes(void* p, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      std::ostringstream os;
      os << path_.string() << ": truncated while reading " << what;
      throw FormatError(os.str());
    }
  }
  template <class T>
  T get(const char* what) {
    T v;
    bytes(&v, sizeof(T), what);
    return byteswap_if_big(v);
  }
  void doubles(double* p, std::size_t n) {
    bytes(p, n * sizeof(double), "field data");
    if constexpr (std::endian::native == std::endian::big)
      for (std::size_t i = 0; i < n; ++i) p[i] = byteswap_if_big(p[i]);
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

void put_header(Writer& w, const SnapshotHeader& h) {
  w.bytes("DS1F", 4);
  w.put<std::uint32_t>(h.version);
  w.put<std::uint64_t>(h.n_xi);
  w.put<std::uint64_t>(h.n_eta);
  w.put<double>(h.l_xi);
  w.put<double>(h.l_eta);
  w.put<double>(h.time);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(h.representation));
}

SnapshotHeader get_header(Reader& r) {
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, "DS1F", 4) != 0) throw FormatError(r.path().string() + ": bad magic (expected DS1F)");
  SnapshotHeader h;
  h.version = r.get<std::uint32_t>("version");
  if (h.version != kSnapshotVersion) {
    std::ostringstream os;
    os << r.path().string() << ": unsupported snapshot version " << h.version;
    throw FormatError(os.str());
  }
  h.n_xi = r.get<std::uint64_t>("n_xi");
  h.n_eta = r.get<std::uint64_t>("n_eta");
  h.l_xi = r.get<double>("l_xi");
  h.l_eta = r.get<double>("l_eta");
  h.time = r.get<double>("time");
  const auto rep = r.get<std::uint8_t>("representation");
  if (rep > 1) throw FormatError(r.path().string() + ": bad representation byte");
  h.representation = static_cast<Representation>(rep);
  return h;
}

SnapshotHeader header_for(const SpectralGrid& g, double time, Representation rep) {
  SnapshotHeader h;
  h.n_xi = g.n_xi();
  h.n_eta = g.n_eta();
  h.l_xi = g.l_xi();
  h.l_eta = g.l_eta();
  h.time = time;
  h.representation = rep;
  return h;
}

void put_field(Writer& w, const ComplexField& f) {
  static_assert(sizeof(cplx) == 2 * sizeof(double));
  w.doubles(reinterpret_cast<const double*>(f.values().data()), 2 * f.values().size());
}

Snapshot get_snapshot(Reader& r, const std::optional<SpectralGrid>& grid) {
  const SnapshotHeader h = get_header(r);
  SpectralGrid g;
  if (grid) {
    if (grid->n_xi() != h.n_xi || grid->n_eta() != h.n_eta || grid->l_xi() != h.l_xi || grid->l_eta() != h.l_eta) {
      std::ostringstream os;
      os << r.path().string() << ": grid mismatch (file " << h.n_xi << "x" << h.n_eta << " over " << h.l_xi << "x"
         << h.l_eta << ", expected " << grid->n_xi() << "x" << grid->n_eta() << " over " << grid->l_xi() << "x"
         << grid->l_eta() << ")";
      throw FormatError(os.str());
    }
    g = *grid;
  } else {
    g = make_grid(h.n_xi, h.n_eta, h.l_xi, h.l_eta);
  }
  ComplexField f(g, h.representation);
  r.doubles(reinterpret_cast<double*>(f.values().data()), 2 * f.values().size());
  return Snapshot{std::move(f), h.time};
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double time) {
  Writer w(path);
  put_header(w, header_for(field.grid(), time, field.representation()));
  put_field(w, field);
  w.commit();
}

void write_snapshot(const std::filesystem::path& path, const RealField& field, double time) {
  write_snapshot(path, to_complex(field), time);
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
  Reader r(path);
  return get_header(r);
}

Snapshot read_snapshot(const std::filesystem::path& path, const std::optional<SpectralGrid>& grid) {
  Reader r(path);
  return get_snapshot(r, grid);
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  Writer w(path);
  put_header(w, header_for(cp.state.field.grid(), cp.state.time, cp.state.field.representation()));
  put_field(w, cp.state.field);
  w.bytes("DS1C", 4);
  w.put<std::uint64_t>(cp.trailer.step);
  w.put<std::uint64_t>(cp.trailer.config_hash);
  w.put<double>(cp.trailer.initial_mass);
  w.put<std::uint64_t>(cp.trailer.records);
  w.commit();
}

Checkpoint read_checkpoint(const std::filesystem::path& path, const std::optional<SpectralGrid>& grid) {
  Reader r(path);
  Checkpoint cp;
  cp.state = get_snapshot(r, grid);
  char magic[4];
  r.bytes(magic, 4, "checkpoint trailer");
  if (std::memcmp(magic, "DS1C", 4) != 0) throw FormatError(path.string() + ": missing checkpoint trailer");
  cp.trailer.step = r.get<std::uint64_t>("step");
  cp.trailer.config_hash = r.get<std::uint64_t>("config hash");
  cp.trailer.initial_mass = r.get<double>("initial mass");
  cp.trailer.records = r.get<std::uint64_t>("record count");
  return cp;
}

}  // namespace ds1
