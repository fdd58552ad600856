#pragma once
// Binary trajectory records: a fixed little-endian columnar layout chosen for
// bit-exact round trips of every floating-point value.
//
// File layout:
//   magic   8 bytes  "VICSEKTR"
//   u32     format version (1)
//   u32     d
//   u64     n (particles per snapshot)
//   u64     config_hash
//   u32     system_tag (0 interacting, 1 nonlinear, 2 reference)
//   u32     reserved (0)
// then zero or more snapshots, each:
//   u64     step
//   f64     time
//   f64*d*n positions, component-major (x0[0..n), x1[0..n), ...)
//   f64*d*n velocities, component-major
// Records are append-only and ordered by time within a file.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "vicsek/errors.hpp"
#include "vicsek/state.hpp"

namespace vicsek {

static_assert(std::endian::native == std::endian::little,
              "record format is defined little-endian");
static_assert(sizeof(double) == 8);

inline constexpr char kRecordMagic[8] = {'V', 'I', 'C', 'S', 'E', 'K', 'T', 'R'};
inline constexpr std::uint32_t kRecordVersion = 1;

enum class SystemTag : std::uint32_t { interacting = 0, nonlinear = 1, reference = 2 };

struct RecordHeader {
  std::uint32_t version = kRecordVersion;
  std::uint32_t d = 2;
  std::uint64_t n = 0;
  std::uint64_t config_hash = 0;
  std::uint32_t system_tag = 0;
  std::uint32_t reserved = 0;
};

struct RawSnapshot {
  std::uint64_t step = 0;
  double time = 0.0;
  std::vector<double> x, v;  // component-major, d*n each
};

struct RecordFile {
  RecordHeader header;
  std::vector<RawSnapshot> snapshots;
};

class RecordWriter {
 public:
  RecordWriter(const std::string& path, const RecordHeader& header);
  ~RecordWriter();
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;

  // x and v are component-major arrays of d*n doubles.
  void append(std::uint64_t step, double time, const double* x, const double* v);

  template <int D>
  void append_state(const ParticleState<D>& s) {
    if (static_cast<std::uint32_t>(D) != header_.d || s.n() != header_.n)
      throw IoError("record append: state shape does not match header in " + path_);
    begin_snapshot(s.step, s.time);
    for (int k = 0; k < D; ++k) write_doubles(s.x[static_cast<std::size_t>(k)].data(), s.n());
    for (int k = 0; k < D; ++k) write_doubles(s.v[static_cast<std::size_t>(k)].data(), s.n());
  }

  void close();  // flushes; further appends are errors
  const std::string& path() const { return path_; }

 private:
  void begin_snapshot(std::uint64_t step, double time);
  void write_doubles(const double* p, std::size_t count);
  void write_bytes(const void* p, std::size_t count);

  std::FILE* f_ = nullptr;
  std::string path_;
  RecordHeader header_;
};

RecordHeader read_record_header(const std::string& path);

// Reads the whole file; any malformed or truncated content is an IoError
// naming the byte offset.
RecordFile read_records(const std::string& path);

template <int D>
ParticleState<D> to_state(const RecordHeader& h, const RawSnapshot& snap) {
  if (h.d != static_cast<std::uint32_t>(D))
    throw IoError("record dimension " + std::to_string(h.d) + " does not match reader");
  ParticleState<D> s;
  s.resize(h.n);
  s.step = snap.step;
  s.time = snap.time;
  const std::size_t n = static_cast<std::size_t>(h.n);
  for (int k = 0; k < D; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      s.x[static_cast<std::size_t>(k)][i] = snap.x[static_cast<std::size_t>(k) * n + i];
      s.v[static_cast<std::size_t>(k)][i] = snap.v[static_cast<std::size_t>(k) * n + i];
    }
  return s;
}

}  // namespace vicsek
