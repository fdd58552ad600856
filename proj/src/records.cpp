#include "vicsek/records.hpp"

#include <cstring>

namespace vicsek {

namespace {

constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8 + 8 + 4 + 4;

void put_u32(std::uint8_t* p, std::uint32_t v) { std::memcpy(p, &v, 4); }
void put_u64(std::uint8_t* p, std::uint64_t v) { std::memcpy(p, &v, 8); }
std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}
std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  return v;
}

}  // namespace

RecordWriter::RecordWriter(const std::string& path, const RecordHeader& header)
    : path_(path), header_(header) {
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) throw IoError("cannot open for writing: " + path);
  std::uint8_t buf[kHeaderBytes];
  std::memcpy(buf, kRecordMagic, 8);
  put_u32(buf + 8, header_.version);
  put_u32(buf + 12, header_.d);
  put_u64(buf + 16, header_.n);
  put_u64(buf + 24, header_.config_hash);
  put_u32(buf + 32, header_.system_tag);
  put_u32(buf + 36, header_.reserved);
  write_bytes(buf, kHeaderBytes);
}

RecordWriter::~RecordWriter() {
  if (f_) std::fclose(f_);
}

void RecordWriter::append(std::uint64_t step, double time, const double* x, const double* v) {
  const std::size_t dn = static_cast<std::size_t>(header_.d) * static_cast<std::size_t>(header_.n);
  begin_snapshot(step, time);
  write_doubles(x, dn);
  write_doubles(v, dn);
}

void RecordWriter::begin_snapshot(std::uint64_t step, double time) {
  std::uint8_t buf[16];
  put_u64(buf, step);
  std::memcpy(buf + 8, &time, 8);
  write_bytes(buf, 16);
}

void RecordWriter::write_doubles(const double* p, std::size_t count) {
  write_bytes(p, count * sizeof(double));
}

void RecordWriter::write_bytes(const void* p, std::size_t count) {
  if (!f_) throw IoError("record writer already closed: " + path_);
  if (count && std::fwrite(p, 1, count, f_) != count)
    throw IoError("write failed: " + path_);
}

void RecordWriter::close() {
  if (!f_) return;
  const int rc = std::fclose(f_);
  f_ = nullptr;
  if (rc != 0) throw IoError("close failed: " + path_);
}

namespace {

RecordHeader parse_header(std::FILE* f, const std::string& path) {
  std::uint8_t buf[kHeaderBytes];
  if (std::fread(buf, 1, kHeaderBytes, f) != kHeaderBytes)
    throw IoError("truncated record header in " + path);
  if (std::memcmp(buf, kRecordMagic, 8) != 0)
    throw IoError("not a trajectory record file (bad magic): " + path);
  RecordHeader h;
  h.version = get_u32(buf + 8);
  h.d = get_u32(buf + 12);
  h.n = get_u64(buf + 16);
  h.config_hash = get_u64(buf + 24);
  h.system_tag = get_u32(buf + 32);
  h.reserved = get_u32(buf + 36);
  if (h.version != kRecordVersion)
    throw IoError("unsupported record version " + std::to_string(h.version) + " in " + path);
  if (h.d < 2 || h.d > 3) throw IoError("corrupt record header (d=" + std::to_string(h.d) + ") in " + path);
  return h;
}

}  // namespace

RecordHeader read_record_header(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open for reading: " + path);
  try {
    RecordHeader h = parse_header(f, path);
    std::fclose(f);
    return h;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

RecordFile read_records(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open for reading: " + path);
  RecordFile out;
  try {
    out.header = parse_header(f, path);
    const std::size_t dn =
        static_cast<std::size_t>(out.header.d) * static_cast<std::size_t>(out.header.n);
    std::size_t offset = kHeaderBytes;
    for (;;) {
      std::uint8_t head[16];
      const std::size_t got = std::fread(head, 1, 16, f);
      if (got == 0) break;  // clean end between snapshots
      if (got != 16)
        throw IoError("truncated record at byte offset " + std::to_string(offset) + " in " + path);
      RawSnapshot snap;
      snap.step = get_u64(head);
      std::memcpy(&snap.time, head + 8, 8);
      snap.x.resize(dn);
      snap.v.resize(dn);
      if (std::fread(snap.x.data(), sizeof(double), dn, f) != dn ||
          std::fread(snap.v.data(), sizeof(double), dn, f) != dn)
        throw IoError("truncated record at byte offset " + std::to_string(offset) + " in " + path);
      offset += 16 + 2 * dn * sizeof(double);
      if (!out.snapshots.empty() && snap.time < out.snapshots.back().time)
        throw IoError("records out of time order at byte offset " + std::to_string(offset) +
                      " in " + path);
      out.snapshots.push_back(std::move(snap));
    }
    if (std::ferror(f)) throw IoError("read error in " + path);
    std::fclose(f);
    return out;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

}  // namespace vicsek
