#include "lobforge/io/binary.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

#include "lobforge/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "container formats assume a little-endian host");

namespace lobforge::io {

BinaryWriter::BinaryWriter(const std::string& path)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw IoError("cannot write " + path);
}

BinaryWriter::~BinaryWriter() = default;

void BinaryWriter::write_bytes(const void* data, std::size_t len) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  if (!out_) throw IoError("write failure on " + path_);
  crc_ = static_cast<std::uint32_t>(
      ::crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

void BinaryWriter::write_u8(std::uint8_t v) { write_bytes(&v, 1); }
void BinaryWriter::write_u16(std::uint16_t v) { write_bytes(&v, 2); }
void BinaryWriter::write_u32(std::uint32_t v) { write_bytes(&v, 4); }
void BinaryWriter::write_u64(std::uint64_t v) { write_bytes(&v, 8); }
void BinaryWriter::write_i64(std::int64_t v) { write_bytes(&v, 8); }
void BinaryWriter::write_f32(float v) { write_bytes(&v, 4); }
void BinaryWriter::write_f64(double v) { write_bytes(&v, 8); }

void BinaryWriter::write_string(const std::string& s) {
  write_u32(static_cast<std::uint32_t>(s.size()));
  if (!s.empty()) write_bytes(s.data(), s.size());
}

void BinaryWriter::write_f32_array(const float* data, std::size_t n) {
  if (n) write_bytes(data, n * sizeof(float));
}

void BinaryWriter::write_crc_trailer() {
  const std::uint32_t v = crc_;
  out_.write(reinterpret_cast<const char*>(&v), 4);
  if (!out_) throw IoError("write failure on " + path_);
}

void BinaryWriter::close() {
  out_.close();
  if (!out_) throw IoError("close failure on " + path_);
}

BinaryReader::BinaryReader(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  buf_.assign((std::istreambuf_iterator<char>(in)),
              std::istreambuf_iterator<char>());
}

void BinaryReader::read_bytes(void* data, std::size_t len) {
  if (pos_ + len > buf_.size())
    throw CorruptChecksum("unexpected end of file in " + path_);
  std::memcpy(data, buf_.data() + pos_, len);
  crc_ = static_cast<std::uint32_t>(
      ::crc32(crc_, buf_.data() + pos_, static_cast<uInt>(len)));
  pos_ += len;
}

std::uint8_t BinaryReader::read_u8() { std::uint8_t v; read_bytes(&v, 1); return v; }
std::uint16_t BinaryReader::read_u16() { std::uint16_t v; read_bytes(&v, 2); return v; }
std::uint32_t BinaryReader::read_u32() { std::uint32_t v; read_bytes(&v, 4); return v; }
std::uint64_t BinaryReader::read_u64() { std::uint64_t v; read_bytes(&v, 8); return v; }
std::int64_t BinaryReader::read_i64() { std::int64_t v; read_bytes(&v, 8); return v; }
float BinaryReader::read_f32() { float v; read_bytes(&v, 4); return v; }
double BinaryReader::read_f64() { double v; read_bytes(&v, 8); return v; }

std::string BinaryReader::read_string() {
  const std::uint32_t len = read_u32();
  std::string s(len, '\0');
  if (len) read_bytes(s.data(), len);
  return s;
}

void BinaryReader::read_f32_array(float* data, std::size_t n) {
  if (n) read_bytes(data, n * sizeof(float));
}

void BinaryReader::verify_crc_trailer() {
  const std::uint32_t expected = crc_;
  if (pos_ + 4 > buf_.size())
    throw CorruptChecksum("missing CRC trailer in " + path_);
  std::uint32_t stored;
  std::memcpy(&stored, buf_.data() + pos_, 4);
  pos_ += 4;
  if (stored != expected)
    throw CorruptChecksum("CRC mismatch in " + path_);
}

bool BinaryReader::at_end() { return pos_ >= buf_.size(); }
std::size_t BinaryReader::remaining() const { return buf_.size() - pos_; }

}  // namespace lobforge::io
