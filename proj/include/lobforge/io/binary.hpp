#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace lobforge::io {

// Little-endian binary writer/reader for the container formats. The writer
// keeps a running CRC-32 so containers can end with a trailing checksum.

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path);
  ~BinaryWriter();

  void write_bytes(const void* data, std::size_t len);
  void write_u8(std::uint8_t v);
  void write_u16(std::uint16_t v);
  void write_u32(std::uint32_t v);
  void write_u64(std::uint64_t v);
  void write_i64(std::int64_t v);
  void write_f32(float v);
  void write_f64(double v);
  void write_string(const std::string& s);  // u32 length + bytes
  void write_f32_array(const float* data, std::size_t n);

  std::uint32_t crc() const { return crc_; }
  void write_crc_trailer();  // appends current CRC, not itself checksummed
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::uint32_t crc_ = 0;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path);

  void read_bytes(void* data, std::size_t len);
  std::uint8_t read_u8();
  std::uint16_t read_u16();
  std::uint32_t read_u32();
  std::uint64_t read_u64();
  std::int64_t read_i64();
  float read_f32();
  double read_f64();
  std::string read_string();
  void read_f32_array(float* data, std::size_t n);

  std::uint32_t crc() const { return crc_; }
  // Reads the trailing CRC (not folded into the running CRC) and compares.
  void verify_crc_trailer();
  bool at_end();
  std::size_t remaining() const;

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::string path_;
  std::uint32_t crc_ = 0;
};

}  // namespace lobforge::io
