#include "lobforge/io/png.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "lobforge/errors.hpp"

namespace lobforge::io {

namespace {

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32be(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
  put_u32be(out, static_cast<std::uint32_t>(len));
  std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data, data + len);
  const std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + crc_start, static_cast<uInt>(4 + len)));
  put_u32be(out, crc);
}

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace

void write_png_gray8(const std::string& path, std::size_t width,
                     std::size_t height, const std::uint8_t* pixels,
                     const std::string& meta_text) {
  if (width == 0 || height == 0) throw OutOfRange("empty image");

  // Scanlines with filter byte 0 prepended.
  std::vector<std::uint8_t> raw;
  raw.reserve(height * (width + 1));
  for (std::size_t y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), pixels + y * width, pixels + (y + 1) * width);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(),
                static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK)
    throw IoError("deflate failed for " + path);
  comp.resize(comp_len);

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kSignature, kSignature + 8);

  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(width);
  ihdr[4] = static_cast<std::uint8_t>(height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // no interlace
  append_chunk(out, "IHDR", ihdr, sizeof(ihdr));

  if (!meta_text.empty()) {
    std::vector<std::uint8_t> text;
    const char* keyword = "lobforge";
    text.insert(text.end(), keyword, keyword + std::strlen(keyword));
    text.push_back(0);
    text.insert(text.end(), meta_text.begin(), meta_text.end());
    append_chunk(out, "tEXt", text.data(), text.size());
  }

  append_chunk(out, "IDAT", comp.data(), comp.size());
  append_chunk(out, "IEND", nullptr, 0);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failure on " + path);
}

PngImage read_png_gray8(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kSignature, 8) != 0)
    throw VersionMismatch("not a PNG: " + path);

  PngImage img;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  int bit_depth = 0, color_type = -1;
  while (pos + 12 <= buf.size()) {
    const std::uint32_t len = get_u32be(&buf[pos]);
    if (pos + 12 + len > buf.size()) throw CorruptChecksum("truncated chunk");
    const char* type = reinterpret_cast<const char*>(&buf[pos + 4]);
    const std::uint8_t* data = &buf[pos + 8];
    const std::uint32_t want_crc = get_u32be(&buf[pos + 8 + len]);
    const std::uint32_t got_crc = static_cast<std::uint32_t>(
        ::crc32(0, &buf[pos + 4], static_cast<uInt>(4 + len)));
    if (want_crc != got_crc) throw CorruptChecksum("bad chunk CRC");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      img.width = get_u32be(data);
      img.height = get_u32be(data + 4);
      bit_depth = data[8];
      color_type = data[9];
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "tEXt", 4) == 0) {
      const std::uint8_t* sep =
          static_cast<const std::uint8_t*>(std::memchr(data, 0, len));
      if (sep) img.meta_text.assign(sep + 1, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (bit_depth != 8 || color_type != 0)
    throw VersionMismatch("only 8-bit grayscale PNG supported");

  const std::size_t stride = img.width + 1;
  std::vector<std::uint8_t> raw(img.height * stride);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(),
                 static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size())
    throw CorruptChecksum("inflate failed");

  img.pixels.resize(img.width * img.height);
  auto paeth = [](int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
  };
  for (std::size_t y = 0; y < img.height; ++y) {
    const std::uint8_t filter = raw[y * stride];
    const std::uint8_t* src = &raw[y * stride + 1];
    std::uint8_t* dst = &img.pixels[y * img.width];
    const std::uint8_t* up = y > 0 ? &img.pixels[(y - 1) * img.width] : nullptr;
    for (std::size_t x = 0; x < img.width; ++x) {
      const int a = x > 0 ? dst[x - 1] : 0;
      const int b = up ? up[x] : 0;
      const int c = (x > 0 && up) ? up[x - 1] : 0;
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw VersionMismatch("unknown PNG filter");
      }
      dst[x] = static_cast<std::uint8_t>(v & 0xff);
    }
  }
  return img;
}

}  // namespace lobforge::io
