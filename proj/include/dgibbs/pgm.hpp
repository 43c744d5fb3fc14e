#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "dgibbs/errors.hpp"

namespace dgibbs {

struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<int> pixels;  // row-major, height*width
};

namespace detail {

// next whitespace-delimited token, skipping '#' comment lines
inline std::string pgm_token(std::istream& in, std::size_t& offset) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    ++offset;
    if (ch == '#') {
      while ((ch = in.get()) != EOF) {
        ++offset;
        if (ch == '\n') break;
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

inline int pgm_int(std::istream& in, std::size_t& offset, const char* what) {
  const std::string tok = pgm_token(in, offset);
  if (tok.empty()) throw ParseError(std::string("pgm: missing ") + what, offset);
  for (char c : tok)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError(std::string("pgm: bad ") + what + " '" + tok + "'", offset);
  return std::stoi(tok);
}

}  // namespace detail

// P2 (ascii) and P5 (binary) readers, maxval up to 65535.
inline PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("pgm: cannot open " + path, 0);
  std::size_t offset = 0;

  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  offset += 2;
  if (m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw ParseError("pgm: not a P2/P5 file", 0);
  const bool binary = (m1 == '5');

  PgmImage img;
  img.width = detail::pgm_int(in, offset, "width");
  img.height = detail::pgm_int(in, offset, "height");
  img.maxval = detail::pgm_int(in, offset, "maxval");
  if (img.width <= 0 || img.height <= 0)
    throw ParseError("pgm: non-positive dimensions", offset);
  if (img.maxval <= 0 || img.maxval > 65535)
    throw ParseError("pgm: maxval out of range", offset);

  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);
  if (binary) {
    // header ends with the single whitespace byte consumed by pgm_int
    const int bytes = img.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * static_cast<std::size_t>(bytes));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw ParseError("pgm: truncated raster", offset + static_cast<std::size_t>(in.gcount()));
    for (std::size_t i = 0; i < count; ++i) {
      img.pixels[i] = bytes == 1 ? raw[i]
                                 : (static_cast<int>(raw[2 * i]) << 8) | raw[2 * i + 1];
    }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      img.pixels[i] = detail::pgm_int(in, offset, "pixel");
  }
  for (int p : img.pixels)
    if (p < 0 || p > img.maxval) throw ParseError("pgm: pixel exceeds maxval", offset);
  return img;
}

inline void write_pgm(const std::string& path, const PgmImage& img, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("pgm: cannot write " + path, 0);
  out << (binary ? "P5" : "P2") << "\n"
      << img.width << " " << img.height << "\n"
      << img.maxval << "\n";
  if (binary) {
    const int bytes = img.maxval > 255 ? 2 : 1;
    for (int p : img.pixels) {
      if (bytes == 2) out.put(static_cast<char>((p >> 8) & 0xff));
      out.put(static_cast<char>(p & 0xff));
    }
  } else {
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        out << img.pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(img.width) +
                          static_cast<std::size_t>(c)];
        out << (c + 1 == img.width ? '\n' : ' ');
      }
    }
  }
}

}  // namespace dgibbs
