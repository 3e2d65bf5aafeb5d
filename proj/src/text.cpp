#include "lexground/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace lexground {
namespace {

struct Range {
  char32_t lo, hi;
};

// General categories N* (Nd, Nl, No).
constexpr std::array kNumberRanges{
    Range{0x0030, 0x0039}, Range{0x00B2, 0x00B3}, Range{0x00B9, 0x00B9},
    Range{0x00BC, 0x00BE}, Range{0x0660, 0x0669}, Range{0x06F0, 0x06F9},
    Range{0x07C0, 0x07C9}, Range{0x0966, 0x096F}, Range{0x09E6, 0x09EF},
    Range{0x09F4, 0x09F9}, Range{0x0A66, 0x0A6F}, Range{0x0AE6, 0x0AEF},
    Range{0x0B66, 0x0B6F}, Range{0x0BE6, 0x0BF2}, Range{0x0C66, 0x0C6F},
    Range{0x0CE6, 0x0CEF}, Range{0x0D66, 0x0D78}, Range{0x0E50, 0x0E59},
    Range{0x0ED0, 0x0ED9}, Range{0x0F20, 0x0F33}, Range{0x1040, 0x1049},
    Range{0x1369, 0x137C}, Range{0x16EE, 0x16F0}, Range{0x17E0, 0x17E9},
    Range{0x1810, 0x1819}, Range{0x2070, 0x2070}, Range{0x2074, 0x2079},
    Range{0x2080, 0x2089}, Range{0x2150, 0x2182}, Range{0x2185, 0x2189},
    Range{0x2460, 0x249B}, Range{0x24EA, 0x24FF}, Range{0x2776, 0x2793},
    Range{0x2CFD, 0x2CFD}, Range{0x3007, 0x3007}, Range{0x3021, 0x3029},
    Range{0x3038, 0x303A}, Range{0x3192, 0x3195}, Range{0x3220, 0x3229},
    Range{0x3248, 0x324F}, Range{0x3251, 0x325F}, Range{0x3280, 0x3289},
    Range{0x32B1, 0x32BF}, Range{0xFF10, 0xFF19},
};

// General categories P* (Pc, Pd, Ps, Pe, Pi, Pf, Po). ASCII symbols such as
// '$', '+', '<', '=', '>', '^', '`', '|', '~' are category S and are kept.
constexpr std::array kPunctuationRanges{
    Range{0x0021, 0x0023}, Range{0x0025, 0x002A}, Range{0x002C, 0x002F},
    Range{0x003A, 0x003B}, Range{0x003F, 0x0040}, Range{0x005B, 0x005D},
    Range{0x005F, 0x005F}, Range{0x007B, 0x007B}, Range{0x007D, 0x007D},
    Range{0x00A1, 0x00A1}, Range{0x00A7, 0x00A7}, Range{0x00AB, 0x00AB},
    Range{0x00B6, 0x00B7}, Range{0x00BB, 0x00BB}, Range{0x00BF, 0x00BF},
    Range{0x037E, 0x037E}, Range{0x0387, 0x0387}, Range{0x055A, 0x055F},
    Range{0x0589, 0x058A}, Range{0x05BE, 0x05BE}, Range{0x05C0, 0x05C0},
    Range{0x05C3, 0x05C3}, Range{0x05C6, 0x05C6}, Range{0x05F3, 0x05F4},
    Range{0x0609, 0x060A}, Range{0x060C, 0x060D}, Range{0x061B, 0x061B},
    Range{0x061E, 0x061F}, Range{0x066A, 0x066D}, Range{0x06D4, 0x06D4},
    Range{0x0964, 0x0965}, Range{0x0970, 0x0970}, Range{0x0E4F, 0x0E4F},
    Range{0x0E5A, 0x0E5B}, Range{0x10FB, 0x10FB}, Range{0x1360, 0x1368},
    Range{0x166E, 0x166E}, Range{0x169B, 0x169C}, Range{0x16EB, 0x16ED},
    Range{0x17D4, 0x17D6}, Range{0x17D8, 0x17DA}, Range{0x1800, 0x180A},
    Range{0x2010, 0x2027}, Range{0x2030, 0x2043}, Range{0x2045, 0x2051},
    Range{0x2053, 0x205E}, Range{0x207D, 0x207E}, Range{0x208D, 0x208E},
    Range{0x2308, 0x230B}, Range{0x2329, 0x232A}, Range{0x2768, 0x2775},
    Range{0x27C5, 0x27C6}, Range{0x27E6, 0x27EF}, Range{0x2983, 0x2998},
    Range{0x29D8, 0x29DB}, Range{0x29FC, 0x29FD}, Range{0x2CF9, 0x2CFC},
    Range{0x2CFE, 0x2CFF}, Range{0x2E00, 0x2E2E}, Range{0x2E30, 0x2E4F},
    Range{0x3001, 0x3003}, Range{0x3008, 0x3011}, Range{0x3014, 0x301F},
    Range{0x3030, 0x3030}, Range{0x303D, 0x303D}, Range{0x30A0, 0x30A0},
    Range{0x30FB, 0x30FB}, Range{0xFE10, 0xFE19}, Range{0xFE30, 0xFE52},
    Range{0xFE54, 0xFE61}, Range{0xFE63, 0xFE63}, Range{0xFE68, 0xFE68},
    Range{0xFE6A, 0xFE6B}, Range{0xFF01, 0xFF03}, Range{0xFF05, 0xFF0A},
    Range{0xFF0C, 0xFF0F}, Range{0xFF1A, 0xFF1B}, Range{0xFF1F, 0xFF20},
    Range{0xFF3B, 0xFF3D}, Range{0xFF3F, 0xFF3F}, Range{0xFF5B, 0xFF5B},
    Range{0xFF5D, 0xFF5D}, Range{0xFF5F, 0xFF65},
};

template <std::size_t N>
bool in_ranges(const std::array<Range, N>& ranges, char32_t c) {
  auto it = std::upper_bound(ranges.begin(), ranges.end(), c,
                             [](char32_t v, const Range& r) { return v < r.lo; });
  if (it == ranges.begin()) return false;
  --it;
  return c <= it->hi;
}

bool is_deleted(char32_t c) {
  return in_ranges(kNumberRanges, c) || in_ranges(kPunctuationRanges, c);
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c >= 0x100 && c <= 0x137 && c != 0x130) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  return c;
}

// Decodes one code point, advancing `pos`. Invalid sequences yield U+FFFD.
char32_t decode(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++pos;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + len > s.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void encode(char32_t c, std::string& out) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

}  // namespace

std::vector<std::string> normalize_text(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const char32_t c = decode(raw, pos);
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (is_deleted(c)) continue;
    encode(to_lower(c), current);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace lexground
