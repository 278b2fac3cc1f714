#include "vsp/io.hpp"

#include <unistd.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace vsp::io {
namespace {

constexpr std::array<char, 4> kMagic = {'V', 'S', 'P', 'M'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kDtypeC128 = 1;
constexpr std::uint16_t kDtypeF64 = 2;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

template <typename T>
void put_le(std::ostream& os, T value) {
  // Payload is little endian; this codebase targets little-endian hosts.
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

void write_header(std::ostream& os, std::uint16_t dtype, std::uint64_t rows,
                  std::uint64_t cols) {
  os.write(kMagic.data(), kMagic.size());
  put_le(os, kVersion);
  put_le(os, dtype);
  put_le(os, rows);
  put_le(os, cols);
}

Complex parse_complex_cell(const std::string& cell, const std::filesystem::path& path) {
  // Accepted forms: "a", "ai", "a+bi", "a-bi" (also 'j' for the unit).
  std::string s;
  for (char c : cell) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c == 'j' ? 'i' : c);
  }
  if (s.empty()) fail(path, "empty CSV cell");

  auto parse_num = [&](const char* first, const char* last, double& out) {
    if (first < last && *first == '+') ++first;  // from_chars rejects leading '+'
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{}) fail(path, "bad numeric cell '" + cell + "'");
    return ptr;
  };

  const bool imaginary_only = s.back() == 'i';
  if (!imaginary_only) {
    double re = 0.0;
    const char* end = parse_num(s.data(), s.data() + s.size(), re);
    if (end != s.data() + s.size()) fail(path, "bad numeric cell '" + cell + "'");
    return Complex(re, 0.0);
  }

  s.pop_back();  // drop the unit
  if (s.empty() || s == "+" || s == "-") return Complex(0.0, s == "-" ? -1.0 : 1.0);

  // Split at the last sign that is not an exponent sign and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    double im = 0.0;
    const char* end = parse_num(s.data(), s.data() + s.size(), im);
    if (end != s.data() + s.size()) fail(path, "bad numeric cell '" + cell + "'");
    return Complex(0.0, im);
  }
  double re = 0.0;
  const char* mid = parse_num(s.data(), s.data() + split, re);
  if (mid != s.data() + split) fail(path, "bad numeric cell '" + cell + "'");
  double im = 0.0;
  if (split + 1 == s.size()) {
    im = 1.0;
  } else {
    const char* end = parse_num(s.data() + split + 1, s.data() + s.size(), im);
    if (end != s.data() + s.size()) fail(path, "bad numeric cell '" + cell + "'");
  }
  if (s[split] == '-') im = -im;
  return Complex(re, im);
}

}  // namespace

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  const fs::path dir = path.parent_path().empty() ? "." : path.parent_path();
  fs::create_directories(dir);
  const fs::path tmp = dir / (path.filename().string() + ".tmp" +
                              std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(tmp, "cannot open for writing");
    writer(os);
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(tmp, "write failed");
    }
  }
  fs::rename(tmp, path);
}

std::string format_double(double value) {
  for (int precision = 1; precision <= 17; ++precision) {
    std::array<char, 40> buf{};
    const int len =
        std::snprintf(buf.data(), buf.size(), "%.*g", precision, value);
    double parsed = 0.0;
    std::from_chars(buf.data(), buf.data() + len, parsed);
    if (parsed == value || (std::isnan(parsed) && std::isnan(value))) {
      return std::string(buf.data(), static_cast<std::size_t>(len));
    }
  }
  return "0";  // unreachable for finite doubles
}

void write_vspm(const std::filesystem::path& path, const ComplexMatrix& mat) {
  atomic_write(path, [&](std::ostream& os) {
    write_header(os, kDtypeC128, static_cast<std::uint64_t>(mat.rows()),
                 static_cast<std::uint64_t>(mat.cols()));
    for (Index r = 0; r < mat.rows(); ++r) {
      for (Index c = 0; c < mat.cols(); ++c) {
        put_le(os, mat(r, c).real());
        put_le(os, mat(r, c).imag());
      }
    }
  });
}

void write_vspm_real(const std::filesystem::path& path, const RealMatrix& mat) {
  atomic_write(path, [&](std::ostream& os) {
    write_header(os, kDtypeF64, static_cast<std::uint64_t>(mat.rows()),
                 static_cast<std::uint64_t>(mat.cols()));
    for (Index r = 0; r < mat.rows(); ++r) {
      for (Index c = 0; c < mat.cols(); ++c) put_le(os, mat(r, c));
    }
  });
}

ComplexMatrix read_vspm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(path, "cannot open");
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) fail(path, "not a VSPM container (bad magic)");
  const auto version = get_le<std::uint16_t>(is);
  if (version != kVersion) fail(path, "unsupported VSPM version");
  const auto dtype = get_le<std::uint16_t>(is);
  const auto rows = get_le<std::uint64_t>(is);
  const auto cols = get_le<std::uint64_t>(is);
  if (!is) fail(path, "truncated VSPM header");
  if (rows > (1ULL << 32) || cols > (1ULL << 32)) fail(path, "implausible dimensions");

  ComplexMatrix mat(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index r = 0; r < mat.rows(); ++r) {
    for (Index c = 0; c < mat.cols(); ++c) {
      if (dtype == kDtypeC128) {
        const double re = get_le<double>(is);
        const double im = get_le<double>(is);
        mat(r, c) = Complex(re, im);
      } else if (dtype == kDtypeF64) {
        mat(r, c) = Complex(get_le<double>(is), 0.0);
      } else {
        fail(path, "unknown VSPM dtype tag");
      }
    }
  }
  if (!is) fail(path, "truncated VSPM payload");
  return mat;
}

ComplexMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(path, "cannot open");
  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<Complex> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_complex_cell(cell, path));
    if (row.empty()) continue;
    if (!rows.empty() && rows.front().size() != row.size()) {
      fail(path, "ragged CSV rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "empty CSV");
  ComplexMatrix mat(static_cast<Index>(rows.size()),
                    static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < mat.rows(); ++r) {
    for (Index c = 0; c < mat.cols(); ++c) {
      mat(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return mat;
}

void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& mat) {
  atomic_write(path, [&](std::ostream& os) {
    for (Index r = 0; r < mat.rows(); ++r) {
      for (Index c = 0; c < mat.cols(); ++c) {
        if (c) os << ',';
        os << format_double(mat(r, c).real());
        const double im = mat(r, c).imag();
        if (im != 0.0) {
          if (im > 0.0 || std::isnan(im)) os << '+';
          os << format_double(im) << 'i';
        }
      }
      os << '\n';
    }
  });
}

ComplexMatrix read_matrix_auto(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? read_matrix_csv(path) : read_vspm(path);
}

void write_matrix_auto(const std::filesystem::path& path, const ComplexMatrix& mat) {
  if (path.extension() == ".csv") {
    write_matrix_csv(path, mat);
  } else {
    write_vspm(path, mat);
  }
}

RealMatrix read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(path, "cannot open");
  std::string tag;
  is >> tag;
  if (tag != "P2" && tag != "P5") fail(path, "not a plain/raw PGM (need P2 or P5)");

  auto next_token = [&]() -> long {
    // Skips whitespace and '#' comment lines.
    while (true) {
      const int c = is.peek();
      if (c == '#') {
        std::string comment;
        std::getline(is, comment);
      } else if (std::isspace(c)) {
        is.get();
      } else {
        break;
      }
    }
    long value = 0;
    if (!(is >> value)) fail(path, "truncated PGM header");
    return value;
  };

  const long cols = next_token();
  const long rows = next_token();
  const long maxval = next_token();
  if (cols <= 0 || rows <= 0 || maxval <= 0 || maxval > 65535) {
    fail(path, "bad PGM header");
  }

  RealMatrix img(rows, cols);
  if (tag == "P2") {
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        long value = 0;
        if (!(is >> value)) fail(path, "truncated PGM pixels");
        img(r, c) = static_cast<double>(value) / static_cast<double>(maxval);
      }
    }
  } else {
    is.get();  // single whitespace after maxval
    const bool wide = maxval > 255;
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        int value = is.get();
        if (wide) value = value * 256 + is.get();
        if (!is) fail(path, "truncated PGM pixels");
        img(r, c) = static_cast<double>(value) / static_cast<double>(maxval);
      }
    }
  }
  return img;
}

}  // namespace vsp::io
