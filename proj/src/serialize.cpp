#include "acmp/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace acmp {
namespace {

constexpr std::array<char, 8> magic{'A', 'C', 'M', 'P', 'S', 'E', 'T', '1'};

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> b{};
  for (std::size_t k = 0; k < sizeof(U); ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
  os.write(b.data(), b.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw ParseError("truncated ACMP container");
  U v = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) v |= static_cast<U>(b[k]) << (8 * k);
  return v;
}

void put_i32(std::ostream& os, int v) { put_le(os, static_cast<std::uint32_t>(v)); }
int get_i32(std::istream& is) { return static_cast<std::int32_t>(get_le<std::uint32_t>(is)); }
void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

void put_matrix(std::ostream& os, const Matrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) put_f64(os, m.data()[k]);
}

Matrix get_matrix(std::istream& is, int rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = get_f64(is);
  return m;
}

}  // namespace

void write_set(std::ostream& os, const AcmpSet& set) {
  os.write(magic.data(), magic.size());
  put_i32(os, set.n());
  put_i32(os, set.particles());
  put_f64(os, set.d0().tau);
  const SetShape s = set.shape();
  for (int r : {s.d0_a, s.d0_c, s.child_a, s.child_c}) put_i32(os, r);
  put_matrix(os, set.d0().A);
  put_matrix(os, set.d0().C);
  put_matrix(os, set.child_a());
  put_matrix(os, set.child_c());
}

AcmpSet read_set(std::istream& is) {
  std::array<char, 8> head{};
  if (!is.read(head.data(), head.size()) || head != magic) throw ParseError("not an ACMP container (bad magic)");
  const int n = get_i32(is);
  const int N = get_i32(is);
  if (n < 1 || n > 63 || N < 0 || N > n) throw ParseError("ACMP container has invalid (n, N)");
  Acmp d0;
  d0.N = N;
  d0.tau = get_f64(is);
  std::array<int, 4> rows{};
  for (int& r : rows) {
    r = get_i32(is);
    if (r < 0 || r > 1 << 20) throw ParseError("ACMP container has an invalid row count");
  }
  d0.A = get_matrix(is, rows[0], n);
  d0.C = get_matrix(is, rows[1], n);
  Matrix ca = get_matrix(is, rows[2], static_cast<Eigen::Index>(binomial(n, 2)));
  Matrix cc = get_matrix(is, rows[3], static_cast<Eigen::Index>(n) * n);
  return AcmpSet(std::move(d0), std::move(ca), std::move(cc));
}

void write_block(std::ostream& os, const std::string& tag, const Vector& values) {
  if (tag.size() != 4) throw Error("block tags are 4 characters");
  os.write(tag.data(), 4);
  put_le(os, static_cast<std::uint64_t>(values.size()));
  for (double v : values) put_f64(os, v);
}

Vector read_block(std::istream& is, const std::string& tag) {
  std::array<char, 4> t{};
  if (!is.read(t.data(), 4)) throw ParseError("missing '" + tag + "' block");
  if (std::string(t.data(), 4) != tag) throw ParseError("expected block '" + tag + "'");
  const auto count = get_le<std::uint64_t>(is);
  if (count > (std::uint64_t{1} << 32)) throw ParseError("block '" + tag + "' is implausibly large");
  Vector v(static_cast<Eigen::Index>(count));
  for (auto& x : v) x = get_f64(is);
  return v;
}

void save_set(const AcmpSet& set, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_set(os, set);
  if (!os) throw Error("failed writing " + path.string());
}

AcmpSet load_set(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return read_set(is);
}

}  // namespace acmp
