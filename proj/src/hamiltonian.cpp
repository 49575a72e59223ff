#include "acmp/hamiltonian.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace acmp {

Hamiltonian Hamiltonian::scaled_two_body(double s) const {
  Hamiltonian out = *this;
  out.h2 *= s;
  return out;
}

Hamiltonian random_hamiltonian(int n, std::uint64_t seed, double one_body_scale, double two_body_scale) {
  if (n < 2) throw DimensionError("random_hamiltonian needs n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Hamiltonian ham(n);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip) ham.h1(i, ip) = one_body_scale * unit(rng);
  for (double& v : ham.h2.data()) v = two_body_scale * unit(rng);

  const Matrix h = ham.h1;
  ham.h1 = 0.5 * (h + h.transpose());

  Tensor4 t = ham.h2;
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) ham.h2(i, ip, j, jp) = 0.5 * (t(i, ip, j, jp) + t(ip, i, jp, j));
  t = ham.h2;
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) ham.h2(i, ip, j, jp) = 0.5 * (t(i, ip, j, jp) + t(j, jp, i, ip));
  return ham;
}

std::vector<Violation> validate_hamiltonian(const Hamiltonian& ham, double tol) {
  std::vector<Violation> out;
  const int n = ham.n;
  if (ham.h1.rows() != n || ham.h1.cols() != n || ham.h2.n() != n) {
    out.push_back({"shape", {}, 0.0, "h1/h2 dimensions do not match n"});
    return out;
  }
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      if (!std::isfinite(ham.h1(i, ip))) out.push_back({"non-finite", {i + 1, ip + 1}, 0.0, "h1 entry is not finite"});
  for (int i = 0; i < n; ++i)
    for (int ip = i + 1; ip < n; ++ip) {
      const double d = std::abs(ham.h1(i, ip) - ham.h1(ip, i));
      if (d > tol || std::isnan(d))
        out.push_back({"h1-symmetry", {i + 1, ip + 1}, d,
                       "h1(" + std::to_string(i + 1) + "," + std::to_string(ip + 1) + ") != h1(" +
                           std::to_string(ip + 1) + "," + std::to_string(i + 1) + ")"});
    }
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) {
          const double v = ham.h2(i, ip, j, jp);
          const std::vector<int> idx{i + 1, ip + 1, j + 1, jp + 1};
          if (!std::isfinite(v)) {
            out.push_back({"non-finite", idx, 0.0, "h2 entry is not finite"});
            continue;
          }
          // Report each broken pair once, from its lexicographically smaller member.
          const std::array<int, 4> self{i, ip, j, jp};
          const std::array<int, 4> herm{ip, i, jp, j};
          const std::array<int, 4> swap{j, jp, i, ip};
          if (self < herm) {
            const double d = std::abs(v - ham.h2(ip, i, jp, j));
            if (d > tol) out.push_back({"hermiticity", idx, d, "h2(i,i',j,j') != h2(i',i,j',j)"});
          }
          if (self < swap) {
            const double d = std::abs(v - ham.h2(j, jp, i, ip));
            if (d > tol) out.push_back({"pair-swap", idx, d, "h2(i,i',j,j') != h2(j,j',i,i')"});
          }
        }
  return out;
}

Hamiltonian embed_one_body(const Hamiltonian& ham, int particles) {
  if (particles < 2) throw DimensionError("embed_one_body needs N >= 2");
  const int n = ham.n;
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += ham.h2(i, ip, j, j);
      g(i, ip) = s / (2.0 * n);
    }
  Hamiltonian out = ham;
  out.h1 += g;
  const double f = 1.0 / (2.0 * (particles - 1));
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j) {
        out.h2(i, ip, j, j) -= f * g(i, ip);
        out.h2(j, j, i, ip) -= f * g(i, ip);
      }
  return out;
}

void write_hamiltonian(std::ostream& os, const Hamiltonian& ham) {
  const int n = ham.n;
  os << "ACMPH v1\n";
  os << "n " << n << "\n";
  os << std::setprecision(17);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      if (ham.h1(i, ip) != 0.0) os << "h1 " << i + 1 << ' ' << ip + 1 << ' ' << ham.h1(i, ip) << '\n';
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp)
          if (const double v = ham.h2(i, ip, j, jp); v != 0.0)
            os << "h2 " << i + 1 << ' ' << ip + 1 << ' ' << j + 1 << ' ' << jp + 1 << ' ' << v << '\n';
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

double parse_value(std::istringstream& fields, int line) {
  std::string tok;
  if (!(fields >> tok)) parse_fail(line, "missing value field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    parse_fail(line, "value '" + tok + "' is not a number");
  }
  if (used != tok.size()) parse_fail(line, "value '" + tok + "' is not a number");
  return v;
}

int parse_index(std::istringstream& fields, int line, int n, const char* name) {
  long long k = 0;
  if (!(fields >> k)) parse_fail(line, std::string("missing or non-integer index field ") + name);
  if (k < 1 || k > n)
    parse_fail(line, std::string("index ") + name + "=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  return static_cast<int>(k - 1);
}

}  // namespace

Hamiltonian read_hamiltonian(std::istream& is) {
  std::string text;
  int line = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(is, out)) {
      ++line;
      if (const auto hash = out.find('#'); hash != std::string::npos) out.erase(hash);
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line(text)) throw ParseError("empty Hamiltonian file");
  {
    std::istringstream f(text);
    std::string magic, version;
    f >> magic >> version;
    if (magic != "ACMPH" || version != "v1") parse_fail(line, "expected header 'ACMPH v1'");
  }
  if (!next_line(text)) parse_fail(line, "missing 'n <int>' line");
  int n = 0;
  {
    std::istringstream f(text);
    std::string key;
    std::string rest;
    if (!(f >> key >> n) || key != "n" || (f >> rest)) parse_fail(line, "expected 'n <int>'");
    if (n < 1 || n > 63) parse_fail(line, "orbital count outside 1..63");
  }

  Hamiltonian ham(n);
  std::vector<char> h1_set(static_cast<std::size_t>(n) * n, 0);
  std::vector<char> h2_set(ham.h2.size(), 0);
  auto h2_flat = [n](int i, int ip, int j, int jp) {
    return ((static_cast<std::size_t>(i) * n + ip) * n + j) * n + jp;
  };

  while (next_line(text)) {
    std::istringstream f(text);
    std::string kind;
    f >> kind;
    if (kind == "h1") {
      const int i = parse_index(f, line, n, "i");
      const int ip = parse_index(f, line, n, "i'");
      const double v = parse_value(f, line);
      auto& flag = h1_set[static_cast<std::size_t>(i) * n + ip];
      if (flag && ham.h1(i, ip) != v) parse_fail(line, "conflicting duplicate h1 entry");
      ham.h1(i, ip) = v;
      flag = 1;
    } else if (kind == "h2") {
      const int i = parse_index(f, line, n, "i");
      const int ip = parse_index(f, line, n, "i'");
      const int j = parse_index(f, line, n, "j");
      const int jp = parse_index(f, line, n, "j'");
      const double v = parse_value(f, line);
      auto& flag = h2_set[h2_flat(i, ip, j, jp)];
      if (flag && ham.h2(i, ip, j, jp) != v) parse_fail(line, "conflicting duplicate h2 entry");
      ham.h2(i, ip, j, jp) = v;
      flag = 1;
    } else {
      parse_fail(line, "unknown record '" + kind + "'");
    }
    std::string extra;
    if (f >> extra) parse_fail(line, "trailing field '" + extra + "'");
  }

  // Symmetry completion: unlisted partners of listed entries inherit their value.
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      if (h1_set[static_cast<std::size_t>(i) * n + ip] && !h1_set[static_cast<std::size_t>(ip) * n + i])
        ham.h1(ip, i) = ham.h1(i, ip);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) {
          if (!h2_set[h2_flat(i, ip, j, jp)]) continue;
          const double v = ham.h2(i, ip, j, jp);
          const std::array<std::array<int, 4>, 3> partners{{{ip, i, jp, j}, {j, jp, i, ip}, {jp, j, ip, i}}};
          for (const auto& p : partners)
            if (!h2_set[h2_flat(p[0], p[1], p[2], p[3])]) ham.h2(p[0], p[1], p[2], p[3]) = v;
        }

  if (const auto bad = validate_hamiltonian(ham); !bad.empty()) {
    std::string idx;
    for (int k : bad.front().indices) idx += (idx.empty() ? "" : ",") + std::to_string(k);
    throw ParseError("Hamiltonian violates " + bad.front().kind + " at (" + idx + "): " + bad.front().message);
  }
  return ham;
}

void save_hamiltonian(const Hamiltonian& ham, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_hamiltonian(os, ham);
  if (!os) throw Error("failed writing " + path.string());
}

Hamiltonian load_hamiltonian(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  try {
    return read_hamiltonian(is);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace acmp
