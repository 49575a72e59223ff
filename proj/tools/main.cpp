#include <acmp/fock.hpp>
#include <acmp/hamiltonian.hpp>
#include <acmp/lagrangian.hpp>
#include <acmp/solver.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace acmp;

constexpr int exit_usage = 1;
constexpr int exit_unconverged = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

SeedRange parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const std::uint64_t s = std::stoull(text, &used);
      if (used != text.size()) throw UsageError("");
      return {s, s};
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    SeedRange r{std::stoull(a, &used), 0};
    if (used != a.size()) throw UsageError("");
    r.last = std::stoull(b, &used);
    if (used != b.size()) throw UsageError("");
    if (r.last < r.first) throw UsageError("");
    return r;
  } catch (const std::exception&) {
    throw UsageError("--seeds expects a non-empty range like 0..9, got '" + text + "'");
  }
}

unsigned worker_count(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ACMP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw UsageError("ACMP_THREADS must be a positive integer");
    cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(cap, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(k) for k in [0, count) on a capped worker pool; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, Fn fn) {
  const unsigned workers = worker_count(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto work = [&] {
    for (std::size_t k; (k = next++) < count;) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw Error("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw Error("failed writing " + (path.empty() ? std::string("stdout") : path));
  }

 private:
  std::ofstream file_;
};

void dump_rdms(const std::string& stem, const Rdm1& g1, const Rdm2& g2) {
  const int n = static_cast<int>(g1.rows());
  std::ofstream o1(stem + ".rdm1.txt"), o2(stem + ".rdm2.txt");
  if (!o1 || !o2) throw Error("cannot write RDM files with stem " + stem);
  o1 << "# i i' value (1-based)\n";
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      if (g1(i, ip) != 0.0) o1 << i + 1 << ' ' << ip + 1 << ' ' << fmt17(g1(i, ip)) << '\n';
  o2 << "# i i' j j' value (1-based), <c+_i c+_j a_j' a_i'>\n";
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp)
          if (const double v = g2(i, ip, j, jp); v != 0.0)
            o2 << i + 1 << ' ' << ip + 1 << ' ' << j + 1 << ' ' << jp + 1 << ' ' << fmt17(v) << '\n';
  if (!o1 || !o2) throw Error("failed writing RDM files with stem " + stem);
}

// Hamiltonian source shared by oracle and solve.
struct Source {
  std::string input;
  int n = 0;
  double two_body_scale = 1.0;

  Hamiltonian load(std::uint64_t seed) const {
    if (!input.empty()) return load_hamiltonian(input);
    if (n < 2) throw UsageError("either --input or --n >= 2 is required");
    return random_hamiltonian(n, seed, 1.0, two_body_scale);
  }
};

// ---- gen ----

struct GenConfig {
  int n = 0;
  std::uint64_t seed = 0;
  double two_body_scale = 1.0;
  std::string output;
};

int cmd_gen(const GenConfig& c) {
  if (c.n < 2) throw UsageError("--n must be at least 2");
  const Hamiltonian ham = random_hamiltonian(c.n, c.seed, 1.0, c.two_body_scale);
  Output out(c.output);
  write_hamiltonian(out.stream(), ham);
  out.finish(c.output);
  return 0;
}

// ---- oracle ----

struct OracleConfig {
  Source source;
  int particles = -1;
  std::uint64_t seed = 0;
  std::string dump_rdm;
  std::string output;
};

int cmd_oracle(const OracleConfig& c) {
  const Hamiltonian ham = c.source.load(c.seed);
  if (c.particles < 0 || c.particles > ham.n) throw UsageError("--N must be in 0..n");
  const GroundState gs = ground_state(ham, c.particles);
  Output out(c.output);
  out.stream() << fmt("%.15g", gs.energy) << '\n';
  out.finish(c.output);
  if (!c.dump_rdm.empty()) dump_rdms(c.dump_rdm, rdm1_of(gs.psi), rdm2_of(gs.psi));
  return 0;
}

// ---- solve ----

struct SolveConfig {
  Source source;
  int particles = 0;
  std::string seeds = "0";
  int max_iter = 200;
  double tol = 1e-10;
  bool symmetrized = false;
  bool no_descent = false;
  std::string resume;
  std::string dump_rdm;
  std::string output;
  std::string format = "table";
};

struct Row {
  std::uint64_t seed = 0;
  SolveReport report;
};

void write_table(std::ostream& os, const std::vector<Row>& rows) {
  auto opt = [](const std::optional<double>& v, const char* spec) { return v ? fmt(spec, *v) : std::string("-"); };
  char line[512];
  std::snprintf(line, sizeof line, "%6s %3s %3s %22s %10s %9s %9s %9s %9s %9s %9s %5s %9s  %s\n", "seed", "n", "N",
                "energy", "Energy", "1-RDM", "2-RDM", "D0", "A0", "Di", "Ai", "iter", "time[s]", "status");
  os << line;
  double sums[7] = {};
  int counts[3] = {};
  for (const Row& r : rows) {
    const SolveReport& s = r.report;
    std::snprintf(line, sizeof line, "%6llu %3d %3d %22s %10s %9s %9s %9.2e %9.2e %9.2e %9.2e %5d %9.3f  %s\n",
                  static_cast<unsigned long long>(r.seed), s.n, s.particles, fmt("%.15g", s.energy).c_str(),
                  opt(s.energy_error, "%.2e").c_str(), opt(s.rdm1_error, "%.2e").c_str(),
                  opt(s.rdm2_error, "%.2e").c_str(), s.residuals.d0_identity, s.residuals.d0_trace,
                  s.residuals.child_identity, s.residuals.child_trace, s.iterations, s.wall_seconds,
                  s.status.c_str());
    os << line;
    if (s.energy_error) sums[0] += std::abs(*s.energy_error), ++counts[0];
    if (s.rdm1_error) sums[1] += *s.rdm1_error, ++counts[1];
    if (s.rdm2_error) sums[2] += *s.rdm2_error, ++counts[2];
    sums[3] += s.residuals.d0_identity;
    sums[4] += s.residuals.d0_trace;
    sums[5] += s.residuals.child_identity;
    sums[6] += s.residuals.child_trace;
  }
  if (rows.size() < 2) return;
  const double k = static_cast<double>(rows.size());
  auto mean = [&](int i) { return counts[i] ? fmt("%.2e", sums[i] / counts[i]) : std::string("-"); };
  std::snprintf(line, sizeof line, "%6s %3s %3s %22s %10s %9s %9s %9.2e %9.2e %9.2e %9.2e\n", "mean", "", "", "",
                mean(0).c_str(), mean(1).c_str(), mean(2).c_str(), sums[3] / k, sums[4] / k, sums[5] / k,
                sums[6] / k);
  os << line;
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  os << "seed,n,N,energy,reference_energy,energy_error,rdm1_error,rdm2_error,d0_identity,d0_trace,"
        "child_identity,child_trace,gradient_norm,iterations,descent_rounds,converged,status,wall_seconds\n";
  for (const Row& r : rows) {
    const SolveReport& s = r.report;
    os << r.seed << ',' << s.n << ',' << s.particles << ',' << fmt17(s.energy) << ',' << opt(s.reference_energy) << ','
       << opt(s.energy_error) << ',' << opt(s.rdm1_error) << ',' << opt(s.rdm2_error) << ','
       << fmt17(s.residuals.d0_identity) << ',' << fmt17(s.residuals.d0_trace) << ','
       << fmt17(s.residuals.child_identity) << ',' << fmt17(s.residuals.child_trace) << ',' << fmt17(s.gradient_norm)
       << ',' << s.iterations << ',' << s.descent_rounds << ',' << (s.converged ? 1 : 0) << ',' << s.status << ','
       << fmt17(s.wall_seconds) << '\n';
  }
}

void write_jsonl(std::ostream& os, const std::vector<Row>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for (const Row& r : rows) {
    const SolveReport& s = r.report;
    nlohmann::json j = {
        {"seed", r.seed},
        {"n", s.n},
        {"N", s.particles},
        {"energy", s.energy},
        {"reference_energy", opt(s.reference_energy)},
        {"energy_error", opt(s.energy_error)},
        {"rdm1_error", opt(s.rdm1_error)},
        {"rdm2_error", opt(s.rdm2_error)},
        {"d0_identity", s.residuals.d0_identity},
        {"d0_trace", s.residuals.d0_trace},
        {"child_identity", s.residuals.child_identity},
        {"child_trace", s.residuals.child_trace},
        {"gradient_norm", s.gradient_norm},
        {"iterations", s.iterations},
        {"descent_rounds", s.descent_rounds},
        {"converged", s.converged},
        {"status", s.status},
        {"wall_seconds", s.wall_seconds},
    };
    // nlohmann writes doubles with max_digits10, enough to round-trip.
    os << j.dump() << '\n';
  }
}

int cmd_solve(const SolveConfig& c) {
  if (c.format != "table" && c.format != "csv" && c.format != "jsonl")
    throw UsageError("--format must be table, csv or jsonl");
  if (c.max_iter < 0) throw UsageError("--max-iter must be non-negative");
  if (!(c.tol > 0.0)) throw UsageError("--tol must be positive");
  const SeedRange range = parse_seeds(c.seeds);
  const std::size_t count = range.last - range.first + 1;
  if (!c.resume.empty() && count != 1) throw UsageError("--resume takes a single seed");

  SolverOptions base;
  base.max_outer = c.max_iter;
  base.gradient_tolerance = c.tol;
  base.use_symmetrized = c.symmetrized;
  base.descent.enabled = !c.no_descent;

  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t k) {
    const std::uint64_t seed = range.first + k;
    const Hamiltonian ham = c.source.load(seed);
    SolverOptions opts = base;
    opts.seed = seed;
    rows[k].seed = seed;
    if (!c.resume.empty()) {
      opts.checkpoint = std::filesystem::path(c.resume);
      if (std::filesystem::exists(*opts.checkpoint)) {
        const SolveState state = load_checkpoint(*opts.checkpoint);
        if (state.set.n() != ham.n || state.set.particles() != c.particles)
          throw Error("checkpoint " + c.resume + " belongs to a different sector");
        rows[k].report = refine(ham, state, opts);
        return;
      }
    }
    rows[k].report = solve(ham, c.particles, opts);
  });

  Output out(c.output);
  if (c.format == "table") write_table(out.stream(), rows);
  else if (c.format == "csv") write_csv(out.stream(), rows);
  else write_jsonl(out.stream(), rows);
  out.finish(c.output);

  if (!c.dump_rdm.empty()) {
    for (const Row& r : rows) {
      const std::string stem = count == 1 ? c.dump_rdm : c.dump_rdm + ".seed" + std::to_string(r.seed);
      dump_rdms(stem, rdm1_from(r.report.state.set), rdm2_from(r.report.state.set));
    }
  }
  const bool all = std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.report.converged; });
  return all ? 0 : exit_unconverged;
}

// ---- gradcheck ----

struct GradCheckConfig {
  int n = 4;
  int particles = 2;
  std::uint64_t seed = 0;
  double step = 1e-6;
  int samples = 100;
  double threshold = 1e-6;
  bool symmetrized = false;
};

int cmd_gradcheck(const GradCheckConfig& c) {
  if (c.n < 3 || c.particles < 2 || c.particles >= c.n) throw UsageError("gradcheck needs 2 <= N < n");
  if (!(c.step > 0.0)) throw UsageError("--step must be positive");
  const Hamiltonian ham = random_hamiltonian(c.n, c.seed);
  std::vector<Objective> which = {Objective::symmetrized};
  if (!c.symmetrized) which.insert(which.begin(), Objective::plain);

  bool pass = true;
  for (const Objective obj : which) {
    const Lagrangian lag(ham, c.particles, obj);
    const Vector x = random_point(lag.layout(), c.seed);
    const GradCheckReport r = grad_check(lag, x, c.step, c.samples, c.seed);
    const bool ok = r.max_relative_error <= c.threshold;
    pass = pass && ok;
    std::cout << (obj == Objective::plain ? "plain       " : "symmetrized ") << "n=" << c.n << " N=" << c.particles
              << " step=" << fmt("%.3g", c.step) << " samples=" << r.samples
              << " max_rel_error=" << fmt("%.3e", r.max_relative_error) << " worst=" << r.worst_index << ' '
              << (ok ? "PASS" : "FAIL") << '\n';
  }
  return pass ? 0 : exit_unconverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ACMP two-body density matrix solver"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* g = app.add_subcommand("gen", "write a seeded random Hamiltonian (ACMPH v1)");
  g->add_option("--n", gen.n, "orbital count")->required();
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--two-body-scale", gen.two_body_scale, "scale of the two-body entries");
  g->add_option("--output,-o", gen.output, "output path (default stdout)");

  OracleConfig oracle;
  auto* o = app.add_subcommand("oracle", "full-CI ground-state energy");
  o->add_option("--input,-i", oracle.source.input, "Hamiltonian file");
  o->add_option("--n", oracle.source.n, "orbital count for a generated Hamiltonian");
  o->add_option("--seed", oracle.seed, "seed for a generated Hamiltonian");
  o->add_option("--two-body-scale", oracle.source.two_body_scale, "two-body scale for a generated Hamiltonian");
  o->add_option("--N", oracle.particles, "particle count")->required();
  o->add_option("--dump-rdm", oracle.dump_rdm, "write <stem>.rdm1.txt and <stem>.rdm2.txt");
  o->add_option("--output,-o", oracle.output, "output path (default stdout)");

  SolveConfig sol;
  auto* s = app.add_subcommand("solve", "minimize the energy over ACMP sets");
  s->add_option("--input,-i", sol.source.input, "Hamiltonian file");
  s->add_option("--n", sol.source.n, "orbital count for generated Hamiltonians");
  s->add_option("--two-body-scale", sol.source.two_body_scale, "two-body scale for generated Hamiltonians");
  s->add_option("--N", sol.particles, "particle count")->required();
  s->add_option("--seed,--seeds", sol.seeds, "seed or inclusive range a..b");
  s->add_option("--max-iter", sol.max_iter, "Newton iteration budget");
  s->add_option("--tol", sol.tol, "gradient infinity-norm tolerance");
  s->add_flag("--symmetrized", sol.symmetrized, "use the symmetrized energy functional");
  s->add_flag("--no-descent", sol.no_descent, "skip the penalty descent, Newton from the mean-field guess");
  s->add_option("--resume", sol.resume, "checkpoint file; resumed when present, written otherwise");
  s->add_option("--dump-rdm", sol.dump_rdm, "write the final RDMs to <stem>.rdm1.txt / .rdm2.txt");
  s->add_option("--format", sol.format, "table, csv or jsonl");
  s->add_option("--output,-o", sol.output, "output path (default stdout)");

  GradCheckConfig gc;
  auto* c = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  c->add_option("--n", gc.n, "orbital count");
  c->add_option("--N", gc.particles, "particle count");
  c->add_option("--seed", gc.seed, "random seed");
  c->add_option("--step", gc.step, "central-difference step");
  c->add_option("--samples", gc.samples, "sampled coordinates");
  c->add_option("--threshold", gc.threshold, "maximum accepted relative error");
  c->add_flag("--symmetrized", gc.symmetrized, "check only the symmetrized functional");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*o) return cmd_oracle(oracle);
    if (*s) return cmd_solve(sol);
    return cmd_gradcheck(gc);
  } catch (const UsageError& e) {
    std::cerr << "acmp: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "acmp: " << e.what() << '\n';
    return exit_usage;
  }
}
