// Command-line front end: gen, approx, verify, sweep.
#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cheblr/alternance.hpp"
#include "cheblr/altmin.hpp"
#include "cheblr/baselines.hpp"
#include "cheblr/errors.hpp"
#include "cheblr/matgen.hpp"
#include "cheblr/matrix_io.hpp"
#include "cheblr/rng.hpp"
#include "cheblr/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cheblr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerifyFail = 3;
constexpr int kExitUsage = 64;
constexpr int kSchemaVersion = 1;
constexpr const char* kSweepHeader = "rank,cam_min,cam_median,cam_max,svd_error,wall_ms,error";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError: return kExitIo;
    case ErrorCode::InvalidArgument: return kExitUsage;
    default: return kExitSolver;
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Source {
  Matrix m;
  std::string descriptor;
};

// A path that exists is read as a file (PGM by extension, else matrix
// formats); otherwise the text must be a generator descriptor.
Source load_source(const std::string& src) {
  if (fs::exists(src)) {
    const std::string ext = fs::path(src).extension().string();
    if (ext == ".pgm" || ext == ".PGM") return {load_image_pgm(src), "image:" + src};
    return {read_matrix(src), src};
  }
  if (src.find(':') == std::string::npos) throw IoError("no such file: " + src);
  const GeneratorSpec spec = GeneratorSpec::parse(src);
  return {spec.generate(), spec.to_string()};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file_atomic(path, text);
  }
}

MatrixFormat parse_format(const std::string& f, const std::string& path) {
  if (f == "csv") return MatrixFormat::Csv;
  if (f == "mm" || f == "matrixmarket") return MatrixFormat::MatrixMarket;
  return format_from_path(path);
}

std::string render_matrix(const Matrix& m, MatrixFormat f) {
  return f == MatrixFormat::Csv ? format_csv(m) : format_matrix_market(m);
}

json options_json(const AltMinOptions& o) {
  return {{"max_iter", o.max_iter},
          {"rel_tol", o.rel_tol},
          {"window", o.window},
          {"renormalize", o.renormalize},
          {"warm_start", o.warm_start}};
}

json alternance_json(const AlternanceReport& r, bool with_witnesses) {
  json j{{"pass", r.pass},
         {"tol", r.tol},
         {"rank", r.rank},
         {"max_err", r.extreme.max_err},
         {"zero_residual", r.zero_residual},
         {"extreme_count", r.extreme.entries.size()},
         {"certified_count", r.certified.size()},
         {"removed_cells", r.removed_cells},
         {"rounds", r.rounds},
         {"degenerate_subsets", r.degenerate_subsets},
         {"truncated", r.truncated},
         {"deficient_rows", r.deficient_rows},
         {"deficient_cols", r.deficient_cols},
         {"note", r.note}};
  if (with_witnesses) {
    json ws = json::array();
    for (const AlternanceWitness& w : r.witnesses)
      ws.push_back({{"i", w.i},
                    {"j", w.j},
                    {"J", w.cols},
                    {"J_signs", w.col_signs},
                    {"I", w.rows},
                    {"I_signs", w.row_signs}});
    j["witnesses"] = std::move(ws);
  }
  return j;
}

void require_rank(std::size_t rank, const Matrix& a) {
  if (a.rows() < 2 || a.cols() < 2)
    throw UsageError("matrix must have more than one row and column");
  if (rank < 1 || rank >= std::min(a.rows(), a.cols()))
    throw UsageError("rank must satisfy 1 <= rank < min(m, n) = " +
                     std::to_string(std::min(a.rows(), a.cols())));
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::string path;
  std::string out;
  std::string format;
};

int cmd_gen(const GenArgs& g) {
  GeneratorSpec spec;
  if (g.kind == "hilbert") spec = GeneratorSpec::parse("hilbert:" + std::to_string(g.n));
  else if (g.kind == "identity") spec = GeneratorSpec::parse("identity:" + std::to_string(g.n));
  else if (g.kind == "kernel")
    spec = GeneratorSpec::parse("kernel:" + std::to_string(g.n) + ":" + std::to_string(g.dim) +
                                ":" + std::to_string(g.seed));
  else spec = GeneratorSpec::parse("image:" + g.path);
  const Matrix m = spec.generate();
  emit(render_matrix(m, parse_format(g.format, g.out)), g.out);
  return kExitOk;
}

// ---- approx -------------------------------------------------------------

struct ApproxArgs {
  std::string input;
  std::size_t rank = 1;
  std::size_t restarts = 20;
  std::uint64_t seed = 0;
  std::size_t max_iter = 200;
  double rel_tol = 1e-6;
  bool no_renormalize = false;
  std::string u_out, v_out, report;
  bool verify = false;
  double tol = kIterativeTol;
};

int cmd_approx(const ApproxArgs& args) {
  const Source src = load_source(args.input);
  require_rank(args.rank, src.m);
  if (args.restarts < 1) throw UsageError("--restarts must be at least 1");

  AltMinOptions opts;
  opts.max_iter = args.max_iter;
  opts.rel_tol = args.rel_tol;
  opts.renormalize = !args.no_renormalize;

  const auto t0 = std::chrono::steady_clock::now();
  json report{{"schema_version", kSchemaVersion},
              {"tool", "cheblr"},
              {"version", kVersion},
              {"command", "approx"},
              {"input", src.descriptor},
              {"shape", {src.m.rows(), src.m.cols()}},
              {"rank", args.rank},
              {"restarts", args.restarts},
              {"seed", args.seed},
              {"rng", kRngName},
              {"options", options_json(opts)}};

  MultiRestartResult res;
  try {
    res = multi_restart(src.m, args.rank, args.restarts, args.seed, opts);
  } catch (const AllRestartsFailed& e) {
    std::cerr << "cheblr approx: " << e.what() << '\n';
    return kExitSolver;
  }

  json runs = json::array();
  for (const RestartRecord& r : res.runs) {
    json jr{{"index", r.index}, {"seed", r.seed}, {"ok", r.ok}};
    if (r.ok) {
      jr["error"] = r.error;
      jr["iterations"] = r.iterations;
      jr["converged"] = r.converged;
    } else {
      jr["failure"] = r.failure;
    }
    runs.push_back(std::move(jr));
  }
  report["runs"] = std::move(runs);
  report["failures"] = res.failures;
  report["best_index"] = res.best_index;
  report["best_error"] = res.min_error;
  report["median_error"] = res.median_error;
  report["max_error"] = res.max_error;
  report["iterations"] = res.best.iterations;
  report["converged"] = res.best.converged;
  report["degenerate_solves"] = res.best.degenerate_solves;

  if (args.verify) {
    const Matrix u = phi(src.m, res.best.v);
    const AlternanceReport alt = check_2way_alternance(src.m, u, res.best.v, args.tol);
    report["alternance"] = alternance_json(alt, false);
  }
  if (!args.u_out.empty()) write_matrix(res.best.u, args.u_out);
  if (!args.v_out.empty()) write_matrix(res.best.v, args.v_out);
  report["wall_ms"] = ms_since(t0);
  emit(report.dump(2) + "\n", args.report);
  return kExitOk;
}

// ---- verify -------------------------------------------------------------

struct VerifyArgs {
  std::string input, u_path, v_path;
  double tol = kIterativeTol;
  std::string map;
  std::string report;
  bool witnesses = false;
};

int cmd_verify(const VerifyArgs& args) {
  const Source src = load_source(args.input);
  const Matrix u = read_matrix(args.u_path);
  const Matrix v = read_matrix(args.v_path);
  if (u.rows() != src.m.rows() || v.rows() != src.m.cols() || u.cols() != v.cols())
    throw UsageError("dimension mismatch: A is " + std::to_string(src.m.rows()) + "x" +
                     std::to_string(src.m.cols()) + ", U is " + std::to_string(u.rows()) +
                     "x" + std::to_string(u.cols()) + ", V is " + std::to_string(v.rows()) +
                     "x" + std::to_string(v.cols()));
  if (!(args.tol >= 0.0 && args.tol < 1.0)) throw UsageError("--tol must lie in [0, 1)");

  const AlternanceReport rep = check_2way_alternance(src.m, u, v, args.tol);
  json out{{"schema_version", kSchemaVersion},
           {"tool", "cheblr"},
           {"version", kVersion},
           {"command", "verify"},
           {"input", src.descriptor},
           {"alternance", alternance_json(rep, args.witnesses)}};
  if (!args.map.empty()) export_alternance_map(rep, args.map);
  emit(out.dump(2) + "\n", args.report);
  if (!rep.pass) {
    std::cerr << "cheblr verify: no 2-way alternance of rank " << rep.rank;
    if (!rep.deficient_rows.empty()) {
      std::cerr << "; deficient rows:";
      for (std::size_t i : rep.deficient_rows) std::cerr << ' ' << i;
    }
    if (!rep.deficient_cols.empty()) {
      std::cerr << "; deficient columns:";
      for (std::size_t j : rep.deficient_cols) std::cerr << ' ' << j;
    }
    std::cerr << '\n';
    return kExitVerifyFail;
  }
  return kExitOk;
}

// ---- sweep --------------------------------------------------------------

struct SweepArgs {
  std::string input;
  std::string ranks = "1:8";
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  std::size_t max_iter = 200;
  double rel_tol = 1e-6;
  bool svd = false;
  std::string out;
};

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  std::size_t lo = 0, hi = 0;
  char sep = 0;
  std::istringstream in(s);
  if (!(in >> lo)) throw UsageError("bad rank range '" + s + "'");
  if (in >> sep) {
    if (sep != ':' || !(in >> hi)) throw UsageError("bad rank range '" + s + "'");
  } else {
    hi = lo;
  }
  std::string rest;
  if (in >> rest) throw UsageError("bad rank range '" + s + "'");
  if (lo < 1 || hi < lo) throw UsageError("rank range must satisfy 1 <= lo <= hi");
  return {lo, hi};
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_sweep(const SweepArgs& args) {
  const Source src = load_source(args.input);
  const auto [lo, hi] = parse_range(args.ranks);
  require_rank(hi, src.m);
  if (args.restarts < 1) throw UsageError("--restarts must be at least 1");

  AltMinOptions opts;
  opts.max_iter = args.max_iter;
  opts.rel_tol = args.rel_tol;

  const bool to_stdout = args.out.empty() || args.out == "-";
  std::string csv = std::string(kSweepHeader) + "\n";
  if (to_stdout) std::cout << csv << std::flush;
  bool any_failed = false;

  for (std::size_t r = lo; r <= hi; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string row = std::to_string(r) + ",";
    try {
      const MultiRestartResult res = multi_restart(src.m, r, args.restarts, args.seed, opts);
      row += fmt(res.min_error) + "," + fmt(res.median_error) + "," + fmt(res.max_error) + ",";
      if (args.svd) row += fmt(truncated_svd(src.m, r).cheb_error);
      row += "," + fmt(ms_since(t0)) + ",";
    } catch (const Error& e) {
      any_failed = true;
      row = std::to_string(r) + ",,,,," + fmt(ms_since(t0)) + "," + csv_quote(e.what());
    }
    row += "\n";
    csv += row;
    if (to_stdout) std::cout << row << std::flush;
  }
  if (!to_stdout) write_file_atomic(args.out, csv);
  return any_failed ? kExitSolver : kExitOk;
}

void apply_thread_override() {
  const char* env = std::getenv("CHEBLR_NUM_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "cheblr: ignoring invalid CHEBLR_NUM_THREADS='" << env << "'\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_override();

  CLI::App app{"Chebyshev-norm low-rank approximation by alternating minimization"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a test matrix");
  g->add_option("kind", gen.kind, "hilbert | identity | kernel | image")
      ->required()
      ->check(CLI::IsMember({"hilbert", "identity", "kernel", "image"}));
  g->add_option("--n", gen.n, "Matrix size");
  g->add_option("--dim", gen.dim, "Sphere dimension (kernel)");
  g->add_option("--seed", gen.seed, "Seed (kernel)");
  g->add_option("--path", gen.path, "Source PGM (image)");
  g->add_option("-o,--out", gen.out, "Output file (stdout if omitted)");
  g->add_option("--format", gen.format, "mm | csv (default: from extension)")
      ->check(CLI::IsMember({"mm", "matrixmarket", "csv"}));

  ApproxArgs ap;
  auto* a = app.add_subcommand("approx", "Best-of-restarts alternating minimization");
  a->add_option("matrix", ap.input, "Matrix file or generator descriptor (e.g. hilbert:64)")
      ->required();
  a->add_option("--rank", ap.rank, "Target rank")->required();
  a->add_option("--restarts", ap.restarts, "Random restarts")->capture_default_str();
  a->add_option("--seed", ap.seed, "Base seed")->capture_default_str();
  a->add_option("--max-iter", ap.max_iter, "Iteration cap per restart")->capture_default_str();
  a->add_option("--rel-tol", ap.rel_tol, "Relative improvement over 5 iterations")
      ->capture_default_str();
  a->add_flag("--no-renormalize", ap.no_renormalize, "Skip per-iteration rescaling");
  a->add_option("--u", ap.u_out, "Write U here");
  a->add_option("--v", ap.v_out, "Write V here");
  a->add_option("--report", ap.report, "Write the JSON run report here (stdout if omitted)");
  a->add_flag("--verify", ap.verify, "Also check the 2-way alternance of the best pair");
  a->add_option("--tol", ap.tol, "Extreme-set tolerance for --verify")->capture_default_str();

  VerifyArgs vf;
  auto* v = app.add_subcommand("verify", "Check the 2-way alternance certificate");
  v->add_option("matrix", vf.input, "Matrix file or generator descriptor")->required();
  v->add_option("u", vf.u_path, "U factor file")->required();
  v->add_option("v", vf.v_path, "V factor file")->required();
  v->add_option("--tol", vf.tol, "Extreme-set tolerance")->capture_default_str();
  v->add_option("--map", vf.map, "Write the alternance map (PPM) here");
  v->add_option("--report", vf.report, "Write the JSON report here (stdout if omitted)");
  v->add_flag("--witnesses", vf.witnesses, "Include every witness in the report");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Rank sweep with restart statistics (CSV)");
  s->add_option("matrix", sw.input, "Matrix file or generator descriptor")->required();
  s->add_option("--ranks", sw.ranks, "Rank range lo:hi")->capture_default_str();
  s->add_option("--restarts", sw.restarts, "Restarts per rank")->capture_default_str();
  s->add_option("--seed", sw.seed, "Base seed")->capture_default_str();
  s->add_option("--max-iter", sw.max_iter, "Iteration cap per restart")->capture_default_str();
  s->add_option("--rel-tol", sw.rel_tol, "Relative improvement over 5 iterations")
      ->capture_default_str();
  s->add_flag("--svd", sw.svd, "Add the truncated-SVD Chebyshev error");
  s->add_option("-o,--out", sw.out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "gen") {
      if (gen.kind == "image" ? gen.path.empty() : gen.n == 0)
        throw UsageError(gen.kind == "image" ? "--path is required" : "--n is required");
      if (gen.kind == "kernel" && gen.dim == 0) throw UsageError("--dim is required");
      return cmd_gen(gen);
    }
    if (name == "approx") return cmd_approx(ap);
    if (name == "verify") return cmd_verify(vf);
    return cmd_sweep(sw);
  } catch (const UsageError& e) {
    std::cerr << "cheblr " << name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "cheblr " << name << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "cheblr " << name << ": " << e.what() << '\n';
    return kExitIo;
  }
}
