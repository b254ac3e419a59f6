#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "primepoint/errors.hpp"
#include "primepoint/ingest.hpp"
#include "primepoint/oracle.hpp"
#include "primepoint/prime_engine.hpp"
#include "primepoint/solver.hpp"

namespace primepoint::cli {

// Exit codes are total: scripts can tell a mathematical negative (3) from a
// failure (1), bad arguments (2), or an out-of-range request (4).
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kNoSolution = 3,
  kRange = 4,
};

constexpr int kTraceSchemaVersion = 1;

namespace detail {

using nlohmann::json;

inline json outcome_json(const Outcome& outcome) {
  json doc;
  doc["solutions"] = solutions_of(outcome);
  struct Visitor {
    json& doc;
    void operator()(const FixedPointOutcome& o) const {
      doc["variant"] = "fixed_point";
      doc["k_star"] = o.k_star;
      doc["is_solution"] = o.is_solution;
      if (o.n_prime) doc["n_prime"] = *o.n_prime;
    }
    void operator()(const TwoCycleOutcome& o) const {
      doc["variant"] = "two_cycle";
      doc["k_lo"] = o.k_lo;
      doc["k_hi"] = o.k_hi;
    }
    void operator()(const GapCycleOutcome& o) const {
      doc["variant"] = "gap_cycle";
      doc["k_lo"] = o.k_lo;
      doc["k_hi"] = o.k_hi;
      doc["interior_solutions"] = o.interior_solutions;
    }
    void operator()(const NegativeScanOutcome& o) const {
      doc["variant"] = "negative_scan";
      doc["k_star"] = o.k_star;
      doc["scan_upper_bound"] = o.scan_upper_bound;
    }
    void operator()(const DirectScanOutcome&) const {
      doc["variant"] = "direct_scan";
    }
  };
  std::visit(Visitor{doc}, outcome);
  return doc;
}

inline std::string join_u64(const std::vector<std::uint64_t>& xs,
                            const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(xs[i]);
  }
  return out;
}

inline std::string outcome_text(const Outcome& outcome) {
  struct Visitor {
    std::string operator()(const FixedPointOutcome& o) const {
      if (o.is_solution) return "solution k = " + std::to_string(o.k_star);
      std::string s = "no solution (fixed point k* = " +
                      std::to_string(o.k_star);
      if (o.n_prime) s += ", n' = " + std::to_string(*o.n_prime);
      return s + ")";
    }
    std::string operator()(const TwoCycleOutcome& o) const {
      return "no solution (2-cycle {" + std::to_string(o.k_lo) + "," +
             std::to_string(o.k_hi) + "})";
    }
    std::string operator()(const GapCycleOutcome& o) const {
      const std::string cyc =
          "cycle {" + std::to_string(o.k_lo) + "," + std::to_string(o.k_hi) +
          "}";
      if (o.interior_solutions.empty())
        return "no solution (" + cyc + ", interior scanned)";
      return "solution k = " + join_u64(o.interior_solutions) + " (" + cyc +
             " interior)";
    }
    std::string operator()(const NegativeScanOutcome& o) const {
      const std::string tail = "fixed point k* = " + std::to_string(o.k_star) +
                               ", scanned up to " +
                               std::to_string(o.scan_upper_bound);
      if (o.solutions.empty()) return "no solution (" + tail + ")";
      if (o.solutions.size() == 1)
        return "solution k = " + std::to_string(o.solutions.front()) + " (" +
               tail + ")";
      return "solutions k = " + join_u64(o.solutions) + " (" + tail + ")";
    }
    std::string operator()(const DirectScanOutcome& o) const {
      if (o.solutions.empty()) return "no solution (direct enumeration)";
      return "solution k = " + join_u64(o.solutions) +
             " (direct enumeration)";
    }
  };
  return std::visit(Visitor{}, outcome);
}

// Pattern column for table/batch rows: k* or {k',k''}.
inline std::string pattern_text(const SolveResult& result) {
  if (!result.trajectory) return "(enumerated)";
  if (result.trajectory->is_fixed_point())
    return std::to_string(result.trajectory->fixed_value());
  const CyclePair c = result.trajectory->cycle();
  return "{" + std::to_string(c.lo) + ", " + std::to_string(c.hi) + "}";
}

inline std::string solution_cell(const SolveResult& result) {
  if (result.trajectory && !result.trajectory->is_fixed_point() &&
      !has_solution(result.outcome))
    return "-";  // cycle, nothing in the interior
  return has_solution(result.outcome) ? "yes" : "no";
}

inline json engine_json(const PrimeEngine& engine) {
  return json{{"sieve_limit", engine.sieve_limit()},
              {"supported_max", engine.supported_max()}};
}

inline json trace_document(const SolveResult& result,
                           const PrimeEngine& engine, double engine_build_ms,
                           double solve_ms) {
  json doc;
  doc["schema_version"] = kTraceSchemaVersion;
  doc["spec"] = {{"a", result.spec.a}, {"b", result.spec.b},
                 {"n", result.spec.n}};
  doc["iterates"] = result.trajectory ? json(result.trajectory->iterates)
                                      : json::array();
  doc["iterations"] = result.iterations();
  doc["outcome"] = outcome_json(result.outcome);
  doc["timings"] = {{"engine_build_ms", engine_build_ms},
                    {"solve_ms", solve_ms}};
  doc["engine"] = engine_json(engine);
  return doc;
}

inline json row_json(const BatchRow& row) {
  json doc;
  doc["index"] = row.index;
  doc["n"] = row.n;
  switch (row.status) {
    case BatchRow::Status::Done:
      doc["status"] = "done";
      break;
    case BatchRow::Status::Skipped:
      doc["status"] = "skipped";
      break;
    case BatchRow::Status::Failed:
      doc["status"] = "failed";
      break;
  }
  if (row.result) {
    doc["iterations"] = row.result->iterations();
    doc["iterates"] = row.result->trajectory
                          ? json(row.result->trajectory->iterates)
                          : json::array();
    doc["outcome"] = outcome_json(row.result->outcome);
  }
  if (!row.note.empty()) doc["note"] = row.note;
  return doc;
}

inline int floor_log2_u64(std::uint64_t n) {
  return n == 0 ? 0 : 63 - std::countl_zero(n);
}

class Timer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

}  // namespace detail

struct CommonOptions {
  std::uint64_t sieve_limit = 0;  // 0: engine default
  bool large = false;
  bool json = false;
  unsigned threads = 0;  // 0: hardware concurrency

  EngineConfig engine_config() const {
    EngineConfig cfg = large ? EngineConfig::large_range() : EngineConfig{};
    if (sieve_limit) cfg.sieve_limit = sieve_limit;
    return cfg;
  }
};

inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
  using detail::json;

  CLI::App app{"Solve n = a*k + b*p_k (p_k the k-th prime) by fixed-point "
               "iteration on the prime counting function"};
  app.fallthrough();
  CommonOptions opts;
  app.add_option("--sieve-limit", opts.sieve_limit,
                 "Tabulated prime backend ceiling (default 10^8)")
      ->envname("PRIMEPOINT_SIEVE_LIMIT");
  app.add_flag("--large", opts.large,
               "Extend supported range to 2*10^14 (slower large queries)");
  app.add_option("--threads", opts.threads,
                 "Worker threads for batch runs (default: all cores)");

  // solve
  auto* cmd_solve = app.add_subcommand("solve", "Solve one equation");
  std::int64_t arg_a = 1, arg_b = 1;
  std::uint64_t arg_n = 0;
  bool solve_json = false;
  cmd_solve->add_option("-a", arg_a, "coefficient a (nonzero)");
  cmd_solve->add_option("-b", arg_b, "coefficient b (positive)");
  cmd_solve->add_option("-n", arg_n, "right-hand side n")->required();
  cmd_solve->add_flag("--json", solve_json, "emit the trace as JSON");

  // pi / nthprime
  auto* cmd_pi = app.add_subcommand("pi", "Count primes <= x");
  std::uint64_t arg_x = 0;
  cmd_pi->add_option("x", arg_x, "argument")->required();
  auto* cmd_nthprime = app.add_subcommand("nthprime", "The k-th prime");
  std::uint64_t arg_k = 0;
  cmd_nthprime->add_option("k", arg_k, "index (1-based)")->required();

  // oracle
  auto* cmd_oracle =
      app.add_subcommand("oracle", "Cross-check by bisection or enumeration");
  std::int64_t oracle_a = 1, oracle_b = 1;
  std::uint64_t oracle_n = 0;
  std::string oracle_method = "bisect";
  bool oracle_json = false;
  cmd_oracle->add_option("-a", oracle_a, "coefficient a");
  cmd_oracle->add_option("-b", oracle_b, "coefficient b");
  cmd_oracle->add_option("-n", oracle_n, "right-hand side n")->required();
  cmd_oracle->add_option("--method", oracle_method, "bisect or brute")
      ->check(CLI::IsMember({"bisect", "brute"}));
  cmd_oracle->add_flag("--json", oracle_json, "emit JSON");

  // table
  auto* cmd_table = app.add_subcommand(
      "table", "Fibonacci batch in the iterations/pattern/solution layout");
  std::uint64_t fib_max = 42, fib_min = 1;
  bool table_json = false;
  cmd_table->add_option("--fib-max", fib_max, "largest Fibonacci index")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{90}));
  cmd_table->add_option("--fib-min", fib_min, "smallest Fibonacci index")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{90}));
  cmd_table->add_flag("--json", table_json, "emit JSON");

  // batch
  auto* cmd_batch =
      app.add_subcommand("batch", "Solve every term of a sequence");
  std::string batch_bfile, batch_seq;
  std::uint64_t batch_max = 42;
  std::int64_t batch_a = 1, batch_b = 1;
  bool batch_pairs = false, batch_json = false;
  auto* opt_bfile = cmd_batch->add_option("--bfile", batch_bfile,
                                          "OEIS b-file (\"index value\" lines)")
                        ->check(CLI::ExistingFile);
  auto* opt_seq =
      cmd_batch->add_option("--seq", batch_seq, "builtin generator")
          ->check(CLI::IsMember({"fibonacci"}));
  opt_bfile->excludes(opt_seq);
  cmd_batch->add_option("--max", batch_max,
                        "largest index for builtin generators");
  cmd_batch->add_option("-a", batch_a, "coefficient a");
  cmd_batch->add_option("-b", batch_b, "coefficient b");
  cmd_batch->add_flag("--pairs", batch_pairs,
                      "treat consecutive terms as pairs and check both");
  cmd_batch->add_flag("--json", batch_json, "emit JSON");

  app.require_subcommand(1);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const detail::Timer build_timer;
    std::optional<PrimeEngine> engine;
    const auto get_engine = [&]() -> const PrimeEngine& {
      if (!engine) engine.emplace(opts.engine_config());
      return *engine;
    };

    if (cmd_solve->parsed()) {
      const PrimeEngine& eng = get_engine();
      const double build_ms = build_timer.elapsed_ms();
      const detail::Timer solve_timer;
      const SolveResult result = solve(eng, {arg_a, arg_b, arg_n});
      const double solve_ms = solve_timer.elapsed_ms();
      if (solve_json) {
        out << detail::trace_document(result, eng, build_ms, solve_ms).dump(2)
            << "\n";
      } else {
        out << "equation: " << arg_n << " = " << arg_a << "*k + " << arg_b
            << "*p_k\n";
        if (result.trajectory)
          out << "iterates: "
              << detail::join_u64(result.trajectory->iterates, " ") << "  ("
              << result.iterations() << " steps)\n";
        out << detail::outcome_text(result.outcome) << "\n";
      }
      return has_solution(result.outcome) ? kOk : kNoSolution;
    }

    if (cmd_pi->parsed()) {
      out << get_engine().pi(arg_x) << "\n";
      return kOk;
    }

    if (cmd_nthprime->parsed()) {
      out << get_engine().nth_prime(arg_k) << "\n";
      return kOk;
    }

    if (cmd_oracle->parsed()) {
      const PrimeEngine& eng = get_engine();
      const EquationSpec spec{oracle_a, oracle_b, oracle_n};
      if (oracle_method == "bisect") {
        const BisectionRun run = bisect(eng, spec);
        if (oracle_json) {
          json doc{{"method", "bisect"},
                   {"spec", {{"a", spec.a}, {"b", spec.b}, {"n", spec.n}}},
                   {"iterations", run.iterations},
                   {"lo", run.lo},
                   {"hi", run.hi}};
          doc["solution"] = run.solution ? json(*run.solution) : json();
          out << doc.dump(2) << "\n";
        } else if (run.solution) {
          out << "solution k = " << *run.solution << " (" << run.iterations
              << " bisection iterations)\n";
        } else {
          out << "no solution (" << run.iterations
              << " bisection iterations)\n";
        }
        return run.solution ? kOk : kNoSolution;
      }
      const auto sols = brute_solutions(eng, spec);
      if (oracle_json) {
        json doc{{"method", "brute"},
                 {"spec", {{"a", spec.a}, {"b", spec.b}, {"n", spec.n}}},
                 {"solutions", sols}};
        out << doc.dump(2) << "\n";
      } else if (sols.empty()) {
        out << "no solution (exhaustive)\n";
      } else {
        out << "solution k = " << detail::join_u64(sols) << " (exhaustive)\n";
      }
      return sols.empty() ? kNoSolution : kOk;
    }

    if (cmd_table->parsed()) {
      if (fib_min > fib_max)
        throw std::invalid_argument("--fib-min must be <= --fib-max");
      SequenceSource source = fibonacci(fib_max);
      std::erase_if(source.terms,
                    [&](const auto& t) { return t.first < fib_min; });
      const PrimeEngine& eng = get_engine();
      const BatchReport report =
          run_batch(eng, source, 1, 1, opts.threads);
      if (table_json) {
        json rows = json::array();
        for (const auto& row : report.rows) {
          json r = detail::row_json(row);
          r["floor_log2"] = detail::floor_log2_u64(row.n);
          rows.push_back(std::move(r));
        }
        out << json{{"schema_version", kTraceSchemaVersion},
                    {"source", source.name},
                    {"engine", detail::engine_json(eng)},
                    {"rows", std::move(rows)}}
                   .dump(2)
            << "\n";
      } else {
        out << std::left << std::setw(5) << "m" << std::setw(18) << "F_m"
            << std::setw(12) << "iterations" << std::setw(26)
            << "k* or {k',k''}" << std::setw(10) << "solution"
            << "floor(log2 F_m)\n";
        for (const auto& row : report.rows) {
          std::string pattern, solution, iters;
          if (row.status == BatchRow::Status::Done) {
            pattern = detail::pattern_text(*row.result);
            solution = detail::solution_cell(*row.result);
            iters = std::to_string(row.result->iterations());
          } else {
            pattern = row.note;
            solution = "-";
            iters = "-";
          }
          out << std::left << std::setw(5) << row.index << std::setw(18)
              << row.n << std::setw(12) << iters << std::setw(26) << pattern
              << std::setw(10) << solution
              << detail::floor_log2_u64(row.n) << "\n";
        }
      }
      return kOk;
    }

    if (cmd_batch->parsed()) {
      SequenceSource source;
      if (!batch_bfile.empty()) {
        std::ifstream in(batch_bfile);
        if (!in) throw std::invalid_argument("cannot open " + batch_bfile);
        source = parse_bfile(in, batch_bfile);
      } else if (!batch_seq.empty()) {
        source = fibonacci(batch_max);
      } else {
        throw std::invalid_argument("batch needs --bfile or --seq");
      }
      const PrimeEngine& eng = get_engine();

      if (batch_pairs) {
        if (source.terms.size() % 2 != 0)
          throw std::invalid_argument(
              "--pairs needs an even number of terms, got " +
              std::to_string(source.terms.size()));
        json rows = json::array();
        std::size_t both = 0;
        for (std::size_t i = 0; i + 1 < source.terms.size(); i += 2) {
          const PairCheck check =
              check_pair(eng, source.terms[i].second,
                         source.terms[i + 1].second, batch_a, batch_b);
          const char* verdict =
              check.verdict == PairVerdict::Both        ? "both"
              : check.verdict == PairVerdict::FirstOnly ? "first-only"
              : check.verdict == PairVerdict::SecondOnly ? "second-only"
                                                         : "neither";
          both += check.verdict == PairVerdict::Both;
          if (batch_json) {
            rows.push_back(json{{"m1", check.m1},
                                {"m2", check.m2},
                                {"verdict", verdict},
                                {"witnesses1", check.witnesses1},
                                {"witnesses2", check.witnesses2}});
          } else {
            out << "(" << check.m1 << ", " << check.m2 << "): " << verdict;
            if (!check.witnesses1.empty())
              out << "  k1 = " << detail::join_u64(check.witnesses1);
            if (!check.witnesses2.empty())
              out << "  k2 = " << detail::join_u64(check.witnesses2);
            out << "\n";
          }
        }
        if (batch_json)
          out << json{{"schema_version", kTraceSchemaVersion},
                      {"source", source.name},
                      {"spec", {{"a", batch_a}, {"b", batch_b}}},
                      {"pairs", std::move(rows)},
                      {"both_count", both}}
                     .dump(2)
              << "\n";
        return kOk;
      }

      const BatchReport report =
          run_batch(eng, source, batch_a, batch_b, opts.threads);
      if (batch_json) {
        json rows = json::array();
        for (const auto& row : report.rows) rows.push_back(detail::row_json(row));
        out << json{{"schema_version", kTraceSchemaVersion},
                    {"source", report.source_name},
                    {"spec", {{"a", report.a}, {"b", report.b}}},
                    {"engine", detail::engine_json(eng)},
                    {"rows", std::move(rows)},
                    {"aggregate",
                     {{"done", report.done_count()},
                      {"skipped", report.skipped_count()},
                      {"failed", report.failed_count()},
                      {"with_solution", report.solution_count()}}}}
                   .dump(2)
            << "\n";
      } else {
        out << std::left << std::setw(8) << "index" << std::setw(18) << "n"
            << std::setw(12) << "iterations" << std::setw(26) << "pattern"
            << "result\n";
        for (const auto& row : report.rows) {
          std::string pattern, verdict, iters;
          if (row.status == BatchRow::Status::Done) {
            pattern = detail::pattern_text(*row.result);
            verdict = detail::outcome_text(row.result->outcome);
            iters = std::to_string(row.result->iterations());
          } else {
            pattern = "-";
            verdict = row.note;
            iters = "-";
          }
          out << std::left << std::setw(8) << row.index << std::setw(18)
              << row.n << std::setw(12) << iters << std::setw(26) << pattern
              << verdict << "\n";
        }
        out << report.done_count() << " solved, " << report.solution_count()
            << " with solutions, " << report.skipped_count() << " skipped, "
            << report.failed_count() << " failed\n";
      }
      return kOk;
    }

    err << "error: no subcommand\n";
    return kUsage;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << "\n";
    return kRange;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainCollapse& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), std::cout, std::cerr);
}

}  // namespace primepoint::cli
