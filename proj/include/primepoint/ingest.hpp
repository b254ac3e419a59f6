#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "primepoint/errors.hpp"
#include "primepoint/prime_engine.hpp"
#include "primepoint/solver.hpp"

namespace primepoint {

// An indexed integer sequence: OEIS b-file contents or a generator's output.
struct SequenceSource {
  std::string name;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> terms;  // (index, value)
};

namespace detail {

inline std::optional<std::uint64_t> parse_u64(std::string_view tok) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.begin(), tok.end(), v);
  if (ec != std::errc{} || ptr != tok.end()) return std::nullopt;
  return v;
}

}  // namespace detail

// b-file convention: "index value" lines, '#' comment lines, blank lines.
// Indices must be strictly increasing. Malformed input reports its line.
inline SequenceSource parse_bfile(std::istream& in,
                                  const std::string& name = "bfile") {
  SequenceSource source;
  source.name = name;
  std::string line;
  std::size_t lineno = 0;
  bool have_prev = false;
  std::uint64_t prev_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string tok_index, tok_value, extra;
    if (!(fields >> tok_index)) continue;  // blank line
    if (tok_index.front() == '#') continue;
    if (!(fields >> tok_value))
      throw ParseError("expected \"index value\", got only one token", lineno);
    if (fields >> extra)
      throw ParseError("trailing token \"" + extra + "\"", lineno);
    const auto index = detail::parse_u64(tok_index);
    if (!index)
      throw ParseError("non-integer index \"" + tok_index + "\"", lineno);
    const auto value = detail::parse_u64(tok_value);
    if (!value)
      throw ParseError("non-integer value \"" + tok_value + "\"", lineno);
    if (have_prev && *index <= prev_index)
      throw ParseError("index " + std::to_string(*index) +
                           " not greater than previous " +
                           std::to_string(prev_index),
                       lineno);
    have_prev = true;
    prev_index = *index;
    source.terms.emplace_back(*index, *value);
  }
  return source;
}

inline std::string serialize_bfile(const SequenceSource& source) {
  std::string out;
  for (const auto& [index, value] : source.terms) {
    out += std::to_string(index);
    out += ' ';
    out += std::to_string(value);
    out += '\n';
  }
  return out;
}

// F_1 = F_2 = 1; indices follow the usual numbering (F_12 = 144).
// Capped at F_90, the last index comfortably inside 64 bits.
inline SequenceSource fibonacci(std::uint64_t upto_index) {
  if (upto_index < 1 || upto_index > 90)
    throw RangeError("fibonacci: index must be in [1, 90], got " +
                     std::to_string(upto_index));
  SequenceSource source;
  source.name = "fibonacci";
  std::uint64_t a = 1, b = 1;
  for (std::uint64_t m = 1; m <= upto_index; ++m) {
    source.terms.emplace_back(m, a);
    const std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return source;
}

enum class PairVerdict { Both, FirstOnly, SecondOnly, Neither };

// Are both members of a pair representable as a*k + b*p_k?
struct PairCheck {
  std::uint64_t m1 = 0;
  std::uint64_t m2 = 0;
  PairVerdict verdict = PairVerdict::Neither;
  std::vector<std::uint64_t> witnesses1;
  std::vector<std::uint64_t> witnesses2;
};

inline PairCheck check_pair(const PrimeEngine& engine, std::uint64_t m1,
                            std::uint64_t m2, std::int64_t a, std::int64_t b) {
  PairCheck check;
  check.m1 = m1;
  check.m2 = m2;
  check.witnesses1 = solutions_of(solve(engine, {a, b, m1}).outcome);
  check.witnesses2 = solutions_of(solve(engine, {a, b, m2}).outcome);
  const bool first = !check.witnesses1.empty();
  const bool second = !check.witnesses2.empty();
  check.verdict = first ? (second ? PairVerdict::Both : PairVerdict::FirstOnly)
                        : (second ? PairVerdict::SecondOnly
                                  : PairVerdict::Neither);
  return check;
}

struct BatchRow {
  enum class Status { Done, Skipped, Failed };

  std::uint64_t index = 0;
  std::uint64_t n = 0;
  Status status = Status::Done;
  std::optional<SolveResult> result;  // present when Done
  std::string note;                   // skip or failure reason
};

struct BatchReport {
  std::string source_name;
  std::int64_t a = 1;
  std::int64_t b = 1;
  std::vector<BatchRow> rows;

  std::size_t done_count() const { return count(BatchRow::Status::Done); }
  std::size_t skipped_count() const {
    return count(BatchRow::Status::Skipped);
  }
  std::size_t failed_count() const { return count(BatchRow::Status::Failed); }
  std::size_t solution_count() const {
    std::size_t c = 0;
    for (const auto& row : rows)
      if (row.result && has_solution(row.result->outcome)) ++c;
    return c;
  }

 private:
  std::size_t count(BatchRow::Status s) const {
    std::size_t c = 0;
    for (const auto& row : rows)
      if (row.status == s) ++c;
    return c;
  }
};

// Solve every term of a source. Terms above the engine range are flagged
// skipped rather than aborting; per-term errors land in their row. Rows are
// computed concurrently but the report preserves source order.
inline BatchReport run_batch(const PrimeEngine& engine,
                             const SequenceSource& source, std::int64_t a,
                             std::int64_t b, unsigned threads = 0) {
  BatchReport report;
  report.source_name = source.name;
  report.a = a;
  report.b = b;
  report.rows.resize(source.terms.size());

  const auto compute_row = [&](std::size_t i) {
    BatchRow& row = report.rows[i];
    row.index = source.terms[i].first;
    row.n = source.terms[i].second;
    if (row.n > engine.supported_max()) {
      row.status = BatchRow::Status::Skipped;
      row.note = "skipped(range): n exceeds supported_max=" +
                 std::to_string(engine.supported_max());
      return;
    }
    try {
      row.result = solve(engine, {a, b, row.n});
      row.status = BatchRow::Status::Done;
    } catch (const std::exception& e) {
      row.status = BatchRow::Status::Failed;
      row.note = e.what();
    }
  };

  unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
  nthreads = std::max(1u, std::min<unsigned>(nthreads, report.rows.size()));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < report.rows.size(); ++i) compute_row(i);
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < report.rows.size();
           i = next.fetch_add(1))
        compute_row(i);
    });
  }
  for (auto& worker : pool) worker.join();
  return report;
}

}  // namespace primepoint
