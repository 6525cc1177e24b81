#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sep/diagnostics.hpp"
#include "sep/grid.hpp"

namespace sep {

// Shortest decimal rendering that round-trips doubles exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

// Image CSV: one text row per grid row, comma-separated, no header.
inline void write_image_csv(const std::string& path, const Grid& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_image_csv: cannot open " + path);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (j) out << ',';
      out << format_double(g(i, j));
    }
    out << '\n';
  }
}

inline Grid read_image_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_image_csv: cannot open " + path);
  std::vector<double> values;
  std::size_t rows = 0, cols = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(path, lineno, "bad numeric cell '" + cell + "'");
      }
      ++row_cols;
    }
    if (cols == 0) cols = row_cols;
    if (row_cols != cols) throw ParseError(path, lineno, "ragged row");
    ++rows;
  }
  if (rows == 0) throw ParseError(path, 0, "empty image");
  return Grid(rows, cols, std::move(values));
}

// PGM P2 with maxval 65535; the affine map [min,max] -> [0,65535] is recorded
// in a comment so reads undo it to within one quantization step.
inline void write_pgm(const std::string& path, const Grid& g) {
  double lo = g[0], hi = g[0];
  for (double v : g.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P2\n# range " << format_double(lo) << ' ' << format_double(hi) << "\n"
      << g.cols() << ' ' << g.rows() << "\n65535\n";
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const long q = std::lround((g(i, j) - lo) / span * 65535.0);
      out << q << (j + 1 == g.cols() ? '\n' : ' ');
    }
  }
}

inline Grid read_pgm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2") throw ParseError(path, 1, "expected P2 magic");
  double lo = 0.0, hi = 65535.0;
  // Optional "# range lo hi" comment(s).
  in >> std::ws;
  while (in.peek() == '#') {
    std::string comment;
    std::getline(in, comment);
    std::stringstream cs(comment);
    std::string hash, tag;
    cs >> hash >> tag;
    if (tag == "range") cs >> lo >> hi;
    in >> std::ws;
  }
  std::size_t cols = 0, rows = 0;
  long maxval = 0;
  if (!(in >> cols >> rows >> maxval)) throw ParseError(path, 2, "bad PGM header");
  if (maxval <= 0) throw ParseError(path, 3, "bad maxval");
  Grid g(rows, cols);
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    long q = 0;
    if (!(in >> q)) throw ParseError(path, 4, "truncated pixel data");
    g[k] = lo + static_cast<double>(q) / static_cast<double>(maxval) * span;
  }
  return g;
}

// Chains CSV: header `chain,iter,value`, chains 1..m, iters 1..n.
inline void write_chains(const std::string& path, const ChainSet& c) {
  c.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_chains: cannot open " + path);
  out << "chain,iter,value\n";
  for (std::size_t j = 0; j < c.m(); ++j)
    for (std::size_t t = 0; t < c.n(); ++t)
      out << (j + 1) << ',' << (t + 1) << ',' << format_double(c.chains[j][t]) << '\n';
}

inline ChainSet read_chains(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_chains: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  if (line != "chain,iter,value") throw ParseError(path, 1, "missing chain,iter,value header");
  ChainSet c;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, v;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, v))
      throw ParseError(path, lineno, "expected chain,iter,value");
    try {
      const std::size_t chain = std::stoul(a);
      const std::size_t iter = std::stoul(b);
      const double value = std::stod(v);
      if (chain == 0 || iter == 0) throw std::invalid_argument("one-based indices");
      if (chain > c.chains.size()) c.chains.resize(chain);
      if (iter != c.chains[chain - 1].size() + 1)
        throw std::invalid_argument("iterations out of order");
      c.chains[chain - 1].push_back(value);
    } catch (const std::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  if (c.chains.empty()) throw ParseError(path, lineno, "no samples");
  c.validate();
  return c;
}

}  // namespace sep
