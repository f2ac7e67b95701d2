#include "nomsdec/alist.hpp"

#include <fstream>
#include <sstream>

namespace nomsdec {

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;

  // Next non-empty line split into integers.
  std::vector<long> next_ints(const char* what) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ss(line);
      std::vector<long> vals;
      long v;
      while (ss >> v) vals.push_back(v);
      if (!ss.eof()) {
        throw AlistError("alist line " + std::to_string(line_no) + ": non-integer token while reading " + what);
      }
      if (!vals.empty()) return vals;
    }
    throw AlistError("alist: unexpected end of input while reading " + std::string(what));
  }
};

}  // namespace

BitMatrix parse_alist(std::istream& in) {
  LineReader rd{in};

  auto header = rd.next_ints("header");
  if (header.size() != 2 || header[0] <= 0 || header[1] <= 0)
    throw AlistError("alist line " + std::to_string(rd.line_no) + ": header must be two positive integers (n m)");
  const int n = static_cast<int>(header[0]);
  const int m = static_cast<int>(header[1]);

  auto maxdeg = rd.next_ints("max degrees");
  if (maxdeg.size() != 2 || maxdeg[0] < 0 || maxdeg[1] < 0)
    throw AlistError("alist line " + std::to_string(rd.line_no) + ": expected max column and row degree");
  const long max_col = maxdeg[0], max_row = maxdeg[1];

  auto read_degrees = [&](int count, long maxd, const char* what) {
    std::vector<int> deg;
    while (static_cast<int>(deg.size()) < count) {
      for (long v : rd.next_ints(what)) {
        if (v < 0 || v > maxd)
          throw AlistError("alist line " + std::to_string(rd.line_no) + ": " + what + " " +
                           std::to_string(v) + " out of range [0," + std::to_string(maxd) + "]");
        deg.push_back(static_cast<int>(v));
      }
    }
    if (static_cast<int>(deg.size()) != count)
      throw AlistError("alist line " + std::to_string(rd.line_no) + ": too many " + what + " entries");
    return deg;
  };

  auto col_deg = read_degrees(n, max_col, "column degree");
  auto row_deg = read_degrees(m, max_row, "row degree");

  BitMatrix h(m, n);

  // Column lists: row indices per column, 1-based, optionally zero-padded.
  for (int c = 0; c < n; ++c) {
    auto vals = rd.next_ints("column index list");
    int nonzero = 0;
    for (long v : vals) {
      if (v == 0) continue;
      if (v < 1 || v > m)
        throw AlistError("alist line " + std::to_string(rd.line_no) + ": row index " +
                         std::to_string(v) + " out of range for column " + std::to_string(c + 1));
      if (h.get(static_cast<int>(v) - 1, c))
        throw AlistError("alist line " + std::to_string(rd.line_no) + ": duplicate entry in column " + std::to_string(c + 1));
      h.set(static_cast<int>(v) - 1, c, true);
      ++nonzero;
    }
    if (nonzero != col_deg[c])
      throw AlistError("alist line " + std::to_string(rd.line_no) + ": column " + std::to_string(c + 1) +
                       " lists " + std::to_string(nonzero) + " entries, declared degree " + std::to_string(col_deg[c]));
  }

  // Row lists must describe the same matrix.
  for (int r = 0; r < m; ++r) {
    auto vals = rd.next_ints("row index list");
    std::vector<uint8_t> seen(n, 0);
    int nonzero = 0;
    for (long v : vals) {
      if (v == 0) continue;
      if (v < 1 || v > n)
        throw AlistError("alist line " + std::to_string(rd.line_no) + ": column index " +
                         std::to_string(v) + " out of range for row " + std::to_string(r + 1));
      seen[v - 1] = 1;
      ++nonzero;
    }
    if (nonzero != row_deg[r])
      throw AlistError("alist line " + std::to_string(rd.line_no) + ": row " + std::to_string(r + 1) +
                       " lists " + std::to_string(nonzero) + " entries, declared degree " + std::to_string(row_deg[r]));
    for (int c = 0; c < n; ++c) {
      if (static_cast<bool>(seen[c]) != h.get(r, c))
        throw AlistError("alist line " + std::to_string(rd.line_no) + ": row view of row " + std::to_string(r + 1) +
                         " contradicts the column view at column " + std::to_string(c + 1));
    }
  }

  return h;
}

BitMatrix parse_alist_text(const std::string& text) {
  std::istringstream ss(text);
  return parse_alist(ss);
}

std::string to_alist(const BitMatrix& h) {
  const int m = h.rows(), n = h.cols();
  int max_col = 0, max_row = 0;
  for (int c = 0; c < n; ++c) max_col = std::max(max_col, h.col_weight(c));
  for (int r = 0; r < m; ++r) max_row = std::max(max_row, h.row_weight(r));

  std::ostringstream out;
  out << n << " " << m << "\n" << max_col << " " << max_row << "\n";
  for (int c = 0; c < n; ++c) out << h.col_weight(c) << (c + 1 < n ? " " : "\n");
  for (int r = 0; r < m; ++r) out << h.row_weight(r) << (r + 1 < m ? " " : "\n");
  for (int c = 0; c < n; ++c) {
    int written = 0;
    for (int r = 0; r < m; ++r) {
      if (h.get(r, c)) out << (written++ ? " " : "") << (r + 1);
    }
    for (; written < max_col; ++written) out << (written ? " " : "") << 0;
    out << "\n";
  }
  for (int r = 0; r < m; ++r) {
    int written = 0;
    for (int c = 0; c < n; ++c) {
      if (h.get(r, c)) out << (written++ ? " " : "") << (c + 1);
    }
    for (; written < max_row; ++written) out << (written ? " " : "") << 0;
    out << "\n";
  }
  return out.str();
}

LinearCode load_alist(std::istream& in, std::string name) {
  return LinearCode(parse_alist(in), std::move(name));
}

LinearCode load_alist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AlistError("cannot open alist file: " + path);
  return load_alist(in, path);
}

}  // namespace nomsdec
