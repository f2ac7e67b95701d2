#pragma once

#include <istream>
#include <stdexcept>
#include <string>

#include "nomsdec/gf2.hpp"
#include "nomsdec/linear_code.hpp"

namespace nomsdec {

/// Parse failure; message names the offending line.
class AlistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse alist v1 text (MacKay convention, 1-based indices).
/// Throws AlistError on malformed headers, out-of-range indices, or a
/// row view that contradicts the column view.
BitMatrix parse_alist(std::istream& in);
BitMatrix parse_alist_text(const std::string& text);

/// Serialize to alist v1 text with zero-padded index lists.
std::string to_alist(const BitMatrix& h);

LinearCode load_alist(std::istream& in, std::string name);
LinearCode load_alist_file(const std::string& path);

}  // namespace nomsdec
