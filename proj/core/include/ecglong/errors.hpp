#pragma once

#include <stdexcept>
#include <string>

namespace ecglong {

enum class Errc {
  out_of_bounds,
  too_short,
  no_beats_found,
  empty_input,
  insufficient_data,
  insufficient_beats,
  length_mismatch,
  missing_descriptor,
  duplicate_id,
  label_empty,
  schema_mismatch,
  unknown_feature,
  zero_reference,
  rr_too_short,
  single_class,
  too_few_rows,
  too_few_beats,
  empty_test_set,
  parse_error,
  invalid_config,
};

// Single exception type for the whole library; the code discriminates the
// failure so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ecglong
